use crate::error::{Error, Result};
use crate::real::{power_to_db, Real};
use crate::signal::{stft, AudioClip, Window};

/// Band-energy onset gate: an onset is a frame whose band energy is within
/// `threshold_db` of the loudest frame and at least `rise_db` above the
/// previous frame, no sooner than `min_gap` after the last onset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsetConfig<T> {
    pub band: (T, T),
    pub window_size: usize,
    pub hop: usize,
    pub threshold_db: T,
    pub rise_db: T,
    pub min_gap: T,
}

impl<T: Real> Default for OnsetConfig<T> {
    fn default() -> Self {
        Self {
            band: (T::lit(20.0), T::lit(120.0)),
            window_size: 2048,
            hop: 256,
            threshold_db: T::lit(-20.0),
            rise_db: T::lit(6.0),
            min_gap: T::lit(0.1),
        }
    }
}

/// Onset times in seconds (frame start times).
pub fn detect_onsets<T: Real>(clip: &AudioClip<T>, config: &OnsetConfig<T>) -> Result<Vec<T>> {
    let spec = stft(clip, config.window_size, config.hop, Window::Hann)?;
    let (lo, hi) = spec
        .bin_range(config.band.0, config.band.1)
        .ok_or_else(|| Error::domain("onset band", "contains no bins"))?;
    let energy: Vec<T> = spec
        .frames()
        .iter()
        .map(|f| f[lo..=hi].iter().map(|&m| m * m).sum())
        .collect();
    let loudest = energy.iter().copied().fold(T::zero(), T::max);
    if loudest <= T::zero() {
        return Ok(Vec::new());
    }
    let floor = T::min_positive_value();
    let level: Vec<T> = energy.iter().map(|&e| power_to_db(e.max(floor) / loudest)).collect();
    let mut onsets: Vec<T> = Vec::new();
    for k in 0..level.len() {
        let previous = if k == 0 { T::neg_infinity() } else { level[k - 1] };
        let t = spec.frame_time(k);
        let spaced = onsets.last().map_or(true, |&last| t - last >= config.min_gap);
        if level[k] >= config.threshold_db && level[k] - previous >= config.rise_db && spaced {
            onsets.push(t);
        }
    }
    Ok(onsets)
}
