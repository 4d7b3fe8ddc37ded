use crate::error::{Error, Result};
use crate::real::Real;
use crate::signal::{argmax, Spectrogram};

/// Level span mapped onto [0, 1] by [`ThresholdScale::Decibel`].
pub const DEFAULT_DISPLAY_RANGE_DB: f64 = 80.0;

/// How a stop ratio is compared against a bin's level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdScale<T> {
    /// Ratio of the bin's energy to the global peak energy.
    Linear,
    /// Ratio on a level display spanning `range_db` below the global peak,
    /// so a ratio r stops at `(r - 1) * range_db` dB.
    Decibel { range_db: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialThresholds<T> {
    pub fundamental: T,
    pub harmonic: T,
    pub scale: ThresholdScale<T>,
}

impl<T: Real> Default for PartialThresholds<T> {
    fn default() -> Self {
        Self {
            fundamental: T::lit(0.7),
            harmonic: T::lit(0.5),
            scale: ThresholdScale::Decibel {
                range_db: T::lit(DEFAULT_DISPLAY_RANGE_DB),
            },
        }
    }
}

impl<T: Real> PartialThresholds<T> {
    /// Whether `magnitude` (relative to global `peak`) is below `ratio`.
    fn below(&self, ratio: T, magnitude: T, peak: T) -> bool {
        if peak <= T::zero() || magnitude <= T::zero() {
            return true;
        }
        let rel = magnitude / peak;
        match self.scale {
            ThresholdScale::Linear => rel * rel < ratio,
            ThresholdScale::Decibel { range_db } => {
                T::one() + T::lit(20.0) * rel.log10() / range_db < ratio
            }
        }
    }

    /// Stop level in dB relative to the global peak.
    pub fn stop_level_db(&self, ratio: T) -> T {
        match self.scale {
            ThresholdScale::Linear => T::lit(10.0) * ratio.log10(),
            ThresholdScale::Decibel { range_db } => (ratio - T::one()) * range_db,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialPoint<T> {
    pub time: T,
    pub frequency: T,
    pub magnitude: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialTrack<T> {
    pub harmonic_index: usize,
    pub points: Vec<PartialPoint<T>>,
    /// Start time of the first frame below threshold (or the end of the
    /// analysed span when the partial never drops below it).
    pub stop_time: T,
}

impl<T: Real> PartialTrack<T> {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Follows harmonics 1..=n_harmonics of a sound starting at `f0`, frame
/// by frame. The fundamental follows the strongest bin within a quartertone
/// of its previous frequency; harmonic k searches within a quartertone of
/// k times the concurrent fundamental. Each track ends at the first frame
/// whose level falls below its stop ratio of the global spectrogram peak.
pub fn track_partials<T: Real>(
    spec: &Spectrogram<T>,
    f0: T,
    n_harmonics: usize,
    thresholds: &PartialThresholds<T>,
) -> Result<Vec<PartialTrack<T>>> {
    let nyquist = T::from_u32(spec.sample_rate()).unwrap() / T::lit(2.0);
    if !(f0 > T::zero()) || n_harmonics == 0 {
        return Err(Error::domain("partial tracking", "f0 and harmonic count must be positive"));
    }
    if f0 * T::from_usize_lossy(n_harmonics) >= nyquist {
        return Err(Error::domain(
            "partial tracking",
            format!("harmonic {n_harmonics} of {f0} Hz is above Nyquist"),
        ));
    }
    let quartertone = T::lit(2.0f64.powf(1.0 / 24.0));
    let bin_width = spec.bin_width();
    let last_bin = spec.n_bins() - 1;
    // Strongest bin within a quartertone of `center`, widened to the two
    // bins bracketing the interval when it is narrower than a bin.
    let search = |frame: usize, center: T| -> (T, T) {
        let lo = (center / quartertone / bin_width).floor().to_usize().unwrap_or(0);
        let hi = (center * quartertone / bin_width)
            .ceil()
            .to_usize()
            .unwrap_or(last_bin)
            .min(last_bin);
        if lo > hi {
            return (center, T::zero());
        }
        let row = &spec.frames()[frame][lo..=hi];
        let b = lo + argmax(row).unwrap_or(0);
        spec.interpolated_peak(frame, b)
    };

    // Full paths first, so truncation never changes where a partial is
    // looked for.
    let n_frames = spec.n_frames();
    let mut fundamental: Vec<(T, T)> = Vec::with_capacity(n_frames);
    let mut previous = f0;
    for frame in 0..n_frames {
        let (f, m) = search(frame, previous);
        fundamental.push((f, m));
        if m > T::zero() {
            previous = f;
        }
    }

    let peak = spec.global_peak();
    let end_time = spec.frame_time(n_frames);
    Ok((1..=n_harmonics)
        .map(|k| {
            let ratio = if k == 1 {
                thresholds.fundamental
            } else {
                thresholds.harmonic
            };
            let mut points = Vec::new();
            let mut stop_time = end_time;
            for frame in 0..n_frames {
                let (f, m) = if k == 1 {
                    fundamental[frame]
                } else {
                    search(frame, fundamental[frame].0 * T::from_usize_lossy(k))
                };
                if thresholds.below(ratio, m, peak) {
                    stop_time = spec.frame_time(frame);
                    break;
                }
                points.push(PartialPoint {
                    time: spec.frame_time(frame),
                    frequency: f,
                    magnitude: m,
                });
            }
            PartialTrack {
                harmonic_index: k,
                points,
                stop_time,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{stft, AudioClip, StftConfig};
    use crate::voice::{synth_voice, VoiceParams};

    fn spectrogram(clip: &AudioClip<f64>) -> Spectrogram<f64> {
        let c = StftConfig::for_sample_rate(clip.sample_rate());
        stft(clip, c.window_size, c.hop, c.window).unwrap()
    }

    fn voice(drive: f64) -> AudioClip<f64> {
        synth_voice(&VoiceParams {
            drive,
            ..VoiceParams::long_default()
        })
        .unwrap()
    }

    fn tracks(drive: f64, thresholds: &PartialThresholds<f64>) -> Vec<PartialTrack<f64>> {
        track_partials(&spectrogram(&voice(drive)), 49.48 * 1.06, 5, thresholds).unwrap()
    }

    #[test]
    fn default_display_thresholds() {
        let t = PartialThresholds::<f64>::default();
        assert!((t.stop_level_db(t.fundamental) + 24.0).abs() < 1e-9);
        assert!((t.stop_level_db(t.harmonic) + 40.0).abs() < 1e-9);
        let lin = PartialThresholds { scale: ThresholdScale::Linear, ..t };
        assert!((lin.stop_level_db(0.5) + 3.0103).abs() < 1e-3);
    }

    #[test]
    fn pure_sine_has_one_track() {
        let sr = 44100;
        let s = (0..2 * sr)
            .map(|i| (std::f64::consts::TAU * 60.0 * i as f64 / sr as f64).sin())
            .collect();
        let clip = AudioClip::new(s, sr as u32).unwrap();
        let t = track_partials(&spectrogram(&clip), 60.0, 5, &PartialThresholds::default()).unwrap();
        assert_eq!(t.iter().filter(|p| !p.is_empty()).count(), 1);
        assert!(!t[0].is_empty());
        for p in &t[0].points {
            assert!((p.frequency - 60.0).abs() < 0.5);
        }
        assert!(t[1..].iter().all(|p| p.stop_time == 0.0));
    }

    #[test]
    fn undriven_harmonics_stop_before_the_fundamental() {
        let t = tracks(0.0, &PartialThresholds::default());
        assert!(t[0].stop_time > 0.5);
        for h in &t[1..] {
            assert!(h.stop_time < t[0].stop_time);
        }
    }

    #[test]
    fn drive_extends_harmonics() {
        let mut previous: Option<Vec<f64>> = None;
        for drive in [0.0, 2.0, 3.0, 4.0] {
            let t = tracks(drive, &PartialThresholds::default());
            let stops: Vec<f64> = t[1..].iter().map(|h| h.stop_time).collect();
            if let Some(prev) = &previous {
                for (a, b) in prev.iter().zip(&stops) {
                    assert!(b > a, "drive {drive}: {stops:?} vs {prev:?}");
                }
            }
            previous = Some(stops);
        }
    }

    #[test]
    fn harmonic_frequencies_follow_the_fundamental() {
        let t = tracks(4.0, &PartialThresholds::default());
        let spec_width = 44100.0 / 8192.0;
        for h in &t[1..] {
            for p in &h.points {
                let f1 = t[0]
                    .points
                    .iter()
                    .find(|q| q.time == p.time)
                    .map(|q| q.frequency)
                    .unwrap_or(49.48);
                assert!((p.frequency - h.harmonic_index as f64 * f1).abs() < spec_width);
            }
        }
    }

    #[test]
    fn lowering_a_threshold_never_shortens_a_track() {
        let spec = spectrogram(&voice(3.0));
        let mut last: Option<Vec<f64>> = None;
        for r in [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3] {
            let th = PartialThresholds { fundamental: r, harmonic: r, ..Default::default() };
            let stops: Vec<f64> = track_partials(&spec, 52.0, 5, &th)
                .unwrap()
                .iter()
                .map(|t| t.stop_time)
                .collect();
            if let Some(prev) = &last {
                assert!(stops.iter().zip(prev).all(|(a, b)| a >= b));
            }
            last = Some(stops);
        }
    }

    #[test]
    fn rejects_partials_above_nyquist() {
        let spec = spectrogram(&voice(0.0));
        assert!(track_partials(&spec, 5000.0, 5, &PartialThresholds::default()).is_err());
    }
}
