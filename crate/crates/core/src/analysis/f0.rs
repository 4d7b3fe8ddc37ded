use crate::error::{Error, Result};
use crate::real::{db_to_power, median, Real};
use crate::signal::{argmax, bin_range, interpolate_peak, AudioClip, SpectrumEngine, Window};

use super::SEARCH_BAND_HZ;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Point<T> {
    pub time: T,
    pub f0: T,
    /// Linear power at the f0 peak.
    pub energy: T,
}

/// Time-ordered fundamental-frequency estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Track<T> {
    points: Vec<F0Point<T>>,
}

impl<T: Real> F0Track<T> {
    pub fn new(points: Vec<F0Point<T>>) -> Result<Self> {
        for p in &points {
            if !(p.f0 > T::zero() && p.f0.is_finite()) {
                return Err(Error::domain("f0 track", format!("f0 must be positive, got {}", p.f0)));
            }
            if !(p.energy >= T::zero() && p.energy.is_finite()) {
                return Err(Error::domain("f0 track", format!("energy must be non-negative, got {}", p.energy)));
            }
        }
        if points.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::domain("f0 track", "times must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[F0Point<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn quarter(&self) -> usize {
        self.points.len().div_ceil(4).max(1)
    }

    /// Median f0 of the final 25% of points.
    pub fn steady_f0(&self) -> Option<T> {
        let n = self.points.len();
        let tail: Vec<T> = self.points[n - self.quarter().min(n)..]
            .iter()
            .map(|p| p.f0)
            .collect();
        median(&tail)
    }

    /// Highest f0 among the first 25% of points.
    pub fn early_peak_f0(&self) -> Option<T> {
        self.points[..self.quarter().min(self.points.len())]
            .iter()
            .map(|p| p.f0)
            .reduce(T::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Config<T> {
    /// Analysis window length in seconds.
    pub window: T,
    /// Hop between windows in seconds.
    pub hop: T,
    pub search_band: (T, T),
    /// Windows whose in-band energy falls this far below the loudest
    /// window are omitted.
    pub gate_db: T,
    /// FFT size is at least this multiple of the window length.
    pub zero_pad: usize,
    pub taper: Window,
}

impl<T: Real> Default for F0Config<T> {
    fn default() -> Self {
        Self {
            window: T::lit(0.2),
            hop: T::lit(0.05),
            search_band: (T::lit(SEARCH_BAND_HZ.0), T::lit(SEARCH_BAND_HZ.1)),
            gate_db: T::lit(-60.0),
            zero_pad: 4,
            taper: Window::Hann,
        }
    }
}

impl<T: Real> F0Config<T> {
    fn validate(&self) -> Result<()> {
        if !(self.window > T::zero()) {
            return Err(Error::domain("window", "must be positive"));
        }
        if !(self.hop > T::zero()) {
            return Err(Error::domain("hop", "must be positive"));
        }
        let (lo, hi) = self.search_band;
        if !(lo > T::zero() && hi > lo) {
            return Err(Error::domain("search band", format!("[{lo}, {hi}] Hz is not a valid band")));
        }
        if self.zero_pad == 0 {
            return Err(Error::domain("zero pad", "must be at least 1"));
        }
        Ok(())
    }
}

/// Windowed spectral-peak f0 track. Each point is stamped at its window
/// center.
pub fn estimate_f0_track<T: Real>(clip: &AudioClip<T>, config: &F0Config<T>) -> Result<F0Track<T>> {
    config.validate()?;
    let sr = T::from_u32(clip.sample_rate()).unwrap();
    let win = (config.window * sr).round().to_usize().unwrap_or(0).max(2);
    let hop = (config.hop * sr).round().to_usize().unwrap_or(0).max(1);
    let samples = clip.samples();
    if samples.len() < win {
        return Err(Error::InsufficientSignal {
            needed: win,
            got: samples.len(),
        });
    }
    let fft_size = (win * config.zero_pad).next_power_of_two();
    let bin_width = sr / T::from_usize_lossy(fft_size);
    let n_bins = fft_size / 2 + 1;
    let (lo, hi) = bin_range(config.search_band.0, config.search_band.1, bin_width, n_bins)
        .ok_or_else(|| Error::domain("search band", "contains no FFT bins"))?;
    let taper: Vec<T> = config.taper.coefficients(win);
    let mut engine = SpectrumEngine::new(fft_size);
    let n_frames = 1 + (samples.len() - win) / hop;

    struct Frame<T> {
        time: T,
        band_energy: T,
        total_energy: T,
        peak: Option<(T, T)>,
    }
    let half_win = T::from_usize_lossy(win) / (T::lit(2.0) * sr);
    let frames: Vec<Frame<T>> = (0..n_frames)
        .map(|k| {
            let start = k * hop;
            let mags = engine.magnitudes(&samples[start..start + win], &taper);
            let band = &mags[lo..=hi];
            let band_energy = band.iter().map(|&m| m * m).sum();
            let total_energy = mags.iter().map(|&m| m * m).sum();
            let peak = argmax(band).map(|i| {
                let (offset, mag) = interpolate_peak(&mags, lo + i);
                ((T::from_usize_lossy(lo + i) + offset) * bin_width, mag * mag)
            });
            Frame {
                time: T::from_usize_lossy(start) / sr + half_win,
                band_energy,
                total_energy,
                peak,
            }
        })
        .collect();

    let loudest = frames.iter().map(|f| f.total_energy).fold(T::zero(), T::max);
    let gate = loudest * db_to_power(config.gate_db);
    let points: Vec<F0Point<T>> = frames
        .into_iter()
        .filter(|f| loudest > T::zero() && f.band_energy >= gate && f.band_energy > T::zero())
        .filter_map(|f| {
            f.peak
                .filter(|&(f0, _)| f0 > T::zero())
                .map(|(f0, energy)| F0Point { time: f.time, f0, energy })
        })
        .collect();
    if points.is_empty() {
        return Err(Error::NoFundamental);
    }
    F0Track::new(points)
}

/// Cycle-resolved f0 track from zero-crossing half periods. Each point is
/// stamped at the middle of its half cycle, with the mean-square level of
/// that half cycle as energy. Half cycles outside `search_band`, or more
/// than `gate_db` below the loudest one, are dropped.
///
/// Resolves the early pitch sweep, which a 0.2 s window smears out.
pub fn cycle_f0_track<T: Real>(clip: &AudioClip<T>, search_band: (T, T), gate_db: T) -> Result<F0Track<T>> {
    let x = clip.samples();
    let sr = T::from_u32(clip.sample_rate()).unwrap();
    let mut crossings: Vec<T> = Vec::new();
    for i in 0..x.len() {
        let exact = x[i] == T::zero() && (i == 0 || x[i - 1] != T::zero());
        if exact {
            crossings.push(T::from_usize_lossy(i));
        } else if i + 1 < x.len() && x[i] * x[i + 1] < T::zero() {
            crossings.push(T::from_usize_lossy(i) + x[i] / (x[i] - x[i + 1]));
        }
    }
    let two = T::lit(2.0);
    let mut points: Vec<F0Point<T>> = crossings
        .windows(2)
        .filter_map(|w| {
            let period = two * (w[1] - w[0]) / sr;
            let f0 = period.recip();
            if f0 < search_band.0 || f0 > search_band.1 {
                return None;
            }
            let a = w[0].ceil().to_usize()?;
            let b = (w[1].floor().to_usize()? + 1).min(x.len());
            let energy = if b > a {
                x[a..b].iter().map(|&s| s * s).sum::<T>() / T::from_usize_lossy(b - a)
            } else {
                T::zero()
            };
            Some(F0Point {
                time: (w[0] + w[1]) / (two * sr),
                f0,
                energy,
            })
        })
        .collect();
    let loudest = points.iter().map(|p| p.energy).fold(T::zero(), T::max);
    let gate = loudest * db_to_power(gate_db);
    points.retain(|p| loudest > T::zero() && p.energy >= gate);
    if points.is_empty() {
        return Err(Error::NoFundamental);
    }
    F0Track::new(points)
}

/// Initial pitch sweep in semitones: highest f0 among the first 25% of
/// points relative to the median of the last 25%.
pub fn sweep_range<T: Real>(track: &F0Track<T>) -> Result<T> {
    if track.len() < 2 {
        return Err(Error::InsufficientSignal {
            needed: 2,
            got: track.len(),
        });
    }
    let early = track.early_peak_f0().unwrap();
    let steady = track.steady_f0().unwrap();
    Ok(T::lit(12.0) * (early / steady).log2())
}
