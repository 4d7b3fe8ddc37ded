use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::real::Real;

use super::clip::AudioClip;

/// Taper applied to each analysis frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Hamming,
    Blackman,
    Rectangular,
}

impl Window {
    /// Periodic (DFT-even) coefficients of length `n`.
    pub fn coefficients<T: Real>(self, n: usize) -> Vec<T> {
        let two_pi = T::TAU();
        let len = T::from_usize_lossy(n);
        (0..n)
            .map(|i| {
                let x = two_pi * T::from_usize_lossy(i) / len;
                match self {
                    Window::Hann => T::lit(0.5) - T::lit(0.5) * x.cos(),
                    Window::Hamming => T::lit(0.54) - T::lit(0.46) * x.cos(),
                    Window::Blackman => {
                        T::lit(0.42) - T::lit(0.5) * x.cos() + T::lit(0.08) * (x + x).cos()
                    }
                    Window::Rectangular => T::one(),
                }
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Blackman => "blackman",
            Window::Rectangular => "rectangular",
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(Window::Hann),
            "hamming" => Ok(Window::Hamming),
            "blackman" => Ok(Window::Blackman),
            "rect" | "rectangular" | "boxcar" => Ok(Window::Rectangular),
            other => Err(Error::domain(
                "window",
                format!("unknown taper '{other}' (hann, hamming, blackman, rectangular)"),
            )),
        }
    }
}

/// Frame length, hop and taper of a short-time transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftConfig {
    pub window_size: usize,
    pub hop: usize,
    pub window: Window,
}

impl StftConfig {
    /// About 0.19 s per frame (8192 samples at 44.1 kHz), rounded to a power
    /// of two, with a quarter-frame hop.
    pub fn for_sample_rate(sample_rate: u32) -> Self {
        let target = 8192.0 / 44100.0 * sample_rate as f64;
        let window_size = 1usize << target.log2().round().max(4.0) as u32;
        Self {
            window_size,
            hop: window_size / 4,
            window: Window::Hann,
        }
    }
}

/// Magnitude short-time spectrum, one row per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram<T> {
    frames: Vec<Vec<T>>,
    window_size: usize,
    hop: usize,
    sample_rate: u32,
    window: Window,
    window_power: T,
}

/// Magnitude short-time Fourier transform. Frames start at sample 0 and
/// advance by `hop`; the final frame is zero-padded.
pub fn stft<T: Real>(
    clip: &AudioClip<T>,
    window_size: usize,
    hop: usize,
    window: Window,
) -> Result<Spectrogram<T>> {
    if window_size < 2 {
        return Err(Error::domain("window size", "must be at least 2 samples"));
    }
    if hop == 0 {
        return Err(Error::domain("hop", "must be at least 1 sample"));
    }
    let samples = clip.samples();
    if samples.len() < window_size {
        return Err(Error::InsufficientSignal {
            needed: window_size,
            got: samples.len(),
        });
    }
    let taper: Vec<T> = window.coefficients(window_size);
    let window_power: T = taper.iter().map(|&w| w * w).sum();
    let n_frames = 1 + (samples.len() - window_size).div_ceil(hop);
    let mut engine = SpectrumEngine::new(window_size);
    let frames = (0..n_frames)
        .map(|k| {
            let start = k * hop;
            let end = (start + window_size).min(samples.len());
            engine.magnitudes(&samples[start..end], &taper)
        })
        .collect();
    Ok(Spectrogram {
        frames,
        window_size,
        hop,
        sample_rate: clip.sample_rate(),
        window,
        window_power,
    })
}

impl<T: Real> Spectrogram<T> {
    pub fn frames(&self) -> &[Vec<T>] {
        &self.frames
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn n_bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Start time of frame `k` in seconds.
    pub fn frame_time(&self, k: usize) -> T {
        T::from_usize_lossy(k * self.hop) / T::from_u32(self.sample_rate).unwrap()
    }

    pub fn bin_width(&self) -> T {
        T::from_u32(self.sample_rate).unwrap() / T::from_usize_lossy(self.window_size)
    }

    pub fn bin_frequency(&self, bin: usize) -> T {
        T::from_usize_lossy(bin) * self.bin_width()
    }

    pub fn magnitude(&self, frame: usize, bin: usize) -> T {
        self.frames[frame][bin]
    }

    /// Largest magnitude over every frame and bin.
    pub fn global_peak(&self) -> T {
        self.frames
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &m| acc.max(m))
    }

    /// Bin with the largest magnitude whose center lies in `[lo_hz, hi_hz]`.
    pub fn peak_bin(&self, frame: usize, lo_hz: T, hi_hz: T) -> Option<usize> {
        let (lo, hi) = self.bin_range(lo_hz, hi_hz)?;
        argmax(&self.frames[frame][lo..=hi]).map(|i| i + lo)
    }

    /// Quadratic (log-magnitude) interpolated frequency and magnitude of the
    /// peak at `bin`.
    pub fn interpolated_peak(&self, frame: usize, bin: usize) -> (T, T) {
        let (offset, mag) = interpolate_peak(&self.frames[frame], bin);
        ((T::from_usize_lossy(bin) + offset) * self.bin_width(), mag)
    }

    /// Inclusive bin index range covering `[lo_hz, hi_hz]`, if non-empty.
    pub fn bin_range(&self, lo_hz: T, hi_hz: T) -> Option<(usize, usize)> {
        bin_range(lo_hz, hi_hz, self.bin_width(), self.n_bins())
    }

    /// Signal energy estimated from the frames (overlap-normalized Parseval sum).
    pub fn energy(&self) -> T {
        let n = self.window_size;
        let two = T::lit(2.0);
        let total: T = self
            .frames
            .iter()
            .map(|frame| {
                frame
                    .iter()
                    .enumerate()
                    .map(|(k, &m)| {
                        let p = m * m;
                        if k == 0 || (n % 2 == 0 && k == n / 2) {
                            p
                        } else {
                            two * p
                        }
                    })
                    .sum::<T>()
            })
            .sum();
        total / T::from_usize_lossy(n) * T::from_usize_lossy(self.hop) / self.window_power
    }
}

/// Reusable forward FFT of a fixed size producing one-sided magnitudes.
pub(crate) struct SpectrumEngine<T: Real> {
    fft: Arc<dyn Fft<T>>,
    buffer: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> SpectrumEngine<T> {
    pub(crate) fn new(fft_size: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            fft,
            buffer: vec![Complex::default(); fft_size],
            scratch,
        }
    }

    /// Tapers `segment` (shorter segments are zero-padded to the taper
    /// length, longer FFT sizes zero-pad after the taper) and returns
    /// `fft_size/2 + 1` magnitudes.
    pub(crate) fn magnitudes(&mut self, segment: &[T], taper: &[T]) -> Vec<T> {
        self.transform(segment, taper);
        let half = self.buffer.len() / 2;
        self.buffer[..=half].iter().map(|c| c.norm()).collect()
    }

    pub(crate) fn powers(&mut self, segment: &[T], taper: &[T]) -> Vec<T> {
        self.transform(segment, taper);
        let half = self.buffer.len() / 2;
        self.buffer[..=half].iter().map(|c| c.norm_sqr()).collect()
    }

    fn transform(&mut self, segment: &[T], taper: &[T]) {
        for (i, slot) in self.buffer.iter_mut().enumerate() {
            let x = if i < taper.len() && i < segment.len() {
                segment[i] * taper[i]
            } else {
                T::zero()
            };
            *slot = Complex::new(x, T::zero());
        }
        self.fft
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
    }
}

pub(crate) fn bin_range<T: Real>(
    lo_hz: T,
    hi_hz: T,
    bin_width: T,
    n_bins: usize,
) -> Option<(usize, usize)> {
    let lo = (lo_hz / bin_width).ceil().max(T::zero()).to_usize()?;
    let hi = (hi_hz / bin_width).floor().to_usize()?.min(n_bins - 1);
    (lo <= hi).then_some((lo, hi))
}

pub(crate) fn argmax<T: Real>(values: &[T]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, T)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Parabolic interpolation through the log magnitudes around `bin`.
/// Returns the fractional bin offset in `[-0.5, 0.5]` and the interpolated
/// linear magnitude.
pub(crate) fn interpolate_peak<T: Real>(mags: &[T], bin: usize) -> (T, T) {
    let center = mags[bin];
    if bin == 0 || bin + 1 >= mags.len() {
        return (T::zero(), center);
    }
    let floor = T::min_positive_value();
    let (a, b, c) = (
        mags[bin - 1].max(floor).ln(),
        center.max(floor).ln(),
        mags[bin + 1].max(floor).ln(),
    );
    let denom = a - b - b + c;
    if denom >= T::zero() {
        return (T::zero(), center);
    }
    let half = T::lit(0.5);
    let offset = (half * (a - c) / denom).max(-half).min(half);
    let peak = b - T::lit(0.25) * (a - c) * offset;
    (offset, peak.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, sr: u32, seconds: f64) -> AudioClip<f64> {
        let n = (seconds * sr as f64) as usize;
        let samples = (0..n)
            .map(|i| (std::f64::consts::TAU * freq * i as f64 / sr as f64).sin())
            .collect();
        AudioClip::new(samples, sr).unwrap()
    }

    #[test]
    fn default_config_matches_44k() {
        let c = StftConfig::for_sample_rate(44100);
        assert_eq!((c.window_size, c.hop), (8192, 2048));
        assert_eq!(StftConfig::for_sample_rate(22050).window_size, 4096);
        assert_eq!(StftConfig::for_sample_rate(48000).window_size, 8192);
    }

    #[test]
    fn shape_and_padding() {
        let clip = sine(50.0, 8000, 1.0);
        let spec = stft(&clip, 1024, 300, Window::Hann).unwrap();
        assert_eq!(spec.n_bins(), 513);
        // (8000 - 1024) / 300 = 23.25 -> 24 hops plus the first frame
        assert_eq!(spec.n_frames(), 25);
        assert!(spec.frames().iter().all(|f| f.len() == 513));
        assert!((spec.frame_time(4) - 4.0 * 300.0 / 8000.0).abs() < 1e-12);
    }

    #[test]
    fn peak_bin_tracks_50hz_every_frame() {
        let clip = sine(50.0, 44100, 1.0);
        let spec = stft(&clip, 8192, 2048, Window::Hann).unwrap();
        let nearest = (50.0 / spec.bin_width()).round() as usize;
        for k in 0..spec.n_frames() {
            assert_eq!(spec.peak_bin(k, 0.0, 22050.0), Some(nearest), "frame {k}");
        }
    }

    #[test]
    fn zero_clip_gives_zero_magnitudes() {
        let clip = AudioClip::new(vec![0.0_f64; 5000], 8000).unwrap();
        let spec = stft(&clip, 512, 128, Window::Hann).unwrap();
        assert!(spec.frames().iter().flatten().all(|&m| m == 0.0));
        assert_eq!(spec.global_peak(), 0.0);
    }

    #[test]
    fn short_clip_is_insufficient() {
        let clip = AudioClip::new(vec![0.1_f64; 100], 8000).unwrap();
        assert!(matches!(
            stft(&clip, 256, 64, Window::Hann),
            Err(Error::InsufficientSignal { needed: 256, got: 100 })
        ));
        assert!(stft(&clip, 64, 0, Window::Hann).is_err());
    }

    #[test]
    fn window_names_parse() {
        assert_eq!("Hann".parse::<Window>().unwrap(), Window::Hann);
        assert_eq!("boxcar".parse::<Window>().unwrap(), Window::Rectangular);
        assert!("kaiser".parse::<Window>().is_err());
    }

    #[test]
    fn interpolation_is_exact_for_a_parabola_in_log_domain() {
        // log-magnitude parabola with vertex at bin 3.3
        let mags: Vec<f64> = (0..7)
            .map(|k| (-(k as f64 - 3.3).powi(2)).exp())
            .collect();
        let (offset, peak) = interpolate_peak(&mags, 3);
        assert!((offset - 0.3).abs() < 1e-12);
        assert!((peak - 1.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let samples: Vec<f32> = (0..4096)
            .map(|i| (std::f32::consts::TAU * 1000.0 * i as f32 / 8000.0).sin())
            .collect();
        let clip = AudioClip::new(samples, 8000).unwrap();
        let spec = stft(&clip, 1024, 256, Window::Hann).unwrap();
        let bin = spec.peak_bin(0, 0.0, 4000.0).unwrap();
        let (f, _) = spec.interpolated_peak(0, bin);
        assert!((f - 1000.0).abs() < 1.0);
    }

    /// Direct evaluation of the windowed DFT sum at one bin.
    fn dft_magnitude(x: &[f64], taper: &[f64], bin: usize) -> f64 {
        let n = taper.len();
        let (mut re, mut im) = (0.0, 0.0);
        for i in 0..n {
            let v = x.get(i).copied().unwrap_or(0.0) * taper[i];
            let arg = -std::f64::consts::TAU * (bin * i) as f64 / n as f64;
            re += v * arg.cos();
            im += v * arg.sin();
        }
        re.hypot(im)
    }

    #[test]
    fn matches_direct_dft_and_locates_the_tone() {
        let sr = 44100;
        let x: Vec<f64> = (0..3 * sr)
            .map(|i| 0.7 * (std::f64::consts::TAU * 49.48 * i as f64 / sr as f64 + 0.3).sin())
            .collect();
        let clip = AudioClip::new(x.clone(), sr as u32).unwrap();
        let spec = stft(&clip, 8192, 2048, Window::Hann).unwrap();
        let taper: Vec<f64> = Window::Hann.coefficients(8192);
        for frame in [0, 7, spec.n_frames() - 1] {
            let start = frame * 2048;
            let end = (start + 8192).min(x.len());
            for bin in [0, 5, 9, 10, 11, 40] {
                let want = dft_magnitude(&x[start..end], &taper, bin);
                let got = spec.magnitude(frame, bin);
                assert!((got - want).abs() <= 1e-9 * want.max(1.0), "frame {frame} bin {bin}");
            }
        }
        for frame in 0..spec.n_frames() - 1 {
            let b = spec.peak_bin(frame, 25.0, 120.0).unwrap();
            let (f, _) = spec.interpolated_peak(frame, b);
            assert!((f - 49.48).abs() < 0.2, "frame {frame}: {f}");
        }
    }

    #[test]
    fn energy_follows_parseval() {
        let sr = 44100;
        let x: Vec<f64> = (0..4 * sr)
            .map(|i| {
                let t = i as f64 / sr as f64;
                (std::f64::consts::TAU * 55.0 * t).sin() + 0.5 * (std::f64::consts::TAU * 1234.5 * t).cos()
            })
            .collect();
        let clip = AudioClip::new(x.clone(), sr as u32).unwrap();
        let spec = stft(&clip, 4096, 1024, Window::Hann).unwrap();
        let direct: f64 = x.iter().map(|v| v * v).sum();
        assert!((spec.energy() / direct - 1.0).abs() < 0.02, "{} vs {direct}", spec.energy());
    }
}
