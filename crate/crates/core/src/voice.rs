//! Behavioral model of an 808-style bass drum: an exponentially decaying
//! sinusoid whose pitch starts above its resting value and settles
//! exponentially, optionally driven through a saturating waveshaper.

use crate::advisor::SpectralProfile;
use crate::data;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::signal::{AudioClip, MIN_SAMPLE_RATE};

/// Resting fundamental of the bundled driven profile.
pub const REFERENCE_F0_HZ: f64 = 49.48;

/// Output peak after normalization.
pub const PEAK_LEVEL: f64 = 0.9;

/// DC offset inside the waveshaper; gives the saturation an asymmetric
/// (even-harmonic) component.
pub const SHAPER_BIAS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoiceParams<T> {
    /// Resting fundamental in Hz.
    pub f0_end: T,
    /// Initial pitch above `f0_end`, in semitones.
    pub sweep_semitones: T,
    /// Time for the pitch to settle (three time constants), in seconds.
    pub sweep_duration: T,
    /// Time for the amplitude to fall by 60 dB, in seconds.
    pub amp_decay_time: T,
    /// Waveshaper drive; 0 leaves a pure swept sine.
    pub drive: T,
    pub duration: T,
    pub sample_rate: u32,
}

impl<T: Real> VoiceParams<T> {
    /// A long, undriven voice at 49.48 Hz with a one-semitone sweep.
    pub fn long_default() -> Self {
        Self {
            f0_end: T::lit(REFERENCE_F0_HZ),
            sweep_semitones: T::one(),
            sweep_duration: T::lit(0.4),
            amp_decay_time: T::lit(2.0),
            drive: T::zero(),
            duration: T::lit(3.0),
            sample_rate: 44100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |what: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(what, format!("must be positive, got {v}")))
            }
        };
        let non_negative = |what: &'static str, v: T| {
            if v >= T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(what, format!("must be non-negative, got {v}")))
            }
        };
        positive("f0_end", self.f0_end)?;
        non_negative("sweep_semitones", self.sweep_semitones)?;
        non_negative("sweep_duration", self.sweep_duration)?;
        positive("amp_decay_time", self.amp_decay_time)?;
        non_negative("drive", self.drive)?;
        positive("duration", self.duration)?;
        if self.duration <= self.sweep_duration {
            return Err(Error::domain(
                "duration",
                format!(
                    "must exceed sweep_duration ({} s), got {} s",
                    self.sweep_duration, self.duration
                ),
            ));
        }
        if self.sample_rate < MIN_SAMPLE_RATE {
            return Err(Error::out_of_range(
                "sample rate",
                self.sample_rate as f64,
                MIN_SAMPLE_RATE as f64,
                f64::INFINITY,
            ));
        }
        let nyquist = T::from_u32(self.sample_rate).unwrap() / T::lit(2.0);
        if self.start_frequency() >= nyquist {
            return Err(Error::domain(
                "f0_end",
                format!("initial pitch {} Hz is above Nyquist", self.start_frequency()),
            ));
        }
        Ok(())
    }

    pub fn start_frequency(&self) -> T {
        self.f0_end * (self.sweep_semitones / T::lit(12.0)).exp2()
    }

    fn sweep_time_constant(&self) -> T {
        self.sweep_duration / T::lit(3.0)
    }

    /// Programmed instantaneous frequency at time `t`.
    pub fn instantaneous_frequency(&self, t: T) -> T {
        let tau = self.sweep_time_constant();
        if tau <= T::zero() {
            return self.f0_end;
        }
        self.f0_end + (self.start_frequency() - self.f0_end) * (-t / tau).exp()
    }

    /// Oscillator phase in radians at time `t` (integral of the frequency).
    pub fn phase(&self, t: T) -> T {
        let tau = self.sweep_time_constant();
        let excess = self.start_frequency() - self.f0_end;
        let sweep = if tau > T::zero() {
            excess * tau * (T::one() - (-t / tau).exp())
        } else {
            T::zero()
        };
        T::TAU() * (self.f0_end * t + sweep)
    }

    /// Linear amplitude envelope, 1 at t = 0.
    pub fn envelope(&self, t: T) -> T {
        (-t * T::lit(1000.0_f64.ln()) / self.amp_decay_time).exp()
    }

    /// Copy with the resting pitch moved by `semitones`.
    pub fn transposed(&self, semitones: T) -> Self {
        Self {
            f0_end: self.f0_end * (semitones / T::lit(12.0)).exp2(),
            ..*self
        }
    }
}

/// Smooth saturating waveshaper with unit slope at the origin and
/// `shape(0) = 0`.
fn waveshape<T: Real>(x: T, drive: T) -> T {
    if drive <= T::zero() {
        return x;
    }
    let bias = T::lit(SHAPER_BIAS);
    let offset = (drive * bias).tanh();
    let slope = drive * (T::one() - offset * offset);
    ((drive * (x + bias)).tanh() - offset) / slope
}

/// Renders the voice, peak-normalized to [`PEAK_LEVEL`].
pub fn synth_voice<T: Real>(p: &VoiceParams<T>) -> Result<AudioClip<T>> {
    p.validate()?;
    let sr = T::from_u32(p.sample_rate).unwrap();
    let n = (p.duration * sr).round().to_usize().unwrap_or(0).max(1);
    let mut samples: Vec<T> = (0..n)
        .map(|i| {
            let t = T::from_usize_lossy(i) / sr;
            waveshape(p.envelope(t) * p.phase(t).sin(), p.drive)
        })
        .collect();
    let peak = samples.iter().fold(T::zero(), |acc, s| acc.max(s.abs()));
    if peak > T::zero() {
        let gain = T::lit(PEAK_LEVEL) / peak;
        samples.iter_mut().for_each(|s| *s = *s * gain);
    }
    AudioClip::new(samples, p.sample_rate)
}

/// The bundled five-partial profile of a driven voice at 49.48 Hz.
pub fn reference_driven_profile<T: Real>() -> SpectralProfile<T> {
    SpectralProfile::parse_table(
        "driven_profile.csv",
        data::DRIVEN_PROFILE_CSV,
        T::lit(REFERENCE_F0_HZ),
    )
    .expect("bundled driven profile is valid")
}
