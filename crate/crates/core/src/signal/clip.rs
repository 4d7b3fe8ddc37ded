use std::path::Path;

use crate::error::{Error, Result};
use crate::real::Real;

/// Lowest sample rate accepted for analysis.
pub const MIN_SAMPLE_RATE: u32 = 8000;

/// A mono buffer of samples in normalized full scale (±1.0).
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip<T> {
    samples: Vec<T>,
    sample_rate: u32,
}

impl<T: Real> AudioClip<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Result<Self> {
        if sample_rate < MIN_SAMPLE_RATE {
            return Err(Error::out_of_range(
                "sample rate",
                sample_rate as f64,
                MIN_SAMPLE_RATE as f64,
                f64::INFINITY,
            ));
        }
        if samples.is_empty() {
            return Err(Error::domain("audio clip", "no samples"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::domain(
                "audio clip",
                format!("non-finite sample at index {i}"),
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Builds a clip by averaging interleaved channels.
    pub fn from_interleaved(interleaved: &[T], channels: usize, sample_rate: u32) -> Result<Self> {
        if channels == 0 {
            return Err(Error::domain("audio clip", "zero channels"));
        }
        let scale = T::one() / T::from_usize_lossy(channels);
        let mono = interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().copied().sum::<T>() * scale)
            .collect();
        Self::new(mono, sample_rate)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.samples.len()) / T::from_u32(self.sample_rate).unwrap()
    }

    pub fn peak(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |acc, s| acc.max(s.abs()))
    }

    pub fn rms(&self) -> T {
        let energy: T = self.samples.iter().map(|&s| s * s).sum();
        (energy / T::from_usize_lossy(self.samples.len())).sqrt()
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// Reads a linear-PCM WAV file (16/24-bit integer or 32-bit float),
    /// averaging channels to mono.
    pub fn read_wav(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let wav_err = |source| Error::Wav {
            path: path.to_path_buf(),
            source,
        };
        let mut reader = hound::WavReader::open(path).map_err(wav_err)?;
        let spec = reader.spec();
        let interleaved: Vec<T> = match (spec.sample_format, spec.bits_per_sample) {
            (hound::SampleFormat::Int, bits @ (16 | 24)) => {
                let scale = 1.0 / (1u32 << (bits - 1)) as f64;
                reader
                    .samples::<i32>()
                    .map(|s| s.map(|v| T::lit(v as f64 * scale)))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(wav_err)?
            }
            (hound::SampleFormat::Float, 32) => reader
                .samples::<f32>()
                .map(|s| s.map(|v| T::lit(v as f64)))
                .collect::<std::result::Result<_, _>>()
                .map_err(wav_err)?,
            (format, bits) => {
                return Err(Error::domain(
                    "wav format",
                    format!(
                        "{}: unsupported {bits}-bit {format:?}; expected 16/24-bit integer or 32-bit float",
                        path.display()
                    ),
                ))
            }
        };
        Self::from_interleaved(&interleaved, spec.channels as usize, spec.sample_rate)
    }

    /// Writes the clip as a mono 32-bit float WAV file.
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let wav_err = |source| Error::Wav {
            path: path.to_path_buf(),
            source,
        };
        let mut writer = hound::WavWriter::create(path, spec).map_err(wav_err)?;
        for &s in &self.samples {
            writer
                .write_sample(s.to_f32().unwrap_or(0.0))
                .map_err(wav_err)?;
        }
        writer.finalize().map_err(wav_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_clips() {
        assert!(AudioClip::<f64>::new(vec![], 44100).is_err());
        assert!(AudioClip::new(vec![0.0_f64; 10], 4000).is_err());
        assert!(AudioClip::new(vec![0.0, f64::NAN], 44100).is_err());
        assert!(AudioClip::new(vec![0.5_f32; 4], 8000).is_ok());
    }

    #[test]
    fn averages_channels() {
        let clip = AudioClip::from_interleaved(&[1.0_f64, 0.0, 0.5, 0.5], 2, 8000).unwrap();
        assert_eq!(clip.samples(), &[0.5, 0.5]);
    }

    #[test]
    fn wav_round_trip_float() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let clip = AudioClip::new(vec![0.25_f64, -0.5, 0.0, 0.75], 22050).unwrap();
        clip.write_wav(&path).unwrap();
        let back = AudioClip::<f64>::read_wav(&path).unwrap();
        assert_eq!(back.sample_rate(), 22050);
        assert_eq!(back.samples(), clip.samples());
    }

    #[test]
    fn reads_16_and_24_bit_stereo() {
        let dir = tempfile::tempdir().unwrap();
        for bits in [16u16, 24] {
            let path = dir.path().join(format!("s{bits}.wav"));
            let spec = hound::WavSpec {
                channels: 2,
                sample_rate: 48000,
                bits_per_sample: bits,
                sample_format: hound::SampleFormat::Int,
            };
            let full = (1i32 << (bits - 1)) / 2;
            let mut w = hound::WavWriter::create(&path, spec).unwrap();
            for _ in 0..8 {
                w.write_sample(full).unwrap();
                w.write_sample(0).unwrap();
            }
            w.finalize().unwrap();
            let clip = AudioClip::<f64>::read_wav(&path).unwrap();
            assert_eq!(clip.len(), 8);
            assert!(clip.samples().iter().all(|&s| (s - 0.25).abs() < 1e-9));
        }
    }

    #[test]
    fn rejects_8_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s8.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        w.write_sample(3i8).unwrap();
        w.finalize().unwrap();
        assert!(matches!(
            AudioClip::<f64>::read_wav(&path),
            Err(Error::Domain { .. })
        ));
    }
}
