//! Sub-bass drum transposition analysis.
//!
//! Models an 808-style bass drum, measures its pitch and partials, and
//! estimates how much perceived level is lost when the drum is transposed
//! on typical near-field monitors (loudspeaker response combined with
//! ISO 226:2003 equal-loudness contours).
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for common use.

pub mod advisor;
pub mod analysis;
pub mod corpus;
pub mod data;
pub mod error;
pub mod monitors;
pub mod perception;
pub mod real;
pub mod signal;
pub mod voice;

pub use error::{Error, Result};
pub use real::Real;

pub type AudioClipF64 = signal::AudioClip<f64>;
pub type AudioClipF32 = signal::AudioClip<f32>;
pub type SpectrogramF64 = signal::Spectrogram<f64>;
pub type SpectrogramF32 = signal::Spectrogram<f32>;
pub type VoiceParamsF64 = voice::VoiceParams<f64>;
pub type VoiceParamsF32 = voice::VoiceParams<f32>;
pub type F0TrackF64 = analysis::F0Track<f64>;
pub type F0TrackF32 = analysis::F0Track<f32>;
pub type ResponseCurveF64 = monitors::ResponseCurve<f64>;
pub type ResponseCurveF32 = monitors::ResponseCurve<f32>;
pub type SpectralProfileF64 = advisor::SpectralProfile<f64>;
pub type SpectralProfileF32 = advisor::SpectralProfile<f32>;
pub type BandMatrixF64 = corpus::BandMatrix<f64>;
pub type BandMatrixF32 = corpus::BandMatrix<f32>;
