//! Audio container, short-time spectra and pitch/frequency conversions.

mod clip;
mod pitch;
mod stft;

pub use clip::{AudioClip, MIN_SAMPLE_RATE};
pub use pitch::{
    frequency_of_note, note_of_frequency, semitones_between, transpose_frequency, Note, A4_HZ,
    A4_MIDI,
};
pub use stft::{stft, Spectrogram, StftConfig, Window};

pub(crate) use stft::{argmax, bin_range, interpolate_peak, SpectrumEngine};
