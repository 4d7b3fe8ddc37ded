use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::real::Real;

/// Concert pitch used when no other reference is given.
pub const A4_HZ: f64 = 440.0;
pub const A4_MIDI: i32 = 69;

const NAMES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

/// An equal-tempered semitone index plus a cent deviation in `[-50, 50)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Note<T> {
    midi: i32,
    cents: T,
}

impl<T: Real> Note<T> {
    pub fn new(midi: i32, cents: T) -> Result<Self> {
        let half = T::lit(50.0);
        if !(cents >= -half && cents < half) {
            return Err(Error::out_of_range(
                "cents offset",
                cents.to_f64_lossy(),
                -50.0,
                50.0,
            ));
        }
        Ok(Self { midi, cents })
    }

    pub fn from_midi(midi: i32) -> Self {
        Self {
            midi,
            cents: T::zero(),
        }
    }

    pub fn midi(&self) -> i32 {
        self.midi
    }

    pub fn cents(&self) -> T {
        self.cents
    }

    /// Pitch class, C = 0 … B = 11.
    pub fn chroma(&self) -> u8 {
        self.midi.rem_euclid(12) as u8
    }

    /// Scientific-pitch octave number (A4 = 440 Hz, C4 = midi 60).
    pub fn octave(&self) -> i32 {
        self.midi.div_euclid(12) - 1
    }

    /// Name of the nearest tempered note, e.g. `G1` or `A#0`.
    pub fn name(&self) -> String {
        format!("{}{}", NAMES[self.chroma() as usize], self.octave())
    }

    pub fn frequency(&self, reference: T) -> T {
        frequency_of_note(*self, reference)
    }
}

impl<T: Real> fmt::Display for Note<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cents = self.cents.to_f64_lossy();
        if cents.abs() < 0.05 {
            write!(f, "{}", self.name())
        } else {
            write!(f, "{} {:+.1} cents", self.name(), cents)
        }
    }
}

/// Parses `D`, `Bb0`, `G#1`, `f#-1`. Without an octave number the note is
/// placed in octave 1.
impl<T: Real> FromStr for Note<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain("note name", format!("cannot parse '{s}'"));
        let s = s.trim();
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let base = match letter {
            'C' => 0,
            'D' => 2,
            'E' => 4,
            'F' => 5,
            'G' => 7,
            'A' => 9,
            'B' => 11,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let (accidental, octave_text) = match rest.chars().next() {
            Some('#') | Some('♯') => (1, &rest[rest.chars().next().unwrap().len_utf8()..]),
            Some('b') | Some('♭') => (-1, &rest[rest.chars().next().unwrap().len_utf8()..]),
            _ => (0, rest),
        };
        let octave: i32 = if octave_text.is_empty() {
            1
        } else {
            octave_text.parse().map_err(|_| bad())?
        };
        Ok(Self::from_midi((octave + 1) * 12 + base + accidental))
    }
}

/// Nearest tempered note and cent deviation for a frequency.
pub fn note_of_frequency<T: Real>(f: T, reference: T) -> Result<Note<T>> {
    check_positive("frequency", f)?;
    check_positive("reference pitch", reference)?;
    let exact = T::from_i32(A4_MIDI).unwrap() + T::lit(12.0) * (f / reference).log2();
    let mut midi = (exact + T::lit(0.5)).floor();
    let mut cents = (exact - midi) * T::lit(100.0);
    if cents >= T::lit(50.0) {
        midi = midi + T::one();
        cents = cents - T::lit(100.0);
    }
    let cents = cents.max(T::lit(-50.0));
    let midi = midi
        .to_i32()
        .ok_or_else(|| Error::domain("frequency", "outside representable note range"))?;
    Note::new(midi, cents)
}

pub fn frequency_of_note<T: Real>(note: Note<T>, reference: T) -> T {
    let semis = T::from_i32(note.midi - A4_MIDI).unwrap() + note.cents / T::lit(100.0);
    reference * (semis / T::lit(12.0)).exp2()
}

/// Scales `f` by `2^(semitones/12)`.
pub fn transpose_frequency<T: Real>(f: T, semitones: T) -> Result<T> {
    check_positive("frequency", f)?;
    Ok(f * (semitones / T::lit(12.0)).exp2())
}

/// Signed interval from `from` to `to` in semitones.
pub fn semitones_between<T: Real>(from: T, to: T) -> T {
    T::lit(12.0) * (to / from).log2()
}

fn check_positive<T: Real>(what: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, format!("must be positive and finite, got {v}")))
    }
}
