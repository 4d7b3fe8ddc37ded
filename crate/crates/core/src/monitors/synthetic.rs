//! Generator for the bundled synthetic near-field monitor dataset.
//!
//! The dataset is not a measurement. It stands in for a published set of 36
//! near-field monitor responses and is built so that its aggregate behaves
//! like one: a 4th-order high-pass roll-off below a corner frequency plus a
//! broad low-mid bump, flat elsewhere.
//!
//! Construction:
//!
//! * center curve `M(f) = HP4(f; corner) + A·exp(−½·(log2(f/f_b)/σ)²)`
//!   with `A = 8 dB`, `f_b = 120 Hz`, `σ = 0.6` octave;
//! * 18 pairs of speakers `M(f) ± s_i·w(f)` with `s_i = 0.35·i` dB and a
//!   spread shape `w(f) = 1 + 2/(1 + (f/80)²)` that widens in the bass. Since
//!   `s_i` grows with `i` the two middle values at every frequency are the
//!   first pair, so the raw median is exactly `M(f)`;
//! * 120 points per speaker, 1/12 octave apart from 20 Hz, gains rounded to
//!   1e-4 dB.
//!
//! The corner frequency was found by bisection so that the smoothed median
//! (1/3 octave) loses 6.30 dB between 49.48 Hz and a perfect fourth below.

use super::SpeakerResponse;

pub const SPEAKER_COUNT: usize = 36;
pub const CORNER_HZ: f64 = 44.3008;
pub const BUMP_DB: f64 = 8.0;
pub const BUMP_CENTER_HZ: f64 = 120.0;
pub const BUMP_WIDTH_OCTAVES: f64 = 0.6;
const POINTS: usize = 120;

/// Center curve of the dataset, in dB.
pub fn center_curve(f: f64, corner_hz: f64) -> f64 {
    let highpass = -10.0 * (1.0 + (corner_hz / f).powi(8)).log10();
    let bump = BUMP_DB * (-0.5 * ((f / BUMP_CENTER_HZ).log2() / BUMP_WIDTH_OCTAVES).powi(2)).exp();
    highpass + bump
}

fn spread(f: f64) -> f64 {
    1.0 + 2.0 / (1.0 + (f / 80.0).powi(2))
}

fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Generates the dataset for a given corner frequency.
pub fn generate(corner_hz: f64) -> Vec<SpeakerResponse<f64>> {
    let freqs: Vec<f64> = (0..POINTS)
        .map(|k| round4(20.0 * 2f64.powf(k as f64 / 12.0)))
        .collect();
    (1..=SPEAKER_COUNT / 2)
        .flat_map(|pair| {
            let s = 0.35 * pair as f64;
            [(1.0, 'a'), (-1.0, 'b')].map(move |(sign, tag)| (pair, s * sign, tag))
        })
        .map(|(pair, signed, tag)| {
            let points = freqs
                .iter()
                .map(|&f| (f, round4(center_curve(f, corner_hz) + signed * spread(f))))
                .collect();
            SpeakerResponse::new(format!("synthetic-{pair:02}{tag}"), points)
                .expect("generated response is valid")
        })
        .collect()
}

/// Serializes responses in the `speaker,frequency_hz,gain_db` format.
pub fn to_csv(speakers: &[SpeakerResponse<f64>]) -> String {
    let mut out = String::from(
        "# Synthetic near-field monitor responses (NOT measurements).\n\
         # Generated by basstune::monitors::synthetic; see that module for the construction.\n\
         speaker,frequency_hz,gain_db\n",
    );
    for s in speakers {
        for &(f, g) in s.points() {
            out.push_str(&format!("{},{},{}\n", s.name(), f, g));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SYNTHETIC_MONITORS_CSV;
    use crate::monitors::{bundled_dataset, median_response};

    #[test]
    fn bundled_file_matches_generator() {
        assert_eq!(to_csv(&generate(CORNER_HZ)), SYNTHETIC_MONITORS_CSV);
    }

    #[test]
    fn raw_median_is_center_curve() {
        let speakers = bundled_dataset::<f64>();
        assert_eq!(speakers.len(), SPEAKER_COUNT);
        let curve = median_response(&speakers, 0.0).unwrap();
        for &(f, g) in curve.points().iter().step_by(7) {
            // grid points between the 1/12-octave samples carry interpolation error
            assert!((g - center_curve(f, CORNER_HZ)).abs() < 0.05, "{f}: {g}");
        }
    }
}
