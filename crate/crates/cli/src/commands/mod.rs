//! One module per subcommand, plus the helpers they share.

use basstune::advisor::{combined_response, CombinedCurve, SpectralProfile};
use basstune::monitors::{bundled_dataset, load_speaker_file, median_response, ResponseCurve, DEFAULT_SMOOTH_OCTAVES};
use basstune::perception::PhonLevel;
use basstune::voice::{reference_driven_profile, REFERENCE_F0_HZ};
use clap::ValueEnum;

use crate::config::RunConfig;
use crate::error::CliError;

pub mod advise;
pub mod analyze;
pub mod contour;
pub mod corpus;
pub mod loss;
pub mod monitors;
pub mod synth;

/// Drum spectrum used by `loss` and `advise`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    /// Bundled five-partial driven 808 profile.
    Driven,
    /// Fundamental only.
    Fundamental,
}

impl ProfileKind {
    pub fn build(self, f0: f64) -> Result<SpectralProfile<f64>, CliError> {
        Ok(match self {
            ProfileKind::Driven => reference_driven_profile::<f64>().at_fundamental(f0),
            ProfileKind::Fundamental => SpectralProfile::single(f0)?,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Driven => "driven",
            ProfileKind::Fundamental => "fundamental",
        }
    }
}

pub const DEFAULT_F0: f64 = REFERENCE_F0_HZ;

/// Smoothed median of the configured (or bundled) monitor dataset.
pub fn monitor_curve(config: &RunConfig, dataset: Option<&std::path::Path>, smooth: f64) -> Result<ResponseCurve<f64>, CliError> {
    let speakers = match dataset.or(config.monitors.as_deref()) {
        Some(path) => load_speaker_file(path)?,
        None => bundled_dataset(),
    };
    Ok(median_response(&speakers, smooth)?)
}

pub fn combined_curve(config: &RunConfig, dataset: Option<&std::path::Path>, phon: Option<f64>) -> Result<CombinedCurve<f64>, CliError> {
    let speakers = monitor_curve(config, dataset, DEFAULT_SMOOTH_OCTAVES)?;
    let loudness = PhonLevel::new(phon.unwrap_or(config.phon))?;
    Ok(combined_response(&speakers, loudness)?)
}

/// Parses `lo:hi` into an inclusive integer range.
pub fn parse_int_range(s: &str) -> Result<(i32, i32), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected 'lo:hi', found '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<i32>().map_err(|_| format!("'{v}' is not an integer"));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(format!("lower bound {lo} exceeds upper bound {hi}"));
    }
    Ok((lo, hi))
}
