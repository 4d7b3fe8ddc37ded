//! Fundamental-frequency, partial and distribution analysis of bass-drum
//! samples.

mod f0;
mod histogram;
mod onset;
mod partials;

pub use f0::{cycle_f0_track, estimate_f0_track, sweep_range, F0Config, F0Point, F0Track};
pub use histogram::{
    f0_distribution, WeightedHistogram, HISTOGRAM_BIN_WIDTH_HZ, SECONDARY_MODE_FRACTION,
};
pub use onset::{detect_onsets, OnsetConfig};
pub use partials::{
    track_partials, PartialPoint, PartialThresholds, PartialTrack, ThresholdScale,
    DEFAULT_DISPLAY_RANGE_DB,
};

/// Default f0 search band in Hz.
pub const SEARCH_BAND_HZ: (f64, f64) = (25.0, 120.0);
