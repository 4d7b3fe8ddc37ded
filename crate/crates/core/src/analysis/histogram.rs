use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::signal::AudioClip;

use super::{estimate_f0_track, F0Config, F0Point, SEARCH_BAND_HZ};

pub const HISTOGRAM_BIN_WIDTH_HZ: f64 = 0.25;

/// Local maxima below this fraction of the mode's mass are not reported.
pub const SECONDARY_MODE_FRACTION: f64 = 0.1;

/// Energy-weighted distribution of f0 estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHistogram<T> {
    /// `masses.len() + 1` ascending edges in Hz.
    pub bin_edges: Vec<T>,
    /// Fraction of the pooled energy in each bin; sums to 1.
    pub masses: Vec<T>,
    /// Energy-weighted mean f0 of the points in the heaviest bin.
    pub mode_frequency: T,
    /// Other local maxima, heaviest first.
    pub secondary_modes: Vec<T>,
    /// Clips that contributed at least one point.
    pub clips_used: usize,
}

impl<T: Real> WeightedHistogram<T> {
    /// Builds the histogram over `[lo, hi]` Hz from weighted points.
    pub fn from_points(points: &[F0Point<T>], band: (T, T), bin_width: T) -> Result<Self> {
        let (lo, hi) = band;
        if !(bin_width > T::zero() && hi > lo) {
            return Err(Error::domain("histogram", "needs a positive bin width and a non-empty band"));
        }
        let n_bins = ((hi - lo) / bin_width).ceil().to_usize().unwrap_or(0).max(1);
        let bin_edges: Vec<T> = (0..=n_bins)
            .map(|i| (lo + T::from_usize_lossy(i) * bin_width).min(hi))
            .collect();
        let bin_of = |f: T| -> Option<usize> {
            (f >= lo && f <= hi).then(|| ((f - lo) / bin_width).floor().to_usize().unwrap_or(0).min(n_bins - 1))
        };
        let mut mass = vec![T::zero(); n_bins];
        let mut weighted_f = vec![T::zero(); n_bins];
        for p in points {
            if let Some(b) = bin_of(p.f0) {
                mass[b] = mass[b] + p.energy;
                weighted_f[b] = weighted_f[b] + p.energy * p.f0;
            }
        }
        let total: T = mass.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::NoFundamental);
        }
        let centroid = |b: usize| weighted_f[b] / mass[b];
        let masses: Vec<T> = mass.iter().map(|&m| m / total).collect();
        let mode = (0..n_bins).fold(0, |best, b| if masses[b] > masses[best] { b } else { best });
        let floor = masses[mode] * T::lit(SECONDARY_MODE_FRACTION);
        let at = |b: Option<usize>| b.and_then(|b| masses.get(b).copied()).unwrap_or(T::zero());
        let mut secondary: Vec<usize> = (0..n_bins)
            .filter(|&b| {
                b != mode
                    && masses[b] >= floor
                    && masses[b] > at(b.checked_sub(1))
                    && masses[b] > at(Some(b + 1))
            })
            .collect();
        secondary.sort_by(|&a, &b| masses[b].partial_cmp(&masses[a]).unwrap().then(a.cmp(&b)));
        Ok(Self {
            bin_edges,
            mode_frequency: centroid(mode),
            secondary_modes: secondary.into_iter().map(centroid).collect(),
            masses,
            clips_used: 0,
        })
    }

    pub fn bin_centers(&self) -> Vec<T> {
        self.bin_edges
            .windows(2)
            .map(|w| (w[0] + w[1]) / T::lit(2.0))
            .collect()
    }

    /// Index of the bin holding `f`, if inside the histogram range.
    pub fn bin_of(&self, f: T) -> Option<usize> {
        let last = self.masses.len() - 1;
        if f < self.bin_edges[0] || f > self.bin_edges[last + 1] {
            return None;
        }
        Some(self.bin_edges[1..].iter().position(|&e| f < e).unwrap_or(last))
    }
}

/// Pools the f0 tracks of all clips into an energy-weighted histogram with
/// 0.25 Hz bins over the search band. Clips without a detectable
/// fundamental are skipped; fails only if every clip fails.
pub fn f0_distribution<T: Real>(clips: &[AudioClip<T>], config: &F0Config<T>) -> Result<WeightedHistogram<T>> {
    if clips.is_empty() {
        return Err(Error::domain("f0 distribution", "needs at least one clip"));
    }
    let tracks: Vec<Result<_>> = clips.par_iter().map(|c| estimate_f0_track(c, config)).collect();
    let mut points = Vec::new();
    let mut used = 0;
    let mut first_error = None;
    for track in tracks {
        match track {
            Ok(t) => {
                used += 1;
                points.extend_from_slice(t.points());
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if used == 0 {
        return Err(first_error.unwrap_or(Error::NoFundamental));
    }
    let band = if config.search_band.0 > T::zero() {
        config.search_band
    } else {
        (T::lit(SEARCH_BAND_HZ.0), T::lit(SEARCH_BAND_HZ.1))
    };
    let mut h = WeightedHistogram::from_points(&points, band, T::lit(HISTOGRAM_BIN_WIDTH_HZ))?;
    h.clips_used = used;
    Ok(h)
}
