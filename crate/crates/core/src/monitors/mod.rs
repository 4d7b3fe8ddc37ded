//! Loudspeaker frequency responses: loading, median/percentile aggregation
//! with fractional-octave smoothing, and gain lookups.

pub mod synthetic;

use std::io::Read;
use std::path::Path;

use crate::data;
use crate::error::{Error, Result};
use crate::real::{median, percentile, Real};

/// Points per octave of the shared aggregation grid.
pub const GRID_POINTS_PER_OCTAVE: usize = 48;

/// Default smoothing width in octaves.
pub const DEFAULT_SMOOTH_OCTAVES: f64 = 1.0 / 3.0;

/// Measured response of one loudspeaker.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerResponse<T> {
    name: String,
    points: Vec<(T, T)>,
}

impl<T: Real> SpeakerResponse<T> {
    pub fn new(name: impl Into<String>, points: Vec<(T, T)>) -> Result<Self> {
        let name = name.into();
        validate_points(&name, &points)?;
        Ok(Self { name, points })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn band(&self) -> (T, T) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    /// Gain at `f` by log-frequency linear interpolation; `None` outside the
    /// measured band.
    pub fn gain_at(&self, f: T) -> Option<T> {
        interp_log(&self.points, f)
    }
}

fn validate_points<T: Real>(name: &str, points: &[(T, T)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::domain(
            "response",
            format!("'{name}' needs at least 2 points, has {}", points.len()),
        ));
    }
    for (i, &(f, g)) in points.iter().enumerate() {
        if !(f > T::zero() && f.is_finite() && g.is_finite()) {
            return Err(Error::domain(
                "response",
                format!("'{name}' point {i} ({f} Hz, {g} dB) is not a positive frequency with finite gain"),
            ));
        }
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::domain(
            "response",
            format!("'{name}' frequencies must be strictly increasing"),
        ));
    }
    Ok(())
}

/// 25th/50th/75th percentiles across speakers at each curve frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileBand<T> {
    pub p25: Vec<T>,
    pub median: Vec<T>,
    pub p75: Vec<T>,
}

/// A frequency → gain (dB) curve evaluated by log-frequency linear
/// interpolation and undefined outside its first and last frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve<T> {
    points: Vec<(T, T)>,
    percentiles: Option<PercentileBand<T>>,
}

impl<T: Real> ResponseCurve<T> {
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        validate_points("curve", &points)?;
        Ok(Self {
            points,
            percentiles: None,
        })
    }

    /// A curve of constant gain over `[lo, hi]`.
    pub fn flat(lo: T, hi: T, gain_db: T) -> Result<Self> {
        Self::new(vec![(lo, gain_db), (hi, gain_db)])
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn percentiles(&self) -> Option<&PercentileBand<T>> {
        self.percentiles.as_ref()
    }

    /// The unsmoothed per-frequency median, when the curve came from an
    /// aggregation.
    pub fn raw_median(&self) -> Option<ResponseCurve<T>> {
        let band = self.percentiles.as_ref()?;
        Some(ResponseCurve {
            points: self
                .points
                .iter()
                .zip(&band.median)
                .map(|(&(f, _), &m)| (f, m))
                .collect(),
            percentiles: None,
        })
    }

    pub fn band(&self) -> (T, T) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn response_at(&self, f: T) -> Result<T> {
        interp_log(&self.points, f).ok_or_else(|| {
            let (lo, hi) = self.band();
            Error::out_of_range(
                "frequency (Hz)",
                f.to_f64_lossy(),
                lo.to_f64_lossy(),
                hi.to_f64_lossy(),
            )
        })
    }

    /// Gain change for a tone moved from `f_from` to `f_to`:
    /// `response_at(f_to) − response_at(f_from)`.
    pub fn speaker_gain_delta(&self, f_from: T, f_to: T) -> Result<T> {
        Ok(self.response_at(f_to)? - self.response_at(f_from)?)
    }

    /// Adds `offset_db` to every point.
    pub fn offset(&self, offset_db: T) -> Self {
        Self {
            points: self.points.iter().map(|&(f, g)| (f, g + offset_db)).collect(),
            percentiles: None,
        }
    }
}

pub fn response_at<T: Real>(curve: &ResponseCurve<T>, f: T) -> Result<T> {
    curve.response_at(f)
}

pub fn speaker_gain_delta<T: Real>(curve: &ResponseCurve<T>, f_from: T, f_to: T) -> Result<T> {
    curve.speaker_gain_delta(f_from, f_to)
}

/// Log-frequency linear interpolation over sorted points.
pub(crate) fn interp_log<T: Real>(points: &[(T, T)], f: T) -> Option<T> {
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    if !(f >= lo && f <= hi) {
        return None;
    }
    let upper = points.partition_point(|p| p.0 < f);
    if upper < points.len() && points[upper].0 == f {
        return Some(points[upper].1);
    }
    let (a, b) = (points[upper - 1], points[upper]);
    let t = (f / a.0).ln() / (b.0 / a.0).ln();
    Some(a.1 + (b.1 - a.1) * t)
}

const DATASET_COLUMNS: [&str; 3] = ["speaker", "frequency_hz", "gain_db"];

/// Parses a `speaker,frequency_hz,gain_db` table. Rows for one speaker must
/// have strictly increasing frequencies; speakers keep first-appearance order.
pub fn load_speaker_dataset<T: Real>(
    source_name: &str,
    reader: impl Read,
) -> Result<Vec<SpeakerResponse<T>>> {
    let rows = data::read_rows(source_name, reader, &DATASET_COLUMNS)?;
    if rows.is_empty() {
        return Err(Error::Parse {
            source_name: source_name.to_string(),
            line: 1,
            reason: "no measurement rows".into(),
        });
    }
    let mut speakers: Vec<(String, Vec<(T, T)>)> = Vec::new();
    for row in &rows {
        let name = row.fields[0].clone();
        if name.is_empty() {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: row.line,
                reason: "empty speaker name".into(),
            });
        }
        let f = data::parse_f64(source_name, row, 1, "frequency")?;
        let g = data::parse_f64(source_name, row, 2, "gain")?;
        if f <= 0.0 {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: row.line,
                reason: format!("frequency {f} must be positive"),
            });
        }
        let entry = match speakers.iter_mut().position(|(n, _)| *n == name) {
            Some(i) => &mut speakers[i].1,
            None => {
                speakers.push((name.clone(), Vec::new()));
                &mut speakers.last_mut().unwrap().1
            }
        };
        if let Some(&(prev, _)) = entry.last() {
            if T::lit(f) <= prev {
                return Err(Error::Parse {
                    source_name: source_name.to_string(),
                    line: row.line,
                    reason: format!(
                        "frequencies for '{name}' are not strictly increasing ({f} after {prev})"
                    ),
                });
            }
        }
        entry.push((T::lit(f), T::lit(g)));
    }
    speakers
        .into_iter()
        .map(|(name, points)| SpeakerResponse::new(name, points))
        .collect()
}

pub fn load_speaker_file<T: Real>(path: impl AsRef<Path>) -> Result<Vec<SpeakerResponse<T>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    load_speaker_dataset(&path.display().to_string(), file)
}

/// The bundled synthetic 36-monitor dataset (see [`synthetic`]).
pub fn bundled_dataset<T: Real>() -> Vec<SpeakerResponse<T>> {
    load_speaker_dataset("near_field_synthetic36.csv", data::SYNTHETIC_MONITORS_CSV.as_bytes())
        .expect("bundled monitor dataset is valid")
}

/// Shared log-frequency grid over `[lo, hi]` including both ends.
fn log_grid<T: Real>(lo: T, hi: T) -> Vec<T> {
    let step = T::one() / T::from_usize_lossy(GRID_POINTS_PER_OCTAVE);
    let n = ((hi / lo).log2() / step).floor().to_usize().unwrap_or(0);
    let mut grid: Vec<T> = (0..=n)
        .map(|j| lo * (T::from_usize_lossy(j) * step).exp2())
        .filter(|&f| f < hi)
        .collect();
    grid.push(hi);
    grid
}

/// Median response across speakers with 25th/75th percentiles. Each speaker
/// is resampled onto a shared 48-per-octave log grid over the band common to
/// all of them; the median is then smoothed with a moving average
/// `smooth_octaves` wide (narrowed symmetrically near the band edges so the
/// endpoints are kept).
pub fn median_response<T: Real>(
    speakers: &[SpeakerResponse<T>],
    smooth_octaves: T,
) -> Result<ResponseCurve<T>> {
    if speakers.is_empty() {
        return Err(Error::domain("speaker set", "at least one speaker is required"));
    }
    if !(smooth_octaves >= T::zero() && smooth_octaves.is_finite()) {
        return Err(Error::domain(
            "smoothing width",
            format!("must be a non-negative number of octaves, got {smooth_octaves}"),
        ));
    }
    let lo = speakers
        .iter()
        .map(|s| s.band().0)
        .fold(T::neg_infinity(), T::max);
    let hi = speakers
        .iter()
        .map(|s| s.band().1)
        .fold(T::infinity(), T::min);
    if lo >= hi {
        return Err(Error::NoCommonBand);
    }
    let grid = log_grid(lo, hi);
    let mut band = PercentileBand {
        p25: Vec::with_capacity(grid.len()),
        median: Vec::with_capacity(grid.len()),
        p75: Vec::with_capacity(grid.len()),
    };
    let mut column = Vec::with_capacity(speakers.len());
    for &f in &grid {
        column.clear();
        column.extend(speakers.iter().map(|s| {
            s.gain_at(f.max(s.band().0).min(s.band().1))
                .expect("grid lies inside every speaker's band")
        }));
        band.p25.push(percentile(&column, T::lit(0.25)).unwrap());
        band.median.push(median(&column).unwrap());
        band.p75.push(percentile(&column, T::lit(0.75)).unwrap());
    }
    let smoothed = smooth_fractional_octave(&band.median, smooth_octaves);
    Ok(ResponseCurve {
        points: grid.into_iter().zip(smoothed).collect(),
        percentiles: Some(band),
    })
}

/// Moving average over points within ±width/2 octaves, the half-width
/// shrunk to the distance from the nearer band edge.
/// Moving average over `width_octaves` on the shared log grid, computed in
/// grid steps so the window never depends on floating-point rounding.
fn smooth_fractional_octave<T: Real>(values: &[T], width_octaves: T) -> Vec<T> {
    let steps = width_octaves * T::from_usize_lossy(GRID_POINTS_PER_OCTAVE) / T::lit(2.0);
    let half = steps.round().to_usize().unwrap_or(0);
    let last = values.len() - 1;
    (0..values.len())
        .map(|i| {
            let reach = half.min(i).min(last - i);
            let window = &values[i - reach..=i + reach];
            window.iter().copied().sum::<T>() / T::from_usize_lossy(window.len())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flat(name: &str, gain: f64) -> SpeakerResponse<f64> {
        SpeakerResponse::new(name, vec![(20.0, gain), (1000.0, gain), (20000.0, gain)]).unwrap()
    }

    fn smooth_speaker(name: &str) -> SpeakerResponse<f64> {
        let points = (0..=120)
            .map(|k| {
                let f = 20.0 * 2f64.powf(k as f64 / 12.0);
                (f, 3.0 * (f / 200.0).log2().tanh())
            })
            .collect();
        SpeakerResponse::new(name, points).unwrap()
    }

    #[test]
    fn response_lookup() {
        let curve = ResponseCurve::<f64>::new(vec![(20.0, 0.0), (80.0, 6.0), (320.0, 6.0)]).unwrap();
        assert_eq!(curve.response_at(80.0).unwrap(), 6.0);
        assert_eq!(curve.response_at(20.0).unwrap(), 0.0);
        // 40 Hz is the log-midpoint of 20 and 80 Hz
        assert!((curve.response_at(40.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(curve.response_at(5.0), Err(Error::OutOfRange { .. })));
        assert!(curve.response_at(321.0).is_err());
    }

    #[test]
    fn speaker_delta_cases() {
        let curve = ResponseCurve::new(vec![(20.0, -12.0), (80.0, 0.0)]).unwrap();
        assert_eq!(curve.speaker_gain_delta(50.0, 50.0).unwrap(), 0.0);
        assert!(curve.speaker_gain_delta(40.0, 20.0).unwrap() < 0.0);
        let flat = ResponseCurve::flat(20.0, 20000.0, 2.0).unwrap();
        assert_eq!(flat.speaker_gain_delta(37.0, 4000.0).unwrap(), 0.0);
    }

    #[test]
    fn loads_and_validates() {
        let text = "speaker,frequency_hz,gain_db\na,20,-3\na,40,0\nb,20,-6\nb,40,-1\n";
        let speakers = load_speaker_dataset::<f64>("t", text.as_bytes()).unwrap();
        assert_eq!(speakers.len(), 2);
        assert_eq!(speakers[1].name(), "b");
        assert_eq!(speakers[1].points(), &[(20.0, -6.0), (40.0, -1.0)]);

        assert!(load_speaker_dataset::<f64>("t", "".as_bytes()).is_err());
        assert!(load_speaker_dataset::<f64>("t", "speaker,frequency_hz,gain_db\n".as_bytes()).is_err());

        let bad = "speaker,frequency_hz,gain_db\na,20,-3\na,x,0\n";
        match load_speaker_dataset::<f64>("t", bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let unsorted = "speaker,frequency_hz,gain_db\na,40,-3\na,20,0\n";
        match load_speaker_dataset::<f64>("t", unsorted.as_bytes()) {
            Err(Error::Parse { line, reason, .. }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("strictly increasing"));
            }
            other => panic!("{other:?}"),
        }
        let single = "speaker,frequency_hz,gain_db\na,40,-3\n";
        assert!(load_speaker_dataset::<f64>("t", single.as_bytes()).is_err());
    }

    #[test]
    fn single_speaker_median_is_that_speaker() {
        let s = smooth_speaker("only");
        let curve = median_response(&[s.clone()], 0.0).unwrap();
        for &(f, g) in curve.points() {
            assert!((g - s.gain_at(f).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_speakers_survive_smoothing() {
        let s = smooth_speaker("x");
        let curve = median_response(&vec![s.clone(); 5], DEFAULT_SMOOTH_OCTAVES).unwrap();
        for &(f, g) in curve.points() {
            assert!((g - s.gain_at(f).unwrap()).abs() < 0.1, "{f}: {g}");
        }
        // endpoints are not smoothed at all
        let (lo, hi) = curve.band();
        assert!((curve.response_at(lo).unwrap() - s.gain_at(lo).unwrap()).abs() < 0.5);
        assert!((curve.response_at(hi).unwrap() - s.gain_at(hi).unwrap()).abs() < 0.5);
    }

    #[test]
    fn odd_count_median_of_flat_curves() {
        let curve =
            median_response(&[flat("a", 0.0), flat("b", 2.0), flat("c", -2.0)], 1.0 / 3.0)
                .unwrap();
        assert!(curve.points().iter().all(|&(_, g)| g.abs() < 1e-12));
        let band = curve.percentiles().unwrap();
        assert!(band.p25.iter().all(|&v| (v + 1.0).abs() < 1e-12));
        assert!(band.p75.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn grid_resolution_and_band() {
        let a = SpeakerResponse::new("a", vec![(30.0, 0.0), (3000.0, 0.0)]).unwrap();
        let b = SpeakerResponse::new("b", vec![(20.0, 0.0), (2400.0, 0.0)]).unwrap();
        let curve = median_response(&[a, b], 0.0).unwrap();
        assert_eq!(curve.band(), (30.0, 2400.0));
        let octaves = (2400.0f64 / 30.0).log2();
        let expected = (octaves * 48.0).floor() as usize + 2;
        assert!(curve.points().len() == expected || curve.points().len() == expected - 1);
    }

    #[test]
    fn disjoint_ranges_fail() {
        let a = SpeakerResponse::new("a", vec![(20.0, 0.0), (100.0, 0.0)]).unwrap();
        let b = SpeakerResponse::new("b", vec![(200.0, 0.0), (2000.0, 0.0)]).unwrap();
        assert!(matches!(median_response(&[a, b], 0.33), Err(Error::NoCommonBand)));
        assert!(median_response::<f64>(&[], 0.33).is_err());
    }

    fn speaker_strategy() -> impl Strategy<Value = SpeakerResponse<f64>> {
        prop::collection::vec(-20.0f64..10.0, 8).prop_map(|gains| {
            let points = gains
                .iter()
                .enumerate()
                .map(|(i, &g)| (20.0 * 2f64.powi(i as i32), g))
                .collect();
            SpeakerResponse::new("p", points).unwrap()
        })
    }

    proptest! {
        #[test]
        fn median_aggregation_invariances(
            speakers in prop::collection::vec(speaker_strategy(), 1..7),
            rot in 0usize..7,
        ) {
            let base = median_response(&speakers, 1.0 / 3.0).unwrap();
            let mut permuted = speakers.clone();
            let k = rot % permuted.len();
            permuted.rotate_left(k);
            permuted.reverse();
            let p = median_response(&permuted, 1.0 / 3.0).unwrap();
            let mut doubled = speakers.clone();
            doubled.extend(speakers.iter().cloned());
            let d = median_response(&doubled, 1.0 / 3.0).unwrap();
            for ((x, y), z) in base.points().iter().zip(p.points()).zip(d.points()) {
                prop_assert!((x.1 - y.1).abs() < 1e-9);
                prop_assert!((x.1 - z.1).abs() < 1e-9);
            }
            let band = base.percentiles().unwrap();
            for i in 0..band.median.len() {
                prop_assert!(band.p25[i] <= band.median[i] + 1e-12);
                prop_assert!(band.median[i] <= band.p75[i] + 1e-12);
            }
        }

        #[test]
        fn speaker_delta_algebra(a in 20.0f64..2560.0, b in 20.0f64..2560.0, c in 20.0f64..2560.0) {
            let s = smooth_speaker("s");
            let curve = ResponseCurve::new(s.points().to_vec()).unwrap();
            let ab = curve.speaker_gain_delta(a, b).unwrap();
            prop_assert_eq!(ab, -curve.speaker_gain_delta(b, a).unwrap());
            let path = ab + curve.speaker_gain_delta(b, c).unwrap();
            prop_assert!((path - curve.speaker_gain_delta(a, c).unwrap()).abs() < 1e-9);
        }
    }
}
