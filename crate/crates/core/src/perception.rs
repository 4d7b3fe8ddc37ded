//! Equal-loudness contours (ISO 226:2003) and the ear-sensitivity change
//! between two frequencies at a fixed loudness level.
//!
//! Between the 29 standard frequencies the three contour parameters
//! (exponent, transfer magnitude, threshold) are interpolated linearly in
//! log-frequency and the contour formula is then applied. No extrapolation
//! outside 20 Hz – 12.5 kHz or 20 – 80 phon.

use std::sync::OnceLock;

use crate::data;
use crate::error::{Error, Result};
use crate::real::Real;

pub const MIN_FREQUENCY_HZ: f64 = 20.0;
pub const MAX_FREQUENCY_HZ: f64 = 12500.0;
pub const MIN_PHON: f64 = 20.0;
pub const MAX_PHON: f64 = 80.0;

/// Loudness level in phon, restricted to the validity range of the contours.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhonLevel<T>(T);

impl<T: Real> PhonLevel<T> {
    pub fn new(value: T) -> Result<Self> {
        if value >= T::lit(MIN_PHON) && value <= T::lit(MAX_PHON) {
            Ok(Self(value))
        } else {
            Err(Error::out_of_range(
                "loudness (phon)",
                value.to_f64_lossy(),
                MIN_PHON,
                MAX_PHON,
            ))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourParams {
    pub frequency_hz: f64,
    pub alpha_f: f64,
    pub l_u_db: f64,
    pub t_f_db: f64,
}

/// The standard's parameter table, one row per standard frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LoudnessModelTables {
    rows: Vec<ContourParams>,
}

impl LoudnessModelTables {
    /// The bundled table, checksum-verified on first use.
    pub fn bundled() -> &'static LoudnessModelTables {
        static TABLES: OnceLock<LoudnessModelTables> = OnceLock::new();
        TABLES.get_or_init(|| {
            data::verify_checksum("iso226_2003", data::ISO226_2003_CSV, data::ISO226_2003_SHA256)
                .and_then(|_| Self::parse("iso226_2003.csv", data::ISO226_2003_CSV))
                .expect("bundled equal-loudness table is valid")
        })
    }

    pub fn parse(source_name: &str, text: &str) -> Result<Self> {
        let rows = data::read_rows(
            source_name,
            text.as_bytes(),
            &["frequency_hz", "alpha_f", "l_u_db", "t_f_db"],
        )?;
        let rows = rows
            .iter()
            .map(|row| {
                Ok(ContourParams {
                    frequency_hz: data::parse_f64(source_name, row, 0, "frequency")?,
                    alpha_f: data::parse_f64(source_name, row, 1, "alpha_f")?,
                    l_u_db: data::parse_f64(source_name, row, 2, "L_U")?,
                    t_f_db: data::parse_f64(source_name, row, 3, "T_f")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != 29 {
            return Err(Error::domain(
                "equal-loudness table",
                format!("expected 29 rows, found {}", rows.len()),
            ));
        }
        if rows.windows(2).any(|w| w[1].frequency_hz <= w[0].frequency_hz) {
            return Err(Error::domain(
                "equal-loudness table",
                "frequencies must be strictly increasing",
            ));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ContourParams] {
        &self.rows
    }

    /// Parameters at `f`, interpolated linearly in log-frequency.
    fn params_at(&self, f: f64) -> (f64, f64, f64) {
        let rows = &self.rows;
        let upper = rows
            .partition_point(|r| r.frequency_hz < f)
            .clamp(1, rows.len() - 1);
        let (a, b) = (&rows[upper - 1], &rows[upper]);
        if f == a.frequency_hz {
            return (a.alpha_f, a.l_u_db, a.t_f_db);
        }
        if f == b.frequency_hz {
            return (b.alpha_f, b.l_u_db, b.t_f_db);
        }
        let t = (f / a.frequency_hz).ln() / (b.frequency_hz / a.frequency_hz).ln();
        let lerp = |x: f64, y: f64| x + (y - x) * t;
        (
            lerp(a.alpha_f, b.alpha_f),
            lerp(a.l_u_db, b.l_u_db),
            lerp(a.t_f_db, b.t_f_db),
        )
    }

    pub fn elc_spl<T: Real>(&self, f: T, loudness: PhonLevel<T>) -> Result<T> {
        let fv = f.to_f64_lossy();
        if !(MIN_FREQUENCY_HZ..=MAX_FREQUENCY_HZ).contains(&fv) {
            return Err(Error::out_of_range(
                "frequency (Hz)",
                fv,
                MIN_FREQUENCY_HZ,
                MAX_FREQUENCY_HZ,
            ));
        }
        let (alpha_f, l_u, t_f) = self.params_at(fv);
        let (af, lu, tf) = (T::lit(alpha_f), T::lit(l_u), T::lit(t_f));
        let ten = T::lit(10.0);
        let a_f = T::lit(4.47e-3) * (ten.powf(T::lit(0.025) * loudness.value()) - T::lit(1.15))
            + (T::lit(0.4) * ten.powf((tf + lu) / ten - T::lit(9.0))).powf(af);
        Ok(ten / af * a_f.log10() - lu + T::lit(94.0))
    }
}

/// Sound pressure level (dB SPL) of the equal-loudness contour at `f`.
pub fn elc_spl<T: Real>(f: T, loudness: PhonLevel<T>) -> Result<T> {
    LoudnessModelTables::bundled().elc_spl(f, loudness)
}

/// `elc_spl(f_from) − elc_spl(f_to)`: the level change the ear applies to a
/// tone moved from `f_from` to `f_to` at constant SPL. Negative means the
/// destination is heard quieter.
pub fn ear_gain_delta<T: Real>(f_from: T, f_to: T, loudness: PhonLevel<T>) -> Result<T> {
    Ok(elc_spl(f_from, loudness)? - elc_spl(f_to, loudness)?)
}

/// Ear sensitivity relative to 1 kHz: `−(elc_spl(f) − elc_spl(1000))`.
pub fn relative_sensitivity<T: Real>(f: T, loudness: PhonLevel<T>) -> Result<T> {
    Ok(elc_spl(T::lit(1000.0), loudness)? - elc_spl(f, loudness)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phon(v: f64) -> PhonLevel<f64> {
        PhonLevel::new(v).unwrap()
    }

    #[test]
    fn anchored_at_1khz() {
        for p in [20.0, 40.0, 60.0, 80.0] {
            let spl = elc_spl(1000.0, phon(p)).unwrap();
            assert!((spl - p).abs() < 0.05, "{p}: {spl}");
        }
    }

    #[test]
    fn tabulated_20hz_20phon() {
        // ISO 226:2003 tabulated contour value
        assert!((elc_spl(20.0, phon(20.0)).unwrap() - 89.58).abs() < 0.1);
        assert!((elc_spl(20.0, phon(60.0)).unwrap() - 109.51).abs() < 0.1);
    }

    #[test]
    fn range_errors_name_interval() {
        let err = PhonLevel::new(999.0_f64).unwrap_err();
        assert!(err.to_string().contains("[20, 80]"), "{err}");
        assert!(PhonLevel::new(19.99_f64).is_err());
        let err = elc_spl(19.0, phon(60.0)).unwrap_err();
        assert!(err.to_string().contains("[20, 12500]"), "{err}");
        assert!(elc_spl(12500.1, phon(60.0)).is_err());
        assert!(elc_spl(12500.0, phon(60.0)).is_ok());
    }

    #[test]
    fn fourth_down_from_49_hz_needs_about_5_5_db() {
        let d = ear_gain_delta(49.48, 37.06, phon(60.0)).unwrap();
        assert!((d + 5.5).abs() <= 0.3, "{d}");
        let back = ear_gain_delta(37.06, 49.48, phon(60.0)).unwrap();
        assert_eq!(back, -d);
        assert_eq!(ear_gain_delta(63.0, 63.0, phon(60.0)).unwrap(), 0.0);
    }

    #[test]
    fn decreasing_below_100hz_on_grid() {
        let tables = LoudnessModelTables::bundled();
        let grid: Vec<f64> = tables
            .rows()
            .iter()
            .map(|r| r.frequency_hz)
            .filter(|&f| f <= 100.0)
            .collect();
        for p in [20.0, 40.0, 60.0, 80.0] {
            for w in grid.windows(2) {
                let (a, b) = (
                    elc_spl(w[0], phon(p)).unwrap(),
                    elc_spl(w[1], phon(p)).unwrap(),
                );
                assert!(b < a, "{p} phon: {} Hz {a} vs {} Hz {b}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn f32_agrees_with_f64() {
        let a = elc_spl(49.48_f32, PhonLevel::new(60.0_f32).unwrap()).unwrap();
        let b = elc_spl(49.48_f64, phon(60.0)).unwrap();
        assert!((a as f64 - b).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn monotone_in_loudness(f in 20.0f64..12500.0) {
            prop_assert!(elc_spl(f, phon(80.0)).unwrap() > elc_spl(f, phon(20.0)).unwrap());
        }

        #[test]
        fn delta_antisymmetric_and_additive(
            a in 20.0f64..12500.0, b in 20.0f64..12500.0, c in 20.0f64..12500.0, p in 20.0f64..80.0
        ) {
            let l = phon(p);
            let ab = ear_gain_delta(a, b, l).unwrap();
            prop_assert_eq!(ab, -ear_gain_delta(b, a, l).unwrap());
            let path = ab + ear_gain_delta(b, c, l).unwrap();
            prop_assert!((path - ear_gain_delta(a, c, l).unwrap()).abs() < 1e-9);
        }
    }
}
