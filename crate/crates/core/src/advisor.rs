//! Combined loudspeaker × ear response and the level cost of transposing a
//! sub-bass voice, plus the song-key search built on it.

use std::cmp::Ordering;

use crate::data;
use crate::error::{Error, Result};
use crate::monitors::ResponseCurve;
use crate::perception::{self, PhonLevel};
use crate::real::{power_to_db, Real};
use crate::signal::{frequency_of_note, semitones_between, Note, A4_MIDI};

/// A frequency-dependent gain in dB, defined on a closed band.
pub trait GainCurve<T: Real> {
    fn gain_db(&self, f: T) -> Result<T>;
    fn band(&self) -> (T, T);

    fn contains(&self, f: T) -> bool {
        let (lo, hi) = self.band();
        f >= lo && f <= hi
    }
}

impl<T: Real> GainCurve<T> for ResponseCurve<T> {
    fn gain_db(&self, f: T) -> Result<T> {
        self.response_at(f)
    }

    fn band(&self) -> (T, T) {
        ResponseCurve::band(self)
    }
}

/// Speaker response plus ear sensitivity at a fixed loudness:
/// `gain(f) = speaker(f) − (elc_spl(f) − elc_spl(1 kHz))`.
#[derive(Debug, Clone)]
pub struct CombinedCurve<T> {
    speakers: ResponseCurve<T>,
    loudness: PhonLevel<T>,
    reference_spl: T,
    band: (T, T),
}

pub fn combined_response<T: Real>(
    curve: &ResponseCurve<T>,
    loudness: PhonLevel<T>,
) -> Result<CombinedCurve<T>> {
    let (s_lo, s_hi) = curve.band();
    let lo = s_lo.max(T::lit(perception::MIN_FREQUENCY_HZ));
    let hi = s_hi.min(T::lit(perception::MAX_FREQUENCY_HZ));
    if lo >= hi {
        return Err(Error::domain(
            "combined response",
            format!(
                "speaker band [{s_lo}, {s_hi}] Hz does not overlap the equal-loudness band [{}, {}] Hz",
                perception::MIN_FREQUENCY_HZ,
                perception::MAX_FREQUENCY_HZ
            ),
        ));
    }
    Ok(CombinedCurve {
        speakers: curve.clone(),
        loudness,
        reference_spl: perception::elc_spl(T::lit(1000.0), loudness)?,
        band: (lo, hi),
    })
}

impl<T: Real> CombinedCurve<T> {
    pub fn loudness(&self) -> PhonLevel<T> {
        self.loudness
    }

    pub fn speakers(&self) -> &ResponseCurve<T> {
        &self.speakers
    }

    /// Ear term alone: sensitivity relative to 1 kHz.
    pub fn ear_gain_db(&self, f: T) -> Result<T> {
        Ok(self.reference_spl - perception::elc_spl(f, self.loudness)?)
    }

    /// Combined gain change for a tone moved from `f_from` to `f_to`.
    pub fn delta(&self, f_from: T, f_to: T) -> Result<T> {
        Ok(self.gain_db(f_to)? - self.gain_db(f_from)?)
    }
}

impl<T: Real> GainCurve<T> for CombinedCurve<T> {
    fn gain_db(&self, f: T) -> Result<T> {
        if !self.contains(f) {
            return Err(Error::out_of_range(
                "frequency (Hz)",
                f.to_f64_lossy(),
                self.band.0.to_f64_lossy(),
                self.band.1.to_f64_lossy(),
            ));
        }
        Ok(self.speakers.response_at(f)? + self.ear_gain_db(f)?)
    }

    fn band(&self) -> (T, T) {
        self.band
    }
}

/// Producer vocabulary for the sub-bass region a frequency falls in.
pub fn sub_bass_region<T: Real>(f: T) -> &'static str {
    let f = f.to_f64_lossy();
    if f < 40.0 {
        "boom"
    } else if f < 65.0 {
        "thump"
    } else if f < 100.0 {
        "punch"
    } else {
        "above sub-bass"
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial<T> {
    pub harmonic: u32,
    pub frequency: T,
    pub amplitude: T,
}

/// Harmonic partials with linear amplitudes normalized to a maximum of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile<T> {
    partials: Vec<Partial<T>>,
}

impl<T: Real> SpectralProfile<T> {
    /// Validates the partials and normalizes their amplitudes. Every
    /// frequency must sit within 1% of its harmonic index times the
    /// fundamental implied by the lowest partial.
    pub fn new(mut partials: Vec<Partial<T>>) -> Result<Self> {
        if partials.is_empty() {
            return Err(Error::domain("spectral profile", "needs at least one partial"));
        }
        partials.sort_by_key(|p| p.harmonic);
        for p in &partials {
            if p.harmonic == 0 {
                return Err(Error::domain("spectral profile", "harmonic indices start at 1"));
            }
            if !(p.frequency > T::zero() && p.frequency.is_finite()) {
                return Err(Error::domain(
                    "spectral profile",
                    format!("partial {} has invalid frequency {}", p.harmonic, p.frequency),
                ));
            }
            if !(p.amplitude >= T::zero() && p.amplitude.is_finite()) {
                return Err(Error::domain(
                    "spectral profile",
                    format!("partial {} has invalid amplitude {}", p.harmonic, p.amplitude),
                ));
            }
        }
        if partials.windows(2).any(|w| w[0].harmonic == w[1].harmonic) {
            return Err(Error::domain("spectral profile", "duplicate harmonic index"));
        }
        let f0 = partials[0].frequency / T::from_u32(partials[0].harmonic).unwrap();
        for p in &partials {
            let expected = f0 * T::from_u32(p.harmonic).unwrap();
            if ((p.frequency - expected) / expected).abs() > T::lit(0.01) {
                return Err(Error::domain(
                    "spectral profile",
                    format!(
                        "partial {} at {} Hz is not within 1% of {} Hz",
                        p.harmonic, p.frequency, expected
                    ),
                ));
            }
        }
        let max = partials
            .iter()
            .fold(T::zero(), |acc, p| acc.max(p.amplitude));
        if max <= T::zero() {
            return Err(Error::domain("spectral profile", "all amplitudes are zero"));
        }
        for p in &mut partials {
            p.amplitude = p.amplitude / max;
        }
        Ok(Self { partials })
    }

    /// Exact harmonics `1..=amplitudes.len()` of `fundamental`.
    pub fn harmonic(fundamental: T, amplitudes: &[T]) -> Result<Self> {
        Self::new(
            amplitudes
                .iter()
                .enumerate()
                .map(|(i, &amplitude)| {
                    let harmonic = i as u32 + 1;
                    Partial {
                        harmonic,
                        frequency: fundamental * T::from_u32(harmonic).unwrap(),
                        amplitude,
                    }
                })
                .collect(),
        )
    }

    /// A lone partial at `fundamental`.
    pub fn single(fundamental: T) -> Result<Self> {
        Self::harmonic(fundamental, &[T::one()])
    }

    /// Parses a `harmonic,relative_amplitude` table.
    pub fn parse_table(source_name: &str, text: &str, fundamental: T) -> Result<Self> {
        let rows = data::read_rows(source_name, text.as_bytes(), &["harmonic", "relative_amplitude"])?;
        let partials = rows
            .iter()
            .map(|row| {
                let harmonic: u32 = row.fields[0].parse().map_err(|_| Error::Parse {
                    source_name: source_name.to_string(),
                    line: row.line,
                    reason: format!("harmonic '{}' is not a positive integer", row.fields[0]),
                })?;
                let amplitude = data::parse_f64(source_name, row, 1, "amplitude")?;
                Ok(Partial {
                    harmonic,
                    frequency: fundamental * T::from_u32(harmonic).unwrap_or_else(T::zero),
                    amplitude: T::lit(amplitude),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(partials)
    }

    pub fn partials(&self) -> &[Partial<T>] {
        &self.partials
    }

    pub fn fundamental(&self) -> T {
        self.partials[0].frequency / T::from_u32(self.partials[0].harmonic).unwrap()
    }

    /// Every partial scaled by `2^(semitones/12)`.
    pub fn transposed(&self, semitones: T) -> Self {
        let ratio = (semitones / T::lit(12.0)).exp2();
        Self {
            partials: self
                .partials
                .iter()
                .map(|p| Partial {
                    frequency: p.frequency * ratio,
                    ..*p
                })
                .collect(),
        }
    }

    /// Same amplitudes re-pitched to a new fundamental.
    pub fn at_fundamental(&self, fundamental: T) -> Self {
        let ratio = fundamental / self.fundamental();
        Self {
            partials: self
                .partials
                .iter()
                .map(|p| Partial {
                    frequency: p.frequency * ratio,
                    ..*p
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialDelta<T> {
    pub harmonic: u32,
    pub f_from: T,
    pub f_to: T,
    /// Gain change in dB (power and amplitude dB coincide for a gain).
    pub delta_db: T,
}

/// Level change of a profile transposed on a gain curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TranspositionReport<T> {
    pub semitones: T,
    pub per_partial: Vec<PartialDelta<T>>,
    /// `10·log10` ratio of amplitude²-weighted linear power after/before.
    pub total_power_delta_db: T,
    /// Delta of harmonic 1, or of the lowest partial present.
    pub fundamental_delta_db: T,
}

fn partial_gain<T: Real, C: GainCurve<T> + ?Sized>(curve: &C, harmonic: u32, f: T) -> Result<T> {
    if !curve.contains(f) {
        let (lo, hi) = curve.band();
        return Err(Error::PartialOutOfBand {
            harmonic,
            frequency: f.to_f64_lossy(),
            min: lo.to_f64_lossy(),
            max: hi.to_f64_lossy(),
        });
    }
    curve.gain_db(f)
}

pub fn transposition_loss<T: Real, C: GainCurve<T> + ?Sized>(
    profile: &SpectralProfile<T>,
    semitones: T,
    curve: &C,
) -> Result<TranspositionReport<T>> {
    let ratio = (semitones / T::lit(12.0)).exp2();
    let ten = T::lit(10.0);
    let mut before = T::zero();
    let mut after = T::zero();
    let mut per_partial = Vec::with_capacity(profile.partials.len());
    for p in &profile.partials {
        let f_to = p.frequency * ratio;
        let g_from = partial_gain(curve, p.harmonic, p.frequency)?;
        let g_to = partial_gain(curve, p.harmonic, f_to)?;
        let weight = p.amplitude * p.amplitude;
        before = before + weight * ten.powf(g_from / ten);
        after = after + weight * ten.powf(g_to / ten);
        per_partial.push(PartialDelta {
            harmonic: p.harmonic,
            f_from: p.frequency,
            f_to,
            delta_db: g_to - g_from,
        });
    }
    Ok(TranspositionReport {
        semitones,
        fundamental_delta_db: per_partial[0].delta_db,
        per_partial,
        total_power_delta_db: power_to_db(after / before),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoteGain<T> {
    pub note: Note<T>,
    pub frequency: T,
    pub gain_db: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<T> {
    pub per_note: Vec<NoteGain<T>>,
    pub spread_db: T,
}

/// Plays `shape` on each note and reports the total level change relative
/// to the shape at its own pitch, and the max − min spread across notes.
pub fn stability_report<T: Real, C: GainCurve<T> + ?Sized>(
    notes: &[Note<T>],
    shape: &SpectralProfile<T>,
    curve: &C,
    reference_hz: T,
) -> Result<StabilityReport<T>> {
    if notes.is_empty() {
        return Err(Error::domain("note sequence", "at least one note is required"));
    }
    let per_note = notes
        .iter()
        .map(|&note| {
            let frequency = frequency_of_note(note, reference_hz);
            let s = semitones_between(shape.fundamental(), frequency);
            let report = transposition_loss(shape, s, curve)?;
            Ok(NoteGain {
                note,
                frequency,
                gain_db: report.total_power_delta_db,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (min, max) = per_note.iter().fold(
        (T::infinity(), T::neg_infinity()),
        |(lo, hi), n| (lo.min(n.gain_db), hi.max(n.gain_db)),
    );
    Ok(StabilityReport {
        per_note,
        spread_db: max - min,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyCandidate<T> {
    /// Semitones the song is moved by.
    pub song_transposition: i32,
    /// Pitch the drum voice plays (the new root, in the octave nearest the
    /// sample's own pitch).
    pub drum_note: Note<T>,
    pub drum_frequency: T,
    /// Interval the sample itself is shifted by to reach `drum_frequency`.
    pub sample_shift_semitones: T,
    /// Total level change of the sample profile, `None` if infeasible.
    pub total_gain_db: Option<T>,
    pub infeasible_reason: Option<String>,
    pub region: &'static str,
}

impl<T> KeyCandidate<T> {
    pub fn is_baseline(&self) -> bool {
        self.song_transposition == 0
    }
}

/// For every song transposition in `candidate_range` (and always 0), plays
/// the transposed root on the drum voice at the octave nearest `sample_f0`
/// and ranks the candidates by the total gain of `shape` there, highest
/// first. Ties go to the smaller |s|, then the smaller s. Candidates whose
/// partials leave the curve band are listed last as infeasible.
pub fn recommend_key<T: Real, C: GainCurve<T> + ?Sized>(
    song_key_root: Note<T>,
    sample_f0: T,
    shape: &SpectralProfile<T>,
    curve: &C,
    candidate_range: (i32, i32),
    reference_hz: T,
) -> Result<Vec<KeyCandidate<T>>> {
    if !curve.contains(sample_f0) {
        let (lo, hi) = curve.band();
        return Err(Error::out_of_range(
            "sample f0 (Hz)",
            sample_f0.to_f64_lossy(),
            lo.to_f64_lossy(),
            hi.to_f64_lossy(),
        ));
    }
    let (lo, hi) = candidate_range;
    if lo > hi {
        return Err(Error::domain(
            "candidate range",
            format!("lower bound {lo} exceeds upper bound {hi}"),
        ));
    }
    let profile = shape.at_fundamental(sample_f0);
    let sample_midi =
        T::from_i32(A4_MIDI).unwrap() + T::lit(12.0) * (sample_f0 / reference_hz).log2();
    let mut shifts: Vec<i32> = (lo..=hi).collect();
    if !shifts.contains(&0) {
        shifts.push(0);
    }
    let mut candidates: Vec<KeyCandidate<T>> = shifts
        .into_iter()
        .map(|s| {
            let chroma = (song_key_root.midi() + s).rem_euclid(12);
            let midi = nearest_octave(chroma, sample_midi);
            let drum_note = Note::from_midi(midi);
            let drum_frequency = frequency_of_note(drum_note, reference_hz);
            let shift = T::from_i32(midi).unwrap() - sample_midi;
            let (total_gain_db, infeasible_reason) =
                match transposition_loss(&profile, shift, curve) {
                    Ok(report) => (Some(report.total_power_delta_db), None),
                    Err(e) => (None, Some(e.to_string())),
                };
            KeyCandidate {
                song_transposition: s,
                drum_note,
                drum_frequency,
                sample_shift_semitones: shift,
                total_gain_db,
                infeasible_reason,
                region: sub_bass_region(drum_frequency),
            }
        })
        .collect();
    candidates.sort_by(rank_order);
    Ok(candidates)
}

fn rank_order<T: Real>(a: &KeyCandidate<T>, b: &KeyCandidate<T>) -> Ordering {
    let by_gain = match (a.total_gain_db, b.total_gain_db) {
        (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    by_gain
        .then(a.song_transposition.abs().cmp(&b.song_transposition.abs()))
        .then(a.song_transposition.cmp(&b.song_transposition))
}

/// MIDI number with pitch class `chroma` closest to `target` (ties resolve
/// downward).
fn nearest_octave<T: Real>(chroma: i32, target: T) -> i32 {
    let t = target.to_f64_lossy();
    let base = chroma + 12 * ((t - chroma as f64) / 12.0).floor() as i32;
    if (base as f64 + 12.0 - t) < (t - base as f64) {
        base + 12
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monitors::{bundled_dataset, median_response, DEFAULT_SMOOTH_OCTAVES};
    use proptest::prelude::*;

    fn phon60() -> PhonLevel<f64> {
        PhonLevel::new(60.0).unwrap()
    }

    fn bundled_combined() -> CombinedCurve<f64> {
        let curve = median_response(&bundled_dataset(), DEFAULT_SMOOTH_OCTAVES).unwrap();
        combined_response(&curve, phon60()).unwrap()
    }

    fn flat_combined() -> CombinedCurve<f64> {
        combined_response(&ResponseCurve::flat(20.0, 20000.0, 0.0).unwrap(), phon60()).unwrap()
    }

    #[test]
    fn flat_speakers_leave_pure_ear_deltas() {
        let c = flat_combined();
        let d = c.delta(49.48, 37.06).unwrap();
        let ear = perception::ear_gain_delta(49.48, 37.06, phon60()).unwrap();
        assert!((d - ear).abs() < 1e-9);
        assert_eq!(c.band(), (20.0, 12500.0));
    }

    #[test]
    fn band_mismatch_is_rejected() {
        let high = ResponseCurve::flat(13000.0, 20000.0, 0.0).unwrap();
        assert!(combined_response(&high, phon60()).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(SpectralProfile::<f64>::new(vec![]).is_err());
        let off = vec![
            Partial { harmonic: 1, frequency: 50.0, amplitude: 1.0 },
            Partial { harmonic: 2, frequency: 103.0, amplitude: 0.5 },
        ];
        assert!(SpectralProfile::new(off).is_err());
        let p = SpectralProfile::harmonic(50.0, &[2.0, 1.0, 0.5]).unwrap();
        assert_eq!(p.partials()[0].amplitude, 1.0);
        assert_eq!(p.partials()[2].amplitude, 0.25);
        assert_eq!(p.fundamental(), 50.0);
        assert!(SpectralProfile::harmonic(50.0, &[0.0, 0.0]).is_err());
        // missing fundamental is allowed
        let upper = SpectralProfile::new(vec![
            Partial { harmonic: 2, frequency: 100.0, amplitude: 1.0 },
            Partial { harmonic: 3, frequency: 150.5, amplitude: 1.0 },
        ])
        .unwrap();
        assert_eq!(upper.fundamental(), 50.0);
    }

    #[test]
    fn zero_shift_is_zero() {
        let c = bundled_combined();
        let p = SpectralProfile::harmonic(49.48, &[1.0, 0.4, 0.2, 0.1, 0.05]).unwrap();
        let r = transposition_loss(&p, 0.0, &c).unwrap();
        assert_eq!(r.total_power_delta_db, 0.0);
        assert!(r.per_partial.iter().all(|d| d.delta_db == 0.0));
    }

    #[test]
    fn out_of_band_partial_is_named() {
        let c = bundled_combined();
        let p = SpectralProfile::harmonic(49.48, &[1.0, 0.5]).unwrap();
        match transposition_loss(&p, -24.0, &c) {
            Err(Error::PartialOutOfBand { harmonic, .. }) => assert_eq!(harmonic, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_note_sequence_has_no_spread() {
        let c = bundled_combined();
        let shape = SpectralProfile::single(49.48).unwrap();
        let g1 = Note::from_midi(31);
        let r = stability_report(&[g1, g1, g1], &shape, &c, 440.0).unwrap();
        assert_eq!(r.spread_db, 0.0);
        assert!(stability_report(&[], &shape, &c, 440.0).is_err());
    }

    #[test]
    fn inner_note_never_widens_spread() {
        let c = bundled_combined();
        let shape = SpectralProfile::harmonic(49.48, &[1.0, 0.3]).unwrap();
        let outer = [Note::from_midi(26), Note::from_midi(33)];
        let base = stability_report(&outer, &shape, &c, 440.0).unwrap().spread_db;
        for midi in 27..33 {
            let with = [outer[0], Note::from_midi(midi), outer[1]];
            let s = stability_report(&with, &shape, &c, 440.0).unwrap().spread_db;
            assert!(s <= base + 1e-12);
        }
    }

    #[test]
    fn baseline_only_range() {
        let c = bundled_combined();
        let shape = SpectralProfile::single(49.48).unwrap();
        let d: Note<f64> = "D".parse().unwrap();
        let ranked = recommend_key(d, 49.48, &shape, &c, (0, 0), 440.0).unwrap();
        assert_eq!(ranked.len(), 1);
        assert!(ranked[0].is_baseline());
        assert_eq!(ranked[0].drum_note.name(), "D1");
    }

    #[test]
    fn flat_curve_ties_fall_back_to_smallest_shift() {
        let flat = ResponseCurve::flat(20.0, 20000.0, 0.0).unwrap();
        let shape = SpectralProfile::harmonic(49.48, &[1.0, 0.5]).unwrap();
        let d: Note<f64> = "D".parse().unwrap();
        let ranked = recommend_key(d, 49.48, &shape, &flat, (-6, 6), 440.0).unwrap();
        let order: Vec<i32> = ranked.iter().map(|c| c.song_transposition).collect();
        assert_eq!(order, vec![0, -1, 1, -2, 2, -3, 3, -4, 4, -5, 5, -6, 6]);
        assert!(ranked.iter().all(|c| c.total_gain_db == Some(0.0)));
    }

    #[test]
    fn octave_choice() {
        assert_eq!(nearest_octave(2, 31.17_f64), 26); // D near G1+17c
        assert_eq!(nearest_octave(1, 31.17_f64), 37); // C# -> C#2
        assert_eq!(nearest_octave(7, 31.0_f64), 31);
        assert_eq!(nearest_octave(1, 31.0_f64), 25); // exact tritone resolves down
    }

    #[test]
    fn regions() {
        assert_eq!(sub_bass_region(30.0), "boom");
        assert_eq!(sub_bass_region(50.0), "thump");
        assert_eq!(sub_bass_region(80.0), "punch");
        assert_eq!(sub_bass_region(250.0), "above sub-bass");
    }

    proptest! {
        #[test]
        fn total_is_scale_invariant_and_bracketed(
            amps in prop::collection::vec(0.01f64..1.0, 1..6),
            scale in 0.01f64..100.0,
            s in -5.0f64..5.0,
        ) {
            let c = bundled_combined();
            let p = SpectralProfile::harmonic(49.48, &amps).unwrap();
            let scaled: Vec<f64> = amps.iter().map(|a| a * scale).collect();
            let q = SpectralProfile::harmonic(49.48, &scaled).unwrap();
            let r = transposition_loss(&p, s, &c).unwrap();
            let r2 = transposition_loss(&q, s, &c).unwrap();
            prop_assert!((r.total_power_delta_db - r2.total_power_delta_db).abs() < 1e-9);
            let min = r.per_partial.iter().map(|d| d.delta_db).fold(f64::INFINITY, f64::min);
            let max = r.per_partial.iter().map(|d| d.delta_db).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(r.total_power_delta_db >= min - 1e-9 && r.total_power_delta_db <= max + 1e-9);
        }

        #[test]
        fn there_and_back_cancels(
            amps in prop::collection::vec(0.01f64..1.0, 1..6),
            s in -5.0f64..5.0,
        ) {
            let c = bundled_combined();
            let p = SpectralProfile::harmonic(49.48, &amps).unwrap();
            let there = transposition_loss(&p, s, &c).unwrap();
            let back = transposition_loss(&p.transposed(s), -s, &c).unwrap();
            prop_assert!((there.total_power_delta_db + back.total_power_delta_db).abs() < 1e-6);
        }

        #[test]
        fn downward_loses_on_rising_curve(
            amps in prop::collection::vec(0.01f64..1.0, 1..3),
            f0 in 36.0f64..40.0,
            s in -3.0f64..-0.01,
            slope in 0.5f64..30.0,
        ) {
            let points: Vec<(f64, f64)> = (0..=40)
                .map(|i| {
                    let f = 30.0 * (80.0f64 / 30.0).powf(i as f64 / 40.0);
                    (f, slope * (f / 30.0).log2())
                })
                .collect();
            let curve = ResponseCurve::new(points).unwrap();
            let p = SpectralProfile::harmonic(f0, &amps).unwrap();
            let r = transposition_loss(&p, s, &curve).unwrap();
            prop_assert!(r.total_power_delta_db < 0.0);
        }

        #[test]
        fn ranking_ignores_constant_offset(offset in -20.0f64..20.0, root in 0i32..12) {
            let spk = median_response(&bundled_dataset(), DEFAULT_SMOOTH_OCTAVES).unwrap();
            let a = combined_response(&spk, phon60()).unwrap();
            let b = combined_response(&spk.offset(offset), phon60()).unwrap();
            let shape = SpectralProfile::single(49.48).unwrap();
            let key = Note::from_midi(24 + root);
            let ra = recommend_key(key, 49.48, &shape, &a, (-6, 6), 440.0).unwrap();
            let rb = recommend_key(key, 49.48, &shape, &b, (-6, 6), 440.0).unwrap();
            prop_assert_eq!(ra[0].song_transposition, rb[0].song_transposition);
        }
    }
}
