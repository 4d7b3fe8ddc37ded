//! Long-term band power of a dated audio corpus, averaged per release year.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::data::{read_rows, Row};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::signal::{AudioClip, SpectrumEngine, Window};

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// Longest Welch segment in samples.
pub const WELCH_SEGMENT: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("manifest", "needs at least one entry"));
        }
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !(MIN_YEAR..=MAX_YEAR).contains(&e.year) {
                return Err(Error::out_of_range(
                    "release year",
                    e.year as f64,
                    MIN_YEAR as f64,
                    MAX_YEAR as f64,
                ));
            }
            if !seen.insert(&e.path) {
                return Err(Error::domain("manifest", format!("duplicate path {}", e.path.display())));
            }
        }
        Ok(Self { entries })
    }

    /// Parses `path,year` rows; relative paths resolve against `base_dir`.
    pub fn parse(source_name: &str, reader: impl std::io::Read, base_dir: &Path) -> Result<Self> {
        let rows = read_rows(source_name, reader, &["path", "year"])?;
        if rows.is_empty() {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: 1,
                reason: "no entries".into(),
            });
        }
        let entries = rows
            .iter()
            .map(|row: &Row| {
                let year = row.fields[1].parse::<i32>().map_err(|_| Error::Parse {
                    source_name: source_name.to_string(),
                    line: row.line,
                    reason: format!("year '{}' is not an integer", row.fields[1]),
                })?;
                Ok(ManifestEntry {
                    path: base_dir.join(&row.fields[0]),
                    year,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&path.display().to_string(), file, base)
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }
}

/// Frequency band; `high: None` extends to the Nyquist frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band<T> {
    pub low: T,
    pub high: Option<T>,
}

impl<T: Real> Band<T> {
    pub fn new(low: T, high: Option<T>) -> Result<Self> {
        if !(low >= T::zero()) || high.is_some_and(|h| !(h > low)) {
            return Err(Error::domain("band", format!("[{low}, {high:?}] Hz is empty")));
        }
        Ok(Self { low, high })
    }

    /// Upper edge for a clip at `sample_rate`.
    pub fn resolve(&self, sample_rate: u32) -> Result<(T, T)> {
        let nyquist = T::from_u32(sample_rate).unwrap() / T::lit(2.0);
        let high = self.high.unwrap_or(nyquist);
        if high > nyquist || self.low >= nyquist {
            return Err(Error::out_of_range("band edge", high.to_f64_lossy(), 0.0, nyquist.to_f64_lossy()));
        }
        Ok((self.low, high))
    }

    pub fn label(&self) -> String {
        match self.high {
            Some(h) => format!("{}-{}", self.low, h),
            None => format!("{}-nyquist", self.low),
        }
    }
}

/// Six octave bands from 20 Hz to 1280 Hz and a residual band up to Nyquist.
pub fn default_bands<T: Real>() -> Vec<Band<T>> {
    let mut bands: Vec<Band<T>> = (0..6)
        .map(|i| Band {
            low: T::lit(20.0 * 2f64.powi(i)),
            high: Some(T::lit(20.0 * 2f64.powi(i + 1))),
        })
        .collect();
    bands.push(Band {
        low: T::lit(1280.0),
        high: None,
    });
    bands
}

/// One-sided Welch power spectral density (power per Hz), Hann segments
/// with 50% overlap. Returns the density and its bin width.
pub fn welch_psd<T: Real>(clip: &AudioClip<T>) -> (Vec<T>, T) {
    let x = clip.samples();
    let seg = WELCH_SEGMENT.min(prev_power_of_two(x.len())).max(1);
    let hop = (seg / 2).max(1);
    let taper: Vec<T> = if seg > 1 {
        Window::Hann.coefficients(seg)
    } else {
        vec![T::one()]
    };
    let window_power: T = taper.iter().map(|&w| w * w).sum();
    let sr = T::from_u32(clip.sample_rate()).unwrap();
    let mut engine = SpectrumEngine::new(seg);
    let n_segments = 1 + (x.len() - seg) / hop;
    let mut psd = vec![T::zero(); seg / 2 + 1];
    for s in 0..n_segments {
        let p = engine.powers(&x[s * hop..s * hop + seg], &taper);
        for (acc, v) in psd.iter_mut().zip(p) {
            *acc = *acc + v;
        }
    }
    let scale = T::from_usize_lossy(n_segments) * sr * window_power;
    let two = T::lit(2.0);
    for (k, v) in psd.iter_mut().enumerate() {
        let one_sided = if k == 0 || (seg % 2 == 0 && k == seg / 2) { T::one() } else { two };
        *v = *v * one_sided / scale;
    }
    (psd, sr / T::from_usize_lossy(seg))
}

fn prev_power_of_two(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - n.leading_zeros())
    }
}

/// Mean power density (per Hz) in each band: Welch PSD integrated over the
/// bins whose centers fall in the band, divided by the band width.
pub fn band_energy<T: Real>(clip: &AudioClip<T>, bands: &[Band<T>]) -> Result<Vec<T>> {
    let resolved = bands
        .iter()
        .map(|b| b.resolve(clip.sample_rate()))
        .collect::<Result<Vec<_>>>()?;
    let (psd, df) = welch_psd(clip);
    let nyquist_bin = psd.len() - 1;
    Ok(resolved
        .iter()
        .zip(bands)
        .map(|(&(lo, hi), band)| {
            let power: T = psd
                .iter()
                .enumerate()
                .filter(|&(k, _)| {
                    let f = T::from_usize_lossy(k) * df;
                    f >= lo && (f < hi || (band.high.is_none() && k == nyquist_bin))
                })
                .map(|(_, &p)| p * df)
                .sum();
            power / (hi - lo)
        })
        .collect())
}

/// Year × band mean power density.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix<T> {
    pub years: Vec<i32>,
    pub bands: Vec<Band<T>>,
    /// `values[y][b]` for `years[y]` and `bands[b]`.
    pub values: Vec<Vec<T>>,
    /// Tracks averaged into each year.
    pub tracks_per_year: Vec<usize>,
    pub normalized: bool,
}

impl<T: Real> BandMatrix<T> {
    /// Values of one band across years.
    pub fn band_series(&self, band: usize) -> Vec<T> {
        self.values.iter().map(|row| row[band]).collect()
    }

    /// Scales each band so its mean across years is 1. Bands with no
    /// energy are left at zero.
    pub fn normalize(&mut self) {
        let n = T::from_usize_lossy(self.years.len());
        for b in 0..self.bands.len() {
            let mean = self.values.iter().map(|row| row[b]).sum::<T>() / n;
            if mean > T::zero() {
                self.values.iter_mut().for_each(|row| row[b] = row[b] / mean);
            }
        }
        self.normalized = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolutionOptions {
    /// Scale each band to unit mean across years.
    pub normalize: bool,
    /// Scale each track to unit RMS before band analysis.
    pub equalize_rms: bool,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        Self {
            normalize: true,
            equalize_rms: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport<T> {
    pub matrix: BandMatrix<T>,
    /// Files that could not be analysed, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

/// Per-year mean band power of every decodable track in the manifest.
pub fn evolution<T: Real>(
    manifest: &CorpusManifest,
    bands: &[Band<T>],
    options: EvolutionOptions,
) -> Result<CorpusReport<T>> {
    evolution_with(manifest, bands, options, |path| AudioClip::read_wav(path))
}

/// [`evolution`] with a caller-supplied decoder.
pub fn evolution_with<T, F>(
    manifest: &CorpusManifest,
    bands: &[Band<T>],
    options: EvolutionOptions,
    decode: F,
) -> Result<CorpusReport<T>>
where
    T: Real,
    F: Fn(&Path) -> Result<AudioClip<T>> + Sync,
{
    if bands.is_empty() {
        return Err(Error::domain("bands", "need at least one band"));
    }
    let mut entries: Vec<&ManifestEntry> = manifest.entries().iter().collect();
    entries.sort_by(|a, b| (a.year, &a.path).cmp(&(b.year, &b.path)));
    let analysed: Vec<Result<Vec<T>>> = entries
        .par_iter()
        .map(|e| {
            let clip = decode(&e.path)?;
            let clip = if options.equalize_rms && clip.rms() > T::zero() {
                clip.scaled(clip.rms().recip())
            } else {
                clip
            };
            band_energy(&clip, bands)
        })
        .collect();

    let mut per_year: BTreeMap<i32, (Vec<T>, usize)> = BTreeMap::new();
    let mut skipped = Vec::new();
    for (entry, result) in entries.iter().zip(analysed) {
        match result {
            Ok(powers) => {
                let slot = per_year
                    .entry(entry.year)
                    .or_insert_with(|| (vec![T::zero(); bands.len()], 0));
                for (acc, p) in slot.0.iter_mut().zip(powers) {
                    *acc = *acc + p;
                }
                slot.1 += 1;
            }
            Err(e) => skipped.push((entry.path.clone(), e.to_string())),
        }
    }
    if per_year.is_empty() {
        return Err(Error::Undecodable(skipped));
    }
    let mut matrix = BandMatrix {
        years: per_year.keys().copied().collect(),
        bands: bands.to_vec(),
        values: per_year
            .values()
            .map(|(sum, n)| sum.iter().map(|&s| s / T::from_usize_lossy(*n)).collect())
            .collect(),
        tracks_per_year: per_year.values().map(|(_, n)| *n).collect(),
        normalized: false,
    };
    if options.normalize {
        matrix.normalize();
    }
    Ok(CorpusReport { matrix, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sine(f: f64, seconds: f64) -> AudioClip<f64> {
        let sr = 44100;
        let n = (seconds * sr as f64) as usize;
        let s = (0..n)
            .map(|i| (std::f64::consts::TAU * f * i as f64 / sr as f64).sin())
            .collect();
        AudioClip::new(s, sr).unwrap()
    }

    fn noise(seconds: f64, seed: u64) -> AudioClip<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = (seconds * 44100.0) as usize;
        AudioClip::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(), 44100).unwrap()
    }

    fn band(lo: f64, hi: f64) -> Band<f64> {
        Band::new(lo, Some(hi)).unwrap()
    }

    #[test]
    fn sine_power_lands_in_its_band() {
        let p = band_energy(&sine(50.0, 2.0), &[band(20.0, 80.0), band(80.0, 320.0)]).unwrap();
        let (a, b) = (p[0] * 60.0, p[1] * 240.0);
        assert!(a / (a + b) >= 0.99);
        // unit sine has mean power 1/2
        assert!((a - 0.5).abs() < 0.01, "{a}");
    }

    #[test]
    fn white_noise_is_flat() {
        let p = band_energy(&noise(12.0, 7), &default_bands()).unwrap();
        let first = p[0];
        for v in &p {
            assert!((10.0 * (v / first).log10()).abs() < 1.0, "{p:?}");
        }
    }

    #[test]
    fn silence_is_zero() {
        let clip = AudioClip::new(vec![0.0f64; 20000], 44100).unwrap();
        assert!(band_energy(&clip, &default_bands()).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn band_beyond_nyquist_is_rejected() {
        let clip = AudioClip::new(vec![0.0f64; 20000], 8000).unwrap();
        assert!(band_energy(&clip, &[band(3000.0, 5000.0)]).is_err());
        assert!(band_energy(&clip, &[Band::new(4000.0, None).unwrap()]).is_err());
    }

    #[test]
    fn band_powers_add_up_to_total() {
        let clip = noise(3.0, 3);
        let bands = vec![band(0.0, 20.0), band(20.0, 500.0), Band::new(500.0, None).unwrap()];
        let p = band_energy(&clip, &bands).unwrap();
        let widths = [20.0, 480.0, 22050.0 - 500.0];
        let summed: f64 = p.iter().zip(widths).map(|(v, w)| v * w).sum();
        let (psd, df) = welch_psd(&clip);
        let total: f64 = psd.iter().map(|v| v * df).sum();
        assert!((summed / total - 1.0).abs() < 0.02);
    }

    #[test]
    fn default_band_layout() {
        let b = default_bands::<f64>();
        assert_eq!(b.len(), 7);
        assert_eq!((b[0].low, b[0].high), (20.0, Some(40.0)));
        assert_eq!((b[5].low, b[5].high), (640.0, Some(1280.0)));
        assert_eq!(b[6].high, None);
        assert_eq!(b[6].label(), "1280-nyquist");
    }

    #[test]
    fn manifest_parsing() {
        let text = "# corpus\npath,year\na.wav,1990\nsub/b.wav,2001\n";
        let m = CorpusManifest::parse("m.csv", text.as_bytes(), Path::new("/music")).unwrap();
        assert_eq!(m.entries()[1].path, PathBuf::from("/music/sub/b.wav"));
        assert_eq!(m.entries()[1].year, 2001);
        for bad in [
            "path,year\na.wav,1800\n",
            "path,year\na.wav,1990\na.wav,1991\n",
            "path,year\na.wav,later\n",
            "path,year\n",
            "file,year\na.wav,1990\n",
        ] {
            assert!(CorpusManifest::parse("m.csv", bad.as_bytes(), Path::new(".")).is_err(), "{bad}");
        }
    }

    fn entries(years: &[i32]) -> CorpusManifest {
        CorpusManifest::new(
            years
                .iter()
                .enumerate()
                .map(|(i, &y)| ManifestEntry {
                    path: PathBuf::from(format!("t{i}.wav")),
                    year: y,
                })
                .collect(),
        )
        .unwrap()
    }

    /// Decoder stand-in: track index picks the tone frequency and gain.
    fn decoder(path: &Path) -> Result<AudioClip<f64>> {
        let name = path.to_str().unwrap();
        if name.contains("bad") {
            return Err(Error::domain("decode", "corrupt"));
        }
        let i: usize = name.trim_start_matches('t').trim_end_matches(".wav").parse().unwrap();
        Ok(sine(60.0 + 100.0 * (i % 5) as f64, 0.5).scaled(0.1 + i as f64 * 0.05))
    }

    #[test]
    fn single_track_matrix_equals_its_band_energy() {
        let bands = default_bands();
        let opts = EvolutionOptions { normalize: false, equalize_rms: false };
        let r = evolution_with(&entries(&[1999]), &bands, opts, decoder).unwrap();
        assert_eq!(r.matrix.years, vec![1999]);
        assert_eq!(r.matrix.values[0], band_energy(&decoder(Path::new("t0.wav")).unwrap(), &bands).unwrap());
    }

    #[test]
    fn normalized_constant_matrix_is_all_ones() {
        let mut m = BandMatrix {
            years: vec![2000, 2001, 2002],
            bands: default_bands::<f64>(),
            values: vec![vec![0.3; 7]; 3],
            tracks_per_year: vec![1; 3],
            normalized: false,
        };
        m.normalize();
        assert!(m.values.iter().flatten().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn undecodable_files_are_reported() {
        let mut m = entries(&[2000, 2001]);
        m.entries.push(ManifestEntry { path: "bad.wav".into(), year: 2002 });
        let r = evolution_with(&m, &default_bands(), EvolutionOptions::default(), decoder).unwrap();
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.matrix.years, vec![2000, 2001]);
        let all_bad = CorpusManifest::new(vec![ManifestEntry { path: "bad.wav".into(), year: 2002 }]).unwrap();
        match evolution_with(&all_bad, &default_bands(), EvolutionOptions::default(), decoder) {
            Err(Error::Undecodable(list)) => assert_eq!(list.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn order_and_gain_invariant(years in prop::collection::vec(1990i32..1995, 1..8), gain in 0.01f64..100.0, seed in any::<u64>()) {
            let m = entries(&years);
            let mut shuffled = m.entries().to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.gen_range(0..=i));
            }
            let shuffled = CorpusManifest::new(shuffled).unwrap();
            let opts = EvolutionOptions { normalize: true, equalize_rms: false };
            let bands = default_bands();
            let a = evolution_with(&m, &bands, opts, decoder).unwrap();
            let b = evolution_with(&shuffled, &bands, opts, |p| decoder(p).map(|c| c.scaled(gain))).unwrap();
            prop_assert_eq!(&a.matrix.years, &b.matrix.years);
            for (x, y) in a.matrix.values.iter().flatten().zip(b.matrix.values.iter().flatten()) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
            for band in 0..bands.len() {
                let s = a.matrix.band_series(band);
                let mean = s.iter().sum::<f64>() / s.len() as f64;
                prop_assert!(mean == 0.0 || (mean - 1.0).abs() < 1e-9);
            }
        }
    }
}
