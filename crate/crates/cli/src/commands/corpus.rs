use std::path::PathBuf;

use basstune::corpus::{default_bands, evolution, Band, CorpusManifest, EvolutionOptions};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Manifest CSV with `path,year` rows; relative paths are resolved
    /// against the manifest's directory.
    #[arg(long)]
    pub manifest: PathBuf,
    /// `default`, or comma-separated `lo:hi` bands in Hz (`hi` may be
    /// `nyquist`).
    #[arg(long, default_value = "default", value_parser = parse_bands)]
    pub bands: BandList,
    /// Scale each band to unit mean across years.
    #[arg(long)]
    pub normalize: bool,
    /// Skip the per-track equal-RMS pre-normalization.
    #[arg(long)]
    pub keep_levels: bool,
}

/// Parsed `--bands` value.
#[derive(Debug, Clone, PartialEq)]
pub struct BandList(pub Vec<Band<f64>>);

fn parse_bands(s: &str) -> Result<BandList, String> {
    if s.trim() == "default" {
        return Ok(BandList(default_bands()));
    }
    s.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| format!("band '{part}' is not 'lo:hi'"))?;
            let lo: f64 = lo.trim().parse().map_err(|_| format!("'{lo}' is not a frequency"))?;
            let hi = match hi.trim() {
                "nyquist" => None,
                v => Some(v.parse::<f64>().map_err(|_| format!("'{v}' is not a frequency"))?),
            };
            Band::new(lo, hi).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()
        .map(BandList)
}

#[derive(Serialize)]
struct BandOut {
    label: String,
    low_hz: f64,
    high_hz: Option<f64>,
}

#[derive(Serialize)]
struct YearOut {
    year: i32,
    tracks: usize,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct Skipped {
    path: String,
    reason: String,
}

#[derive(Serialize)]
struct Body {
    normalized: bool,
    equal_rms: bool,
    bands: Vec<BandOut>,
    years: Vec<YearOut>,
    skipped: Vec<Skipped>,
}

pub fn run(args: &Args, _config: &RunConfig) -> Result<Report, CliError> {
    let manifest = CorpusManifest::from_file(&args.manifest)?;
    let options = EvolutionOptions {
        normalize: args.normalize,
        equalize_rms: !args.keep_levels,
    };
    let report = evolution(&manifest, &args.bands.0, options)?;
    let m = &report.matrix;
    let body = Body {
        normalized: m.normalized,
        equal_rms: options.equalize_rms,
        bands: m
            .bands
            .iter()
            .map(|b| BandOut {
                label: b.label(),
                low_hz: b.low,
                high_hz: b.high,
            })
            .collect(),
        years: m
            .years
            .iter()
            .zip(&m.values)
            .zip(&m.tracks_per_year)
            .map(|((&year, values), &tracks)| YearOut {
                year,
                tracks,
                values: values.clone(),
            })
            .collect(),
        skipped: report
            .skipped
            .iter()
            .map(|(p, r)| Skipped {
                path: p.display().to_string(),
                reason: r.clone(),
            })
            .collect(),
    };
    let headers = ["year".to_string(), "tracks".to_string()]
        .into_iter()
        .chain(body.bands.iter().map(|b| b.label.clone()))
        .collect();
    let title = if m.normalized {
        "band power per year (normalized to unit mean per band)"
    } else {
        "band power density per year"
    };
    let mut t = Table::with_headers(title, headers);
    for y in &body.years {
        let mut row = vec![y.year.to_string(), y.tracks.to_string()];
        row.extend(y.values.iter().map(|v| if m.normalized { num(*v, 4) } else { format!("{v:.6e}") }));
        t.push(row);
    }
    let mut tables = vec![t];
    if !body.skipped.is_empty() {
        let mut s = Table::new("skipped files", vec!["path", "reason"]);
        for k in &body.skipped {
            s.push(vec![k.path.clone(), k.reason.clone()]);
        }
        tables.push(s);
    }
    Report::new("corpus", &body, tables)
}
