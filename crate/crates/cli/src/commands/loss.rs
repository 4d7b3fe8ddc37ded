use std::path::PathBuf;

use basstune::advisor::transposition_loss;
use serde::Serialize;

use super::ProfileKind;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Transpositions in semitones (comma-separated, may be negative).
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub semitones: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ProfileKind::Driven)]
    pub profile: ProfileKind,
    /// Fundamental of the untransposed drum in Hz.
    #[arg(long, default_value_t = super::DEFAULT_F0)]
    pub f0: f64,
    /// Listening level in phon; defaults to the config value.
    #[arg(long)]
    pub phon: Option<f64>,
    /// Speaker dataset CSV; defaults to the config value, then the bundled set.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

#[derive(Serialize)]
struct PartialRow {
    harmonic: u32,
    from_hz: f64,
    to_hz: f64,
    delta_db: f64,
}

#[derive(Serialize)]
struct Row {
    semitones: f64,
    total_db: f64,
    fundamental_db: f64,
    partials: Vec<PartialRow>,
}

#[derive(Serialize)]
struct Body {
    profile: &'static str,
    f0_hz: f64,
    phon: f64,
    transpositions: Vec<Row>,
}

pub fn run(args: &Args, config: &RunConfig) -> Result<Report, CliError> {
    let curve = super::combined_curve(config, args.dataset.as_deref(), args.phon)?;
    let profile = args.profile.build(args.f0)?;
    let rows = args
        .semitones
        .iter()
        .map(|&s| {
            let r = transposition_loss(&profile, s, &curve)?;
            Ok(Row {
                semitones: s,
                total_db: r.total_power_delta_db,
                fundamental_db: r.fundamental_delta_db,
                partials: r
                    .per_partial
                    .iter()
                    .map(|p| PartialRow {
                        harmonic: p.harmonic,
                        from_hz: p.f_from,
                        to_hz: p.f_to,
                        delta_db: p.delta_db,
                    })
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>, basstune::Error>>()?;
    let mut summary = Table::new("transposition level change", vec!["semitones", "total_db", "fundamental_db"]);
    let mut partials = Table::new("per partial", vec!["semitones", "harmonic", "from_hz", "to_hz", "delta_db"]);
    for r in &rows {
        summary.push(vec![num(r.semitones, 2), num(r.total_db, 2), num(r.fundamental_db, 2)]);
        for p in &r.partials {
            partials.push(vec![num(r.semitones, 2), p.harmonic.to_string(), num(p.from_hz, 2), num(p.to_hz, 2), num(p.delta_db, 2)]);
        }
    }
    let body = Body {
        profile: args.profile.name(),
        f0_hz: args.f0,
        phon: curve.loudness().value(),
        transpositions: rows,
    };
    Report::new("loss", &body, vec![summary, partials])
}
