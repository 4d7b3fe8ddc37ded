use basstune::perception::{ear_gain_delta, elc_spl, LoudnessModelTables, PhonLevel};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Loudness level in phon (20–80); defaults to the config value.
    #[arg(long)]
    pub phon: Option<f64>,
    /// Frequencies in Hz (comma-separated); defaults to the 29 standard ones.
    #[arg(long, value_delimiter = ',')]
    pub frequencies: Vec<f64>,
    /// Also report the ear gain change from this frequency ...
    #[arg(long, requires = "to")]
    pub from: Option<f64>,
    /// ... to this one.
    #[arg(long, requires = "from")]
    pub to: Option<f64>,
}

#[derive(Serialize)]
struct Point {
    frequency_hz: f64,
    spl_db: f64,
    /// Level above the 1 kHz point needed to sound equally loud.
    relative_to_1khz_db: f64,
}

#[derive(Serialize)]
struct Delta {
    from_hz: f64,
    to_hz: f64,
    ear_gain_delta_db: f64,
}

#[derive(Serialize)]
struct Body {
    phon: f64,
    points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<Delta>,
}

pub fn run(args: &Args, config: &RunConfig) -> Result<Report, CliError> {
    let phon = PhonLevel::new(args.phon.unwrap_or(config.phon))?;
    let frequencies: Vec<f64> = if args.frequencies.is_empty() {
        LoudnessModelTables::bundled().rows().iter().map(|r| r.frequency_hz).collect()
    } else {
        args.frequencies.clone()
    };
    let reference = elc_spl(1000.0, phon)?;
    let points = frequencies
        .iter()
        .map(|&f| {
            let spl = elc_spl(f, phon)?;
            Ok(Point {
                frequency_hz: f,
                spl_db: spl,
                relative_to_1khz_db: spl - reference,
            })
        })
        .collect::<Result<Vec<_>, basstune::Error>>()?;
    let delta = match (args.from, args.to) {
        (Some(from), Some(to)) => Some(Delta {
            from_hz: from,
            to_hz: to,
            ear_gain_delta_db: ear_gain_delta(from, to, phon)?,
        }),
        _ => None,
    };
    let mut tables = Vec::new();
    let mut t = Table::new(format!("equal-loudness contour, {} phon", phon.value()), vec!["frequency_hz", "spl_db", "relative_db"]);
    for p in &points {
        t.push(vec![num(p.frequency_hz, 1), num(p.spl_db, 2), num(p.relative_to_1khz_db, 2)]);
    }
    tables.push(t);
    if let Some(d) = &delta {
        let mut t = Table::new("ear gain change", vec!["from_hz", "to_hz", "delta_db"]);
        t.push(vec![num(d.from_hz, 2), num(d.to_hz, 2), num(d.ear_gain_delta_db, 2)]);
        tables.push(t);
    }
    Report::new("contour", &Body { phon: phon.value(), points, delta }, tables)
}
