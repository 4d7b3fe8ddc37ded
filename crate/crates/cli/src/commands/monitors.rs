use std::path::PathBuf;

use basstune::monitors::DEFAULT_SMOOTH_OCTAVES;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Speaker dataset CSV (`speaker,frequency_hz,gain_db`); defaults to the
    /// config value, then the bundled synthetic set.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Smoothing width in octaves.
    #[arg(long, default_value_t = DEFAULT_SMOOTH_OCTAVES)]
    pub smooth: f64,
    /// Also report the response change from this frequency ...
    #[arg(long, requires = "to")]
    pub from: Option<f64>,
    /// ... to this one.
    #[arg(long, requires = "from")]
    pub to: Option<f64>,
}

#[derive(Serialize)]
struct Point {
    frequency_hz: f64,
    median_db: f64,
    raw_median_db: f64,
    p25_db: f64,
    p75_db: f64,
}

#[derive(Serialize)]
struct Delta {
    from_hz: f64,
    to_hz: f64,
    speaker_gain_delta_db: f64,
}

#[derive(Serialize)]
struct Body {
    dataset: String,
    smooth_octaves: f64,
    points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<Delta>,
}

pub fn run(args: &Args, config: &RunConfig) -> Result<Report, CliError> {
    let curve = super::monitor_curve(config, args.dataset.as_deref(), args.smooth)?;
    let band = curve
        .percentiles()
        .ok_or_else(|| CliError::Internal("aggregated curve lacks percentiles".into()))?;
    let points: Vec<Point> = curve
        .points()
        .iter()
        .enumerate()
        .map(|(i, &(f, g))| Point {
            frequency_hz: f,
            median_db: g,
            raw_median_db: band.median[i],
            p25_db: band.p25[i],
            p75_db: band.p75[i],
        })
        .collect();
    let delta = match (args.from, args.to) {
        (Some(from), Some(to)) => Some(Delta {
            from_hz: from,
            to_hz: to,
            speaker_gain_delta_db: curve.speaker_gain_delta(from, to)?,
        }),
        _ => None,
    };
    let dataset = args
        .dataset
        .as_ref()
        .or(config.monitors.as_ref())
        .map_or_else(|| "bundled:near_field_synthetic36".to_string(), |p| p.display().to_string());
    let mut tables = Vec::new();
    let mut t = Table::new(format!("median monitor response ({dataset})"), vec!["frequency_hz", "median_db", "p25_db", "p75_db"]);
    for p in &points {
        t.push(vec![num(p.frequency_hz, 2), num(p.median_db, 2), num(p.p25_db, 2), num(p.p75_db, 2)]);
    }
    tables.push(t);
    if let Some(d) = &delta {
        let mut t = Table::new("speaker gain change", vec!["from_hz", "to_hz", "delta_db"]);
        t.push(vec![num(d.from_hz, 2), num(d.to_hz, 2), num(d.speaker_gain_delta_db, 2)]);
        tables.push(t);
    }
    Report::new(
        "monitors",
        &Body {
            dataset,
            smooth_octaves: args.smooth,
            points,
            delta,
        },
        tables,
    )
}
