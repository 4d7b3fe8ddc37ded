use std::path::PathBuf;

use basstune::advisor::{recommend_key, stability_report, SpectralProfile};
use basstune::signal::Note;
use serde::Serialize;

use super::ProfileKind;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Root of the song key, e.g. `D`, `F#`, `Bb1`.
    #[arg(long)]
    pub key: String,
    /// Listening level in phon; defaults to the config value.
    #[arg(long)]
    pub phon: Option<f64>,
    /// Drum sample; its resting pitch and measured partials are used.
    #[arg(long)]
    pub sample: Option<PathBuf>,
    /// Drum spectrum. Defaults to the sample's measured partials with
    /// `--sample`, otherwise to the fundamental alone.
    #[arg(long, value_enum)]
    pub profile: Option<ProfileKind>,
    /// Drum pitch in Hz when no sample is given.
    #[arg(long, default_value_t = super::DEFAULT_F0)]
    pub f0: f64,
    /// Song transpositions to consider, `lo:hi` in semitones.
    #[arg(long, default_value = "-6:6", allow_hyphen_values = true, value_parser = super::parse_int_range)]
    pub range: (i32, i32),
    /// Also report level stability of the drum played on these notes
    /// (comma-separated, e.g. `D1,F1,A1`).
    #[arg(long, value_delimiter = ',')]
    pub notes: Vec<String>,
    /// Speaker dataset CSV; defaults to the config value, then the bundled set.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

#[derive(Serialize)]
struct Candidate {
    rank: usize,
    song_transposition: i32,
    drum_note: String,
    drum_frequency_hz: f64,
    sample_shift_semitones: f64,
    total_gain_db: Option<f64>,
    gain_vs_baseline_db: Option<f64>,
    region: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    infeasible_reason: Option<String>,
}

#[derive(Serialize)]
struct NoteRow {
    note: String,
    frequency_hz: f64,
    gain_db: f64,
}

#[derive(Serialize)]
struct Stability {
    notes: Vec<NoteRow>,
    spread_db: f64,
}

#[derive(Serialize)]
struct Body {
    key: String,
    phon: f64,
    pitch_reference_hz: f64,
    sample_f0_hz: f64,
    profile: String,
    candidates: Vec<Candidate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability: Option<Stability>,
}

pub fn run(args: &Args, config: &RunConfig) -> Result<Report, CliError> {
    let key: Note<f64> = args.key.parse()?;
    let curve = super::combined_curve(config, args.dataset.as_deref(), args.phon)?;
    let (shape, profile_name): (SpectralProfile<f64>, String) = match (&args.sample, args.profile) {
        (Some(path), kind) => {
            let clip = super::analyze::read_clip(path)?;
            let measured = super::analyze::measure_profile(&clip, config, 5)?;
            match kind {
                Some(k) => (k.build(measured.fundamental())?, k.name().to_string()),
                None => (measured, "measured".to_string()),
            }
        }
        (None, kind) => {
            let k = kind.unwrap_or(ProfileKind::Fundamental);
            (k.build(args.f0)?, k.name().to_string())
        }
    };
    let sample_f0 = shape.fundamental();
    let ranked = recommend_key(key, sample_f0, &shape, &curve, args.range, config.pitch_reference)?;
    let baseline = ranked
        .iter()
        .find(|c| c.is_baseline())
        .and_then(|c| c.total_gain_db);
    let candidates: Vec<Candidate> = ranked
        .iter()
        .enumerate()
        .map(|(i, c)| Candidate {
            rank: i + 1,
            song_transposition: c.song_transposition,
            drum_note: c.drum_note.name(),
            drum_frequency_hz: c.drum_frequency,
            sample_shift_semitones: c.sample_shift_semitones,
            total_gain_db: c.total_gain_db,
            gain_vs_baseline_db: c.total_gain_db.zip(baseline).map(|(g, b)| g - b),
            region: c.region,
            infeasible_reason: c.infeasible_reason.clone(),
        })
        .collect();
    let stability = if args.notes.is_empty() {
        None
    } else {
        let notes = args
            .notes
            .iter()
            .map(|n| n.parse::<Note<f64>>())
            .collect::<Result<Vec<_>, _>>()?;
        let r = stability_report(&notes, &shape, &curve, config.pitch_reference)?;
        Some(Stability {
            notes: r
                .per_note
                .iter()
                .map(|g| NoteRow {
                    note: g.note.name(),
                    frequency_hz: g.frequency,
                    gain_db: g.gain_db,
                })
                .collect(),
            spread_db: r.spread_db,
        })
    };

    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| num(v, 2));
    let mut t = Table::new(
        format!("key candidates for {} (drum at {} Hz, {} profile)", key.name(), num(sample_f0, 2), profile_name),
        vec!["rank", "transpose", "drum_note", "drum_hz", "shift_st", "gain_db", "vs_baseline_db", "region"],
    );
    for c in &candidates {
        t.push(vec![
            c.rank.to_string(),
            format!("{:+}", c.song_transposition),
            c.drum_note.clone(),
            num(c.drum_frequency_hz, 2),
            num(c.sample_shift_semitones, 2),
            opt(c.total_gain_db),
            opt(c.gain_vs_baseline_db),
            c.region.to_string(),
        ]);
    }
    let mut tables = vec![t];
    if let Some(s) = &stability {
        let mut t = Table::new(format!("level across notes (spread {} dB)", num(s.spread_db, 2)), vec!["note", "frequency_hz", "gain_db"]);
        for n in &s.notes {
            t.push(vec![n.note.clone(), num(n.frequency_hz, 2), num(n.gain_db, 2)]);
        }
        tables.push(t);
    }
    let body = Body {
        key: key.name(),
        phon: curve.loudness().value(),
        pitch_reference_hz: config.pitch_reference,
        sample_f0_hz: sample_f0,
        profile: profile_name,
        candidates,
        stability,
    };
    Report::new("advise", &body, tables)
}
