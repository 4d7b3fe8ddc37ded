use std::path::{Path, PathBuf};

use basstune::advisor::{Partial, SpectralProfile};
use basstune::analysis::{
    cycle_f0_track, detect_onsets, estimate_f0_track, f0_distribution, sweep_range, track_partials, F0Config,
    OnsetConfig, PartialThresholds, PartialTrack, ThresholdScale, SEARCH_BAND_HZ,
};
use basstune::signal::{note_of_frequency, stft, AudioClip, Spectrogram, StftConfig};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

/// Partials weaker than this (relative to the strongest) are left out of a
/// measured profile.
const PROFILE_FLOOR_DB: f64 = -60.0;

/// Half-cycles more than this far below the loudest are not used for the
/// sweep estimate.
const CYCLE_GATE_DB: f64 = -60.0;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// WAV files to analyse.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Number of harmonics to track.
    #[arg(long, default_value_t = 5)]
    pub harmonics: usize,
    /// Stop ratio for the fundamental track.
    #[arg(long, default_value_t = 0.7)]
    pub fundamental_stop: f64,
    /// Stop ratio for the harmonic tracks.
    #[arg(long, default_value_t = 0.5)]
    pub harmonic_stop: f64,
    /// Compare stop ratios with linear energy instead of the 80 dB level display.
    #[arg(long)]
    pub linear_thresholds: bool,
    /// Also report band-energy onsets (20–120 Hz).
    #[arg(long)]
    pub onsets: bool,
}

#[derive(Serialize)]
struct F0Row {
    time_s: f64,
    f0_hz: f64,
    energy: f64,
}

#[derive(Serialize)]
struct PartialRow {
    time_s: f64,
    frequency_hz: f64,
    magnitude: f64,
}

#[derive(Serialize)]
struct PartialOut {
    harmonic: usize,
    stop_time_s: f64,
    points: Vec<PartialRow>,
}

#[derive(Serialize)]
struct FileOut {
    file: String,
    sample_rate: u32,
    duration_s: f64,
    steady_f0_hz: f64,
    note: String,
    cents: f64,
    sweep_range_semitones: f64,
    f0_track: Vec<F0Row>,
    partials: Vec<PartialOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    onsets_s: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct HistogramOut {
    bin_width_hz: f64,
    bin_edges_hz: Vec<f64>,
    masses: Vec<f64>,
    mode_hz: f64,
    secondary_modes_hz: Vec<f64>,
}

#[derive(Serialize)]
struct Body {
    files: Vec<FileOut>,
    distribution: HistogramOut,
}

pub fn spectrogram(clip: &AudioClip<f64>, config: &RunConfig) -> Result<Spectrogram<f64>, CliError> {
    let defaults = StftConfig::for_sample_rate(clip.sample_rate());
    let window = config.stft_window.unwrap_or(defaults.window_size);
    let hop = config.stft_hop.unwrap_or(window / 4).max(1);
    Ok(stft(clip, window, hop, defaults.window)?)
}

pub fn read_clip(path: &Path) -> Result<AudioClip<f64>, CliError> {
    Ok(AudioClip::read_wav(path)?)
}

/// Resting f0 and harmonic amplitudes of a drum sample; each partial's
/// amplitude is its loudest tracked magnitude.
pub fn measure_profile(clip: &AudioClip<f64>, config: &RunConfig, harmonics: usize) -> Result<SpectralProfile<f64>, CliError> {
    let track = estimate_f0_track(clip, &F0Config::default())?;
    let f0 = track.steady_f0().ok_or(basstune::Error::NoFundamental)?;
    let spec = spectrogram(clip, config)?;
    let nyquist = clip.sample_rate() as f64 / 2.0;
    let start = track.points()[0].f0;
    let n = harmonics.min(((nyquist / (start * 1.03)).floor() as usize).saturating_sub(1)).max(1);
    let keep_all = PartialThresholds {
        fundamental: 0.0,
        harmonic: 0.0,
        scale: ThresholdScale::Linear,
    };
    let tracks = track_partials(&spec, start, n, &keep_all)?;
    let peaks: Vec<f64> = tracks
        .iter()
        .map(|t| t.points.iter().map(|p| p.magnitude).fold(0.0, f64::max))
        .collect();
    let loudest = peaks.iter().cloned().fold(0.0, f64::max);
    let floor = loudest * 10f64.powf(PROFILE_FLOOR_DB / 20.0);
    let partials: Vec<Partial<f64>> = peaks
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a > 0.0 && a >= floor)
        .map(|(i, &a)| Partial {
            harmonic: i as u32 + 1,
            frequency: f0 * (i + 1) as f64,
            amplitude: a,
        })
        .collect();
    Ok(SpectralProfile::new(partials)?)
}

fn partial_out(t: &PartialTrack<f64>) -> PartialOut {
    PartialOut {
        harmonic: t.harmonic_index,
        stop_time_s: t.stop_time,
        points: t
            .points
            .iter()
            .map(|p| PartialRow {
                time_s: p.time,
                frequency_hz: p.frequency,
                magnitude: p.magnitude,
            })
            .collect(),
    }
}

pub fn run(args: &Args, config: &RunConfig) -> Result<Report, CliError> {
    let thresholds = PartialThresholds {
        fundamental: args.fundamental_stop,
        harmonic: args.harmonic_stop,
        scale: if args.linear_thresholds {
            ThresholdScale::Linear
        } else {
            PartialThresholds::<f64>::default().scale
        },
    };
    let mut clips = Vec::with_capacity(args.files.len());
    let mut files = Vec::with_capacity(args.files.len());
    for path in &args.files {
        let clip = read_clip(path)?;
        let track = estimate_f0_track(&clip, &F0Config::default())?;
        let steady = track.steady_f0().ok_or(basstune::Error::NoFundamental)?;
        let cycles = cycle_f0_track(&clip, SEARCH_BAND_HZ, CYCLE_GATE_DB)?;
        let sweep = sweep_range(&cycles)?;
        let spec = spectrogram(&clip, config)?;
        let partials = track_partials(&spec, track.points()[0].f0, args.harmonics, &thresholds)?;
        let note = note_of_frequency(steady, config.pitch_reference)?;
        let onsets = if args.onsets {
            Some(detect_onsets(&clip, &OnsetConfig::default())?)
        } else {
            None
        };
        files.push(FileOut {
            file: path.display().to_string(),
            sample_rate: clip.sample_rate(),
            duration_s: clip.duration(),
            steady_f0_hz: steady,
            note: note.name(),
            cents: note.cents(),
            sweep_range_semitones: sweep,
            f0_track: track
                .points()
                .iter()
                .map(|p| F0Row {
                    time_s: p.time,
                    f0_hz: p.f0,
                    energy: p.energy,
                })
                .collect(),
            partials: partials.iter().map(partial_out).collect(),
            onsets_s: onsets,
        });
        clips.push(clip);
    }
    let h = f0_distribution(&clips, &F0Config::default())?;
    let distribution = HistogramOut {
        bin_width_hz: basstune::analysis::HISTOGRAM_BIN_WIDTH_HZ,
        bin_edges_hz: h.bin_edges.clone(),
        masses: h.masses.clone(),
        mode_hz: h.mode_frequency,
        secondary_modes_hz: h.secondary_modes.clone(),
    };

    let mut summary = Table::new(
        "summary",
        vec!["file", "steady_f0_hz", "note", "cents", "sweep_st", "fundamental_stop_s"],
    );
    let mut f0_rows = Table::new("f0 track", vec!["file", "time_s", "f0_hz", "energy"]);
    let mut partial_rows = Table::new("partials", vec!["file", "harmonic", "time_s", "frequency_hz", "magnitude"]);
    let mut stops = Table::new("partial stop times", vec!["file", "harmonic", "stop_time_s", "frames"]);
    let mut onset_rows = Table::new("onsets", vec!["file", "time_s"]);
    for f in &files {
        summary.push(vec![
            f.file.clone(),
            num(f.steady_f0_hz, 2),
            f.note.clone(),
            num(f.cents, 1),
            num(f.sweep_range_semitones, 2),
            f.partials.first().map_or(String::new(), |p| num(p.stop_time_s, 3)),
        ]);
        for p in &f.f0_track {
            f0_rows.push(vec![f.file.clone(), num(p.time_s, 3), num(p.f0_hz, 3), format!("{:.6e}", p.energy)]);
        }
        for t in &f.partials {
            stops.push(vec![f.file.clone(), t.harmonic.to_string(), num(t.stop_time_s, 3), t.points.len().to_string()]);
            for p in &t.points {
                partial_rows.push(vec![
                    f.file.clone(),
                    t.harmonic.to_string(),
                    num(p.time_s, 3),
                    num(p.frequency_hz, 2),
                    format!("{:.6e}", p.magnitude),
                ]);
            }
        }
        for &t in f.onsets_s.iter().flatten() {
            onset_rows.push(vec![f.file.clone(), num(t, 3)]);
        }
    }
    let mut hist = Table::new(
        format!(
            "f0 distribution (mode {} Hz; secondary {})",
            num(distribution.mode_hz, 2),
            if distribution.secondary_modes_hz.is_empty() {
                "none".to_string()
            } else {
                distribution.secondary_modes_hz.iter().map(|f| num(*f, 2)).collect::<Vec<_>>().join(", ")
            }
        ),
        vec!["low_hz", "high_hz", "mass"],
    );
    for (i, m) in distribution.masses.iter().enumerate() {
        if *m > 0.0 {
            hist.push(vec![
                num(distribution.bin_edges_hz[i], 2),
                num(distribution.bin_edges_hz[i + 1], 2),
                format!("{m:.6}"),
            ]);
        }
    }
    let mut tables = vec![summary, stops, hist, f0_rows, partial_rows];
    if args.onsets {
        tables.push(onset_rows);
    }
    Report::new("analyze", &Body { files, distribution }, tables)
}
