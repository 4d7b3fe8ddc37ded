use std::path::PathBuf;

use basstune::voice::{synth_voice, VoiceParams};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Report, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Output WAV file (32-bit float, mono).
    #[arg(long, short)]
    pub out: PathBuf,
    /// Resting fundamental in Hz.
    #[arg(long, default_value_t = super::DEFAULT_F0)]
    pub f0: f64,
    /// Initial pitch above the resting pitch, in semitones.
    #[arg(long, default_value_t = 1.0)]
    pub sweep: f64,
    /// Time for the pitch to settle, in seconds.
    #[arg(long, default_value_t = 0.4)]
    pub sweep_duration: f64,
    /// Time for the level to fall 60 dB, in seconds.
    #[arg(long, default_value_t = 2.0)]
    pub decay: f64,
    /// Waveshaper drive (0 = pure swept sine).
    #[arg(long, default_value_t = 0.0)]
    pub drive: f64,
    /// Length in seconds.
    #[arg(long, default_value_t = 3.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 44100)]
    pub sample_rate: u32,
}

#[derive(Serialize)]
struct Body {
    output: String,
    f0_end_hz: f64,
    sweep_semitones: f64,
    sweep_duration_s: f64,
    amp_decay_time_s: f64,
    drive: f64,
    duration_s: f64,
    sample_rate: u32,
    samples: usize,
    peak: f64,
}

pub fn run(args: &Args, _config: &RunConfig) -> Result<Report, CliError> {
    let params = VoiceParams {
        f0_end: args.f0,
        sweep_semitones: args.sweep,
        sweep_duration: args.sweep_duration,
        amp_decay_time: args.decay,
        drive: args.drive,
        duration: args.duration,
        sample_rate: args.sample_rate,
    };
    let clip = synth_voice(&params)?;
    clip.write_wav(&args.out)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", args.out.display())))?;
    let body = Body {
        output: args.out.display().to_string(),
        f0_end_hz: params.f0_end,
        sweep_semitones: params.sweep_semitones,
        sweep_duration_s: params.sweep_duration,
        amp_decay_time_s: params.amp_decay_time,
        drive: params.drive,
        duration_s: params.duration,
        sample_rate: params.sample_rate,
        samples: clip.len(),
        peak: clip.peak(),
    };
    let mut t = Table::new("", vec!["output", "f0_hz", "sweep_st", "drive", "samples", "peak"]);
    t.push(vec![
        body.output.clone(),
        num(body.f0_end_hz, 2),
        num(body.sweep_semitones, 2),
        num(body.drive, 2),
        body.samples.to_string(),
        num(body.peak, 3),
    ]);
    Report::new("synth", &body, vec![t])
}
