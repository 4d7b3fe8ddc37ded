//! Run defaults from a flat `key = value` file.

use std::path::{Path, PathBuf};

use basstune::perception::{PhonLevel, MAX_PHON, MIN_PHON};

use crate::error::CliError;
use crate::output::Format;

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "BASSTUNE_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub phon: f64,
    /// Frequency of A4 in Hz.
    pub pitch_reference: f64,
    /// STFT window and hop in samples; `None` picks them from the sample rate.
    pub stft_window: Option<usize>,
    pub stft_hop: Option<usize>,
    /// Monitor dataset; `None` uses the bundled synthetic set.
    pub monitors: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            phon: 60.0,
            pitch_reference: 440.0,
            stft_window: None,
            stft_hop: None,
            monitors: None,
            format: Format::Table,
        }
    }
}

impl RunConfig {
    pub fn parse(source_name: &str, text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| CliError::Config(format!("{source_name}, line {}: {reason}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected 'key = value', found '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("{key}: '{v}' is not a number")));
            let count = |v: &str| v.parse::<usize>().map_err(|_| bad(format!("{key}: '{v}' is not a sample count")));
            match key {
                "phon" => config.phon = number(value)?,
                "pitch_reference" => config.pitch_reference = number(value)?,
                "stft_window" => config.stft_window = Some(count(value)?),
                "stft_hop" => config.stft_hop = Some(count(value)?),
                "monitors" => config.monitors = Some(base_dir.join(value)),
                "format" => config.format = value.parse().map_err(bad)?,
                _ => return Err(bad(format!("unknown key '{key}'"))),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&path.display().to_string(), &text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        PhonLevel::new(self.phon).map_err(|_| {
            CliError::Config(format!("phon {} out of range; valid interval is [{MIN_PHON}, {MAX_PHON}]", self.phon))
        })?;
        if !(self.pitch_reference > 0.0 && self.pitch_reference.is_finite()) {
            return Err(CliError::Config(format!(
                "pitch_reference must be a positive frequency, got {}",
                self.pitch_reference
            )));
        }
        if let Some(w) = self.stft_window {
            if w < 2 {
                return Err(CliError::Config("stft_window must be at least 2 samples".into()));
            }
        }
        if let Some(h) = self.stft_hop {
            if h == 0 || self.stft_window.is_some_and(|w| h > w) {
                return Err(CliError::Config("stft_hop must be between 1 and stft_window".into()));
            }
        }
        Ok(())
    }
}
