//! Flag parsing and config-file merging.
//!
//! Every physics knob is optional on the command line; a run is described by
//! the merge of (in decreasing precedence) explicit flags, the `--config`
//! file, and per-command defaults applied in [`crate::commands`]. The config
//! file is either a JSON object or plain `key = value` lines; keys may use
//! `-` or `_` interchangeably.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    /// Solve the self-consistent gap and report it with its large-cutoff law.
    Polaron,
    /// Scan reflection/transmission across the emitter resonance.
    Lineshape,
    /// Repeat the lineshape scan over a list of couplings.
    Sweep,
    /// Evolve an initially excited emitter and record its decay and spectrum.
    Emission,
    /// Compare the scattering pipeline against the exactly solvable coupling.
    Toulouse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DispersionArg {
    /// omega = c|k| with an exponential coupling cutoff at omega_c.
    Linear,
    /// omega = omega_c sin(k/2): a hard band top at omega_c.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// One CSV file per table (default).
    Csv,
    /// One JSON file per table, mirroring the CSV header/rows.
    Json,
}

impl FormatArg {
    pub fn name(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

/// Scattering and emission observables for an emitter ultrastrongly coupled
/// to a one-dimensional waveguide, computed in the polaron frame.
///
/// Frequencies are in units of the bare emitter gap unless --delta is set;
/// results land in --out as CSV/JSON tables plus a manifest.json recording
/// every resolved parameter and diagnostic.
#[derive(Debug, Parser)]
#[command(name = "polaron-waveguide", version, about)]
pub struct Cli {
    /// What to compute.
    #[arg(long, value_enum)]
    pub command: Option<CommandKind>,

    /// Dimensionless coupling strength (Ohmic alpha).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Bare emitter gap; the energy unit of every other scale.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,

    /// Cutoff (linear family) or band top (cosine family).
    #[arg(long, allow_negative_numbers = true)]
    pub omega_c: Option<f64>,

    /// Waveguide dispersion family.
    #[arg(long, value_enum)]
    pub dispersion: Option<DispersionArg>,

    /// Positive-momentum modes in the discretized bath.
    #[arg(long)]
    pub num_modes: Option<usize>,

    /// Pure-dephasing rate added to the elastic channel.
    #[arg(long, allow_negative_numbers = true)]
    pub dephasing: Option<f64>,

    /// Lower edge of the probe-frequency scan.
    #[arg(long, allow_negative_numbers = true)]
    pub omega_min: Option<f64>,

    /// Upper edge of the probe-frequency scan.
    #[arg(long, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,

    /// Number of scan points (lineshape/sweep/toulouse) or of recorded
    /// times (emission).
    #[arg(long)]
    pub points: Option<usize>,

    /// Comma-separated coupling list for --command sweep.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alphas: Option<Vec<f64>>,

    /// Evolution horizon for --command emission.
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Table file format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Config file supplying any of the other flags (JSON object or
    /// `key = value` lines); explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    /// Fill unset flags from the `--config` file, if one was given.
    pub fn merge_config(&mut self) -> Result<(), AppError> {
        let Some(path) = self.config.clone() else {
            return Ok(());
        };
        let text = std::fs::read_to_string(&path)?;
        let entries = parse_config(&text)
            .map_err(|msg| AppError::Validation(format!("{}: {msg}", path.display())))?;
        for (key, value) in entries {
            self.apply_config_entry(&key, value)
                .map_err(|msg| AppError::Validation(format!("{}: {msg}", path.display())))?;
        }
        Ok(())
    }

    fn apply_config_entry(&mut self, key: &str, value: ConfigValue) -> Result<(), String> {
        match key {
            "command" => fill(&mut self.command, value.keyword(key)?, key),
            "alpha" => fill(&mut self.alpha, value.number(key)?, key),
            "delta" => fill(&mut self.delta, value.number(key)?, key),
            "omega_c" => fill(&mut self.omega_c, value.number(key)?, key),
            "dispersion" => fill(&mut self.dispersion, value.keyword(key)?, key),
            "num_modes" => fill(&mut self.num_modes, value.count(key)?, key),
            "dephasing" => fill(&mut self.dephasing, value.number(key)?, key),
            "omega_min" => fill(&mut self.omega_min, value.number(key)?, key),
            "omega_max" => fill(&mut self.omega_max, value.number(key)?, key),
            "points" => fill(&mut self.points, value.count(key)?, key),
            "alphas" => fill(&mut self.alphas, value.number_list(key)?, key),
            "t_max" => fill(&mut self.t_max, value.number(key)?, key),
            "out" => fill(&mut self.out, PathBuf::from(value.text(key)?), key),
            "format" => fill(&mut self.format, value.keyword(key)?, key),
            other => Err(format!("unknown config key `{other}`")),
        }
    }
}

/// Set `slot` from the config file unless a flag already set it.
fn fill<T>(slot: &mut Option<T>, value: T, _key: &str) -> Result<(), String> {
    if slot.is_none() {
        *slot = Some(value);
    }
    Ok(())
}

/// A config value before type resolution: a JSON scalar/array or a raw
/// `key = value` string.
enum ConfigValue {
    Json(serde_json::Value),
    Text(String),
}

impl ConfigValue {
    fn number(&self, key: &str) -> Result<f64, String> {
        match self {
            ConfigValue::Json(serde_json::Value::Number(n)) => n
                .as_f64()
                .ok_or_else(|| format!("`{key}` is not representable as f64")),
            ConfigValue::Json(serde_json::Value::String(s)) => parse_number(s, key),
            ConfigValue::Text(s) => parse_number(s, key),
            _ => Err(format!("`{key}` expects a number")),
        }
    }

    fn count(&self, key: &str) -> Result<usize, String> {
        let x = self.number(key)?;
        if x < 0.0 || x.fract() != 0.0 || x > usize::MAX as f64 {
            return Err(format!("`{key}` expects a nonnegative integer, got {x}"));
        }
        Ok(x as usize)
    }

    fn number_list(&self, key: &str) -> Result<Vec<f64>, String> {
        match self {
            ConfigValue::Json(serde_json::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    serde_json::Value::Number(n) => n
                        .as_f64()
                        .ok_or_else(|| format!("`{key}` element not representable as f64")),
                    serde_json::Value::String(s) => parse_number(s, key),
                    _ => Err(format!("`{key}` expects numbers")),
                })
                .collect(),
            ConfigValue::Json(serde_json::Value::String(s)) => split_list(s, key),
            ConfigValue::Text(s) => split_list(s, key),
            ConfigValue::Json(serde_json::Value::Number(n)) => Ok(vec![n
                .as_f64()
                .ok_or_else(|| format!("`{key}` is not representable as f64"))?]),
            _ => Err(format!("`{key}` expects a list of numbers")),
        }
    }

    fn text(&self, key: &str) -> Result<String, String> {
        match self {
            ConfigValue::Json(serde_json::Value::String(s)) => Ok(s.clone()),
            ConfigValue::Text(s) => Ok(s.clone()),
            _ => Err(format!("`{key}` expects a string")),
        }
    }

    fn keyword<T: ValueEnum>(&self, key: &str) -> Result<T, String> {
        let word = self.text(key)?;
        T::from_str(word.trim(), true).map_err(|_| {
            let options: Vec<String> = T::value_variants()
                .iter()
                .filter_map(|v| v.to_possible_value().map(|p| p.get_name().to_string()))
                .collect();
            format!("`{key}` must be one of {}", options.join(", "))
        })
    }
}

fn parse_number(s: &str, key: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{key}` expects a number, got `{}`", s.trim()))
}

fn split_list(s: &str, key: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| parse_number(part, key))
        .collect()
}

/// Parse a config file into normalized `key -> value` entries. JSON objects
/// and `key = value` line files are both accepted; keys are lowercased with
/// `-` mapped to `_`.
fn parse_config(text: &str) -> Result<BTreeMap<String, ConfigValue>, String> {
    let mut entries = BTreeMap::new();
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let object: serde_json::Value =
            serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
        let serde_json::Value::Object(map) = object else {
            return Err("top-level JSON value must be an object".into());
        };
        for (key, value) in map {
            entries.insert(normalize_key(&key), ConfigValue::Json(value));
        }
    } else {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected `key = value`", lineno + 1));
            };
            entries.insert(
                normalize_key(key),
                ConfigValue::Text(value.trim().to_string()),
            );
        }
    }
    Ok(entries)
}

fn normalize_key(key: &str) -> String {
    key.trim().to_lowercase().replace('-', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare() -> Cli {
        Cli::parse_from(["polaron-waveguide"])
    }

    #[test]
    fn kebab_and_snake_keys_both_land() {
        let mut cli = bare();
        for (key, value) in parse_config("omega-c = 12.5\nnum_modes = 64\n").unwrap() {
            cli.apply_config_entry(&key, value).unwrap();
        }
        assert_eq!(cli.omega_c, Some(12.5));
        assert_eq!(cli.num_modes, Some(64));
    }

    #[test]
    fn json_object_config_parses_typed_values() {
        let text = r#"{"command": "sweep", "alphas": [0.1, 0.25], "format": "json"}"#;
        let mut cli = bare();
        for (key, value) in parse_config(text).unwrap() {
            cli.apply_config_entry(&key, value).unwrap();
        }
        assert_eq!(cli.command, Some(CommandKind::Sweep));
        assert_eq!(cli.alphas, Some(vec![0.1, 0.25]));
        assert_eq!(cli.format, Some(FormatArg::Json));
    }

    #[test]
    fn explicit_flags_beat_the_config_file() {
        let mut cli = Cli::parse_from(["polaron-waveguide", "--alpha", "0.3"]);
        for (key, value) in parse_config("alpha = 0.1\ndelta = 2.0\n").unwrap() {
            cli.apply_config_entry(&key, value).unwrap();
        }
        assert_eq!(cli.alpha, Some(0.3));
        assert_eq!(cli.delta, Some(2.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cli = bare();
        let entries = parse_config("omega = 1.0\n").unwrap();
        let (key, value) = entries.into_iter().next().unwrap();
        assert!(cli.apply_config_entry(&key, value).is_err());
    }

    #[test]
    fn comma_list_in_plain_config() {
        let mut cli = bare();
        for (key, value) in parse_config("alphas = 0.1, 0.2, 0.3\n").unwrap() {
            cli.apply_config_entry(&key, value).unwrap();
        }
        assert_eq!(cli.alphas, Some(vec![0.1, 0.2, 0.3]));
    }
}
