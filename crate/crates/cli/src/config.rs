//! Experiment files: TOML with `[codes]`, `[scheme]`, `[channel]`, `[sweep]` and `[output]`.
//!
//! Unknown keys are rejected. Powers are in watts, the wavelength in meters and the bit rate
//! in bits per second. Relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub codes: Codes,
    pub scheme: SchemeSection,
    pub channel: ChannelSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codes {
    pub bibd: Option<BibdSource>,
    /// OOC for coded-MEPPM, also used by OOK unless `ook_ooc` is given.
    pub ooc: Option<OocSource>,
    pub ook_ooc: Option<OocSource>,
}

/// Either `file = "..."` or `construction` + `q` (+ optional `shift`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BibdSource {
    pub file: Option<PathBuf>,
    pub construction: Option<String>,
    pub q: Option<usize>,
    pub shift: Option<usize>,
}

/// Either `file = "..."` or a search: `length`, `weight`, `alpha`, `size` and optional
/// `seed`, `budget`, `restarts`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OocSource {
    pub file: Option<PathBuf>,
    pub length: Option<usize>,
    pub weight: Option<usize>,
    pub alpha: Option<usize>,
    pub size: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub restarts: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    /// Any of `cmeppm`, `dmeppm1`, `dmeppm2`, `ook`.
    pub schemes: Vec<String>,
    /// D-MEPPM codewords per user; equal split of the code when absent.
    pub subset_size: Option<usize>,
    /// D-MEPPM branches per symbol.
    pub branches: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// Peak received power(s) `P0` in watts; one curve per value.
    pub peak_power: OneOrMany,
    pub background_power: f64,
    pub efficiency: f64,
    pub wavelength: f64,
    pub bit_rate: f64,
    /// `poisson` (default), `gaussian` or `none`.
    pub noise: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Explicit active-user counts; otherwise `1..=max_users`.
    pub users: Option<Vec<usize>>,
    pub max_users: Option<usize>,
    pub max_symbols: u64,
    pub target_errors: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base))
    }

    pub fn user_counts(&self) -> Result<Vec<usize>, CliError> {
        let users = match (&self.sweep.users, self.sweep.max_users) {
            (Some(list), None) => list.clone(),
            (None, Some(max)) => (1..=max).collect(),
            (Some(_), Some(_)) => {
                return Err(CliError::Invalid(
                    "sweep: give either `users` or `max_users`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Invalid(
                    "sweep: missing `users` or `max_users`".into(),
                ))
            }
        };
        if users.is_empty() || users.contains(&0) {
            return Err(CliError::Invalid(
                "sweep: user counts must be positive".into(),
            ));
        }
        Ok(users)
    }
}

pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
