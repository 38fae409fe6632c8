//! Turns an experiment file into a simulation grid.

use std::path::Path;
use std::sync::Arc;

use meppm::channel::Link;
use meppm::design::{BibdCode, Construction};
use meppm::modem::Scheme;
use meppm::ooc::{search_ooc_with, OocCode, OocParams, SearchOptions};
use meppm::simulator::{derive_seed, DmeppmSizing, NoiseModel, SimConfig};

use crate::config::{resolve, BibdSource, ExperimentConfig, OocSource};
use crate::CliError;

pub struct Experiment {
    pub grid: Vec<SimConfig>,
    /// Human-readable remarks, e.g. user counts dropped because the code is too small.
    pub notes: Vec<String>,
}

fn read(base: &Path, file: &Path) -> Result<String, CliError> {
    let path = resolve(base, file);
    std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_bibd(src: &BibdSource, base: &Path) -> Result<BibdCode, CliError> {
    if let Some(file) = &src.file {
        if src.construction.is_some() || src.q.is_some() || src.shift.is_some() {
            return Err(CliError::Invalid(
                "codes.bibd: `file` excludes construction keys".into(),
            ));
        }
        return Ok(BibdCode::from_text(&read(base, file)?)?);
    }
    let q = src
        .q
        .ok_or_else(|| CliError::Invalid("codes.bibd: missing `q`".into()))?;
    let construction: Construction = src.construction.as_deref().unwrap_or("qr").parse()?;
    let ds = construction
        .difference_set(q)?
        .translate(src.shift.unwrap_or(0));
    Ok(BibdCode::from_difference_set(&ds))
}

pub fn load_ooc(src: &OocSource, base: &Path) -> Result<OocCode, CliError> {
    if let Some(file) = &src.file {
        return Ok(OocCode::from_text(&read(base, file)?)?);
    }
    let need = |v: Option<usize>, key: &str| {
        v.ok_or_else(|| CliError::Invalid(format!("codes: OOC search needs `{key}`")))
    };
    let params = OocParams::new(
        need(src.length, "length")?,
        need(src.weight, "weight")?,
        need(src.alpha, "alpha")?,
    );
    let mut opts = SearchOptions::new(
        need(src.size, "size")?,
        src.seed.unwrap_or(1),
        src.budget.unwrap_or(200_000),
    );
    if let Some(r) = src.restarts {
        opts.restarts = r;
    }
    Ok(search_ooc_with(params, &opts)?)
}

pub fn build(config: &ExperimentConfig, base: &Path, seed: u64) -> Result<Experiment, CliError> {
    let schemes = config
        .scheme
        .schemes
        .iter()
        .map(|s| s.parse::<Scheme>())
        .collect::<Result<Vec<_>, _>>()?;
    if schemes.is_empty() {
        return Err(CliError::Invalid("scheme: `schemes` is empty".into()));
    }
    let users = config.user_counts()?;
    let powers = config.channel.peak_power.values();
    if powers.is_empty() {
        return Err(CliError::Invalid("channel: `peak_power` is empty".into()));
    }
    let noise: NoiseModel = config
        .channel
        .noise
        .as_deref()
        .unwrap_or("poisson")
        .parse()?;

    let needs_bibd = schemes.iter().any(|&s| s != Scheme::OokOcdma);
    let bibd = match (&config.codes.bibd, needs_bibd) {
        (Some(src), _) => Some(Arc::new(load_bibd(src, base)?)),
        (None, true) => return Err(CliError::Invalid("codes: missing `bibd`".into())),
        (None, false) => None,
    };
    let ooc = config
        .codes
        .ooc
        .as_ref()
        .map(|s| load_ooc(s, base))
        .transpose()?
        .map(Arc::new);
    let ook_ooc = match &config.codes.ook_ooc {
        Some(s) => Some(Arc::new(load_ooc(s, base)?)),
        None => ooc.clone(),
    };

    let mut notes = Vec::new();
    if let Some(o) = &ooc {
        notes.push(format!("OOC {}: {} codewords", o.params(), o.len()));
    }
    if let (Some(o), Some(_)) = (&ook_ooc, &config.codes.ook_ooc) {
        notes.push(format!("OOK OOC {}: {} codewords", o.params(), o.len()));
    }
    let sizing = DmeppmSizing {
        subset_size: config.scheme.subset_size,
        branches: config.scheme.branches,
        ..Default::default()
    };

    let mut grid = Vec::new();
    for &scheme in &schemes {
        let code = match scheme {
            Scheme::CMeppm => ooc.clone(),
            Scheme::OokOcdma => ook_ooc.clone(),
            _ => None,
        };
        let capacity = match scheme {
            Scheme::CMeppm | Scheme::OokOcdma => code
                .as_ref()
                .map(|c| c.len())
                .ok_or_else(|| CliError::Invalid(format!("codes: {scheme} needs an OOC")))?,
            _ => {
                let q = bibd.as_ref().map_or(0, |b| b.len());
                sizing.subset_size.map_or(q, |s| q / s.max(1))
            }
        };
        let kept: Vec<usize> = users.iter().copied().filter(|&n| n <= capacity).collect();
        if kept.len() < users.len() {
            let plural = if capacity == 1 { "" } else { "s" };
            notes.push(format!(
                "{scheme}: user counts above {capacity} dropped (code supports at most {capacity} user{plural})"
            ));
        }
        for &p0 in &powers {
            for &n in &kept {
                grid.push(SimConfig {
                    scheme,
                    bibd: bibd.clone(),
                    ooc: code.clone(),
                    dmeppm: sizing,
                    users: n,
                    link: Link {
                        peak_power: p0,
                        background_power: config.channel.background_power,
                        efficiency: config.channel.efficiency,
                        wavelength: config.channel.wavelength,
                        bit_rate: config.channel.bit_rate,
                    },
                    noise,
                    max_symbols: config.sweep.max_symbols,
                    target_errors: config.sweep.target_errors,
                    seed: 0,
                });
            }
        }
    }
    if grid.is_empty() {
        return Err(CliError::Invalid(
            "sweep: no grid point survives the code sizes".into(),
        ));
    }
    for (i, point) in grid.iter_mut().enumerate() {
        point.seed = derive_seed(seed, i as u64);
    }
    Ok(Experiment { grid, notes })
}
