//! Seeded Monte Carlo symbol-error engine for C-MEPPM, D-MEPPM and OOK OOC-OCDMA.
//!
//! Every symbol epoch `k` draws from its own ChaCha stream `(seed, k)`, so a run is
//! reproducible bit for bit whatever the rayon pool size. Epochs are evaluated in parallel
//! batches and the stopping rule is applied by an in-order scan of each batch.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{sample, sample_gaussian, Link};
use crate::design::{BibdCode, BibdParams};
use crate::modem::{
    bits_per_symbol, cmeppm_constellation, dmeppm_constellation, partition_bibd, Constellation,
    MeppmType, Scheme,
};
use crate::ooc::{OocCode, OocParams};
use crate::receiver::{
    cmeppm_decide, dmeppm_decide, mean_table, ooc_correlate_support, ook_decide, BibdCorrelator,
};
use crate::{Error, Result};

/// Largest per-user constellation the D-MEPPM engine will enumerate.
pub const MAX_CONSTELLATION: usize = 4096;

const BATCH: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseModel {
    #[default]
    Poisson,
    Gaussian,
    /// Decide directly on the mean counts.
    Noiseless,
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(NoiseModel::Poisson),
            "gaussian" => Ok(NoiseModel::Gaussian),
            "none" => Ok(NoiseModel::Noiseless),
            other => Err(Error::param(format!(
                "unknown noise model {other:?}, expected poisson, gaussian or none"
            ))),
        }
    }
}

/// How D-MEPPM splits the BIBD among users.
///
/// Unset fields fall back to the equal split `q = ⌊Q/N⌋` and, for the branch count, `ℓ = q`
/// (type-II) or `ℓ = ⌊q/2⌋` (type-I).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmeppmSizing {
    pub kind: MeppmType,
    pub subset_size: Option<usize>,
    pub branches: Option<usize>,
}

impl Default for DmeppmSizing {
    fn default() -> Self {
        Self {
            kind: MeppmType::II,
            subset_size: None,
            branches: None,
        }
    }
}

impl DmeppmSizing {
    /// Subset size and branch count for `users` users of a size-`q` code.
    pub fn resolve(&self, q: usize, users: usize) -> (usize, usize) {
        let size = self.subset_size.unwrap_or(q / users.max(1));
        let branches = self.branches.unwrap_or(match self.kind {
            MeppmType::I => size / 2,
            MeppmType::II => size,
        });
        (size, branches)
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub bibd: Option<Arc<BibdCode>>,
    pub ooc: Option<Arc<OocCode>>,
    pub dmeppm: DmeppmSizing,
    /// Active users `N`, including the observed user 0.
    pub users: usize,
    pub link: Link,
    pub noise: NoiseModel,
    pub max_symbols: u64,
    /// Stop once this many symbol errors have been seen.
    pub target_errors: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub scheme: Scheme,
    pub users: usize,
    pub seed: u64,
    pub symbols: u64,
    pub errors: u64,
    /// Full constellation size `M`.
    pub constellation_size: usize,
    /// Symbols actually transmitted, `2^⌊log2 M⌋`.
    pub used_symbols: usize,
    /// Codewords in the OOC family, where one is used.
    pub ooc_size: Option<usize>,
    /// Peak signal photons per chip for one user.
    pub lambda0: f64,
    pub mu_b: f64,
}

impl BerResult {
    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.errors as f64 / self.symbols as f64
        }
    }

    /// `SER · M / (2(M − 1))` over the transmitted symbol set.
    pub fn ber(&self) -> f64 {
        let m = self.used_symbols as f64;
        self.ser() * m / (2.0 * (m - 1.0))
    }
}

enum Engine {
    Coded {
        corr: BibdCorrelator,
        /// Chip counts of symbol 0 for every user; symbol `m` is a right rotation by `m`.
        base: Vec<Vec<u32>>,
        support: Vec<usize>,
    },
    Divided {
        corr: BibdCorrelator,
        symbols: Vec<Vec<Vec<u32>>>,
        outputs: Vec<usize>,
        table: Vec<Vec<f64>>,
    },
    Ook {
        codes: Vec<Vec<u8>>,
        threshold: f64,
    },
}

struct Prepared {
    engine: Engine,
    chips: usize,
    denom: f64,
    used: usize,
    constellation_size: usize,
    ooc_size: Option<usize>,
    lambda0: f64,
    mu_b: f64,
}

fn require<'a, T>(item: &'a Option<Arc<T>>, what: &str, scheme: Scheme) -> Result<&'a T> {
    item.as_deref()
        .ok_or_else(|| Error::param(format!("{scheme} needs {what}")))
}

fn check_users(users: usize, available: usize, what: &str) -> Result<()> {
    if users == 0 {
        return Err(Error::param("at least one active user is required"));
    }
    if users > available {
        return Err(Error::param(format!(
            "{users} users requested but only {available} {what} available"
        )));
    }
    Ok(())
}

fn prepare(config: &SimConfig) -> Result<Prepared> {
    if config.max_symbols == 0 {
        return Err(Error::param("symbol budget must be positive"));
    }
    if config.target_errors == Some(0) {
        return Err(Error::param("target error count must be positive"));
    }
    let n = config.users;
    match config.scheme {
        Scheme::CMeppm => {
            let bibd = require(&config.bibd, "a BIBD code", config.scheme)?;
            let ooc = require(&config.ooc, "an OOC", config.scheme)?;
            check_users(n, ooc.len(), "OOC codewords")?;
            let q = bibd.len();
            let base = (0..n)
                .map(|u| {
                    Ok(cmeppm_constellation(ooc.codeword(u), bibd)?
                        .symbol(0)
                        .counts()
                        .to_vec())
                })
                .collect::<Result<Vec<_>>>()?;
            let params = config.link.params(q, q);
            params.validate()?;
            Ok(Prepared {
                engine: Engine::Coded {
                    corr: BibdCorrelator::new(bibd),
                    base,
                    support: (0..q).filter(|&l| ooc.codeword(0)[l] != 0).collect(),
                },
                chips: q,
                denom: q as f64,
                used: 1 << bits_per_symbol(q),
                constellation_size: q,
                ooc_size: Some(ooc.len()),
                lambda0: params.lambda0(),
                mu_b: params.mu_b(),
            })
        }
        Scheme::DMeppmI | Scheme::DMeppmII => {
            let bibd = require(&config.bibd, "a BIBD code", config.scheme)?;
            let q = bibd.len();
            check_users(n, q, "BIBD codewords")?;
            let mut sizing = config.dmeppm;
            sizing.kind = if config.scheme == Scheme::DMeppmI {
                MeppmType::I
            } else {
                MeppmType::II
            };
            let (size, branches) = sizing.resolve(q, n);
            let partition = partition_bibd(bibd, &vec![size; n])?;
            let constellations = partition
                .assignments
                .iter()
                .map(|a| {
                    let a = crate::modem::UserAssignment { branches, ..a.clone() };
                    let c = dmeppm_constellation(&a, sizing.kind, bibd)?;
                    if c.len() > MAX_CONSTELLATION {
                        return Err(Error::param(format!(
                            "D-MEPPM constellation of {} symbols exceeds the limit of {MAX_CONSTELLATION}",
                            c.len()
                        )));
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?;
            let m = constellations[0].len();
            if m < 2 {
                return Err(Error::param(
                    "D-MEPPM constellation has fewer than two symbols",
                ));
            }
            let params = config.link.params(q, m);
            params.validate()?;
            let corr = BibdCorrelator::new(bibd);
            let outputs = partition.assignments[0].codewords.clone();
            let table = mean_table(
                &constellations[0],
                &corr,
                params.lambda0(),
                params.mu_b(),
                &outputs,
            )?;
            Ok(Prepared {
                engine: Engine::Divided {
                    corr,
                    symbols: constellations
                        .iter()
                        .map(|c| c.symbols().iter().map(|s| s.counts().to_vec()).collect())
                        .collect(),
                    outputs,
                    table,
                },
                chips: q,
                denom: q as f64,
                used: 1 << bits_per_symbol(m),
                constellation_size: m,
                ooc_size: None,
                lambda0: params.lambda0(),
                mu_b: params.mu_b(),
            })
        }
        Scheme::OokOcdma => {
            let ooc = require(&config.ooc, "an OOC", config.scheme)?;
            check_users(n, ooc.len(), "OOC codewords")?;
            let l = ooc.params().length;
            let w = ooc.params().weight as f64;
            // Each user's LED array delivers P0/N; one bit per chip sequence of length L.
            let mut link = config.link;
            link.peak_power /= n as f64;
            let params = link.params(l, 2);
            params.validate()?;
            let (lambda0, mu_b) = (params.lambda0(), params.mu_b());
            Ok(Prepared {
                engine: Engine::Ook {
                    codes: (0..n).map(|u| ooc.codeword(u).to_vec()).collect(),
                    threshold: w * mu_b + w * lambda0 / 2.0,
                },
                chips: l,
                denom: 1.0,
                used: 2,
                constellation_size: 2,
                ooc_size: Some(ooc.len()),
                lambda0,
                mu_b,
            })
        }
    }
}

impl Prepared {
    /// Runs epoch `k`; true on a symbol error for user 0.
    fn epoch(&self, seed: u64, k: u64, noise: NoiseModel, users: usize) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        let tx: Vec<usize> = (0..users).map(|_| rng.random_range(0..self.used)).collect();

        let q = self.chips;
        let mut levels = vec![0u32; q];
        match &self.engine {
            Engine::Coded { base, .. } => {
                for (b, &m) in base.iter().zip(&tx) {
                    for (j, &c) in b.iter().enumerate() {
                        levels[(j + m) % q] += c;
                    }
                }
            }
            Engine::Divided { symbols, .. } => {
                for (s, &m) in symbols.iter().zip(&tx) {
                    for (acc, &c) in levels.iter_mut().zip(&s[m]) {
                        *acc += c;
                    }
                }
            }
            Engine::Ook { codes, .. } => {
                for (d, &bit) in codes.iter().zip(&tx) {
                    if bit == 1 {
                        for (acc, &c) in levels.iter_mut().zip(d) {
                            *acc += u32::from(c);
                        }
                    }
                }
            }
        }
        let scale = self.lambda0 / self.denom;
        let mean: Vec<f64> = levels
            .iter()
            .map(|&c| scale * f64::from(c) + self.mu_b)
            .collect();
        let r: Vec<f64> = match noise {
            NoiseModel::Poisson => sample(&mean, &mut rng)
                .expect("means are non-negative")
                .counts
                .into_iter()
                .map(f64::from)
                .collect(),
            NoiseModel::Gaussian => {
                sample_gaussian(&mean, &mut rng).expect("means are non-negative")
            }
            NoiseModel::Noiseless => mean,
        };

        let decided = match &self.engine {
            Engine::Coded { corr, support, .. } => {
                let z = corr.correlate(&r).expect("frame length");
                cmeppm_decide(&ooc_correlate_support(&z, support, q).expect("frame length"))
            }
            Engine::Divided {
                corr,
                outputs,
                table,
                ..
            } => {
                let z = corr
                    .correlate_at(&r, outputs.iter().copied())
                    .expect("frame length");
                dmeppm_decide(&z, table).expect("table shape")
            }
            Engine::Ook { codes, threshold } => {
                usize::from(ook_decide(&r, &codes[0], *threshold).expect("frame length"))
            }
        };
        decided != tx[0]
    }
}

/// Simulates user 0 among `config.users` synchronous users until the symbol budget or the
/// error target is reached.
pub fn run_ber(config: &SimConfig) -> Result<BerResult> {
    let prepared = prepare(config)?;
    let target = config.target_errors.unwrap_or(u64::MAX);
    let (mut symbols, mut errors) = (0u64, 0u64);
    'outer: while symbols < config.max_symbols {
        let end = config.max_symbols.min(symbols + BATCH as u64);
        let outcomes: Vec<bool> = (symbols..end)
            .into_par_iter()
            .map(|k| prepared.epoch(config.seed, k, config.noise, config.users))
            .collect();
        for bad in outcomes {
            symbols += 1;
            if bad {
                errors += 1;
                if errors >= target {
                    break 'outer;
                }
            }
        }
    }
    Ok(BerResult {
        scheme: config.scheme,
        users: config.users,
        seed: config.seed,
        symbols,
        errors,
        constellation_size: prepared.constellation_size,
        used_symbols: prepared.used,
        ooc_size: prepared.ooc_size,
        lambda0: prepared.lambda0,
        mu_b: prepared.mu_b,
    })
}

/// Runs every grid point in order; a failing point is reported in place and the sweep goes on.
pub fn sweep(grid: &[SimConfig]) -> Result<Vec<Result<BerResult>>> {
    if grid.is_empty() {
        return Err(Error::param("sweep grid is empty"));
    }
    Ok(grid.iter().map(run_ber).collect())
}

/// SplitMix64 finalizer over `(master, index)`, for per-point seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Where pairwise symbol distances are measured.
#[derive(Debug, Clone, Copy)]
pub enum DistanceSpace<'a> {
    /// Transmitted chip intensities `u_m`.
    Signal,
    /// Noiseless differential-correlator outputs `E{z | m}` of the given code.
    Correlator(&'a BibdCode),
}

/// Exact minimum squared distance between distinct symbols, per unit `Λ0²`;
/// `None` when there is no pair.
pub fn min_distance_sq(c: &Constellation, space: DistanceSpace<'_>) -> Result<Option<Ratio<i64>>> {
    let points: Vec<Vec<Ratio<i64>>> = match space {
        DistanceSpace::Signal => c.symbols().iter().map(|s| s.levels()).collect(),
        DistanceSpace::Correlator(bibd) => {
            let corr = BibdCorrelator::new(bibd);
            c.symbols()
                .iter()
                .map(|s| corr.correlate_exact(s))
                .collect::<Result<_>>()?
        }
    };
    let mut best: Option<Ratio<i64>> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d: Ratio<i64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            if best.is_none_or(|cur| d < cur) {
                best = Some(d);
            }
        }
    }
    Ok(best)
}

/// Minimum pairwise symbol distance in units of `Λ0`.
pub fn min_distance(c: &Constellation, space: DistanceSpace<'_>) -> Result<Option<f64>> {
    Ok(min_distance_sq(c, space)?.map(|d| (*d.numer() as f64 / *d.denom() as f64).sqrt()))
}

/// C-MEPPM versus OOK OOC-OCDMA distances, in units of `Λ0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub users: usize,
    /// `√w / (N log2 Q)`.
    pub d_ooc: f64,
    /// `√(2(K − λ)(w − α)) / Q`.
    pub d_cmeppm: f64,
    pub ratio: f64,
    /// `(N log2 Q / Q) √((K − λ) 2(w − α)/w)`.
    pub ratio_closed_form: f64,
    /// `Q / (log2 Q √(K − λ))`, the user count above which C-MEPPM is argued to win.
    pub threshold_users: f64,
    pub above_threshold: bool,
    /// Whether `d_cmeppm > d_ooc` holds exactly.
    pub cmeppm_larger: bool,
}

pub fn distance_comparison(bibd: BibdParams, ooc: OocParams, users: usize) -> DistanceReport {
    let q = bibd.q as f64;
    let kl = (bibd.k - bibd.lambda) as f64;
    let w = ooc.weight as f64;
    let wa = (ooc.weight - ooc.max_correlation) as f64;
    let n = users as f64;
    let lq = q.log2();
    let d_ooc = w.sqrt() / (lq * n);
    let d_cmeppm = (2.0 * kl * wa).sqrt() / q;
    let threshold_users = q / (lq * kl.sqrt());
    DistanceReport {
        users,
        d_ooc,
        d_cmeppm,
        ratio: d_cmeppm / d_ooc,
        ratio_closed_form: n * lq / q * (kl * 2.0 * wa / w).sqrt(),
        threshold_users,
        above_threshold: n > threshold_users,
        cmeppm_larger: d_cmeppm > d_ooc,
    }
}

pub const CSV_HEADER: [&str; 17] = [
    "scheme", "Q", "K", "lambda", "L", "w", "alpha", "N", "P0_W", "Pb_W", "eta", "bitrate", "seed",
    "symbols", "errors", "ser", "ber",
];

/// One CSV record for a grid point; code columns a scheme does not use, and the result
/// columns of a failed point, are left empty.
pub fn csv_record(config: &SimConfig, outcome: &Result<BerResult>) -> Vec<String> {
    let blank = || String::new();
    let uses_bibd = config.scheme != Scheme::OokOcdma;
    let uses_ooc = matches!(config.scheme, Scheme::CMeppm | Scheme::OokOcdma);
    let mut row = Vec::with_capacity(CSV_HEADER.len());
    row.push(config.scheme.to_string());
    match config.bibd.as_deref().filter(|_| uses_bibd) {
        Some(b) => {
            let p = b.params();
            row.extend([p.q.to_string(), p.k.to_string(), p.lambda.to_string()]);
        }
        None => row.extend([blank(), blank(), blank()]),
    }
    match config.ooc.as_deref().filter(|_| uses_ooc) {
        Some(o) => {
            let p = o.params();
            row.extend([
                p.length.to_string(),
                p.weight.to_string(),
                p.max_correlation.to_string(),
            ]);
        }
        None => row.extend([blank(), blank(), blank()]),
    }
    row.extend([
        config.users.to_string(),
        config.link.peak_power.to_string(),
        config.link.background_power.to_string(),
        config.link.efficiency.to_string(),
        config.link.bit_rate.to_string(),
        config.seed.to_string(),
    ]);
    match outcome {
        Ok(r) => row.extend([
            r.symbols.to_string(),
            r.errors.to_string(),
            r.ser().to_string(),
            r.ber().to_string(),
        ]),
        Err(_) => row.extend([blank(), blank(), blank(), blank()]),
    }
    row
}

impl fmt::Display for DistanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} d_ooc={:.6} d_cmeppm={:.6} ratio={:.6} threshold N>{:.3} ({})",
            self.users,
            self.d_ooc,
            self.d_cmeppm,
            self.ratio,
            self.threshold_users,
            if self.above_threshold {
                "above"
            } else {
                "below"
            }
        )
    }
}
