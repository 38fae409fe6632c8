//! Optical orthogonal codes: the Johnson bound, a seeded search, and correlation checks.
//!
//! An `(L, w, α)` OOC is a family of weight-`w` binary sequences of length `L` whose cyclic
//! autocorrelation at every nonzero shift and cyclic cross-correlation at every shift are at
//! most `α`. Coded-MEPPM uses every cyclic shift of a codeword as a symbol, so the strict
//! all-shift constraint is the default. A zero-shift-only mode is available for synchronous OOK
//! systems, where only aligned overlaps matter.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::util::{bits_from_str, bits_to_string};
use crate::{Error, Result, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OocParams {
    pub length: usize,
    pub weight: usize,
    /// Maximum allowed auto- and cross-correlation.
    pub max_correlation: usize,
}

impl OocParams {
    pub fn new(length: usize, weight: usize, max_correlation: usize) -> Self {
        Self {
            length,
            weight,
            max_correlation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let OocParams {
            length: l,
            weight: w,
            max_correlation: a,
        } = *self;
        if a == 0 || a >= w || w > l {
            return Err(Error::param(format!(
                "OOC parameters must satisfy 0 < alpha < w <= L, got L={l} w={w} alpha={a}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for OocParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            self.length, self.weight, self.max_correlation
        )
    }
}

/// Which shifts the correlation constraints apply to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CorrelationMode {
    /// Autocorrelation at every nonzero shift, cross-correlation at every shift.
    #[default]
    Strict,
    /// Cross-correlation at shift zero only; no autocorrelation constraint.
    ZeroShift,
}

impl CorrelationMode {
    fn auto_active(self, shift: usize) -> bool {
        match self {
            CorrelationMode::Strict => shift != 0,
            CorrelationMode::ZeroShift => false,
        }
    }

    fn cross_active(self, shift: usize) -> bool {
        match self {
            CorrelationMode::Strict => true,
            CorrelationMode::ZeroShift => shift == 0,
        }
    }
}

impl std::str::FromStr for CorrelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CorrelationMode::Strict),
            "zero-shift" => Ok(CorrelationMode::ZeroShift),
            other => Err(Error::param(format!(
                "unknown correlation mode {other:?}, expected strict or zero-shift"
            ))),
        }
    }
}

/// Upper bound on the number of codewords of an `(L, w, α)` OOC.
///
/// Evaluates `⌊(1/w)⌊(L-1)/(w-1)⌊(L-2)/(w-2) … ⌊(L-α)/(w-α)⌋ … ⌋⌋⌋` from the innermost floor
/// outwards.
pub fn johnson_bound(length: usize, weight: usize, alpha: usize) -> Result<usize> {
    OocParams::new(length, weight, alpha).validate()?;
    let (l, w) = (length as u128, weight as u128);
    let mut acc: u128 = 1;
    for i in (1..=alpha as u128).rev() {
        acc = (l - i) * acc / (w - i);
    }
    Ok((acc / w) as usize)
}

/// A family of OOC codewords, stored as 0/1 chips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OocCode {
    params: OocParams,
    codewords: Vec<Vec<u8>>,
}

impl OocCode {
    /// Wraps codewords after checking their lengths. Correlation constraints are not checked;
    /// see [`OocCode::verify`].
    pub fn new(params: OocParams, codewords: Vec<Vec<u8>>) -> Result<Self> {
        if let Some(c) = codewords.iter().find(|c| c.len() != params.length) {
            return Err(Error::LengthMismatch {
                expected: params.length,
                found: c.len(),
            });
        }
        Ok(Self { params, codewords })
    }

    fn from_supports(params: OocParams, supports: &[Vec<usize>]) -> Self {
        let codewords = supports
            .iter()
            .map(|s| {
                let mut c = vec![0u8; params.length];
                for &i in s {
                    c[i] = 1;
                }
                c
            })
            .collect();
        Self { params, codewords }
    }

    pub fn params(&self) -> OocParams {
        self.params
    }

    /// Number of codewords `N`.
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[Vec<u8>] {
        &self.codewords
    }

    pub fn codeword(&self, n: usize) -> &[u8] {
        &self.codewords[n]
    }

    /// Keeps only the first `n` codewords.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            params: self.params,
            codewords: self.codewords.iter().take(n).cloned().collect(),
        }
    }

    /// Lists every weight, autocorrelation and cross-correlation violation.
    pub fn verify(&self, mode: CorrelationMode) -> VerificationReport<OocViolation> {
        let OocParams {
            length: l,
            weight: w,
            max_correlation: alpha,
        } = self.params;
        let mut report = VerificationReport::default();
        for (n, c) in self.codewords.iter().enumerate() {
            let weight = c.iter().filter(|&&b| b != 0).count();
            if weight != w {
                report.violations.push(OocViolation::Weight {
                    codeword: n,
                    weight,
                });
            }
            for shift in (0..l).filter(|&s| mode.auto_active(s)) {
                let value = cyclic_correlation(c, c, shift);
                if value > alpha {
                    report.violations.push(OocViolation::Auto {
                        codeword: n,
                        shift,
                        value,
                    });
                }
            }
        }
        for a in 0..self.codewords.len() {
            for b in a + 1..self.codewords.len() {
                for shift in (0..l).filter(|&s| mode.cross_active(s)) {
                    let value = cyclic_correlation(&self.codewords[a], &self.codewords[b], shift);
                    if value > alpha {
                        report.violations.push(OocViolation::Cross {
                            first: a,
                            second: b,
                            shift,
                            value,
                        });
                    }
                }
            }
        }
        report
    }

    /// Serializes as `OOC L W ALPHA N` followed by one line of `L` bits per codeword.
    pub fn to_text(&self) -> String {
        let p = self.params;
        let mut out = format!(
            "OOC {} {} {} {}\n",
            p.length,
            p.weight,
            p.max_correlation,
            self.codewords.len()
        );
        for c in &self.codewords {
            out.push_str(&bits_to_string(c));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "OOC" {
            return Err(Error::parse(1, "expected header `OOC L W ALPHA N`"));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("invalid number {s:?}")))
        };
        let params = OocParams::new(num(fields[1])?, num(fields[2])?, num(fields[3])?);
        let n = num(fields[4])?;
        let mut codewords = Vec::with_capacity(n);
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let bits = bits_from_str(line, i + 1)?;
            if bits.len() != params.length {
                return Err(Error::parse(
                    i + 1,
                    format!(
                        "codeword has {} chips, expected {}",
                        bits.len(),
                        params.length
                    ),
                ));
            }
            codewords.push(bits);
        }
        if codewords.len() != n {
            return Err(Error::parse(
                codewords.len() + 1,
                format!("found {} codewords, header says {n}", codewords.len()),
            ));
        }
        Self::new(params, codewords)
    }
}

/// `Σ_j a_j · b_{(j + shift) mod L}`.
pub fn cyclic_correlation(a: &[u8], b: &[u8], shift: usize) -> usize {
    let l = a.len();
    (0..l)
        .filter(|&j| a[j] != 0 && b[(j + shift) % l] != 0)
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OocViolation {
    Weight {
        codeword: usize,
        weight: usize,
    },
    Auto {
        codeword: usize,
        shift: usize,
        value: usize,
    },
    Cross {
        first: usize,
        second: usize,
        shift: usize,
        value: usize,
    },
}

impl fmt::Display for OocViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OocViolation::Weight { codeword, weight } => {
                write!(f, "codeword {codeword} has weight {weight}")
            }
            OocViolation::Auto {
                codeword,
                shift,
                value,
            } => write!(
                f,
                "codeword {codeword} autocorrelation {value} at shift {shift}"
            ),
            OocViolation::Cross {
                first,
                second,
                shift,
                value,
            } => write!(
                f,
                "codewords {first} and {second} cross-correlation {value} at shift {shift}"
            ),
        }
    }
}

/// Tuning knobs for [`search_ooc_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub n_target: usize,
    pub seed: u64,
    /// Total local-search iterations shared by all restarts.
    pub budget: u64,
    pub restarts: usize,
    pub mode: CorrelationMode,
}

impl SearchOptions {
    pub fn new(n_target: usize, seed: u64, budget: u64) -> Self {
        Self {
            n_target,
            seed,
            budget,
            restarts: 4,
            mode: CorrelationMode::Strict,
        }
    }
}

/// Searches for up to `n_target` codewords with the default options (strict mode, 4 restarts).
pub fn search_ooc(params: OocParams, n_target: usize, seed: u64, budget: u64) -> Result<OocCode> {
    search_ooc_with(params, &SearchOptions::new(n_target, seed, budget))
}

/// Randomized greedy search with local repair.
///
/// Each restart grows a family one codeword at a time. A new codeword starts from a randomized
/// greedy support (each chip picked among the least-conflicting positions); then a tabu
/// min-conflicts walk moves single chips of any codeword in the family until every auto- and
/// cross-correlation constraint holds again. When a walk fails the family falls back to its last
/// valid state, with a random codeword dropped after repeated failures. Restarts run in parallel
/// from independent sub-seeds; the largest family wins, ties going to the lowest restart index,
/// so the result depends only on the options.
pub fn search_ooc_with(params: OocParams, opts: &SearchOptions) -> Result<OocCode> {
    params.validate()?;
    if opts.n_target == 0 {
        return Err(Error::param("n_target must be at least 1"));
    }
    if opts.budget == 0 {
        return Err(Error::param("search budget must be at least 1"));
    }
    let restarts = opts.restarts.max(1);
    let per_restart = (opts.budget / restarts as u64).max(1);
    let families: Vec<Vec<Vec<usize>>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            grow_family(params, opts.mode, opts.n_target, per_restart, &mut rng)
        })
        .collect();
    let best = families
        .iter()
        .enumerate()
        .max_by_key(|(i, f)| (f.len(), std::cmp::Reverse(*i)))
        .map(|(_, f)| f.as_slice())
        .unwrap_or(&[]);
    let mut supports = best.to_vec();
    for s in &mut supports {
        s.sort_unstable();
    }
    let code = OocCode::from_supports(params, &supports);
    debug_assert!(code.verify(opts.mode).is_empty());
    Ok(code)
}

fn grow_family(
    params: OocParams,
    mode: CorrelationMode,
    n_target: usize,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let per_attempt = (100 * params.length as u64).max(2000);
    let mut valid: Vec<Vec<usize>> = Vec::new();
    let mut used = 0u64;
    let mut failures = 0;
    while used < budget && valid.len() < n_target {
        let cap = per_attempt.min(budget - used);
        let mut family = Family::new(params, mode, valid.clone());
        family.push_greedy(rng);
        let (found, steps) = family.repair(rng, cap);
        used += steps.max(1);
        if found {
            valid = family.supports;
            failures = 0;
        } else {
            failures += 1;
            if failures >= 3 && !valid.is_empty() {
                // Perturb: free up room by dropping a codeword; the walk may then find two.
                let drop = rng.random_range(0..valid.len());
                let mut shrunk = valid.clone();
                shrunk.remove(drop);
                let mut retry = Family::new(params, mode, shrunk);
                retry.push_greedy(rng);
                let cap = per_attempt.min(budget.saturating_sub(used));
                let (found, steps) = retry.repair(rng, cap);
                used += steps.max(1);
                if found {
                    // Same size, different family; keep walking from here.
                    valid = retry.supports;
                }
                failures = 0;
            }
        }
    }
    valid
}

/// Correlation loads of a mutable codeword family.
///
/// `auto[i][d]` counts ordered chip pairs of codeword `i` at difference `d`; `cross[i][j][s]`
/// counts pairs `(a, b)` with `a` in codeword `i`, `b` in codeword `j` and `a - b ≡ s`. Both
/// orientations of every cross pair are stored; the penalty counts each unordered pair once.
struct Family {
    l: usize,
    w: usize,
    alpha: u32,
    mode: CorrelationMode,
    supports: Vec<Vec<usize>>,
    member: Vec<Vec<bool>>,
    auto: Vec<Vec<u32>>,
    cross: Vec<Vec<Vec<u32>>>,
    penalty: u32,
}

impl Family {
    fn new(params: OocParams, mode: CorrelationMode, supports: Vec<Vec<usize>>) -> Self {
        let l = params.length;
        let mut family = Self {
            l,
            w: params.weight,
            alpha: params.max_correlation as u32,
            mode,
            supports: Vec::new(),
            member: Vec::new(),
            auto: Vec::new(),
            cross: Vec::new(),
            penalty: 0,
        };
        for s in supports {
            let i = family.push_empty();
            for e in s {
                family.add(i, e);
            }
        }
        family
    }

    fn push_empty(&mut self) -> usize {
        let l = self.l;
        for row in &mut self.cross {
            row.push(vec![0; l]);
        }
        let n = self.supports.len() + 1;
        self.cross.push(vec![vec![0; l]; n]);
        self.supports.push(Vec::with_capacity(self.w));
        self.member.push(vec![false; l]);
        self.auto.push(vec![0; l]);
        n - 1
    }

    #[inline]
    fn bump(load: &mut u32, active: bool, alpha: u32) -> u32 {
        let over = u32::from(active && *load >= alpha);
        *load += 1;
        over
    }

    #[inline]
    fn unbump(load: &mut u32, active: bool, alpha: u32) -> u32 {
        let over = u32::from(active && *load > alpha);
        *load -= 1;
        over
    }

    /// Adds chip `e` to codeword `i`; returns the penalty increase.
    fn add(&mut self, i: usize, e: usize) -> u32 {
        let (l, alpha, mode) = (self.l, self.alpha, self.mode);
        let mut inc = 0;
        for &y in &self.supports[i] {
            let d1 = (e + l - y) % l;
            let d2 = (y + l - e) % l;
            inc += Self::bump(&mut self.auto[i][d1], mode.auto_active(d1), alpha);
            inc += Self::bump(&mut self.auto[i][d2], mode.auto_active(d2), alpha);
        }
        for j in 0..self.supports.len() {
            if j == i {
                continue;
            }
            for &b in &self.supports[j] {
                let s = (e + l - b) % l;
                let t = (l - s) % l;
                inc += Self::bump(&mut self.cross[i][j][s], mode.cross_active(s), alpha);
                self.cross[j][i][t] += 1;
            }
        }
        self.supports[i].push(e);
        self.member[i][e] = true;
        self.penalty += inc;
        inc
    }

    /// Removes the chip at position `idx` of codeword `i`; returns the penalty decrease.
    fn remove_at(&mut self, i: usize, idx: usize) -> u32 {
        let (l, alpha, mode) = (self.l, self.alpha, self.mode);
        let e = self.supports[i].swap_remove(idx);
        self.member[i][e] = false;
        let mut dec = 0;
        for &y in &self.supports[i] {
            let d1 = (e + l - y) % l;
            let d2 = (y + l - e) % l;
            dec += Self::unbump(&mut self.auto[i][d1], mode.auto_active(d1), alpha);
            dec += Self::unbump(&mut self.auto[i][d2], mode.auto_active(d2), alpha);
        }
        for j in 0..self.supports.len() {
            if j == i {
                continue;
            }
            for &b in &self.supports[j] {
                let s = (e + l - b) % l;
                let t = (l - s) % l;
                dec += Self::unbump(&mut self.cross[i][j][s], mode.cross_active(s), alpha);
                self.cross[j][i][t] -= 1;
            }
        }
        self.penalty -= dec;
        dec
    }

    /// Penalty increase from adding `e` to codeword `i`, leaving the state unchanged.
    fn probe(&mut self, i: usize, e: usize) -> u32 {
        let inc = self.add(i, e);
        let idx = self.supports[i].len() - 1;
        self.remove_at(i, idx);
        inc
    }

    /// Uniformly random choice among the minimizers of the cost.
    fn pick_min<T: Copy>(rng: &mut ChaCha8Rng, items: impl Iterator<Item = (T, u32)>) -> Option<T> {
        let mut best: Option<(u32, T, u32)> = None;
        for (item, cost) in items {
            best = match best {
                None => Some((cost, item, 1)),
                Some((c, _, _)) if cost < c => Some((cost, item, 1)),
                Some((c, choice, ties)) if cost == c => {
                    let ties = ties + 1;
                    let choice = if rng.random_range(0..ties) == 0 {
                        item
                    } else {
                        choice
                    };
                    Some((c, choice, ties))
                }
                keep => keep,
            };
        }
        best.map(|(_, choice, _)| choice)
    }

    /// Appends a codeword built chip by chip from the least-conflicting positions.
    fn push_greedy(&mut self, rng: &mut ChaCha8Rng) {
        let i = self.push_empty();
        while self.supports[i].len() < self.w {
            let free: Vec<usize> = (0..self.l).filter(|&e| !self.member[i][e]).collect();
            let costs: Vec<(usize, u32)> =
                free.into_iter().map(|e| (e, self.probe(i, e))).collect();
            let e = Self::pick_min(rng, costs.into_iter()).expect("w <= L leaves a free chip");
            self.add(i, e);
        }
    }

    /// Number of over-limit loads chip `e` of codeword `i` contributes to.
    fn conflicts(&self, i: usize, e: usize) -> u32 {
        let (l, alpha, mode) = (self.l, self.alpha, self.mode);
        let mut c = 0;
        for &y in &self.supports[i] {
            if y == e {
                continue;
            }
            let d1 = (e + l - y) % l;
            let d2 = (y + l - e) % l;
            c += u32::from(mode.auto_active(d1) && self.auto[i][d1] > alpha);
            c += u32::from(mode.auto_active(d2) && self.auto[i][d2] > alpha);
        }
        for j in 0..self.supports.len() {
            if j == i {
                continue;
            }
            for &b in &self.supports[j] {
                let s = (e + l - b) % l;
                c += u32::from(mode.cross_active(s) && self.cross[i][j][s] > alpha);
            }
        }
        c
    }

    /// Tabu min-conflicts walk over single-chip moves; returns success and steps used.
    fn repair(&mut self, rng: &mut ChaCha8Rng, max_steps: u64) -> (bool, u64) {
        let tenure = (self.w as u64 / 2).max(2) + 3;
        let n = self.supports.len();
        let mut tabu_until = vec![vec![0u64; self.l]; n];
        let mut step = 0u64;
        while self.penalty > 0 && step < max_steps {
            step += 1;
            let (i, idx) = if rng.random_bool(0.05) {
                let i = rng.random_range(0..n);
                (i, rng.random_range(0..self.w))
            } else {
                let mut chips = Vec::new();
                for i in 0..n {
                    for (idx, &e) in self.supports[i].iter().enumerate() {
                        let c = self.conflicts(i, e);
                        if c > 0 {
                            chips.push(((i, idx), u32::MAX - c));
                        }
                    }
                }
                match Self::pick_min(rng, chips.into_iter()) {
                    Some(choice) => choice,
                    None => break,
                }
            };
            let removed = self.supports[i][idx];
            self.remove_at(i, idx);
            let free: Vec<usize> = (0..self.l)
                .filter(|&e| !self.member[i][e] && e != removed && tabu_until[i][e] <= step)
                .collect();
            let options: Vec<(usize, u32)> =
                free.into_iter().map(|e| (e, self.probe(i, e))).collect();
            let e = Self::pick_min(rng, options.into_iter()).unwrap_or(removed);
            self.add(i, e);
            tabu_until[i][removed] = step + tenure;
        }
        (self.penalty == 0, step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Nested floors written out by hand, independent of the loop in `johnson_bound`.
    #[test]
    fn johnson_bound_hand_values() {
        // (14,7,4): ⌊10/3⌋=3, ⌊11·3/4⌋=8, ⌊12·8/5⌋=19, ⌊13·19/6⌋=41, ⌊41/7⌋=5
        assert_eq!(johnson_bound(14, 7, 4).unwrap(), 5);
        // (67,13,3): ⌊64/10⌋=6, ⌊65·6/11⌋=35, ⌊66·35/12⌋=192, ⌊192/13⌋=14
        assert_eq!(johnson_bound(67, 13, 3).unwrap(), 14);
        assert_eq!(johnson_bound(7, 3, 1).unwrap(), 1);
        // (101,11,2): ⌊99/9⌋=11, ⌊100·11/10⌋=110, ⌊110/11⌋=10
        assert_eq!(johnson_bound(101, 11, 2).unwrap(), 10);
        assert_eq!(johnson_bound(13, 3, 1).unwrap(), 2);
    }

    #[test]
    fn johnson_bound_rejects_bad_params() {
        assert!(johnson_bound(7, 8, 1).is_err());
        assert!(johnson_bound(7, 3, 3).is_err());
        assert!(johnson_bound(7, 3, 0).is_err());
    }

    #[test]
    fn fig4_codeword_autocorrelation() {
        // Support {0,2,5}: differences ±2 and ±5 each occur twice, so the sidelobes at shifts 2
        // and 5 reach 2. The codeword is a valid (7,3,2) OOC but not a (7,3,1) one.
        let d = vec![1, 0, 1, 0, 0, 1, 0];
        let sidelobes: Vec<usize> = (1..7).map(|s| cyclic_correlation(&d, &d, s)).collect();
        assert_eq!(sidelobes, vec![0, 2, 1, 1, 2, 0]);
        let strict = OocCode::new(OocParams::new(7, 3, 1), vec![d.clone()]).unwrap();
        assert_eq!(
            strict.verify(CorrelationMode::Strict).violations,
            vec![
                OocViolation::Auto {
                    codeword: 0,
                    shift: 2,
                    value: 2
                },
                OocViolation::Auto {
                    codeword: 0,
                    shift: 5,
                    value: 2
                },
            ]
        );
        let relaxed = OocCode::new(OocParams::new(7, 3, 2), vec![d]).unwrap();
        assert!(relaxed.verify(CorrelationMode::Strict).is_empty());
    }

    #[test]
    fn identical_codewords_violate_at_shift_zero() {
        let d = vec![1, 0, 1, 0, 0, 1, 0];
        let code = OocCode::new(OocParams::new(7, 3, 1), vec![d.clone(), d]).unwrap();
        let report = code.verify(CorrelationMode::Strict);
        assert!(report.violations.contains(&OocViolation::Cross {
            first: 0,
            second: 1,
            shift: 0,
            value: 3
        }));
        let zero = code.verify(CorrelationMode::ZeroShift);
        assert_eq!(zero.len(), 1);
    }

    #[test]
    fn exhaustive_seven_three_one_has_valid_singletons() {
        let mut valid = 0;
        for mask in 0u32..128 {
            if mask.count_ones() != 3 {
                continue;
            }
            let c: Vec<u8> = (0..7).map(|i| ((mask >> i) & 1) as u8).collect();
            let ok = (1..7).all(|s| cyclic_correlation(&c, &c, s) <= 1);
            valid += usize::from(ok);
        }
        // 35 weight-3 vectors; the cyclic (7,3,1) difference-set translates and their mirrors.
        assert_eq!(valid, 14);
        let code = search_ooc(OocParams::new(7, 3, 1), 1, 3, 1000).unwrap();
        assert_eq!(code.len(), 1);
        assert!(code.verify(CorrelationMode::Strict).is_empty());
    }

    #[test]
    fn thirteen_three_one_finds_two() {
        let code = search_ooc(OocParams::new(13, 3, 1), 2, 11, 20_000).unwrap();
        assert_eq!(code.len(), 2);
        assert!(code.verify(CorrelationMode::Strict).is_empty());
    }

    #[test]
    fn search_never_exceeds_johnson_bound() {
        let code = search_ooc(OocParams::new(14, 7, 4), 10, 5, 20_000).unwrap();
        assert!(code.len() <= 5);
        assert!(!code.is_empty());
        assert!(code.verify(CorrelationMode::Strict).is_empty());
    }

    #[test]
    fn search_is_deterministic() {
        let p = OocParams::new(31, 4, 1);
        let a = search_ooc(p, 5, 42, 5_000).unwrap();
        let b = search_ooc(p, 5, 42, 5_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_shift_mode_admits_more_codewords() {
        let p = OocParams::new(14, 7, 4);
        let mut opts = SearchOptions::new(10, 1, 20_000);
        opts.mode = CorrelationMode::ZeroShift;
        let code = search_ooc_with(p, &opts).unwrap();
        assert_eq!(code.len(), 10);
        assert!(code.verify(CorrelationMode::ZeroShift).is_empty());
    }

    #[test]
    fn search_rejects_bad_options() {
        let p = OocParams::new(7, 3, 1);
        assert!(search_ooc(p, 0, 1, 10).is_err());
        assert!(search_ooc(p, 1, 1, 0).is_err());
        assert!(search_ooc(OocParams::new(7, 8, 1), 1, 1, 10).is_err());
    }

    #[test]
    fn text_round_trip() {
        let code = search_ooc(OocParams::new(13, 3, 1), 2, 11, 20_000).unwrap();
        let text = code.to_text();
        assert!(text.starts_with("OOC 13 3 1 2\n"));
        assert_eq!(OocCode::from_text(&text).unwrap(), code);
        assert!(OocCode::from_text("OOC 7 3 1 2\n1010010\n").is_err());
    }
}
