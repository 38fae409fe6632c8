//! Constellations for coded-MEPPM, divided-MEPPM and the OOK OOC-OCDMA baseline.
//!
//! BIBD-based symbols are chip vectors whose levels are integer multiples of `1/Q`; they are
//! stored as integer chip counts over a common denominator so that symbol algebra stays exact.

use std::fmt;

use num_rational::Ratio;

use crate::design::BibdCode;
use crate::util::rotate_right;
use crate::{Error, Result};

/// One modulation symbol: chip `j` has level `counts[j] / denom`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChipVector {
    denom: u32,
    counts: Vec<u32>,
}

impl ChipVector {
    pub fn new(denom: u32, counts: Vec<u32>) -> Self {
        assert!(denom > 0, "denominator must be positive");
        Self { denom, counts }
    }

    pub fn zeros(denom: u32, len: usize) -> Self {
        Self::new(denom, vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Integer numerators of the chip levels.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn level(&self, j: usize) -> Ratio<i64> {
        Ratio::new(i64::from(self.counts[j]), i64::from(self.denom))
    }

    pub fn levels(&self) -> Vec<Ratio<i64>> {
        (0..self.len()).map(|j| self.level(j)).collect()
    }

    /// Sum of all chip levels.
    pub fn mass(&self) -> Ratio<i64> {
        let total: u64 = self.counts.iter().map(|&c| u64::from(c)).sum();
        Ratio::new(total as i64, i64::from(self.denom))
    }

    pub fn rotated(&self, shift: usize) -> Self {
        Self::new(self.denom, rotate_right(&self.counts, shift))
    }

    fn accumulate(&mut self, chips: &[u8]) {
        for (c, &b) in self.counts.iter_mut().zip(chips) {
            *c += u32::from(b);
        }
    }
}

impl fmt::Display for ChipVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, level) in self.levels().iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{level}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    CMeppm,
    DMeppmI,
    DMeppmII,
    OokOcdma,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::CMeppm => "cmeppm",
            Scheme::DMeppmI => "dmeppm1",
            Scheme::DMeppmII => "dmeppm2",
            Scheme::OokOcdma => "ook",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmeppm" => Ok(Scheme::CMeppm),
            "dmeppm1" => Ok(Scheme::DMeppmI),
            "dmeppm2" => Ok(Scheme::DMeppmII),
            "ook" => Ok(Scheme::OokOcdma),
            other => Err(Error::param(format!(
                "unknown scheme {other:?}, expected cmeppm, dmeppm1, dmeppm2 or ook"
            ))),
        }
    }
}

/// MEPPM branch type: type-I picks distinct codewords, type-II allows repeats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeppmType {
    I,
    II,
}

impl MeppmType {
    pub fn scheme(self) -> Scheme {
        match self {
            MeppmType::I => Scheme::DMeppmI,
            MeppmType::II => Scheme::DMeppmII,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constellation {
    scheme: Scheme,
    symbols: Vec<ChipVector>,
    /// For D-MEPPM, the BIBD codeword indices summed by each symbol (with multiplicity).
    labels: Vec<Vec<usize>>,
}

impl Constellation {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn symbols(&self) -> &[ChipVector] {
        &self.symbols
    }

    pub fn symbol(&self, m: usize) -> &ChipVector {
        &self.symbols[m]
    }

    /// Constellation size `M`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn bits_per_symbol(&self) -> usize {
        bits_per_symbol(self.len())
    }

    /// Codeword indices composing each D-MEPPM symbol; empty for other schemes.
    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    /// One `SYM m: l0 l1 ...` line per symbol, levels as reduced fractions.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, s) in self.symbols.iter().enumerate() {
            out.push_str(&format!("SYM {m}: {s}\n"));
        }
        out
    }
}

/// `⌊log2 M⌋`, zero for `M < 2`.
pub fn bits_per_symbol(m: usize) -> usize {
    if m < 2 {
        0
    } else {
        (usize::BITS - 1 - m.leading_zeros()) as usize
    }
}

/// Coded-MEPPM symbol `m` for OOC codeword `d`: `(1/Q) Σ_ℓ d_ℓ · rot(c_ℓ, m)`.
pub fn cmeppm_symbol(m: usize, d: &[u8], bibd: &BibdCode) -> Result<ChipVector> {
    let q = bibd.len();
    if d.len() != q {
        return Err(Error::LengthMismatch {
            expected: q,
            found: d.len(),
        });
    }
    if m >= q {
        return Err(Error::param(format!(
            "symbol index {m} out of range 0..{q}"
        )));
    }
    let mut sym = ChipVector::zeros(q as u32, q);
    for (l, _) in d.iter().enumerate().filter(|(_, &b)| b != 0) {
        sym.accumulate(&rotate_right(bibd.codeword(l), m));
    }
    Ok(sym)
}

/// All `Q` cyclic-shift symbols of a coded-MEPPM user.
pub fn cmeppm_constellation(d: &[u8], bibd: &BibdCode) -> Result<Constellation> {
    let base = cmeppm_symbol(0, d, bibd)?;
    let symbols = (0..bibd.len()).map(|m| base.rotated(m)).collect();
    Ok(Constellation {
        scheme: Scheme::CMeppm,
        symbols,
        labels: Vec::new(),
    })
}

/// A divided-MEPPM user's share of the BIBD code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserAssignment {
    pub user: usize,
    /// Indices of the BIBD codewords owned by this user, ascending.
    pub codewords: Vec<usize>,
    /// Number of MEPPM branches `ℓ_n`.
    pub branches: usize,
}

impl UserAssignment {
    pub fn size(&self) -> usize {
        self.codewords.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub assignments: Vec<UserAssignment>,
    /// Codeword indices assigned to nobody.
    pub unused: Vec<usize>,
}

/// Splits the codeword indices into consecutive disjoint blocks of the requested sizes.
///
/// Each user's branch count defaults to its subset size.
pub fn partition_bibd(bibd: &BibdCode, sizes: &[usize]) -> Result<Partition> {
    let q = bibd.len();
    if let Some(pos) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::param(format!(
            "subset size for user {pos} must be positive"
        )));
    }
    let total: usize = sizes.iter().sum();
    if total > q {
        return Err(Error::SizeOverflow {
            requested: total,
            available: q,
        });
    }
    let mut next = 0;
    let assignments = sizes
        .iter()
        .enumerate()
        .map(|(user, &size)| {
            let codewords: Vec<usize> = (next..next + size).collect();
            next += size;
            UserAssignment {
                user,
                codewords,
                branches: size,
            }
        })
        .collect();
    Ok(Partition {
        assignments,
        unused: (total..q).collect(),
    })
}

/// Divided-MEPPM constellation: sums of `ℓ_n` codewords from the user's subset, without
/// repetition for type-I and with repetition for type-II, in lexicographic order.
pub fn dmeppm_constellation(
    assign: &UserAssignment,
    kind: MeppmType,
    bibd: &BibdCode,
) -> Result<Constellation> {
    let q = bibd.len();
    let size = assign.size();
    let branches = assign.branches;
    if let Some(&bad) = assign.codewords.iter().find(|&&c| c >= q) {
        return Err(Error::param(format!(
            "codeword index {bad} out of range 0..{q}"
        )));
    }
    match kind {
        MeppmType::I if branches == 0 || branches >= size => {
            return Err(Error::param(format!(
                "type-I MEPPM needs 1 <= branches < subset size, got {branches} of {size}"
            )))
        }
        MeppmType::II if branches == 0 || size == 0 => {
            return Err(Error::param(format!(
                "type-II MEPPM needs branches >= 1 and a non-empty subset, got {branches} of {size}"
            )))
        }
        _ => {}
    }
    let picks = match kind {
        MeppmType::I => combinations(size, branches),
        MeppmType::II => multisets(size, branches),
    };
    let mut symbols = Vec::with_capacity(picks.len());
    let mut labels = Vec::with_capacity(picks.len());
    for pick in picks {
        let mut sym = ChipVector::zeros(q as u32, q);
        let label: Vec<usize> = pick.iter().map(|&i| assign.codewords[i]).collect();
        for &c in &label {
            sym.accumulate(bibd.codeword(c));
        }
        symbols.push(sym);
        labels.push(label);
    }
    Ok(Constellation {
        scheme: kind.scheme(),
        symbols,
        labels,
    })
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Non-decreasing `k`-tuples over `0..n` in lexicographic order.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut idx = vec![0; k];
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != n - 1) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[i];
        }
    }
}

/// OOK chips: the codeword for a one, silence for a zero.
pub fn ook_ocdma_encode(bit: u8, d: &[u8]) -> Vec<u8> {
    if bit == 0 {
        vec![0; d.len()]
    } else {
        d.to_vec()
    }
}

/// The two-point OOK constellation `{0, d}` with unit chip levels.
pub fn ook_constellation(d: &[u8]) -> Constellation {
    let symbols = [0, 1]
        .iter()
        .map(|&bit| {
            ChipVector::new(
                1,
                ook_ocdma_encode(bit, d)
                    .into_iter()
                    .map(u32::from)
                    .collect(),
            )
        })
        .collect();
    Constellation {
        scheme: Scheme::OokOcdma,
        symbols,
        labels: Vec::new(),
    }
}

/// Natural binary labeling, most significant bit first, onto the first `2^⌊log2 M⌋` symbols.
pub fn bits_to_symbol(bits: &[u8], m: usize) -> Result<usize> {
    let width = bits_per_symbol(m);
    if bits.len() != width {
        return Err(Error::LengthMismatch {
            expected: width,
            found: bits.len(),
        });
    }
    bits.iter().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok(acc << 1 | usize::from(b)),
        other => Err(Error::param(format!("bit value {other} is not 0 or 1"))),
    })
}

/// Inverse of [`bits_to_symbol`] for the used symbols `0..2^⌊log2 M⌋`.
pub fn symbol_to_bits(symbol: usize, m: usize) -> Result<Vec<u8>> {
    let width = bits_per_symbol(m);
    if symbol >= 1 << width {
        return Err(Error::param(format!(
            "symbol {symbol} is not labeled in a constellation of size {m}"
        )));
    }
    Ok((0..width)
        .rev()
        .map(|i| ((symbol >> i) & 1) as u8)
        .collect())
}
