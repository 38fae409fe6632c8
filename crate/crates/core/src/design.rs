//! Cyclic difference sets and the BIBD codes they generate.
//!
//! A `(Q, K, λ)` difference set `D ⊂ Z_Q` has every nonzero residue occurring exactly `λ` times
//! as a difference of two distinct elements. Its indicator vector and all `Q` cyclic rotations
//! form a BIBD code: `Q` binary codewords of length `Q` and weight `K` whose pairwise dot products
//! all equal `λ`.
//!
//! Codeword `m` (0-based) is codeword 0 rotated right by `m` chips. Everything downstream (symbol
//! shifts in the modem, correlator indexing in the receiver) uses the same convention.

use std::fmt;

use num_rational::Ratio;

use crate::util::{bits_from_str, bits_to_string, rotate_right};
use crate::{Error, Result, VerificationReport};

/// A cyclic `(Q, K, λ)` difference set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DifferenceSet {
    modulus: usize,
    elements: Vec<usize>,
    lambda: usize,
}

impl DifferenceSet {
    /// Validates `elements` as a difference set modulo `modulus` and derives `λ`.
    pub fn new(modulus: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::param(format!(
                "modulus must be at least 2, got {modulus}"
            )));
        }
        let mut elements: Vec<usize> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if elements.is_empty() {
            return Err(Error::param("difference set must be non-empty"));
        }
        if let Some(&e) = elements.iter().find(|&&e| e >= modulus) {
            return Err(Error::param(format!(
                "element {e} is not a residue mod {modulus}"
            )));
        }
        let counts = difference_counts(modulus, &elements);
        let lambda = counts[1];
        if let Some((d, &c)) = counts
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &c)| c != lambda)
        {
            return Err(Error::param(format!(
                "not a difference set: residue {d} occurs {c} times, residue 1 occurs {lambda} times"
            )));
        }
        Ok(Self {
            modulus,
            elements,
            lambda,
        })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Sorted residues of the set.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn weight(&self) -> usize {
        self.elements.len()
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn params(&self) -> BibdParams {
        BibdParams {
            q: self.modulus,
            k: self.weight(),
            lambda: self.lambda,
        }
    }

    /// The translate `D + t`, again a difference set with the same parameters.
    pub fn translate(&self, t: usize) -> Self {
        let q = self.modulus;
        let mut elements: Vec<usize> = self.elements.iter().map(|&e| (e + t) % q).collect();
        elements.sort_unstable();
        Self {
            modulus: q,
            elements,
            lambda: self.lambda,
        }
    }

    /// Number of ordered pairs `(a, b)` of distinct elements with `a - b ≡ d`, indexed by `d`.
    pub fn difference_counts(&self) -> Vec<usize> {
        difference_counts(self.modulus, &self.elements)
    }
}

fn difference_counts(q: usize, elements: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; q];
    for &a in elements {
        for &b in elements {
            if a != b {
                counts[(a + q - b) % q] += 1;
            }
        }
    }
    counts
}

/// Trial-division primality test; the moduli used here are small.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(base: usize, exp: usize, m: usize) -> usize {
    let m = m as u128;
    let (mut b, mut e, mut acc) = (base as u128 % m, exp, 1u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as usize
}

/// Nonzero quadratic residues mod a prime `q ≡ 3 (mod 4)`: a `(q, (q-1)/2, (q-3)/4)` set.
pub fn qr_difference_set(q: usize) -> Result<DifferenceSet> {
    if !is_prime(q) {
        return Err(Error::param(format!("{q} is not prime")));
    }
    if q % 4 != 3 {
        return Err(Error::param(format!("{q} is not congruent to 3 mod 4")));
    }
    let set = residues_of_power(q, 2);
    debug_assert_eq!(set.len(), (q - 1) / 2);
    DifferenceSet::new(q, set)
}

/// Nonzero fourth-power residues mod a prime `q = 4t² + 1` with `t` odd: a
/// `(q, (q-1)/4, (q-5)/16)` set.
pub fn quartic_difference_set(q: usize) -> Result<DifferenceSet> {
    if !is_prime(q) {
        return Err(Error::param(format!("{q} is not prime")));
    }
    let t = quartic_t(q).ok_or_else(|| Error::param(format!("{q} is not of the form 4t^2 + 1")))?;
    if t % 2 == 0 {
        return Err(Error::param(format!(
            "{q} = 4*{t}^2 + 1 but t = {t} is even"
        )));
    }
    let set = residues_of_power(q, 4);
    debug_assert_eq!(set.len(), (q - 1) / 4);
    DifferenceSet::new(q, set)
}

fn quartic_t(q: usize) -> Option<usize> {
    if q < 5 || !(q - 1).is_multiple_of(4) {
        return None;
    }
    let t2 = (q - 1) / 4;
    let t = (t2 as f64).sqrt().round() as usize;
    (t * t == t2).then_some(t)
}

fn residues_of_power(q: usize, k: usize) -> Vec<usize> {
    let mut set: Vec<usize> = (1..q).map(|x| pow_mod(x, k, q)).collect();
    set.sort_unstable();
    set.dedup();
    set
}

/// Which residue construction generates a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    QuadraticResidue,
    QuarticResidue,
}

impl Construction {
    pub fn difference_set(self, q: usize) -> Result<DifferenceSet> {
        match self {
            Construction::QuadraticResidue => qr_difference_set(q),
            Construction::QuarticResidue => quartic_difference_set(q),
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qr" => Ok(Construction::QuadraticResidue),
            "quartic" => Ok(Construction::QuarticResidue),
            other => Err(Error::param(format!(
                "unknown construction {other:?}, expected qr or quartic"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BibdParams {
    /// Code length and number of codewords.
    pub q: usize,
    /// Hamming weight of every codeword.
    pub k: usize,
    /// Dot product of any two distinct codewords.
    pub lambda: usize,
}

impl fmt::Display for BibdParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.q, self.k, self.lambda)
    }
}

/// A cyclic BIBD code: `Q` binary codewords of length `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibdCode {
    params: BibdParams,
    codewords: Vec<Vec<u8>>,
    generator: Option<DifferenceSet>,
}

impl BibdCode {
    /// Expands a difference set into its `Q` codewords. Codeword 0 is the indicator vector of the
    /// set, codeword `m` is codeword 0 rotated right by `m`.
    pub fn from_difference_set(ds: &DifferenceSet) -> Self {
        let q = ds.modulus();
        let mut first = vec![0u8; q];
        for &e in ds.elements() {
            first[e] = 1;
        }
        let codewords = (0..q).map(|m| rotate_right(&first, m)).collect();
        Self {
            params: ds.params(),
            codewords,
            generator: Some(ds.clone()),
        }
    }

    /// Wraps raw codewords without checking the design property; see [`BibdCode::verify`].
    pub fn from_codewords(params: BibdParams, codewords: Vec<Vec<u8>>) -> Result<Self> {
        if codewords.len() != params.q {
            return Err(Error::LengthMismatch {
                expected: params.q,
                found: codewords.len(),
            });
        }
        if let Some(c) = codewords.iter().find(|c| c.len() != params.q) {
            return Err(Error::LengthMismatch {
                expected: params.q,
                found: c.len(),
            });
        }
        Ok(Self {
            params,
            codewords,
            generator: None,
        })
    }

    pub fn params(&self) -> BibdParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.params.q
    }

    pub fn is_empty(&self) -> bool {
        self.params.q == 0
    }

    pub fn codewords(&self) -> &[Vec<u8>] {
        &self.codewords
    }

    pub fn codeword(&self, m: usize) -> &[u8] {
        &self.codewords[m]
    }

    /// Chip positions where codeword `m` is one.
    pub fn support(&self, m: usize) -> Vec<usize> {
        self.codewords[m]
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b != 0).then_some(i))
            .collect()
    }

    /// The difference set this code was expanded from, if it was built from one.
    pub fn generator(&self) -> Option<&DifferenceSet> {
        self.generator.as_ref()
    }

    /// Optical peak-to-average power ratio `Q/K`.
    pub fn papr(&self) -> Ratio<u64> {
        Ratio::new(self.params.q as u64, self.params.k as u64)
    }

    /// Checks the fixed cross-correlation property: every codeword has weight `K` and every pair
    /// of distinct codewords has dot product `λ`.
    pub fn verify(&self) -> VerificationReport<BibdViolation> {
        let BibdParams { q, k, lambda } = self.params;
        let mut report = VerificationReport::default();
        if self.codewords.len() != q {
            report.violations.push(BibdViolation::CodewordCount {
                expected: q,
                found: self.codewords.len(),
            });
        }
        for (m, c) in self.codewords.iter().enumerate() {
            if c.len() != q {
                report.violations.push(BibdViolation::Length {
                    codeword: m,
                    length: c.len(),
                });
            }
            let weight = c.iter().filter(|&&b| b != 0).count();
            if weight != k {
                report.violations.push(BibdViolation::Weight {
                    codeword: m,
                    weight,
                });
            }
        }
        for a in 0..self.codewords.len() {
            for b in a + 1..self.codewords.len() {
                let dot = self.codewords[a]
                    .iter()
                    .zip(&self.codewords[b])
                    .filter(|(&x, &y)| x != 0 && y != 0)
                    .count();
                if dot != lambda {
                    report.violations.push(BibdViolation::CrossCorrelation {
                        first: a,
                        second: b,
                        value: dot,
                    });
                }
            }
        }
        report
    }

    /// Serializes as `BIBD Q K LAMBDA` followed by one line of `Q` bits per codeword.
    pub fn to_text(&self) -> String {
        let BibdParams { q, k, lambda } = self.params;
        let mut out = format!("BIBD {q} {k} {lambda}\n");
        for c in &self.codewords {
            out.push_str(&bits_to_string(c));
            out.push('\n');
        }
        out
    }

    /// Parses the text format. The design property is not checked; call [`BibdCode::verify`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "BIBD" {
            return Err(Error::parse(1, "expected header `BIBD Q K LAMBDA`"));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("invalid number {s:?}")))
        };
        let params = BibdParams {
            q: num(fields[1])?,
            k: num(fields[2])?,
            lambda: num(fields[3])?,
        };
        let mut codewords = Vec::with_capacity(params.q);
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let bits = bits_from_str(line, i + 1)?;
            if bits.len() != params.q {
                return Err(Error::parse(
                    i + 1,
                    format!("codeword has {} chips, expected {}", bits.len(), params.q),
                ));
            }
            codewords.push(bits);
        }
        if codewords.len() != params.q {
            return Err(Error::parse(
                codewords.len() + 1,
                format!("found {} codewords, expected {}", codewords.len(), params.q),
            ));
        }
        let mut code = Self::from_codewords(params, codewords)?;
        // Recover the generator when the code is a proper cyclic expansion.
        if let Ok(ds) = DifferenceSet::new(params.q, code.support(0)) {
            if BibdCode::from_difference_set(&ds).codewords == code.codewords {
                code.generator = Some(ds);
            }
        }
        Ok(code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BibdViolation {
    CodewordCount {
        expected: usize,
        found: usize,
    },
    Length {
        codeword: usize,
        length: usize,
    },
    Weight {
        codeword: usize,
        weight: usize,
    },
    CrossCorrelation {
        first: usize,
        second: usize,
        value: usize,
    },
}

impl fmt::Display for BibdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BibdViolation::CodewordCount { expected, found } => {
                write!(f, "code has {found} codewords, expected {expected}")
            }
            BibdViolation::Length { codeword, length } => {
                write!(f, "codeword {codeword} has length {length}")
            }
            BibdViolation::Weight { codeword, weight } => {
                write!(f, "codeword {codeword} has weight {weight}")
            }
            BibdViolation::CrossCorrelation {
                first,
                second,
                value,
            } => write!(f, "codewords {first} and {second} have dot product {value}"),
        }
    }
}
