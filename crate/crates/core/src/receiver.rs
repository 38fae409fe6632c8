//! Differential BIBD correlator, OOC shift-register correlator and decision rules.

use num_rational::Ratio;

use crate::channel::mean_counts;
use crate::design::BibdCode;
use crate::modem::{ChipVector, Constellation};
use crate::{Error, Result};

/// Correlator bank matched to every codeword of a BIBD code and to its complement.
///
/// With `R = Σ r`, the differential output is
/// `z_j = ⟨r, c_j⟩ − Γ ⟨r, c̄_j⟩ = (1 + Γ) ⟨r, c_j⟩ − Γ R`, `Γ = λ / (K − λ)`.
#[derive(Debug, Clone)]
pub struct BibdCorrelator {
    supports: Vec<Vec<usize>>,
    gamma: Ratio<i64>,
    q: usize,
}

impl BibdCorrelator {
    pub fn new(bibd: &BibdCode) -> Self {
        let p = bibd.params();
        Self {
            supports: (0..bibd.len()).map(|j| bibd.support(j)).collect(),
            gamma: Ratio::new(p.lambda as i64, (p.k - p.lambda) as i64),
            q: p.q,
        }
    }

    pub fn gamma(&self) -> Ratio<i64> {
        self.gamma
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n == self.q {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.q,
                found: n,
            })
        }
    }

    /// All `Q` outputs.
    pub fn correlate<T: Copy + Into<f64>>(&self, r: &[T]) -> Result<Vec<f64>> {
        self.correlate_at(r, 0..self.q)
    }

    /// Only the outputs for the listed codeword indices, in order.
    pub fn correlate_at<T, I>(&self, r: &[T], codewords: I) -> Result<Vec<f64>>
    where
        T: Copy + Into<f64>,
        I: IntoIterator<Item = usize>,
    {
        self.check_len(r.len())?;
        let r: Vec<f64> = r.iter().map(|&x| x.into()).collect();
        let total: f64 = r.iter().sum();
        let g = *self.gamma.numer() as f64 / *self.gamma.denom() as f64;
        Ok(codewords
            .into_iter()
            .map(|j| {
                let hit: f64 = self.supports[j].iter().map(|&i| r[i]).sum();
                (1.0 + g) * hit - g * total
            })
            .collect())
    }

    /// Exact outputs for a noiseless chip vector, in units of its level scale.
    pub fn correlate_exact(&self, u: &ChipVector) -> Result<Vec<Ratio<i64>>> {
        self.check_len(u.len())?;
        let levels = u.levels();
        let total: Ratio<i64> = levels.iter().sum();
        Ok(self
            .supports
            .iter()
            .map(|s| {
                let hit: Ratio<i64> = s.iter().map(|&i| levels[i]).sum();
                hit - self.gamma * (total - hit)
            })
            .collect())
    }
}

/// One-shot `z = bibd_correlate(r)`; build a [`BibdCorrelator`] for repeated use.
pub fn bibd_correlate<T: Copy + Into<f64>>(r: &[T], bibd: &BibdCode) -> Result<Vec<f64>> {
    BibdCorrelator::new(bibd).correlate(r)
}

/// Shift-register OOC correlator: `y_i = Σ_ℓ d_ℓ z_{(ℓ+i) mod L}`, so `y` peaks at the
/// transmitted shift.
pub fn ooc_correlate(z: &[f64], d: &[u8]) -> Result<Vec<f64>> {
    let support: Vec<usize> = (0..d.len()).filter(|&l| d[l] != 0).collect();
    ooc_correlate_support(z, &support, d.len())
}

pub(crate) fn ooc_correlate_support(z: &[f64], support: &[usize], l: usize) -> Result<Vec<f64>> {
    if z.len() != l {
        return Err(Error::LengthMismatch {
            expected: l,
            found: z.len(),
        });
    }
    Ok((0..l)
        .map(|i| support.iter().map(|&s| z[(s + i) % l]).sum())
        .collect())
}

/// Index of the largest value; the first one wins ties.
pub fn cmeppm_decide(y: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in y.iter().enumerate().skip(1) {
        if v > y[best] {
            best = i;
        }
    }
    best
}

/// Nearest table row in Euclidean distance; the first one wins ties.
pub fn dmeppm_decide(z: &[f64], table: &[Vec<f64>]) -> Result<usize> {
    let mut best = None;
    for (m, row) in table.iter().enumerate() {
        if row.len() != z.len() {
            return Err(Error::LengthMismatch {
                expected: z.len(),
                found: row.len(),
            });
        }
        let dist: f64 = row.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        match best {
            Some((_, d)) if dist >= d => {}
            _ => best = Some((m, dist)),
        }
    }
    best.map(|(m, _)| m)
        .ok_or_else(|| Error::param("empty decision table"))
}

/// Noiseless correlator means for each symbol of a single user with background `mu_b`,
/// restricted to the listed correlator outputs.
pub fn mean_table(
    constellation: &Constellation,
    correlator: &BibdCorrelator,
    lambda0: f64,
    mu_b: f64,
    outputs: &[usize],
) -> Result<Vec<Vec<f64>>> {
    constellation
        .symbols()
        .iter()
        .map(|s| correlator.correlate_at(&mean_counts(s, lambda0, mu_b), outputs.iter().copied()))
        .collect()
}

/// On-off keying: 1 iff the photon total over the codeword's marks reaches `threshold`.
pub fn ook_decide<T: Copy + Into<f64>>(r: &[T], d: &[u8], threshold: f64) -> Result<u8> {
    if r.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            found: r.len(),
        });
    }
    let hit: f64 = r
        .iter()
        .zip(d)
        .filter(|(_, &b)| b != 0)
        .map(|(&x, _)| x.into())
        .sum();
    Ok(u8::from(hit >= threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{qr_difference_set, DifferenceSet};
    use crate::modem::cmeppm_symbol;
    use crate::util::rotate_right;

    const D: [u8; 7] = [1, 0, 1, 0, 0, 1, 0];

    fn fano() -> BibdCode {
        BibdCode::from_difference_set(&DifferenceSet::new(7, [0, 1, 3]).unwrap())
    }

    #[test]
    fn gamma_and_constant_input() {
        let c = BibdCorrelator::new(&fano());
        assert_eq!(c.gamma(), Ratio::new(1, 2));
        let z = c.correlate(&[2.0f64; 7]).unwrap();
        assert!(z.iter().all(|&v| (v - 2.0).abs() < 1e-12));
        assert!(c.correlate(&[0u32; 7]).unwrap().iter().all(|&v| v == 0.0));
        assert!(c.correlate(&[0u32; 6]).is_err());
    }

    #[test]
    fn correlator_matches_definition() {
        let bibd = fano();
        let r = [3u32, 0, 7, 1, 4, 4, 2];
        let z = bibd_correlate(&r, &bibd).unwrap();
        for (j, zj) in z.iter().enumerate() {
            let c = bibd.codeword(j);
            let on: f64 = (0..7).filter(|&i| c[i] == 1).map(|i| r[i] as f64).sum();
            let off: f64 = (0..7).filter(|&i| c[i] == 0).map(|i| r[i] as f64).sum();
            assert!((zj - (on - 0.5 * off)).abs() < 1e-12);
        }
    }

    #[test]
    fn fig4_noiseless_correlation() {
        let bibd = fano();
        let c = BibdCorrelator::new(&bibd);
        for m in 0..7 {
            let u = cmeppm_symbol(m, &D, &bibd).unwrap();
            let z = c.correlate_exact(&u).unwrap();
            let expect: Vec<Ratio<i64>> = rotate_right(&D, m)
                .iter()
                .map(|&b| Ratio::new(3 * i64::from(b), 7))
                .collect();
            assert_eq!(z, expect, "m={m}");

            let zf: Vec<f64> = z
                .iter()
                .map(|v| *v.numer() as f64 / *v.denom() as f64)
                .collect();
            let y = ooc_correlate(&zf, &D).unwrap();
            assert!((y[m] - 9.0 / 7.0).abs() < 1e-12);
            for (i, &v) in y.iter().enumerate() {
                if i != m {
                    // (1010010) has an out-of-phase autocorrelation of 2.
                    assert!(v <= 6.0 / 7.0 + 1e-12);
                }
            }
            assert_eq!(cmeppm_decide(&y), m);
        }
    }

    #[test]
    fn qr67_noiseless_is_scaled_codeword() {
        let bibd = BibdCode::from_difference_set(&qr_difference_set(67).unwrap());
        let c = BibdCorrelator::new(&bibd);
        let mut d = vec![0u8; 67];
        for s in [0, 1, 3, 7, 12, 20, 30, 44, 45, 50, 56, 59, 66] {
            d[s] = 1;
        }
        for m in [0, 5, 66] {
            let z = c
                .correlate_exact(&cmeppm_symbol(m, &d, &bibd).unwrap())
                .unwrap();
            let rd = rotate_right(&d, m);
            for j in 0..67 {
                assert_eq!(z[j], Ratio::new(33 * i64::from(rd[j]), 67));
            }
        }
    }

    #[test]
    fn decisions_break_ties_low() {
        assert_eq!(cmeppm_decide(&[0.0, 1.0, 3.0, 0.0, 0.0, 3.0]), 2);
        assert_eq!(cmeppm_decide(&[1.0; 5]), 0);
        let table = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]];
        assert_eq!(dmeppm_decide(&[2.0, 0.0], &table).unwrap(), 1);
        assert_eq!(dmeppm_decide(&[1.0, 1.0], &table).unwrap(), 0);
        assert_eq!(dmeppm_decide(&[1.0, 2.0], &table[1..]).unwrap(), 1);
        assert!(dmeppm_decide(&[1.0], &table).is_err());
        assert!(dmeppm_decide(&[1.0], &[]).is_err());
    }

    #[test]
    fn ook_examples() {
        let mu = 10.0;
        let r: Vec<f64> = D.iter().map(|&b| mu * f64::from(b)).collect();
        assert_eq!(ook_decide(&r, &D, 3.0 * mu / 2.0).unwrap(), 1);
        assert_eq!(ook_decide(&[0u32; 7], &D, 3.0 * mu / 2.0).unwrap(), 0);
        // An interferer shifted by one overlaps the marks in at most α = 1 chip.
        let other = rotate_right(&D, 1);
        let r: Vec<f64> = other.iter().map(|&b| mu * f64::from(b)).collect();
        assert_eq!(ook_decide(&r, &D, 3.0 * mu / 2.0).unwrap(), 0);
        assert!(ook_decide(&[0u32; 3], &D, 1.0).is_err());
    }
}
