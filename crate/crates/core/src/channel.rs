//! Photon-counting downlink: user superposition, power-to-count conversion and shot noise.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::modem::ChipVector;
use crate::{Error, Result};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Optical link settings shared by every scheme; see [`Link::params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub peak_power: f64,
    pub background_power: f64,
    pub efficiency: f64,
    pub wavelength: f64,
    pub bit_rate: f64,
}

impl Link {
    /// Channel parameters for `chips` slots per symbol and a size-`symbols` constellation.
    pub fn params(&self, chips: usize, symbols: usize) -> ChannelParams {
        ChannelParams {
            peak_power: self.peak_power,
            background_power: self.background_power,
            efficiency: self.efficiency,
            wavelength: self.wavelength,
            bit_rate: self.bit_rate,
            chips,
            symbols,
        }
    }
}

/// Link budget for one symbol epoch of `chips` slots carrying one of `symbols` symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Peak received power `P0`, watts.
    pub peak_power: f64,
    /// Background light power `Pb`, watts.
    pub background_power: f64,
    /// Detector quantum efficiency `η`.
    pub efficiency: f64,
    /// Optical wavelength, meters.
    pub wavelength: f64,
    /// Bits per second.
    pub bit_rate: f64,
    /// Chips per symbol `Q`.
    pub chips: usize,
    /// Constellation size `M`.
    pub symbols: usize,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.peak_power) || !finite_nonneg(self.background_power) {
            return Err(Error::param("powers must be finite and non-negative"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::param(format!(
                "detector efficiency {} outside (0, 1]",
                self.efficiency
            )));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::param("wavelength must be positive"));
        }
        if !(self.bit_rate.is_finite() && self.bit_rate > 0.0) {
            return Err(Error::param("bit rate must be positive"));
        }
        if self.chips == 0 || self.symbols < 2 {
            return Err(Error::param(format!(
                "need at least one chip and two symbols, got Q={} M={}",
                self.chips, self.symbols
            )));
        }
        Ok(())
    }

    pub fn photon_energy(&self) -> f64 {
        PLANCK * SPEED_OF_LIGHT / self.wavelength
    }

    /// Information per symbol in bits, `log2 M` (not floored, as in the link-budget formula).
    pub fn symbol_bits(&self) -> f64 {
        (self.symbols as f64).log2()
    }

    /// `T_c = log2 M · T_b / Q`.
    pub fn chip_time(&self) -> f64 {
        self.symbol_bits() / self.bit_rate / self.chips as f64
    }

    /// Photons per chip at peak power, `Λ0 = η (P0/hν) T_c`.
    pub fn lambda0(&self) -> f64 {
        self.efficiency * self.peak_power / self.photon_energy() * self.chip_time()
    }

    /// Background photons per chip, `μ_b = η (Pb/hν) T_c`.
    pub fn mu_b(&self) -> f64 {
        self.efficiency * self.background_power / self.photon_energy() * self.chip_time()
    }
}

/// Photon counts of one symbol epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedFrame {
    pub counts: Vec<u32>,
}

/// Exact sum of chip vectors sharing a denominator and length.
pub fn aggregate(symbols: &[&ChipVector], chips: usize) -> Result<ChipVector> {
    let denom = symbols.first().map_or(1, |s| s.denom());
    let mut counts = vec![0u32; chips];
    for s in symbols {
        if s.len() != chips {
            return Err(Error::LengthMismatch {
                expected: chips,
                found: s.len(),
            });
        }
        if s.denom() != denom {
            return Err(Error::param(
                "chip vectors use different level denominators",
            ));
        }
        for (c, &v) in counts.iter_mut().zip(s.counts()) {
            *c += v;
        }
    }
    Ok(ChipVector::new(denom, counts))
}

/// Per-chip mean counts `Λ0 Σ_n u_n + μ_b`.
pub fn superpose(symbols: &[&ChipVector], params: &ChannelParams) -> Result<Vec<f64>> {
    let total = aggregate(symbols, params.chips)?;
    Ok(mean_counts(&total, params.lambda0(), params.mu_b()))
}

/// `lambda0 · levels + mu_b`, chip by chip.
pub fn mean_counts(levels: &ChipVector, lambda0: f64, mu_b: f64) -> Vec<f64> {
    let scale = lambda0 / f64::from(levels.denom());
    levels
        .counts()
        .iter()
        .map(|&c| scale * f64::from(c) + mu_b)
        .collect()
}

fn check_mean(mean: &[f64]) -> Result<()> {
    match mean.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
        Some(j) => Err(Error::param(format!(
            "chip {j} has invalid mean count {}",
            mean[j]
        ))),
        None => Ok(()),
    }
}

/// Independent Poisson counts per chip.
pub fn sample<R: Rng + ?Sized>(mean: &[f64], rng: &mut R) -> Result<ReceivedFrame> {
    check_mean(mean)?;
    let counts = mean
        .iter()
        .map(|&m| {
            if m == 0.0 {
                0
            } else {
                Poisson::new(m).expect("validated mean").sample(rng) as u32
            }
        })
        .collect();
    Ok(ReceivedFrame { counts })
}

/// Gaussian approximation: `Normal(mean, mean)` per chip, real valued.
pub fn sample_gaussian<R: Rng + ?Sized>(mean: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    check_mean(mean)?;
    Ok(mean
        .iter()
        .map(|&m| {
            if m == 0.0 {
                0.0
            } else {
                Normal::new(m, m.sqrt())
                    .expect("validated mean")
                    .sample(rng)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig7(symbols: usize) -> ChannelParams {
        ChannelParams {
            peak_power: 0.1e-6,
            background_power: 0.1e-6,
            efficiency: 0.8,
            wavelength: 650e-9,
            bit_rate: 200e6,
            chips: 101,
            symbols,
        }
    }

    #[test]
    fn lambda0_fig7() {
        let p = fig7(101);
        p.validate().unwrap();
        // Independent arithmetic: η P0 λ / (h c) · log2(101) / (R Q).
        let expected =
            0.8 * 0.1e-6 * 650e-9 / (6.62607015e-34 * 299792458.0) * 101f64.log2() / 200e6 / 101.0;
        assert!((p.lambda0() - expected).abs() < 1e-9 * expected);
        assert!((p.lambda0() - 86.3).abs() < 0.05, "{}", p.lambda0());
        assert!((p.photon_energy() - 3.056e-19).abs() < 1e-21);
        assert_eq!(p.mu_b(), p.lambda0());
    }

    #[test]
    fn lambda0_scaling() {
        let mut p = fig7(101);
        let base = p.lambda0();
        p.peak_power *= 2.0;
        assert!((p.lambda0() - 2.0 * base).abs() < 1e-9 * base);
        p.peak_power = 0.0;
        assert_eq!(p.lambda0(), 0.0);
    }

    #[test]
    fn invalid_params() {
        let mut p = fig7(101);
        p.efficiency = 0.0;
        assert!(p.validate().is_err());
        let mut p = fig7(1);
        assert!(p.validate().is_err());
        p.symbols = 2;
        p.peak_power = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn superpose_examples() {
        let mut p = fig7(7);
        p.chips = 7;
        p.background_power = 0.0;
        let u = ChipVector::new(7, vec![1, 2, 1, 2, 0, 2, 1]);
        let l0 = p.lambda0();
        let one = superpose(&[&u], &p).unwrap();
        for (m, c) in one.iter().zip([1, 2, 1, 2, 0, 2, 1]) {
            assert!((m - l0 * c as f64 / 7.0).abs() < 1e-12 * l0);
        }
        let two = superpose(&[&u, &u], &p).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert!((2.0 * a - b).abs() < 1e-12 * l0);
        }
        p.background_power = 1e-7;
        let none = superpose(&[], &p).unwrap();
        assert!(none.iter().all(|&m| m == p.mu_b()));
        let short = ChipVector::new(7, vec![1; 3]);
        assert!(superpose(&[&short], &p).is_err());
    }

    #[test]
    fn poisson_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zeros = sample(&[0.0; 4], &mut rng).unwrap();
        assert_eq!(zeros.counts, vec![0; 4]);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| f64::from(sample(&[86.3], &mut rng).unwrap().counts[0]))
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 86.3).abs() < 0.01 * 86.3, "{mean}");
        assert!((var - 86.3).abs() < 0.05 * 86.3, "{var}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let mean = vec![3.0, 0.0, 40.0, 1000.0];
        let a = sample(&mean, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&mean, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_gaussian(&[0.0], &mut rng).unwrap(), vec![0.0]);
        assert!(sample_gaussian(&[-1.0], &mut rng).is_err());
        assert!(sample(&[f64::NAN], &mut rng).is_err());
        let n = 50_000;
        let mean = (0..n)
            .map(|_| sample_gaussian(&[50.0], &mut rng).unwrap()[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 50.0).abs() < 0.5);
    }
}
