use meppm::channel::{aggregate, mean_counts, superpose, Link};
use meppm::design::{qr_difference_set, quartic_difference_set, BibdCode};
use meppm::modem::{
    bits_to_symbol, cmeppm_constellation, cmeppm_symbol, dmeppm_constellation, partition_bibd,
    symbol_to_bits, ChipVector, MeppmType,
};
use meppm::ooc::{cyclic_correlation, OocCode, OocParams};
use meppm::receiver::{cmeppm_decide, ooc_correlate, BibdCorrelator};
use meppm::rotate_right;
use num_rational::Ratio;
use proptest::prelude::*;

const QR_PRIMES: [usize; 8] = [7, 11, 19, 23, 31, 43, 47, 59];

fn bibd(q: usize) -> BibdCode {
    BibdCode::from_difference_set(&qr_difference_set(q).unwrap())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A nonempty 0/1 vector of length `q` from a bit pattern.
fn word(q: usize, bits: u64) -> Vec<u8> {
    let mut d: Vec<u8> = (0..q).map(|i| ((bits >> (i % 64)) & 1) as u8).collect();
    if d.iter().all(|&b| b == 0) {
        d[0] = 1;
    }
    d
}

fn as_f64(v: &[Ratio<i64>]) -> Vec<f64> {
    v.iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .collect()
}

proptest! {
    #[test]
    fn bibd_rows_meet_in_lambda(idx in 0..QR_PRIMES.len(), i in 0usize..64, j in 0usize..64) {
        let code = bibd(QR_PRIMES[idx]);
        let p = code.params();
        let (i, j) = (i % p.q, j % p.q);
        let dot: usize = code.codeword(i).iter().zip(code.codeword(j)).map(|(&a, &b)| usize::from(a & b)).sum();
        prop_assert_eq!(dot, if i == j { p.k } else { p.lambda });
    }

    #[test]
    fn bibd_closed_under_rotation(idx in 0..QR_PRIMES.len(), l in 0usize..64, m in 0usize..64) {
        let code = bibd(QR_PRIMES[idx]);
        let q = code.len();
        let (l, m) = (l % q, m % q);
        prop_assert_eq!(rotate_right(code.codeword(l), m), code.codeword((l + m) % q).to_vec());
    }

    #[test]
    fn cmeppm_symbols_are_cyclic_shifts(idx in 0..QR_PRIMES.len(), bits in any::<u64>(), m in 0usize..64) {
        let code = bibd(QR_PRIMES[idx]);
        let q = code.len();
        let d = word(q, bits);
        let m = m % q;
        let base = cmeppm_symbol(0, &d, &code).unwrap();
        prop_assert_eq!(cmeppm_symbol(m, &d, &code).unwrap(), base.rotated(m));
        let w = d.iter().filter(|&&b| b == 1).count();
        prop_assert_eq!(base.mass(), Ratio::new((w * code.params().k) as i64, q as i64));
    }

    #[test]
    fn correlator_recovers_shifted_signature(idx in 0..QR_PRIMES.len(), bits in any::<u64>(), m in 0usize..64) {
        let code = bibd(QR_PRIMES[idx]);
        let p = code.params();
        let d = word(p.q, bits);
        let m = m % p.q;
        let z = BibdCorrelator::new(&code).correlate_exact(&cmeppm_symbol(m, &d, &code).unwrap()).unwrap();
        let scale = Ratio::new(p.k as i64, p.q as i64);
        let expect: Vec<Ratio<i64>> = rotate_right(&d, m).iter().map(|&b| scale * i64::from(b)).collect();
        prop_assert_eq!(z, expect);
    }

    #[test]
    fn ooc_correlator_peaks_at_true_shift(idx in 0..QR_PRIMES.len(), bits in any::<u64>(), m in 0usize..64) {
        let code = bibd(QR_PRIMES[idx]);
        let q = code.len();
        let d = word(q, bits);
        let w = d.iter().filter(|&&b| b == 1).count();
        let sidelobe = (1..q).map(|s| cyclic_correlation(&d, &d, s)).max().unwrap_or(0);
        prop_assume!(sidelobe < w);
        let m = m % q;
        let z = BibdCorrelator::new(&code).correlate_exact(&cmeppm_symbol(m, &d, &code).unwrap()).unwrap();
        let y = ooc_correlate(&as_f64(&z), &d).unwrap();
        prop_assert_eq!(cmeppm_decide(&y), m);
    }

    #[test]
    fn multiuser_correlation_decomposes(idx in 0..QR_PRIMES.len(), a in any::<u64>(), b in any::<u64>(), ma in 0usize..64, mb in 0usize..64) {
        let code = bibd(QR_PRIMES[idx]);
        let q = code.len();
        let ua = cmeppm_symbol(ma % q, &word(q, a), &code).unwrap();
        let ub = cmeppm_symbol(mb % q, &word(q, b), &code).unwrap();
        let corr = BibdCorrelator::new(&code);
        let total = corr.correlate_exact(&aggregate(&[&ua, &ub], q).unwrap()).unwrap();
        let za = corr.correlate_exact(&ua).unwrap();
        let zb = corr.correlate_exact(&ub).unwrap();
        let sum: Vec<Ratio<i64>> = za.iter().zip(&zb).map(|(x, y)| x + y).collect();
        prop_assert_eq!(total, sum);
    }

    #[test]
    fn superposition_is_linear(counts_a in prop::collection::vec(0u32..8, 7), counts_b in prop::collection::vec(0u32..8, 7), p0 in 1e-9f64..1e-5, pb in 0.0f64..1e-6) {
        let a = ChipVector::new(7, counts_a);
        let b = ChipVector::new(7, counts_b);
        let link = Link { peak_power: p0, background_power: pb, efficiency: 0.8, wavelength: 650e-9, bit_rate: 200e6 };
        let params = link.params(7, 7);
        let both = superpose(&[&a, &b], &params).unwrap();
        let ma = mean_counts(&a, params.lambda0(), 0.0);
        let mb = mean_counts(&b, params.lambda0(), params.mu_b());
        for j in 0..7 {
            prop_assert!((both[j] - ma[j] - mb[j]).abs() <= 1e-9 * both[j].max(1.0));
        }
    }

    #[test]
    fn partition_is_disjoint_and_covering(sizes in prop::collection::vec(1usize..12, 1..8)) {
        let code = bibd(67);
        let total: usize = sizes.iter().sum();
        match partition_bibd(&code, &sizes) {
            Ok(part) => {
                prop_assert!(total <= 67);
                let mut seen = [0u8; 67];
                for (a, &size) in part.assignments.iter().zip(&sizes) {
                    prop_assert_eq!(a.codewords.len(), size);
                    for &c in &a.codewords { seen[c] += 1; }
                }
                for &c in &part.unused { seen[c] += 1; }
                prop_assert!(seen.iter().all(|&s| s == 1));
            }
            Err(_) => prop_assert!(total > 67),
        }
    }

    #[test]
    fn dmeppm_sizes_are_binomial(q in 1usize..7, l in 1usize..5) {
        let code = bibd(19);
        let part = partition_bibd(&code, &[q]).unwrap();
        let mut assign = part.assignments[0].clone();
        assign.branches = l;
        let multi = dmeppm_constellation(&assign, MeppmType::II, &code).unwrap();
        prop_assert_eq!(multi.len(), binomial(q + l - 1, l));
        match dmeppm_constellation(&assign, MeppmType::I, &code) {
            Ok(c) => prop_assert_eq!(c.len(), binomial(q, l)),
            Err(_) => prop_assert!(l >= q),
        }
    }

    #[test]
    fn bits_round_trip(m in 2usize..5000, raw in any::<u64>()) {
        let bits = (usize::BITS - 1 - m.leading_zeros()) as usize;
        let symbol = (raw as usize) % (1 << bits);
        let word = symbol_to_bits(symbol, m).unwrap();
        prop_assert_eq!(word.len(), bits);
        prop_assert_eq!(bits_to_symbol(&word, m).unwrap(), symbol);
    }

    #[test]
    fn ooc_text_round_trip(l in 4usize..40, rows in prop::collection::vec(any::<u64>(), 0..5)) {
        let words: Vec<Vec<u8>> = rows.iter().map(|&r| word(l, r)).collect();
        let w = words.first().map_or(1, |c| c.iter().filter(|&&b| b == 1).count());
        let code = OocCode::new(OocParams::new(l, w.max(1), 1), words).unwrap();
        prop_assert_eq!(OocCode::from_text(&code.to_text()).unwrap(), code);
    }
}

#[test]
fn bibd_text_round_trip() {
    let mut codes: Vec<BibdCode> = QR_PRIMES.iter().map(|&q| bibd(q)).collect();
    codes.push(BibdCode::from_difference_set(
        &quartic_difference_set(37).unwrap(),
    ));
    for code in codes {
        let back = BibdCode::from_text(&code.to_text()).unwrap();
        assert_eq!(back.codewords(), code.codewords());
        assert_eq!(back.params(), code.params());
    }
}

#[test]
fn constellation_text_lists_every_symbol() {
    let code = bibd(7);
    let c = cmeppm_constellation(&[1, 0, 1, 0, 0, 1, 0], &code).unwrap();
    let text = c.to_text();
    assert_eq!(text.lines().count(), 7);
    assert!(text
        .lines()
        .enumerate()
        .all(|(m, line)| line.starts_with(&format!("SYM {m}: "))));
}
