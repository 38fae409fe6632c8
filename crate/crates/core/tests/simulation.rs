use std::sync::{Arc, OnceLock};

use meppm::channel::Link;
use meppm::design::{qr_difference_set, BibdCode};
use meppm::modem::{MeppmType, Scheme};
use meppm::ooc::{search_ooc, OocCode, OocParams};
use meppm::simulator::{derive_seed, run_ber, DmeppmSizing, NoiseModel, SimConfig};

fn link(p0: f64) -> Link {
    Link {
        peak_power: p0,
        background_power: 1e-7,
        efficiency: 0.8,
        wavelength: 650e-9,
        bit_rate: 200e6,
    }
}

fn bibd(q: usize) -> Arc<BibdCode> {
    Arc::new(BibdCode::from_difference_set(
        &qr_difference_set(q).unwrap(),
    ))
}

fn ooc67() -> Arc<OocCode> {
    static CODE: OnceLock<Arc<OocCode>> = OnceLock::new();
    CODE.get_or_init(|| Arc::new(search_ooc(OocParams::new(67, 13, 3), 1, 1, 50_000).unwrap()))
        .clone()
}

fn config(scheme: Scheme, p0: f64) -> SimConfig {
    SimConfig {
        scheme,
        bibd: Some(bibd(67)),
        ooc: Some(ooc67()),
        dmeppm: DmeppmSizing {
            kind: MeppmType::II,
            subset_size: Some(4),
            branches: Some(4),
        },
        users: 1,
        link: link(p0),
        noise: NoiseModel::Poisson,
        max_symbols: 20_000,
        target_errors: None,
        seed: 11,
    }
}

#[test]
fn searched_codeword_has_small_sidelobes() {
    let code = ooc67();
    let d = code.codeword(0);
    let worst = (1..67)
        .map(|s| meppm::ooc::cyclic_correlation(d, d, s))
        .max()
        .unwrap();
    assert!(worst <= 3, "sidelobe {worst}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut cfg = config(Scheme::DMeppmII, 2e-7);
    cfg.users = 3;
    cfg.target_errors = Some(2_000);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_ber(&cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert!(
        one.errors >= 2_000 && one.symbols < cfg.max_symbols,
        "{one:?}"
    );
}

#[test]
fn bright_single_user_link_is_error_free() {
    for scheme in [Scheme::CMeppm, Scheme::DMeppmII, Scheme::OokOcdma] {
        let mut cfg = config(scheme, 2e-4);
        if scheme == Scheme::OokOcdma {
            let word = vec![1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
            cfg.ooc = Some(Arc::new(
                OocCode::new(OocParams::new(14, 7, 4), vec![word]).unwrap(),
            ));
        }
        let r = run_ber(&cfg).unwrap();
        assert!(r.lambda0 >= 1e4, "{scheme}: lambda0 {}", r.lambda0);
        assert!(r.ser() < 1e-4, "{scheme}: ser {}", r.ser());
    }
}

#[test]
fn ber_falls_with_power() {
    let seeds = 20;
    let stats = |p0: f64| {
        let bers: Vec<f64> = (0..seeds)
            .map(|i| {
                let mut cfg = config(Scheme::DMeppmII, p0);
                cfg.max_symbols = 4_000;
                cfg.seed = derive_seed(3, i);
                run_ber(&cfg).unwrap().ber()
            })
            .collect();
        let n = seeds as f64;
        let mean = bers.iter().sum::<f64>() / n;
        let var = bers.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    };
    let points: Vec<(f64, f64)> = [1e-7, 2e-7, 4e-7, 8e-7].into_iter().map(stats).collect();
    for w in points.windows(2) {
        let ((hi, se_hi), (lo, se_lo)) = (w[0], w[1]);
        assert!(
            lo <= hi + 2.0 * (se_hi.powi(2) + se_lo.powi(2)).sqrt(),
            "{points:?}"
        );
    }
    assert!(points[0].0 > points[3].0, "{points:?}");
}

#[test]
fn gaussian_approximation_tracks_poisson() {
    for scheme in [Scheme::CMeppm, Scheme::DMeppmII] {
        let mut cfg = config(scheme, 2e-7);
        cfg.max_symbols = 50_000;
        let poisson = run_ber(&cfg).unwrap().ser();
        cfg.noise = NoiseModel::Gaussian;
        let gaussian = run_ber(&cfg).unwrap().ser();
        let sigma = (2.0 * poisson * (1.0 - poisson) / 50_000.0).sqrt();
        assert!(poisson > 0.01, "{scheme}: operating point too clean");
        assert!(
            (gaussian - poisson).abs() <= 0.1 * poisson + 3.0 * sigma,
            "{scheme}: gaussian {gaussian} poisson {poisson}"
        );
    }
}

#[test]
fn interference_hurts_divided_meppm() {
    let mut single = config(Scheme::DMeppmII, 5e-7);
    single.max_symbols = 30_000;
    let mut crowded = single.clone();
    crowded.users = 16;
    let a = run_ber(&single).unwrap().ser();
    let b = run_ber(&crowded).unwrap().ser();
    assert!(b > a, "N=1 {a}, N=16 {b}");
}
