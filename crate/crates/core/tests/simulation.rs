use ramsey_noise::estimate::{estimate_correlators, CorrelatorOptions};
use ramsey_noise::gaussian::{phase_correlators, r1_gauss, r2_gauss_centered, r3_gauss_centered};
use ramsey_noise::simulate::{run_experiment, NoiseModel, SimulationConfig};
use ramsey_noise::tls::{r1_tls, r2_tls_series, r3_via_characteristic};
use ramsey_noise::{GaussianNoiseSpec, RamseyProtocol, TlsEnsemble};

#[test]
fn tls_ladder_correlators_match_theory() {
    let p = RamseyProtocol::default();
    let e = TlsEnsemble::ladder(0.2, 10, 0.75, 0.0, 1.0).unwrap();
    let cfg = SimulationConfig::new(p, NoiseModel::Tls { tls: e.clone() }).seed(1);
    let t = std::time::Instant::now();
    let runs = run_experiment(&cfg).unwrap();
    eprintln!("simulated in {:?}", t.elapsed());
    let bits: Vec<&[u8]> = runs.iter().map(|s| s.bits()).collect();
    let lags: Vec<(usize, usize)> = (1..=20).map(|k| (k, k + 3)).collect();
    let est = estimate_correlators(&bits, &CorrelatorOptions { k_max: 60, triple_lags: lags, ..Default::default() }).unwrap();
    let r1 = r1_tls(&e, &p);
    eprintln!("r1 sim {} +- {} theory {}", est.r1.value, est.r1.stderr, r1);
    assert!((est.r1.value - r1).abs() < 3.0 * est.r1.stderr);
    let theory = r2_tls_series(&e, &p, 60).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=60 {
        let z = (est.r2[k].value - theory[k - 1]) / est.r2[k].stderr;
        worst = worst.max(z.abs());
    }
    for ((k, l), v) in &est.r3 {
        let z = (v.value - r3_via_characteristic(&e, &p, *k, *l).unwrap()) / v.stderr;
        worst = worst.max(z.abs());
    }
    eprintln!("worst |z| {worst}");
    assert!(worst < 3.0);
}

#[test]
fn gaussian_correlators_match_theory() {
    let p = RamseyProtocol::default();
    let spec = GaussianNoiseSpec::ExpCorrelated { d_corr: 6.51, tau_corr: 20.0 };
    let cfg = SimulationConfig::new(p, NoiseModel::Gaussian { spectrum: spec.clone(), k_corr: None }).seed(1);
    let runs = run_experiment(&cfg).unwrap();
    let bits: Vec<&[u8]> = runs.iter().map(|s| s.bits()).collect();
    let lags: Vec<(usize, usize)> = (1..=40).map(|k| (k, k + 3)).collect();
    let est = estimate_correlators(&bits, &CorrelatorOptions { k_max: 40, triple_lags: lags, ..Default::default() }).unwrap();
    let f = phase_correlators(&spec, &p, 50).unwrap();
    eprintln!("r1 sim {} theory {}", est.r1.value, r1_gauss(f.f0(), &p));
    let mut worst: f64 = 0.0;
    for k in 1..=40 {
        let z2 = (est.r2[k].value - r2_gauss_centered(&f, &p, k).unwrap()) / est.r2[k].stderr;
        let z3 = (est.r3[k - 1].1.value - r3_gauss_centered(&f, &p, k, k + 3).unwrap()) / est.r3[k - 1].1.stderr;
        worst = worst.max(z2.abs()).max(z3.abs());
    }
    eprintln!("worst |z| {worst}");
    assert!(worst < 3.0);
}

#[test]
fn halving_dt_changes_estimates_by_less_than_a_standard_error() {
    let p = RamseyProtocol::default();
    let e = TlsEnsemble::ladder(0.2, 10, 0.75, 0.0, 1.0).unwrap();
    let opts = CorrelatorOptions { k_max: 10, ..Default::default() };
    let run = |dt: f64| {
        let cfg = SimulationConfig::new(p, NoiseModel::Tls { tls: e.clone() }).dt(dt).seed(3);
        let runs = run_experiment(&cfg).unwrap();
        let bits: Vec<&[u8]> = runs.iter().map(|s| s.bits()).collect();
        estimate_correlators(&bits, &opts).unwrap()
    };
    let (a, b) = (run(0.1), run(0.05));
    let combined = |x: f64, y: f64| (x * x + y * y).sqrt();
    assert!((a.r1.value - b.r1.value).abs() < combined(a.r1.stderr, b.r1.stderr));
    for k in 1..=10 {
        let d = (a.r2[k].value - b.r2[k].value).abs();
        assert!(d < combined(a.r2[k].stderr, b.r2[k].stderr), "k {k}: {d}");
    }
}

#[test]
fn repetitions_are_independent() {
    use ramsey_noise::simulate::Experiment;
    let p = RamseyProtocol::default();
    let spec = GaussianNoiseSpec::ExpCorrelated { d_corr: 6.51, tau_corr: 20.0 };
    let r = 400;
    let exp = Experiment::new(
        SimulationConfig::new(p, NoiseModel::Gaussian { spectrum: spec, k_corr: None }).cycles(50).repetitions(r).seed(4),
    )
    .unwrap();
    let th: Vec<Vec<f64>> = (0..r as u64).map(|i| exp.phases(i)).collect();
    // cross-repetition correlation of θ_0 between neighbours
    let x: Vec<f64> = th.iter().map(|t| t[0]).collect();
    let m = x.iter().sum::<f64>() / r as f64;
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    let cov: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    assert!((cov / var).abs() <= 3.0 / (r as f64).sqrt());
    // stationarity: mean over repetitions near zero for every k
    let f0 = 0.16f64;
    for k in 0..50 {
        let mk = th.iter().map(|t| t[k]).sum::<f64>() / r as f64;
        assert!(mk.abs() < 3.0 * (f0 / r as f64).sqrt(), "k {k}: {mk}");
    }
}

#[test]
fn frozen_tls_phases_are_bounded_and_constant() {
    use ramsey_noise::simulate::Experiment;
    use ramsey_noise::TlsParams;
    let p = RamseyProtocol::default();
    let tls = TlsEnsemble::new(vec![TlsParams::symmetric(0.2, 1e-15).unwrap(); 4]);
    let exp = Experiment::new(SimulationConfig::new(p, NoiseModel::Tls { tls }).cycles(1000).repetitions(5)).unwrap();
    for r in 0..5 {
        let th = exp.phases(r);
        assert!(th.iter().all(|t| (t - th[0]).abs() < 1e-12));
        let units = th[0] / 0.2;
        assert!((units - units.round()).abs() < 1e-9 && units.abs() <= 4.0 + 1e-9);
    }
}
