use proptest::prelude::*;

use ramsey_noise::acquisition::{rho_binomial, rho_static_gauss, rho_static_tls};
use ramsey_noise::estimate::{outcome_power_spectrum, BlockAccumulator};
use ramsey_noise::gaussian::phase_correlators;
use ramsey_noise::simulate::{Experiment, NoiseModel, SimulationConfig};
use ramsey_noise::theory::Theory;
use ramsey_noise::tls::{r1_tls, r1_via_characteristic, r2_tls_series, r2_via_characteristic, transfer_matrix};
use ramsey_noise::{GaussianNoiseSpec, RamseyProtocol, TlsEnsemble, TlsParams};

fn rate() -> impl Strategy<Value = f64> {
    (-4.0f64..0.5).prop_map(|e| 10f64.powf(e))
}

fn tls() -> impl Strategy<Value = TlsParams> {
    (0.01f64..2.0, rate(), rate()).prop_map(|(v, a, b)| TlsParams::new(v, a, b).unwrap())
}

fn ensemble(max: usize) -> impl Strategy<Value = TlsEnsemble> {
    prop::collection::vec(tls(), 1..=max).prop_map(TlsEnsemble::new)
}

fn protocol() -> impl Strategy<Value = RamseyProtocol> {
    (1.0f64..5.0, 0.0f64..std::f64::consts::TAU, 0.0f64..0.3)
        .prop_map(|(c, phi, g)| RamseyProtocol::new(1.0, c, phi, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_forms_match_characteristic_route(e in ensemble(6), p in protocol()) {
        let a = r1_tls(&e, &p);
        let b = r1_via_characteristic(&e, &p);
        prop_assert!((a - b).abs() <= 1e-10, "r1 {a} vs {b}");
        let series = r2_tls_series(&e, &p, 50).unwrap();
        for (i, closed) in series.iter().enumerate() {
            let k = i + 1;
            let other = r2_via_characteristic(&e, &p, k);
            prop_assert!((closed - other).abs() <= 1e-10, "k={k}: {closed} vs {other}");
        }
    }

    #[test]
    fn transfer_determinant_is_relaxation_factor(t in tls(), alpha in -3.0f64..3.0, s in 0.0f64..20.0) {
        let d = transfer_matrix(&t, alpha, s).det();
        let expect = (-t.w() * s).exp();
        prop_assert!((d.re - expect).abs() <= 1e-12 && d.im.abs() <= 1e-12, "{d} vs {expect}");
    }

    #[test]
    fn distributions_are_normalized(e in ensemble(5), p in protocol(), m in 1usize..200, f0 in 0.0f64..2.0) {
        let r1 = r1_tls(&e, &p);
        for d in [rho_static_tls(m, &e, &p).unwrap(), rho_static_gauss(m, f0, &p).unwrap(), rho_binomial(m, r1).unwrap()] {
            let s: f64 = d.probs().iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-10, "sum {s}");
            prop_assert!(d.probs().iter().all(|q| *q >= 0.0));
        }
    }

    #[test]
    fn variance_bounds_every_correlator(d in 0.001f64..10.0, tau in 0.1f64..200.0, dfl in 0.001f64..0.1, wmin in (-6.0f64..-1.0).prop_map(|e| 10f64.powf(e))) {
        let p = RamseyProtocol::default();
        for spec in [GaussianNoiseSpec::ExpCorrelated { d_corr: d, tau_corr: tau }, GaussianNoiseSpec::OneOverF { d_fl: dfl, omega_min: wmin }] {
            let f = phase_correlators(&spec, &p, 60).unwrap();
            for k in 1..=60 {
                prop_assert!(f.f0() >= f.get(k).abs(), "{spec:?} k={k}");
            }
        }
    }

    #[test]
    fn second_correlator_is_bounded_by_variance(e in ensemble(4), p in protocol(), k in 1usize..30) {
        let th = Theory::new(&NoiseModel::Tls { tls: e }, &p, k).unwrap();
        let r1 = th.r1();
        prop_assert!((0.0..=1.0).contains(&r1));
        prop_assert!(th.r2(k).unwrap().abs() <= r1 * (1.0 - r1) + 1e-12);
    }
}

fn tls_config(seed: u64) -> SimulationConfig {
    let e = TlsEnsemble::new(vec![TlsParams::new(0.4, 0.05, 0.02).unwrap(), TlsParams::symmetric(0.2, 0.3).unwrap()]);
    SimulationConfig::new(RamseyProtocol::default(), NoiseModel::Tls { tls: e }).cycles(4096).repetitions(3).seed(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reruns_are_bit_identical(seed in any::<u64>(), rep in 0u64..3) {
        let a = Experiment::new(tls_config(seed)).unwrap().repetition(rep);
        let b = Experiment::new(tls_config(seed)).unwrap().repetition(rep);
        prop_assert_eq!(a.bits(), b.bits());
    }

    #[test]
    fn periodogram_obeys_parseval_and_mirror_symmetry(seed in any::<u64>()) {
        let s = Experiment::new(tls_config(seed)).unwrap().repetition(0);
        let n = s.bits().len();
        let spec = outcome_power_spectrum(&[s.bits()]).unwrap();
        let ones: f64 = s.bits().iter().map(|b| *b as f64).sum();
        let total: f64 = spec.r.iter().sum();
        prop_assert!((total - n as f64 * ones).abs() <= 1e-9 * total);
        for m in 1..n {
            prop_assert!((spec.r[m] - spec.r[n - m]).abs() <= 1e-9 * spec.r[m].max(1.0));
        }
    }

    #[test]
    fn block_histogram_is_normalized_with_mean_r1(seed in any::<u64>(), m in 1usize..64) {
        let s = Experiment::new(tls_config(seed)).unwrap().repetition(1);
        let mut acc = BlockAccumulator::new(m).unwrap();
        acc.add(s.bits());
        let d = acc.distribution().unwrap();
        let total: f64 = d.probs().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        let used = (s.bits().len() / m) * m;
        let ones: f64 = s.bits()[..used].iter().map(|b| *b as f64).sum();
        prop_assert!((d.mean() - ones / used as f64 * m as f64).abs() <= 1e-9 * m as f64);
    }
}
