//! Limiting forms of the TLS correlators: weak coupling, short Ramsey time, strong coupling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{shifted_phase, PhaseCorrelators, RamseyProtocol, TlsEnsemble, TlsParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R1Approx {
    Weak,
    Short,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R2Approx {
    Weak,
    Short,
    StrongSingle,
}

/// Per-TLS phase variance 2(wV/W)²(W t_R + e^{−W t_R} − 1).
fn theta_var(t: &TlsParams, t_r: f64) -> f64 {
    let x = t.w() * t_r;
    // W t + e^{−W t} − 1 without cancellation for small W t
    let g = if x < 1e-3 { x * x / 2.0 * (1.0 - x / 3.0 + x * x / 12.0) } else { x + (-x).exp() - 1.0 };
    2.0 * (t.fluctuation_amplitude() * t.v() / t.w()).powi(2) * g
}

/// Lag-k phase covariance (2Vw/W)² e^{−kW t_cyc} sinh²(W t_R/2).
pub fn tls_phase_correlator(t: &TlsParams, protocol: &RamseyProtocol, k: usize) -> f64 {
    let w = t.w();
    let amp = 2.0 * t.v() * t.fluctuation_amplitude();
    // (2Vw/W)² sinh²(Wt/2) → (Vw t)² as W → 0
    let half = w * protocol.t_r() / 2.0;
    let s = if half < 1e-8 { protocol.t_r() / 2.0 } else { half.sinh() / w };
    (amp * s).powi(2) * (-(k as f64) * w * protocol.t_cyc()).exp()
}

/// Phase correlators of a Gaussian process with the same second moments as the ensemble.
pub fn tls_gaussian_correlators(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k_max: usize) -> Result<PhaseCorrelators> {
    let mut f = vec![0.0; k_max + 1];
    for t in ensemble.iter() {
        f[0] += theta_var(t, protocol.t_r());
        for (k, v) in f.iter_mut().enumerate().skip(1) {
            *v += tls_phase_correlator(t, protocol, k);
        }
    }
    PhaseCorrelators::new(f)
}

pub fn approx_r1(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, mode: R1Approx) -> f64 {
    let t_r = protocol.t_r();
    match mode {
        R1Approx::Weak => {
            let var: f64 = ensemble.iter().map(|t| theta_var(t, t_r)).sum();
            0.5 + 0.5 * (-protocol.t_r_over_t2() - var / 2.0).exp() * protocol.phi_r().cos()
        }
        R1Approx::Short => {
            let var: f64 = ensemble.iter().map(|t| (t.fluctuation_amplitude() * t.v() * t_r).powi(2)).sum();
            0.5 + 0.5 * (-protocol.t_r_over_t2() - var / 2.0).exp() * protocol.phi_r().cos()
        }
        R1Approx::Strong => {
            let phi = shifted_phase(ensemble, protocol);
            let prod: Complex64 = ensemble
                .iter()
                .map(|t| {
                    let vt = t.v() * t_r;
                    Complex64::new(vt.cos(), t.mean_tau() * vt.sin()) * (-t.w() * t_r / 2.0).exp()
                })
                .product();
            0.5 + 0.5 * protocol.coherence() * (Complex64::from_polar(1.0, phi) * prod).re
        }
    }
}

pub fn approx_r2(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k: usize, mode: R2Approx) -> Result<f64> {
    if k == 0 {
        return Err(invalid("lag must be >= 1"));
    }
    let t_r = protocol.t_r();
    let pre = 0.25 * protocol.coherence().powi(2);
    let phi = protocol.phi_r();
    match mode {
        R2Approx::Weak | R2Approx::Short => {
            let vars: Vec<f64> = ensemble
                .iter()
                .map(|t| match mode {
                    R2Approx::Weak => theta_var(t, t_r),
                    _ => (t.fluctuation_amplitude() * t.v() * t_r).powi(2),
                })
                .collect();
            let total: f64 = vars.iter().sum();
            let sum: f64 = ensemble
                .iter()
                .zip(&vars)
                .map(|(t, var)| {
                    let corr = match mode {
                        R2Approx::Weak => tls_phase_correlator(t, protocol, k),
                        _ => (t.v() * t_r).powi(2) * (-(k as f64) * t.w() * protocol.t_cyc()).exp(),
                    };
                    corr * (-(total - var)).exp() * (phi - t.v() * t.mean_tau() * t_r).sin().powi(2)
                })
                .sum();
            Ok(pre * sum)
        }
        R2Approx::StrongSingle => {
            if ensemble.len() != 1 {
                return Err(invalid(format!("strong_single needs exactly one TLS, got {}", ensemble.len())));
            }
            let t = ensemble.as_slice()[0];
            Ok(pre
                * phi.sin().powi(2)
                * (t.v() * t_r).sin().powi(2)
                * (-(k as f64) * t.w() * protocol.t_cyc()).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ramsey_probability;
    use crate::tls::{r1_tls, r2_tls_centered};

    #[test]
    fn weak_zero_coupling() {
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.0, 2.0).unwrap()]);
        let p = RamseyProtocol::default();
        assert!((approx_r1(&e, &p, R1Approx::Weak) - ramsey_probability(0.0, &p)).abs() < 1e-15);
        assert_eq!(approx_r2(&e, &p, 1, R2Approx::Weak).unwrap(), 0.0);
    }

    #[test]
    fn short_identical_tls() {
        let n = 6;
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.3, 0.01).unwrap(); n]);
        let p = RamseyProtocol::default();
        let expect = 0.5 + 0.5 * (-(n as f64) * 0.09 / 2.0).exp() * p.phi_r().cos();
        assert!((approx_r1(&e, &p, R1Approx::Short) - expect).abs() < 1e-15);
    }

    #[test]
    fn strong_single_hand_value() {
        let p = RamseyProtocol::new(1.0, 3.0, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(std::f64::consts::FRAC_PI_2, 0.001).unwrap()]);
        let v = approx_r2(&e, &p, 1, R2Approx::StrongSingle).unwrap();
        assert!((v - 0.25 * (-0.003f64).exp()).abs() < 1e-15);
        let two = TlsEnsemble::new(vec![TlsParams::symmetric(1.0, 0.1).unwrap(); 2]);
        assert!(approx_r2(&two, &p, 1, R2Approx::StrongSingle).is_err());
    }

    #[test]
    fn weak_r1_converges_to_exact() {
        let p = RamseyProtocol::default();
        let mut prev = f64::INFINITY;
        for v in [0.2, 0.1, 0.05] {
            let e = TlsEnsemble::new(vec![TlsParams::new(v, 0.7, 1.6).unwrap(), TlsParams::symmetric(v, 3.0).unwrap()]);
            let err = (approx_r1(&e, &p, R1Approx::Weak) - r1_tls(&e, &p)).abs();
            assert!(err < prev / 3.0, "v={v}: error {err} did not shrink");
            prev = err;
        }
    }

    // Pair subsets contribute at second order in the phase correlator; the first-order
    // limit therefore undershoots by about half the summed f_k (~13% at k = 1 here).
    #[test]
    fn short_matches_exact_on_ladder() {
        let p = RamseyProtocol::default();
        let e = TlsEnsemble::ladder(0.2, 10, 0.75, 0.0, 1.0).unwrap();
        for k in 1..=50 {
            let exact = r2_tls_centered(&e, &p, k).unwrap();
            let approx = approx_r2(&e, &p, k, R2Approx::Short).unwrap();
            assert!((approx / exact - 1.0).abs() < 0.15, "k={k}: {approx} vs {exact}");
        }
    }
}
