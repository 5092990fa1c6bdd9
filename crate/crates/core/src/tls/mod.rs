//! Closed-form outcome statistics for an ensemble of independent telegraph fluctuators.

mod approx;
mod transfer;

pub use approx::{approx_r1, approx_r2, tls_gaussian_correlators, tls_phase_correlator, R1Approx, R2Approx};
pub use transfer::{
    characteristic_multi_time, characteristic_one_time, characteristic_two_time, r1_via_characteristic,
    r2_via_characteristic, r3_via_characteristic, transfer_matrix,
    Sign, TransferMatrix,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{shifted_phase, RamseyProtocol, TlsEnsemble, TlsParams};

/// Default largest ensemble for the exact subset sum.
pub const SUBSET_CAP: usize = 20;

/// The complex rate γ = ½√(W² + 4iV(ΔW + iV)) on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGamma(pub Complex64);

pub fn gamma_param(tls: &TlsParams) -> ComplexGamma {
    gamma_for_coupling(tls, tls.v())
}

pub(crate) fn gamma_for_coupling(tls: &TlsParams, v: f64) -> ComplexGamma {
    let w = tls.w();
    let i = Complex64::i();
    let arg = Complex64::new(w * w, 0.0) + 4.0 * i * v * (Complex64::new(tls.delta_w(), 0.0) + i * v);
    ComplexGamma(0.5 * arg.sqrt())
}

/// e^{(s γ − W/2) t} for s = ±1, kept separate so cosh/sinh never overflow.
fn env_exp(g: Complex64, w: f64, t: f64) -> (Complex64, Complex64) {
    let p = ((g - w / 2.0) * t).exp();
    let m = ((-g - w / 2.0) * t).exp();
    (p, m)
}

/// (cosh γt, sinh(γt)/γ) each multiplied by e^{−Wt/2}.
pub(crate) fn damped_cosh_sinhc(g: Complex64, w: f64, t: f64) -> (Complex64, Complex64) {
    let z = g * t;
    if z.norm() < 1e-3 {
        // series for sinh(z)/z and cosh z
        let z2 = z * z;
        let sinhc = 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
        let cosh = 1.0 + z2 / 2.0 * (1.0 + z2 / 12.0 * (1.0 + z2 / 30.0));
        let env = (-w * t / 2.0).exp();
        (cosh * env, sinhc * t * env)
    } else {
        let (p, m) = env_exp(g, w, t);
        ((p + m) / 2.0, (p - m) / (2.0 * g))
    }
}

/// Ξ(t) = [(W/2 + iVΔW/W) sinh(γt)/γ + cosh(γt)] e^{−Wt/2}.
pub fn xi_factor(tls: &TlsParams, t: f64) -> Complex64 {
    xi_with_gamma(tls, gamma_param(tls).0, t)
}

pub(crate) fn xi_with_gamma(tls: &TlsParams, g: Complex64, t: f64) -> Complex64 {
    let w = tls.w();
    let (c, s) = damped_cosh_sinhc(g, w, t);
    let a = Complex64::new(w / 2.0, tls.v() * tls.mean_tau());
    a * s + c
}

/// ξ_k = i w (V/γ) sinh(γ t_R) e^{−k W t_cyc/2}, the lag-k cross factor.
///
/// No separate e^{−W t_R/2} envelope appears: between the two windows the TLS relaxes for
/// k t_cyc − t_R, and the two in-window envelopes combine with it into e^{−k W t_cyc/2}.
pub fn xi_k_factor(tls: &TlsParams, protocol: &RamseyProtocol, k: usize) -> Complex64 {
    assert!(k >= 1, "lag must be >= 1");
    xi_k_with_gamma(tls, gamma_param(tls).0, protocol, k)
}

pub(crate) fn xi_k_with_gamma(tls: &TlsParams, g: Complex64, protocol: &RamseyProtocol, k: usize) -> Complex64 {
    let w = tls.w();
    let t = protocol.t_r();
    let decay = k as f64 * w * protocol.t_cyc() / 2.0;
    let z = g * t;
    let sinhc_t = if z.norm() < 1e-3 {
        let z2 = z * z;
        (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0)) * t * (-decay).exp()
    } else {
        // sinh(γt) e^{−decay} / γ, with both exponentials damped
        let p = (z - decay).exp();
        let m = (-z - decay).exp();
        (p - m) / (2.0 * g)
    };
    Complex64::i() * tls.fluctuation_amplitude() * tls.v() * sinhc_t
}

/// r₁ = ½ + ½ e^{−t_R/T2} Re[e^{iφ̃} Π Ξ⁽ⁿ⁾(t_R)].
pub fn r1_tls(ensemble: &TlsEnsemble, protocol: &RamseyProtocol) -> f64 {
    let phi = shifted_phase(ensemble, protocol);
    let prod: Complex64 = ensemble.iter().map(|t| xi_factor(t, protocol.t_r())).product();
    0.5 + 0.5 * protocol.coherence() * (Complex64::from_polar(1.0, phi) * prod).re
}

/// Options for the exact subset sum behind r̃₂.
#[derive(Debug, Clone, Copy)]
pub struct SubsetOptions {
    pub cap: usize,
    /// Skip subtrees whose product magnitude is below this fraction of the largest one seen (0 = exact).
    pub prune: f64,
}

impl Default for SubsetOptions {
    fn default() -> Self {
        SubsetOptions { cap: SUBSET_CAP, prune: 0.0 }
    }
}

/// r̃₂(k) as the sum over non-empty TLS subsets of squared real parts.
pub fn r2_tls_centered(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k: usize) -> Result<f64> {
    r2_tls_centered_with(ensemble, protocol, k, SubsetOptions::default())
}

pub fn r2_tls_centered_with(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k: usize, opts: SubsetOptions) -> Result<f64> {
    if k == 0 {
        return Err(crate::error::invalid("lag must be >= 1"));
    }
    let n = ensemble.len();
    if n > opts.cap {
        return Err(Error::EnsembleTooLarge { n, cap: opts.cap });
    }
    let phi = shifted_phase(ensemble, protocol);
    let mut big = Vec::with_capacity(n);
    let mut small = Vec::with_capacity(n);
    for t in ensemble {
        let g = gamma_param(t).0;
        big.push(xi_with_gamma(t, g, protocol.t_r()));
        small.push(xi_k_with_gamma(t, g, protocol, k));
    }
    let mut acc = SubsetSum { big: &big, small: &small, prune: opts.prune, max_seen: 0.0, sum: 0.0 };
    acc.walk(0, Complex64::from_polar(1.0, phi), false);
    Ok(0.25 * protocol.coherence().powi(2) * acc.sum)
}

struct SubsetSum<'a> {
    big: &'a [Complex64],
    small: &'a [Complex64],
    prune: f64,
    max_seen: f64,
    sum: f64,
}

impl SubsetSum<'_> {
    fn walk(&mut self, i: usize, prod: Complex64, any_small: bool) {
        if i == self.big.len() {
            if any_small {
                self.sum += prod.re * prod.re;
            }
            return;
        }
        if self.prune > 0.0 && any_small {
            // |Ξ| <= 1, so the remaining factors cannot grow the product
            let mag = prod.norm();
            if mag > self.max_seen {
                self.max_seen = mag;
            } else if mag < self.prune * self.max_seen {
                return;
            }
        }
        self.walk(i + 1, prod * self.big[i], any_small);
        self.walk(i + 1, prod * self.small[i], true);
    }
}

/// r̃₂(k) for k = 1..=k_max.
pub fn r2_tls_series(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k_max: usize) -> Result<Vec<f64>> {
    (1..=k_max).map(|k| r2_tls_centered(ensemble, protocol, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gamma_examples() {
        let t = TlsParams::new(0.0, 0.3, 0.7).unwrap();
        assert!(c_close(gamma_param(&t).0, Complex64::new(0.5, 0.0), 1e-15));
        let t = TlsParams::symmetric(1.0, 1.0).unwrap();
        assert!(c_close(gamma_param(&t).0, Complex64::new(0.0, 3f64.sqrt() / 2.0), 1e-15));
        let t = TlsParams::symmetric(1.0, 1e-300).unwrap();
        assert!(c_close(gamma_param(&t).0, Complex64::i(), 1e-12));
    }

    #[test]
    fn xi_limits() {
        let t = TlsParams::new(0.0, 0.2, 0.9).unwrap();
        assert!(c_close(xi_factor(&t, 1.3), Complex64::new(1.0, 0.0), 1e-14));
        let frozen = TlsParams::symmetric(0.2, 1e-14).unwrap();
        assert!(c_close(xi_factor(&frozen, 1.0), Complex64::new(0.2f64.cos(), 0.0), 1e-12));
        assert!(c_close(xi_factor(&frozen, 0.0), Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn xi_even_in_gamma() {
        let t = TlsParams::new(0.7, 0.3, 1.1).unwrap();
        let p = RamseyProtocol::default();
        let g = gamma_param(&t).0;
        assert!(c_close(xi_with_gamma(&t, g, 1.0), xi_with_gamma(&t, -g, 1.0), 1e-14));
        assert!(c_close(xi_k_with_gamma(&t, g, &p, 3), xi_k_with_gamma(&t, -g, &p, 3), 1e-14));
    }

    #[test]
    fn strong_single_limit() {
        let p = RamseyProtocol::default();
        let w = 1e-3;
        let t = TlsParams::symmetric(0.75, w).unwrap();
        let e = TlsEnsemble::new(vec![t]);
        for k in [1, 5, 40] {
            let exact = r2_tls_centered(&e, &p, k).unwrap();
            let lim = 0.25 * p.phi_r().sin().powi(2) * 0.75f64.sin().powi(2) * (-(k as f64) * w * 3.0).exp();
            assert!((exact / lim - 1.0).abs() < 2e-3, "k={k}: {exact} vs {lim}");
        }
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.0, 1.0).unwrap(); 3]);
        assert_eq!(r2_tls_centered(&e, &RamseyProtocol::default(), 2).unwrap(), 0.0);
        let p = RamseyProtocol::default().with_phi_r(FRAC_PI_2);
        assert!((r1_tls(&e, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cap_enforced() {
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.1, 1.0).unwrap(); 21]);
        assert!(matches!(r2_tls_centered(&e, &RamseyProtocol::default(), 1), Err(Error::EnsembleTooLarge { .. })));
    }

    #[test]
    fn pruning_is_close_to_exact() {
        let e = TlsEnsemble::ladder(0.2, 10, 0.75, 0.0, 1.0).unwrap();
        let p = RamseyProtocol::default();
        let exact = r2_tls_centered(&e, &p, 3).unwrap();
        let pruned = r2_tls_centered_with(&e, &p, 3, SubsetOptions { cap: 20, prune: 1e-14 }).unwrap();
        assert!((exact - pruned).abs() < 1e-14 * exact.abs().max(1e-300) + 1e-25);
    }
}
