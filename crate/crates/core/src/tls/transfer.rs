//! Characteristic functions of the telegraph phase via 2×2 transfer matrices.

use std::ops::Mul;

use num_complex::Complex64;

use super::{damped_cosh_sinhc, gamma_for_coupling};
use crate::error::{invalid, Result};
use crate::model::{shifted_phase, RamseyProtocol, TlsEnsemble, TlsParams};

/// Propagator of (⟨e^{iφ}⟩, ⟨τ_z e^{iφ}⟩) over an interval with constant coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[Complex64; 2]; 2]);

impl TransferMatrix {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        TransferMatrix([[o, z], [z, o]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix(out)
    }
}

/// exp(A t) for A = [[0, iα], [iα + ΔW, −W]], i.e. coupling `alpha` switched on for a time `t`.
pub fn transfer_matrix(tls: &TlsParams, alpha: f64, t: f64) -> TransferMatrix {
    assert!(t >= 0.0, "interval must be >= 0");
    let w = tls.w();
    let g = gamma_for_coupling(tls, alpha).0;
    let (c, s) = damped_cosh_sinhc(g, w, t);
    let i = Complex64::i();
    TransferMatrix([
        [c + w / 2.0 * s, i * alpha * s],
        [(i * alpha + tls.delta_w()) * s, c - w / 2.0 * s],
    ])
}

fn stationary(tls: &TlsParams) -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::new(tls.mean_tau(), 0.0)]
}

/// Π_n ⟨exp(i V⁽ⁿ⁾ ∫_0^{t} τ_z dt)⟩ over the stationary telegraph.
pub fn characteristic_one_time(ensemble: &TlsEnsemble, t: f64) -> Complex64 {
    ensemble.iter().map(|tls| transfer_matrix(tls, tls.v(), t).apply(stationary(tls))[0]).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Joint characteristic function ⟨e^{i(θ_0 ± θ_k)}⟩ of two windows k cycles apart.
pub fn characteristic_two_time(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k: usize, sign: Sign) -> Complex64 {
    assert!(k >= 1);
    let t_r = protocol.t_r();
    let gap = k as f64 * protocol.t_cyc() - t_r;
    ensemble
        .iter()
        .map(|tls| {
            let v = tls.v();
            let second = match sign {
                Sign::Plus => v,
                Sign::Minus => -v,
            };
            let m = transfer_matrix(tls, v, t_r) * transfer_matrix(tls, 0.0, gap) * transfer_matrix(tls, second, t_r);
            m.apply(stationary(tls))[0]
        })
        .product()
}

/// ⟨exp(i Σ_j s_j θ_{k_j})⟩ for windows (k_j, s_j) with strictly increasing cycle indices.
pub fn characteristic_multi_time(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, windows: &[(usize, i32)]) -> Complex64 {
    assert!(windows.windows(2).all(|w| w[0].0 < w[1].0), "window indices must increase");
    let t_r = protocol.t_r();
    ensemble
        .iter()
        .map(|tls| {
            let mut m = TransferMatrix::identity();
            for (j, &(k, s)) in windows.iter().enumerate() {
                if j > 0 {
                    let gap = (k - windows[j - 1].0) as f64 * protocol.t_cyc() - t_r;
                    m = transfer_matrix(tls, 0.0, gap) * m;
                }
                m = transfer_matrix(tls, s as f64 * tls.v(), t_r) * m;
            }
            m.apply(stationary(tls))[0]
        })
        .product()
}

/// Centered triple correlator r̃₃(k, l) = ⟨δx_{n+l} δx_{n+k} δx_n⟩ for 1 <= k < l.
pub fn r3_via_characteristic(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k: usize, l: usize) -> Result<f64> {
    if !(1 <= k && k < l) {
        return Err(invalid(format!("need 1 <= k < l, got k={k}, l={l}")));
    }
    let phi = shifted_phase(ensemble, protocol);
    let chi = characteristic_one_time(ensemble, protocol.t_r());
    let one = |s: i32| if s > 0 { chi } else { chi.conj() };
    let idx = [0, k, l];
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 0..8 {
        let s: Vec<i32> = (0..3).map(|b| if mask >> b & 1 == 1 { 1 } else { -1 }).collect();
        let pair = |a: usize, b: usize| characteristic_multi_time(ensemble, protocol, &[(idx[a], s[a]), (idx[b], s[b])]);
        let triple = characteristic_multi_time(ensemble, protocol, &[(0, s[0]), (k, s[1]), (l, s[2])]);
        let central = triple - one(s[0]) * pair(1, 2) - one(s[1]) * pair(0, 2) - one(s[2]) * pair(0, 1)
            + 2.0 * one(s[0]) * one(s[1]) * one(s[2]);
        total += Complex64::from_polar(1.0, phi * s.iter().sum::<i32>() as f64) * central;
    }
    Ok((protocol.coherence() / 4.0).powi(3) * total.re)
}

/// r₁ from the one-time characteristic function.
pub fn r1_via_characteristic(ensemble: &TlsEnsemble, protocol: &RamseyProtocol) -> f64 {
    let phi = shifted_phase(ensemble, protocol);
    let chi = characteristic_one_time(ensemble, protocol.t_r());
    0.5 + 0.5 * protocol.coherence() * (Complex64::from_polar(1.0, phi) * chi).re
}

/// r̃₂(k) = ⅛ e^{−2t_R/T2} {χ₋ − |χ|² + Re[e^{2iφ̃}(χ₊ − χ²)]}.
pub fn r2_via_characteristic(ensemble: &TlsEnsemble, protocol: &RamseyProtocol, k: usize) -> f64 {
    let phi = shifted_phase(ensemble, protocol);
    let chi = characteristic_one_time(ensemble, protocol.t_r());
    let plus = characteristic_two_time(ensemble, protocol, k, Sign::Plus);
    let minus = characteristic_two_time(ensemble, protocol, k, Sign::Minus);
    let bracket = (minus - chi.norm_sqr()).re + (Complex64::from_polar(1.0, 2.0 * phi) * (plus - chi * chi)).re;
    0.125 * protocol.coherence().powi(2) * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tls::{xi_factor, xi_k_factor};

    #[test]
    fn identity_at_zero_time() {
        let t = TlsParams::new(0.8, 0.4, 1.3).unwrap();
        let m = transfer_matrix(&t, 0.8, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.0[i][j] - TransferMatrix::identity().0[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn decoupled_form() {
        let t = TlsParams::new(0.8, 0.4, 1.3).unwrap();
        let (w, dw, s) = (t.w(), t.delta_w(), 0.7);
        let m = transfer_matrix(&t, 0.0, s);
        let e = (-w * s).exp();
        assert!((m.0[0][0] - 1.0).norm() < 1e-14);
        assert!(m.0[0][1].norm() < 1e-14);
        assert!((m.0[1][0] - dw / w * (1.0 - e)).norm() < 1e-14);
        assert!((m.0[1][1] - e).norm() < 1e-14);
    }

    #[test]
    fn one_time_matches_xi() {
        let t = TlsParams::symmetric(0.2, (-0.75f64).exp()).unwrap();
        let e = TlsEnsemble::new(vec![t]);
        assert!((characteristic_one_time(&e, 1.0) - xi_factor(&t, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn two_time_identity() {
        let p = RamseyProtocol::default();
        let t = TlsParams::new(0.9, 0.3, 0.8).unwrap();
        let e = TlsEnsemble::new(vec![t]);
        for k in [1, 2, 7] {
            let xi = xi_factor(&t, 1.0);
            let xk = xi_k_factor(&t, &p, k);
            let plus = characteristic_two_time(&e, &p, k, Sign::Plus);
            let minus = characteristic_two_time(&e, &p, k, Sign::Minus);
            assert!((plus - (xi * xi + xk * xk)).norm() < 1e-12, "k={k}");
            assert!((minus - (xi.norm_sqr() + xk.norm_sqr())).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn multi_time_reduces_to_two_time() {
        let p = RamseyProtocol::default();
        let e = TlsEnsemble::new(vec![TlsParams::new(0.9, 0.3, 0.8).unwrap(), TlsParams::symmetric(0.4, 0.05).unwrap()]);
        let a = characteristic_multi_time(&e, &p, &[(0, -1), (4, 1)]);
        let b = characteristic_two_time(&e, &p, 4, Sign::Minus);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn triple_frozen_limit() {
        // W -> 0: all windows see the same configuration, r̃₃ = E[(p(θ) − r₁)³]
        let p = RamseyProtocol::default();
        let tls = vec![TlsParams::symmetric(0.6, 1e-12).unwrap(), TlsParams::new(0.9, 3e-13, 1e-12).unwrap()];
        let e = TlsEnsemble::new(tls.clone());
        let mut configs = vec![(1.0, 0.0)];
        for t in &tls {
            let (w0, w1, _) = crate::model::tls_stationary(t);
            configs = configs
                .iter()
                .flat_map(|(w, th)| [(w * w0, th + t.v()), (w * w1, th - t.v())])
                .collect();
        }
        let shift = crate::model::mean_frequency_shift(&e);
        let probs: Vec<(f64, f64)> = configs
            .iter()
            .map(|(w, th)| (*w, crate::model::ramsey_probability(th - shift, &p)))
            .collect();
        let r1: f64 = probs.iter().map(|(w, q)| w * q).sum();
        let expect: f64 = probs.iter().map(|(w, q)| w * (q - r1).powi(3)).sum();
        let got = r3_via_characteristic(&e, &p, 2, 5).unwrap();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
        assert!(expect.abs() > 1e-4);
    }
}
