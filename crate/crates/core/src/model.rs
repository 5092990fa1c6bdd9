//! Shared domain types and the single-shot Ramsey probability.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Timing and phase parameters of one repeated Ramsey cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProtocol", into = "RawProtocol")]
pub struct RamseyProtocol {
    t_r: f64,
    t_cyc: f64,
    phi_r: f64,
    t_r_over_t2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    #[serde(default = "one")]
    t_r: f64,
    #[serde(default = "three")]
    t_cyc: f64,
    #[serde(default = "quarter_pi")]
    phi_r: f64,
    #[serde(default)]
    t_r_over_t2: f64,
}

fn one() -> f64 {
    1.0
}
fn three() -> f64 {
    3.0
}
fn quarter_pi() -> f64 {
    FRAC_PI_4
}

impl TryFrom<RawProtocol> for RamseyProtocol {
    type Error = crate::Error;
    fn try_from(r: RawProtocol) -> Result<Self> {
        RamseyProtocol::new(r.t_r, r.t_cyc, r.phi_r, r.t_r_over_t2)
    }
}

impl From<RamseyProtocol> for RawProtocol {
    fn from(p: RamseyProtocol) -> Self {
        RawProtocol {
            t_r: p.t_r,
            t_cyc: p.t_cyc,
            phi_r: p.phi_r,
            t_r_over_t2: p.t_r_over_t2,
        }
    }
}

impl Default for RamseyProtocol {
    /// t_R = 1, t_cyc = 3, φ_R = π/4, no intrinsic dephasing.
    fn default() -> Self {
        RamseyProtocol {
            t_r: 1.0,
            t_cyc: 3.0,
            phi_r: FRAC_PI_4,
            t_r_over_t2: 0.0,
        }
    }
}

impl RamseyProtocol {
    pub fn new(t_r: f64, t_cyc: f64, phi_r: f64, t_r_over_t2: f64) -> Result<Self> {
        if !(t_r.is_finite() && t_r > 0.0) {
            return Err(invalid(format!("t_R must be positive and finite, got {t_r}")));
        }
        if !(t_cyc.is_finite() && t_cyc > t_r) {
            return Err(invalid(format!("t_cyc must exceed t_R, got t_cyc={t_cyc}, t_R={t_r}")));
        }
        if !phi_r.is_finite() {
            return Err(invalid("phi_R must be finite"));
        }
        if !(t_r_over_t2.is_finite() && t_r_over_t2 >= 0.0) {
            return Err(invalid(format!("t_R/T2 must be >= 0, got {t_r_over_t2}")));
        }
        Ok(RamseyProtocol { t_r, t_cyc, phi_r, t_r_over_t2 })
    }

    pub fn t_r(&self) -> f64 {
        self.t_r
    }
    pub fn t_cyc(&self) -> f64 {
        self.t_cyc
    }
    pub fn phi_r(&self) -> f64 {
        self.phi_r
    }
    pub fn t_r_over_t2(&self) -> f64 {
        self.t_r_over_t2
    }

    /// The intrinsic coherence factor e^{-t_R/T2}.
    pub fn coherence(&self) -> f64 {
        (-self.t_r_over_t2).exp()
    }

    pub fn with_phi_r(mut self, phi_r: f64) -> Self {
        assert!(phi_r.is_finite());
        self.phi_r = phi_r;
        self
    }
}

/// Probability of outcome 1 for a Ramsey measurement that accumulated phase `theta`.
pub fn ramsey_probability(theta: f64, protocol: &RamseyProtocol) -> f64 {
    0.5 * (1.0 + protocol.coherence() * (protocol.phi_r + theta).cos())
}

/// A two-level fluctuator: coupling `v` and switching rates 0→1 and 1→0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTls", into = "RawTls")]
pub struct TlsParams {
    v: f64,
    w01: f64,
    w10: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTls {
    v: f64,
    w01: f64,
    w10: f64,
}

impl TryFrom<RawTls> for TlsParams {
    type Error = crate::Error;
    fn try_from(r: RawTls) -> Result<Self> {
        TlsParams::new(r.v, r.w01, r.w10)
    }
}

impl From<TlsParams> for RawTls {
    fn from(t: TlsParams) -> Self {
        RawTls { v: t.v, w01: t.w01, w10: t.w10 }
    }
}

impl TlsParams {
    pub fn new(v: f64, w01: f64, w10: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(invalid("TLS coupling must be finite"));
        }
        if !(w01.is_finite() && w10.is_finite() && w01 >= 0.0 && w10 >= 0.0) {
            return Err(invalid(format!("switching rates must be finite and >= 0, got W01={w01}, W10={w10}")));
        }
        if w01 + w10 <= 0.0 {
            return Err(invalid("total switching rate W01+W10 must be positive"));
        }
        Ok(TlsParams { v, w01, w10 })
    }

    /// Symmetric TLS with total rate `w` (W01 = W10 = w/2).
    pub fn symmetric(v: f64, w: f64) -> Result<Self> {
        Self::new(v, 0.5 * w, 0.5 * w)
    }

    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn w01(&self) -> f64 {
        self.w01
    }
    pub fn w10(&self) -> f64 {
        self.w10
    }
    /// Total rate W = W01 + W10.
    pub fn w(&self) -> f64 {
        self.w01 + self.w10
    }
    /// Rate asymmetry ΔW = W10 − W01.
    pub fn delta_w(&self) -> f64 {
        self.w10 - self.w01
    }
    /// Stationary mean of τ_z, ΔW/W.
    pub fn mean_tau(&self) -> f64 {
        self.delta_w() / self.w()
    }
    /// Standard deviation of the stationary telegraph signal, 2√(W01 W10)/W.
    pub fn fluctuation_amplitude(&self) -> f64 {
        2.0 * (self.w01 * self.w10).sqrt() / self.w()
    }

    pub fn with_v(mut self, v: f64) -> Self {
        assert!(v.is_finite());
        self.v = v;
        self
    }
}

/// Stationary populations (w0, w1) and mean τ_z of a TLS.
pub fn tls_stationary(tls: &TlsParams) -> (f64, f64, f64) {
    let w = tls.w();
    (tls.w10 / w, tls.w01 / w, tls.mean_tau())
}

/// An ordered collection of independent TLSs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TlsEnsemble {
    tls: Vec<TlsParams>,
}

impl TlsEnsemble {
    pub fn new(tls: Vec<TlsParams>) -> Self {
        TlsEnsemble { tls }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Identical symmetric TLSs with coupling `v` and rates W⁽ⁿ⁾ t_R = exp(−α(n + n0)), n = 1..=count.
    pub fn ladder(v: f64, count: usize, alpha: f64, n0: f64, t_r: f64) -> Result<Self> {
        (1..=count)
            .map(|n| TlsParams::symmetric(v, (-alpha * (n as f64 + n0)).exp() / t_r))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.tls.len()
    }
    pub fn is_empty(&self) -> bool {
        self.tls.is_empty()
    }
    pub fn iter(&self) -> std::slice::Iter<'_, TlsParams> {
        self.tls.iter()
    }
    pub fn as_slice(&self) -> &[TlsParams] {
        &self.tls
    }
}

impl FromIterator<TlsParams> for TlsEnsemble {
    fn from_iter<I: IntoIterator<Item = TlsParams>>(iter: I) -> Self {
        TlsEnsemble { tls: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a TlsEnsemble {
    type Item = &'a TlsParams;
    type IntoIter = std::slice::Iter<'a, TlsParams>;
    fn into_iter(self) -> Self::IntoIter {
        self.tls.iter()
    }
}

/// Mean TLS-induced frequency shift Σ V ΔW/W.
pub fn mean_frequency_shift(ensemble: &TlsEnsemble) -> f64 {
    ensemble.iter().map(|t| t.v * t.mean_tau()).sum()
}

/// Phase offset actually seen by the qubit once the mean TLS shift is removed from the observable φ_R.
pub(crate) fn shifted_phase(ensemble: &TlsEnsemble, protocol: &RamseyProtocol) -> f64 {
    protocol.phi_r - mean_frequency_shift(ensemble) * protocol.t_r
}

/// Power spectra of classical Gaussian frequency noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaussianNoiseSpec {
    White { d_w: f64 },
    ExpCorrelated { d_corr: f64, tau_corr: f64 },
    Colored { d_clr: f64, omega_clr: f64, gamma_clr: f64 },
    OneOverF { d_fl: f64, omega_min: f64 },
    /// Spectrum sampled at ω ≥ 0 (ascending); extended evenly, linear in between, zero beyond the last point.
    Tabulated { omega: Vec<f64>, s: Vec<f64> },
}

impl GaussianNoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be finite and >= 0, got {x}")))
            }
        };
        let pos = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be finite and > 0, got {x}")))
            }
        };
        match self {
            GaussianNoiseSpec::White { d_w } => nonneg("d_w", *d_w),
            GaussianNoiseSpec::ExpCorrelated { d_corr, tau_corr } => {
                nonneg("d_corr", *d_corr)?;
                pos("tau_corr", *tau_corr)
            }
            GaussianNoiseSpec::Colored { d_clr, omega_clr, gamma_clr } => {
                nonneg("d_clr", *d_clr)?;
                pos("omega_clr", *omega_clr)?;
                pos("gamma_clr", *gamma_clr)
            }
            GaussianNoiseSpec::OneOverF { d_fl, omega_min } => {
                nonneg("d_fl", *d_fl)?;
                pos("omega_min", *omega_min)
            }
            GaussianNoiseSpec::Tabulated { omega, s } => {
                if omega.len() != s.len() || omega.len() < 2 {
                    return Err(invalid("tabulated spectrum needs >= 2 (omega, s) pairs of equal length"));
                }
                if omega[0] < 0.0 || omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("tabulated omega grid must be >= 0 and strictly increasing"));
                }
                if s.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(invalid("tabulated spectrum values must be finite and >= 0"));
                }
                Ok(())
            }
        }
    }

    /// S_q(ω); even in ω.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match self {
            GaussianNoiseSpec::White { d_w } => *d_w,
            GaussianNoiseSpec::ExpCorrelated { d_corr, tau_corr } => d_corr / (1.0 + (w * tau_corr).powi(2)),
            GaussianNoiseSpec::Colored { d_clr, omega_clr, gamma_clr } => {
                let a = w * w - omega_clr * omega_clr;
                d_clr / (a * a + 4.0 * gamma_clr * gamma_clr * w * w)
            }
            GaussianNoiseSpec::OneOverF { d_fl, omega_min } => d_fl * crate::gaussian::one_over_f_shape(w, *omega_min),
            GaussianNoiseSpec::Tabulated { omega, s } => {
                if w > *omega.last().unwrap() {
                    return 0.0;
                }
                if w <= omega[0] {
                    return s[0];
                }
                let i = omega.partition_point(|x| *x <= w);
                let (x0, x1) = (omega[i - 1], omega[i]);
                let t = (w - x0) / (x1 - x0);
                s[i - 1] * (1.0 - t) + s[i] * t
            }
        }
    }
}

/// Accumulated-phase covariances f_0..f_K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseCorrelators {
    f: Vec<f64>,
}

impl PhaseCorrelators {
    /// Validated constructor: f_0 > 0 and |f_k| <= f_0.
    pub fn new(f: Vec<f64>) -> Result<Self> {
        let pc = Self::from_estimates(f)?;
        let f0 = pc.f[0];
        if let Some((k, fk)) = pc.f.iter().enumerate().skip(1).find(|(_, x)| x.abs() > f0 * (1.0 + 1e-12)) {
            return Err(invalid(format!("|f_{k}| = {} exceeds f_0 = {f0}", fk.abs())));
        }
        Ok(pc)
    }

    /// Constructor for noisy estimates: only requires finite values and f_0 > 0.
    pub fn from_estimates(f: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(invalid("phase correlators need at least f_0"));
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(invalid("phase correlators must be finite"));
        }
        if !(f[0] > 0.0) {
            return Err(invalid(format!("f_0 must be positive, got {}", f[0])));
        }
        Ok(PhaseCorrelators { f })
    }

    pub fn f0(&self) -> f64 {
        self.f[0]
    }
    /// f_k, or 0 beyond the stored range.
    pub fn get(&self, k: usize) -> f64 {
        self.f.get(k).copied().unwrap_or(0.0)
    }
    /// Maximum stored lag K.
    pub fn max_lag(&self) -> usize {
        self.f.len() - 1
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }
    pub fn truncated(&self, k_max: usize) -> Self {
        PhaseCorrelators { f: self.f[..=k_max.min(self.max_lag())].to_vec() }
    }
}

/// One repetition of binary Ramsey outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSeries {
    bits: Vec<u8>,
    seed: u64,
    repetition: u64,
    protocol: RamseyProtocol,
}

impl OutcomeSeries {
    pub fn new(bits: Vec<u8>, seed: u64, repetition: u64, protocol: RamseyProtocol) -> Result<Self> {
        if bits.iter().any(|b| *b > 1) {
            return Err(invalid("outcome bits must be 0 or 1"));
        }
        Ok(OutcomeSeries { bits, seed, repetition, protocol })
    }

    /// Wraps bits without a provenance record (seed and repetition 0).
    pub fn from_bits(bits: Vec<u8>, protocol: RamseyProtocol) -> Result<Self> {
        Self::new(bits, 0, 0, protocol)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
    pub fn len(&self) -> usize {
        self.bits.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn repetition(&self) -> u64 {
        self.repetition
    }
    pub fn protocol(&self) -> &RamseyProtocol {
        &self.protocol
    }
    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn probability_examples() {
        let p0 = RamseyProtocol::new(1.0, 3.0, 0.0, 0.0).unwrap();
        assert!((ramsey_probability(0.0, &p0) - 1.0).abs() < 1e-15);
        let p = RamseyProtocol::default();
        assert!((ramsey_probability(PI / 4.0, &p) - 0.5).abs() < 1e-15);
        assert!((ramsey_probability(0.0, &p) - 0.853_553_390_593_273_7).abs() < 1e-15);
    }

    #[test]
    fn protocol_rejects_bad_timing() {
        assert!(RamseyProtocol::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(RamseyProtocol::new(0.0, 3.0, 0.0, 0.0).is_err());
        assert!(RamseyProtocol::new(1.0, 3.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn stationary_examples() {
        let (a, b, c) = tls_stationary(&TlsParams::new(1.0, 1.0, 2.0).unwrap());
        assert!((a - 2.0 / 3.0).abs() < 1e-15 && (b - 1.0 / 3.0).abs() < 1e-15 && (c - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(tls_stationary(&TlsParams::new(1.0, 0.0, 1.0).unwrap()), (1.0, 0.0, 1.0));
        assert!(TlsParams::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn frequency_shift() {
        let e = TlsEnsemble::new(vec![TlsParams::new(1.0, 1.0, 2.0).unwrap()]);
        assert!((mean_frequency_shift(&e) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(mean_frequency_shift(&TlsEnsemble::empty()), 0.0);
    }

    #[test]
    fn protocol_serde_defaults() {
        let p: RamseyProtocol = serde_json::from_str("{}").unwrap();
        assert_eq!(p, RamseyProtocol::default());
        assert!(serde_json::from_str::<RamseyProtocol>(r#"{"t_cyc": 0.5}"#).is_err());
        assert!(serde_json::from_str::<RamseyProtocol>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn correlators_validation() {
        assert!(PhaseCorrelators::new(vec![0.1, 0.2]).is_err());
        assert!(PhaseCorrelators::new(vec![0.0]).is_err());
        assert!(PhaseCorrelators::from_estimates(vec![0.1, 0.2]).is_ok());
    }
}
