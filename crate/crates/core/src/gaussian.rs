//! Gaussian-noise theory: phase correlators f_k for each spectrum and the outcome correlators they imply.
//!
//! The 1/f spectrum is S(ω) = D ∫_{ω_min}^∞ dW / (W² + ω²) = D·atan(ω/ω_min)/ω, so that S ≈ πD/(2ω)
//! well above the cutoff. All 1/f closed forms below use this normalization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{CorrelatorEstimate, GaussianNoiseSpec, PhaseCorrelators, RamseyProtocol, TlsEnsemble};
use crate::quad::{gk15, integrate_cos_tail, integrate_to_infinity, integrate_with_breaks};
use crate::special::{chi, ei, shi, EULER_GAMMA};

/// atan(ω/ω_min)/ω with its finite limit at ω = 0.
pub fn one_over_f_shape(omega: f64, omega_min: f64) -> f64 {
    let x = omega.abs() / omega_min;
    if x < 1e-4 {
        (1.0 - x * x / 3.0) / omega_min
    } else {
        x.atan() / omega.abs()
    }
}

/// How `phase_correlator_with` evaluates f_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Closed form where one exists and its regime holds, quadrature otherwise.
    #[default]
    Auto,
    /// Closed form; colored noise outside its regime is an error.
    ClosedForm,
    /// Closed form with the colored-noise regime check waived.
    ForceClosedForm,
    Quadrature,
}

/// f_k for the given spectrum, closed form where available.
pub fn phase_correlator(spec: &GaussianNoiseSpec, protocol: &RamseyProtocol, k: usize) -> Result<f64> {
    phase_correlator_with(spec, protocol, k, Evaluation::ClosedForm)
}

pub fn phase_correlator_with(spec: &GaussianNoiseSpec, protocol: &RamseyProtocol, k: usize, eval: Evaluation) -> Result<f64> {
    spec.validate()?;
    let t = protocol.t_r();
    let a = k as f64 * protocol.t_cyc();
    if eval == Evaluation::Quadrature {
        return phase_correlator_quadrature_spec(spec, protocol, k);
    }
    match *spec {
        GaussianNoiseSpec::White { d_w } => Ok(if k == 0 { d_w * t } else { 0.0 }),
        GaussianNoiseSpec::ExpCorrelated { d_corr, tau_corr } => {
            let x = t / tau_corr;
            if k == 0 {
                // t − τ(1 − e^{−t/τ}) = τ (x + expm1(−x))
                let g = if x < 1e-3 {
                    x * x / 2.0 * (1.0 - x / 3.0 * (1.0 - x / 4.0 * (1.0 - x / 5.0)))
                } else {
                    x + (-x).exp_m1()
                };
                Ok(d_corr * tau_corr * g)
            } else {
                let cosh_m1 = 2.0 * (x / 2.0).sinh().powi(2);
                Ok(d_corr * tau_corr * (-a / tau_corr).exp() * cosh_m1)
            }
        }
        GaussianNoiseSpec::Colored { d_clr, omega_clr, gamma_clr } => {
            let in_regime = 2f64.sqrt() * gamma_clr < omega_clr && omega_clr * t < 1.0;
            match eval {
                Evaluation::Auto if !in_regime => phase_correlator_quadrature_spec(spec, protocol, k),
                Evaluation::ClosedForm if !in_regime => Err(Error::Regime(format!(
                    "colored closed form needs sqrt(2)*Gamma < omega_clr and omega_clr*t_R < 1 \
                     (got Gamma={gamma_clr}, omega_clr={omega_clr}); use quadrature or force the closed form"
                ))),
                _ => colored_closed_form(d_clr, omega_clr, gamma_clr, protocol, k),
            }
        }
        GaussianNoiseSpec::OneOverF { d_fl, omega_min } => Ok(one_over_f_closed_form(d_fl, omega_min, protocol, k)),
        GaussianNoiseSpec::Tabulated { .. } => phase_correlator_quadrature_spec(spec, protocol, k),
    }
}

/// Damped-oscillator spectrum in the short-window limit.
pub fn colored_closed_form(d: f64, omega: f64, gamma: f64, protocol: &RamseyProtocol, k: usize) -> Result<f64> {
    if !(omega > gamma && gamma > 0.0) {
        return Err(invalid("colored closed form needs omega_clr > Gamma_clr > 0"));
    }
    let t = protocol.t_r();
    let phi = colored_phase(omega, gamma);
    if k == 0 {
        return Ok(d * t * t / (4.0 * omega.powi(3) * phi.sin()));
    }
    let a = k as f64 * protocol.t_cyc();
    Ok(d * t * t / (2.0 * omega.powi(3) * (2.0 * phi).sin())
        * (-a * omega * phi.sin()).exp()
        * (a * omega * phi.cos() - phi).cos())
}

/// φ_clr = ½ arg[ω² − 2Γ² + 2iΓ√(ω² − Γ²)].
pub fn colored_phase(omega: f64, gamma: f64) -> f64 {
    0.5 * (2.0 * gamma * (omega * omega - gamma * gamma).sqrt()).atan2(omega * omega - 2.0 * gamma * gamma)
}

/// Exact 1/f phase correlators via exponential integrals.
pub fn one_over_f_closed_form(d: f64, omega_min: f64, protocol: &RamseyProtocol, k: usize) -> f64 {
    let t = protocol.t_r();
    let b = omega_min * t;
    if k == 0 {
        // [−1 + 2b − (b − 1)e^{−b}]/b², by series where it cancels
        let g = if b < 0.5 {
            let mut sum = 0.0;
            let mut fact = 2.0; // m!
            let mut pow = 1.0; // b^{m−2}
            for m in 2..40u32 {
                if m > 2 {
                    fact *= m as f64;
                    pow *= -b;
                }
                let term = (m + 1) as f64 * pow / fact;
                sum += term;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            sum
        } else {
            (-1.0 + 2.0 * b - (b - 1.0) * (-b).exp()) / (b * b)
        };
        return d * t * t / 2.0 * (g - chi(b) + shi(b));
    }
    let a = k as f64 * protocol.t_cyc() / t;
    let cosh_m1 = 2.0 * (b / 2.0).sinh().powi(2);
    let first = 2.0 * (-a * b).exp() * ((1.0 - a * b) * cosh_m1 + b * b.sinh()) / (b * b);
    d * t * t / 4.0 * (first + ei_second_difference(a, b))
}

/// 2a²Ei(−ab) − (a+1)²Ei(−(a+1)b) − (a−1)²Ei(−(a−1)b) for a > 1.
fn ei_second_difference(a: f64, b: f64) -> f64 {
    if (a + 1.0) * b > 2.0 {
        // −∫_{−1}^{1} (1 − |u|) g''(a + u) du with g(x) = x² Ei(−bx); the direct difference cancels badly
        let g2 = |x: f64| 2.0 * ei(-b * x) + (3.0 - b * x) * (-b * x).exp();
        let panels = 8;
        let mut total = 0.0;
        for sign in [-1.0, 1.0] {
            for j in 0..panels {
                let (lo, hi) = (j as f64 / panels as f64, (j + 1) as f64 / panels as f64);
                total += gk15(&|u: f64| (1.0 - u) * g2(a + sign * u), lo, hi).0;
            }
        }
        return -total;
    }
    // Ei(−x) = γ + ln x − Ein(x); the γ and ln b parts collapse analytically.
    let la = -2.0 * a.ln() - (a + 1.0).powi(2) * (1.0 / a).ln_1p() - (a - 1.0).powi(2) * (-1.0 / a).ln_1p();
    let ab = a * b;
    let mut series = 0.0;
    let mut pw = 1.0; // (ab)^n / (n · n!) built incrementally
    let mut fact = 1.0;
    for n in 1..200u32 {
        let nf = n as f64;
        fact *= nf;
        pw *= ab;
        // Δ_n / a^n = −2 Σ_{j even ≥ 2} C(n+2, j) a^{2−j}
        let mut delta = 0.0;
        let mut binom = (nf + 2.0) * (nf + 1.0) / 2.0; // C(n+2, 2)
        let mut j = 2u32;
        let mut apow = 1.0; // a^{2−j}
        while j <= n + 2 {
            delta += binom * apow;
            // advance j by 2
            let jf = j as f64;
            binom *= (nf + 2.0 - jf) * (nf + 1.0 - jf) / ((jf + 1.0) * (jf + 2.0));
            apow /= a * a;
            j += 2;
            if binom * apow < 1e-18 * delta {
                break;
            }
        }
        delta *= -2.0;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * pw / (nf * fact) * delta;
        series += term;
        if term.abs() < 1e-18 * series.abs().max(1e-300) && n > 3 {
            break;
        }
    }
    -2.0 * EULER_GAMMA - 2.0 * b.ln() + la - series
}

/// Intermediate-lag logarithmic approximation of the 1/f correlator.
pub fn log_approx_f_k(d_fl: f64, omega_min: f64, protocol: &RamseyProtocol, k: usize) -> f64 {
    let t = protocol.t_r();
    d_fl * t * t / 2.0 * (-EULER_GAMMA - (k as f64 * omega_min * protocol.t_cyc()).ln())
}

/// Large-lag asymptote of the 1/f correlator.
pub fn one_over_f_large_lag(d_fl: f64, omega_min: f64, protocol: &RamseyProtocol, k: usize) -> f64 {
    let t = protocol.t_r();
    let x = k as f64 * omega_min * protocol.t_cyc();
    d_fl * t * t * (-x).exp() / (2.0 * x)
}

fn spectral_features(spec: &GaussianNoiseSpec) -> Vec<f64> {
    match spec {
        GaussianNoiseSpec::White { .. } => vec![],
        GaussianNoiseSpec::ExpCorrelated { tau_corr, .. } => vec![1.0 / tau_corr],
        GaussianNoiseSpec::Colored { omega_clr, gamma_clr, .. } => vec![*omega_clr, *gamma_clr],
        GaussianNoiseSpec::OneOverF { omega_min, .. } => vec![*omega_min],
        GaussianNoiseSpec::Tabulated { omega, .. } => omega.clone(),
    }
}

/// f_k by direct quadrature of the spectrum.
pub fn phase_correlator_quadrature_spec(spec: &GaussianNoiseSpec, protocol: &RamseyProtocol, k: usize) -> Result<f64> {
    spec.validate()?;
    let features = spectral_features(spec);
    phase_correlator_quadrature(&|w| spec.spectral_density(w), &features, protocol, k)
}

/// (1/π)∫ S(ω) cos(ω k t_cyc)(1 − cos ω t_R)/ω² dω for an even spectrum.
///
/// `features` lists frequencies where S changes character; they become breakpoints.
pub fn phase_correlator_quadrature<S: Fn(f64) -> f64>(
    spectrum: &S,
    features: &[f64],
    protocol: &RamseyProtocol,
    k: usize,
) -> Result<f64> {
    let t = protocol.t_r();
    let a = k as f64 * protocol.t_cyc();
    let kernel = |w: f64| {
        if w * t < 1e-6 {
            t * t / 2.0
        } else {
            2.0 * (w * t / 2.0).sin().powi(2) / (w * w)
        }
    };
    let f = |w: f64| spectrum(w) * kernel(w) * (w * a).cos();

    let top_feature = features.iter().cloned().fold(1.0 / t, f64::max);
    let omega_cut = 40.0 * top_feature;
    let mut points = vec![0.0, omega_cut];
    for &x in features.iter().chain(std::iter::once(&(1.0 / t))) {
        let mut y = x;
        while y > 0.0 && y < omega_cut && points.len() < 100_000 {
            points.push(y);
            y *= 4.0;
        }
        let mut y = x / 4.0;
        while y > x * 1e-6 {
            points.push(y);
            y /= 4.0;
        }
    }
    let max_freq = a + t;
    let step = PI / max_freq;
    let n_panels = (omega_cut / step).ceil() as usize;
    if n_panels > 5_000_000 {
        return Err(Error::ResourceCap(format!("quadrature would need {n_panels} oscillation panels")));
    }
    for j in 1..n_panels {
        points.push(j as f64 * step);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    // scale guess for absolute tolerances
    let scale = spectrum(0.0).max(spectrum(1.0 / t)).max(1e-300) * t * t;
    let abs_tol = 1e-15 * scale;
    let body = integrate_with_breaks(&f, &points, abs_tol, 1e-13)?;

    let h = |w: f64| spectrum(w) / (w * w);
    let tail = if k == 0 {
        integrate_to_infinity(&h, omega_cut, abs_tol, 1e-13)?.value - integrate_cos_tail(&h, t, omega_cut, abs_tol)?
    } else {
        integrate_cos_tail(&h, a, omega_cut, abs_tol)?
            - 0.5 * integrate_cos_tail(&h, a + t, omega_cut, abs_tol)?
            - 0.5 * integrate_cos_tail(&h, a - t, omega_cut, abs_tol)?
    };
    Ok(2.0 / PI * (body.value + tail))
}

/// f_0..=f_K for a spectrum, closed form where valid.
pub fn phase_correlators(spec: &GaussianNoiseSpec, protocol: &RamseyProtocol, k_max: usize) -> Result<PhaseCorrelators> {
    let f = (0..=k_max)
        .map(|k| phase_correlator_with(spec, protocol, k, Evaluation::Auto))
        .collect::<Result<Vec<_>>>()?;
    PhaseCorrelators::new(f)
}

/// r₁ = ½[1 + e^{−t_R/T2} e^{−f0/2} cos φ_R].
pub fn r1_gauss(f0: f64, protocol: &RamseyProtocol) -> f64 {
    0.5 * (1.0 + protocol.coherence() * (-f0 / 2.0).exp() * protocol.phi_r().cos())
}

pub fn r2_gauss_from(f0: f64, fk: f64, protocol: &RamseyProtocol) -> f64 {
    let c2 = protocol.coherence().powi(2);
    0.125 * c2 * (-f0).exp() * (fk.exp_m1() + (2.0 * protocol.phi_r()).cos() * (-fk).exp_m1())
}

/// r̃₂(k) = ⅛ e^{−2t_R/T2} e^{−f0}[e^{f_k} − 1 − cos 2φ_R (1 − e^{−f_k})].
pub fn r2_gauss_centered(f: &PhaseCorrelators, protocol: &RamseyProtocol, k: usize) -> Result<f64> {
    if k > f.max_lag() {
        return Err(invalid(format!("lag {k} beyond the {} stored correlators", f.max_lag())));
    }
    Ok(r2_gauss_from(f.f0(), f.get(k), protocol))
}

pub fn r3_gauss_from(f0: f64, fs: [f64; 3], protocol: &RamseyProtocol) -> f64 {
    let phi = protocol.phi_r();
    let total: f64 = fs.iter().sum();
    let c3 = (3.0 * phi).cos() * ((-total).exp() + 2.0 - fs.iter().map(|x| (-x).exp()).sum::<f64>());
    let c1 = phi.cos()
        * (fs.iter().map(|x| (-x + (total - x)).exp()).sum::<f64>() + 6.0
            - fs.iter().map(|x| 2.0 * x.exp() + (-x).exp()).sum::<f64>());
    (-1.5 * f0 - 3.0 * protocol.t_r_over_t2()).exp() / 32.0 * (c3 + c1)
}

/// r̃₃(k, l) for 1 <= k < l.
pub fn r3_gauss_centered(f: &PhaseCorrelators, protocol: &RamseyProtocol, k: usize, l: usize) -> Result<f64> {
    if !(1 <= k && k < l) {
        return Err(invalid(format!("need 1 <= k < l, got k={k}, l={l}")));
    }
    if l > f.max_lag() {
        return Err(invalid(format!("lag {l} beyond the {} stored correlators", f.max_lag())));
    }
    Ok(r3_gauss_from(f.f0(), [f.get(k), f.get(l), f.get(l - k)], protocol))
}

/// Invert measured r₁ and r̃₂(1..) into phase correlators f_0, f_1, ….
pub fn infer_f_from_measurements(r1: f64, r2: &[f64], protocol: &RamseyProtocol) -> Result<PhaseCorrelators> {
    let cos_phi = protocol.phi_r().cos();
    let c = protocol.coherence();
    if cos_phi.abs() < 1e-12 {
        return Err(Error::Inversion("cos(phi_R) = 0: r1 carries no information on f0".into()));
    }
    let ratio = (2.0 * r1 - 1.0) / (c * cos_phi);
    if !(ratio > 0.0 && ratio <= 1.0 + 1e-12) {
        return Err(Error::Inversion(format!(
            "2 r1 - 1 = {} is outside (0, e^(-t_R/T2) cos(phi_R)] = (0, {}]",
            2.0 * r1 - 1.0,
            c * cos_phi
        )));
    }
    let f0 = (-2.0 * ratio.ln()).max(0.0);
    let cos2 = (2.0 * protocol.phi_r()).cos();
    let mut f = Vec::with_capacity(r2.len() + 1);
    f.push(f0);
    for (i, &r) in r2.iter().enumerate() {
        let big_a = 8.0 * r * f0.exp() / (c * c);
        let fk = if cos2.abs() < 1e-12 {
            if big_a <= -1.0 {
                return Err(Error::Inversion(format!("r2({}) = {r} is below the invertible range", i + 1)));
            }
            big_a.ln_1p()
        } else {
            // y = e^{f}: y² − (1 + C + A) y + C = 0, larger root
            let bq = 1.0 + cos2 + big_a;
            let disc = bq * bq - 4.0 * cos2;
            if disc < 0.0 {
                return Err(Error::Inversion(format!("r2({}) = {r} has no real preimage", i + 1)));
            }
            let y = if bq >= 0.0 { (bq + disc.sqrt()) / 2.0 } else { 2.0 * cos2 / (bq - disc.sqrt()) };
            if !(y > 0.0) {
                return Err(Error::Inversion(format!("r2({}) = {r} maps to a non-positive e^f", i + 1)));
            }
            y.ln()
        };
        f.push(fk);
    }
    if f0 == 0.0 {
        return Err(Error::Inversion("inferred f0 = 0; the noise is not resolved".into()));
    }
    PhaseCorrelators::from_estimates(f)
}

/// z-score of a measured r̃₃ against the Gaussian prediction built from inferred correlators.
pub fn gaussianity_score(
    r3: &CorrelatorEstimate,
    f: &PhaseCorrelators,
    protocol: &RamseyProtocol,
    k: usize,
    l: usize,
) -> Result<f64> {
    if !(r3.stderr > 0.0) {
        return Err(invalid("gaussianity score needs a positive standard error"));
    }
    Ok((r3.value - r3_gauss_centered(f, protocol, k, l)?) / r3.stderr)
}

/// Non-Gaussian sign test: with cos φ_R > 0, a Gaussian model forces r̃₃(k,l) < 0 wherever r̃₂(k) > 0.
/// Returns true if some measured r̃₃(k,l) with k ≤ `k_limit` and r̃₂(k) > 0 exceeds zero by more than 3σ.
/// `r2` is indexed by lag.
pub fn non_gaussian_sign_flag(
    r2: &[CorrelatorEstimate],
    r3: &[((usize, usize), CorrelatorEstimate)],
    protocol: &RamseyProtocol,
    k_limit: usize,
) -> bool {
    if protocol.phi_r().cos() <= 0.0 {
        return false;
    }
    r3.iter().any(|((k, _), e)| {
        *k >= 1 && *k <= k_limit && r2.get(*k).is_some_and(|c| c.value > 0.0) && e.stderr > 0.0 && e.value > 3.0 * e.stderr
    })
}

/// S_q(ω) = Σ 2(wV)² W/(W² + ω²) for a TLS ensemble.
pub fn tls_spectrum_theory(ensemble: &TlsEnsemble, omega: f64) -> f64 {
    ensemble
        .iter()
        .map(|t| {
            let w = t.w();
            2.0 * (t.fluctuation_amplitude() * t.v()).powi(2) * w / (w * w + omega * omega)
        })
        .sum()
}

/// Lag count after which the correlators are negligible, used as the default sampler window.
pub fn default_k_corr(spec: &GaussianNoiseSpec, protocol: &RamseyProtocol) -> usize {
    const CAP: usize = 2000;
    match spec {
        GaussianNoiseSpec::White { .. } => 1,
        GaussianNoiseSpec::ExpCorrelated { .. } => 10,
        GaussianNoiseSpec::OneOverF { .. } => 400,
        GaussianNoiseSpec::Colored { gamma_clr, .. } => ((8.0 / gamma_clr / protocol.t_cyc()).ceil() as usize).clamp(1, CAP),
        GaussianNoiseSpec::Tabulated { omega, s } => {
            // correlation time from the half-power width of the spectrum
            let s0 = s[0];
            let half = omega.iter().zip(s).find(|(_, v)| **v < 0.5 * s0).map(|(w, _)| *w);
            match half {
                Some(w) if w > 0.0 => ((8.0 / w / protocol.t_cyc()).ceil() as usize).clamp(1, CAP),
                _ => CAP,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proto() -> RamseyProtocol {
        RamseyProtocol::default()
    }

    #[test]
    fn exp_correlated_working_point() {
        let s = GaussianNoiseSpec::ExpCorrelated { d_corr: 6.51, tau_corr: 20.0 };
        let f0 = phase_correlator(&s, &proto(), 0).unwrap();
        let f1 = phase_correlator(&s, &proto(), 1).unwrap();
        assert!((f0 - 0.1601).abs() < 5e-5, "{f0}");
        assert!((f1 - 0.1401).abs() < 5e-5, "{f1}");
    }

    #[test]
    fn white_has_no_memory() {
        let s = GaussianNoiseSpec::White { d_w: 0.3 };
        assert_eq!(phase_correlator(&s, &proto(), 0).unwrap(), 0.3);
        assert_eq!(phase_correlator(&s, &proto(), 4).unwrap(), 0.0);
    }

    #[test]
    fn one_over_f_working_point() {
        let s = GaussianNoiseSpec::OneOverF { d_fl: 0.02574, omega_min: 1e-5 };
        let f0 = phase_correlator(&s, &proto(), 0).unwrap();
        assert!((f0 - 0.16).abs() < 0.005, "{f0}");
    }

    #[test]
    fn r_gauss_examples() {
        let p = proto();
        assert!((r1_gauss(0.16, &p) - 0.826).abs() < 1e-3);
        let f = PhaseCorrelators::new(vec![0.16, 0.1401]).unwrap();
        assert!((r2_gauss_centered(&f, &p, 1).unwrap() - 0.01602).abs() < 1e-5);
        let p2 = p.with_phi_r(std::f64::consts::FRAC_PI_2);
        let f = PhaseCorrelators::new(vec![0.5, 0.3, 0.2, 0.1]).unwrap();
        assert!(r3_gauss_centered(&f, &p2, 1, 3).unwrap().abs() < 1e-16);
    }

    #[test]
    fn inversion_examples() {
        let p = proto();
        let r1 = r1_gauss(0.16, &p);
        let f = infer_f_from_measurements(r1, &[0.01602], &p).unwrap();
        assert!((f.f0() - 0.16).abs() < 1e-12);
        assert!((f.get(1) - 0.1401).abs() < 1e-4);
        assert!(infer_f_from_measurements(0.4, &[], &p).is_err());
    }

    #[test]
    fn colored_regime_check() {
        let s = GaussianNoiseSpec::Colored { d_clr: 1.0, omega_clr: 2.0, gamma_clr: 0.1 };
        assert!(matches!(phase_correlator(&s, &proto(), 0), Err(Error::Regime(_))));
        assert!(phase_correlator_with(&s, &proto(), 0, Evaluation::ForceClosedForm).is_ok());
    }

    #[test]
    fn tls_spectrum_hand_value() {
        let e = TlsEnsemble::new(vec![crate::model::TlsParams::symmetric(0.3, 0.5).unwrap()]);
        assert!((tls_spectrum_theory(&e, 0.0) - 2.0 * 0.09 / 0.5).abs() < 1e-15);
    }
}
