//! Outcome correlators for any mix of TLS and Gaussian noise, from joint characteristic functions.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::gaussian::phase_correlators;
use crate::model::{shifted_phase, PhaseCorrelators, RamseyProtocol, TlsEnsemble};
use crate::simulate::NoiseModel;
use crate::tls::characteristic_multi_time;

/// Theory for independent TLS and Gaussian components acting together.
#[derive(Debug, Clone)]
pub struct Theory {
    protocol: RamseyProtocol,
    tls: TlsEnsemble,
    /// Gaussian phase correlators, including frozen components, for lags 0..=max_lag.
    f: Vec<f64>,
    phi: f64,
    chi: Complex64,
}

fn gaussian_part(noise: &NoiseModel, protocol: &RamseyProtocol, max_lag: usize, out: &mut [f64]) -> Result<()> {
    match noise {
        NoiseModel::None | NoiseModel::Tls { .. } => {}
        NoiseModel::Gaussian { spectrum, .. } => {
            let f = phase_correlators(spectrum, protocol, max_lag)?;
            out.iter_mut().zip(f.as_slice()).for_each(|(o, v)| *o += v);
        }
        NoiseModel::Correlators { f, .. } => {
            out.iter_mut().zip(f.as_slice()).for_each(|(o, v)| *o += v);
        }
        NoiseModel::StaticGaussian { f0 } => out.iter_mut().for_each(|o| *o += f0),
        NoiseModel::Composite { parts } => {
            for p in parts {
                gaussian_part(p, protocol, max_lag, out)?;
            }
        }
    }
    Ok(())
}

impl Theory {
    /// Prepares correlators up to `max_lag`; lags beyond it are unavailable.
    pub fn new(noise: &NoiseModel, protocol: &RamseyProtocol, max_lag: usize) -> Result<Self> {
        noise.validate()?;
        let tls = noise.tls_ensemble();
        let mut f = vec![0.0; max_lag + 1];
        gaussian_part(noise, protocol, max_lag, &mut f)?;
        let mut t = Theory { protocol: *protocol, phi: shifted_phase(&tls, protocol), tls, f, chi: Complex64::new(1.0, 0.0) };
        t.chi = t.characteristic(&[(0, 1)]);
        Ok(t)
    }

    pub fn max_lag(&self) -> usize {
        self.f.len() - 1
    }
    pub fn protocol(&self) -> &RamseyProtocol {
        &self.protocol
    }
    pub fn tls(&self) -> &TlsEnsemble {
        &self.tls
    }

    /// Gaussian phase correlators of the non-TLS part.
    pub fn gaussian_correlators(&self) -> Result<PhaseCorrelators> {
        PhaseCorrelators::new(self.f.clone())
    }

    /// ⟨exp(i Σ s_j θ_{k_j})⟩ for increasing cycle indices k_j, with TLS phases uncentered.
    pub fn characteristic(&self, windows: &[(usize, i32)]) -> Complex64 {
        let mut var = 0.0;
        for &(ki, si) in windows {
            for &(kj, sj) in windows {
                var += (si * sj) as f64 * self.f[ki.abs_diff(kj)];
            }
        }
        let gauss = (-0.5 * var).exp();
        if self.tls.is_empty() {
            Complex64::new(gauss, 0.0)
        } else {
            characteristic_multi_time(&self.tls, &self.protocol, windows) * gauss
        }
    }

    fn check(&self, lag: usize) -> Result<()> {
        if lag > self.max_lag() {
            return Err(invalid(format!("lag {lag} beyond the prepared maximum {}", self.max_lag())));
        }
        Ok(())
    }

    fn one(&self, s: i32) -> Complex64 {
        if s > 0 {
            self.chi
        } else {
            self.chi.conj()
        }
    }

    pub fn r1(&self) -> f64 {
        0.5 + 0.5 * self.protocol.coherence() * (Complex64::from_polar(1.0, self.phi) * self.chi).re
    }

    /// r̃₂(k) for k >= 1; k = 0 gives the outcome variance r₁(1 − r₁).
    pub fn r2(&self, k: usize) -> Result<f64> {
        self.check(k)?;
        if k == 0 {
            let r1 = self.r1();
            return Ok(r1 * (1.0 - r1));
        }
        let plus = self.characteristic(&[(0, 1), (k, 1)]);
        let minus = self.characteristic(&[(0, 1), (k, -1)]);
        let bracket =
            (minus - self.chi.norm_sqr()).re + (Complex64::from_polar(1.0, 2.0 * self.phi) * (plus - self.chi * self.chi)).re;
        Ok(0.125 * self.protocol.coherence().powi(2) * bracket)
    }

    /// r̃₃(k, l) for 1 <= k < l.
    pub fn r3(&self, k: usize, l: usize) -> Result<f64> {
        if !(1 <= k && k < l) {
            return Err(invalid(format!("need 1 <= k < l, got k={k}, l={l}")));
        }
        self.check(l)?;
        let idx = [0, k, l];
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0..8 {
            let s: [i32; 3] = std::array::from_fn(|b| if mask >> b & 1 == 1 { 1 } else { -1 });
            let pair = |a: usize, b: usize| self.characteristic(&[(idx[a], s[a]), (idx[b], s[b])]);
            let triple = self.characteristic(&[(0, s[0]), (k, s[1]), (l, s[2])]);
            let central = triple - self.one(s[0]) * pair(1, 2) - self.one(s[1]) * pair(0, 2) - self.one(s[2]) * pair(0, 1)
                + 2.0 * self.one(s[0]) * self.one(s[1]) * self.one(s[2]);
            total += Complex64::from_polar(1.0, self.phi * s.iter().sum::<i32>() as f64) * central;
        }
        Ok((self.protocol.coherence() / 4.0).powi(3) * total.re)
    }

    /// r̃₂(1..=k_max).
    pub fn r2_series(&self, k_max: usize) -> Result<Vec<f64>> {
        (1..=k_max).map(|k| self.r2(k)).collect()
    }
}
