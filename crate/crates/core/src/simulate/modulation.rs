//! Sinusoidal frequency modulation with optional cycle-period jitter.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::RamseyProtocol;

/// δω(t) = a_p cos(ω_p t + φ_p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modulation {
    pub a_p: f64,
    pub omega_p: f64,
}

impl Modulation {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_p.is_finite() && self.omega_p.is_finite() && self.omega_p > 0.0) {
            return Err(invalid("modulation needs finite a_p and omega_p > 0"));
        }
        Ok(())
    }

    /// Phase amplitude per window, A_p = (2a_p/ω_p) sin(ω_p t_R/2).
    pub fn phase_amplitude(&self, protocol: &RamseyProtocol) -> f64 {
        2.0 * self.a_p / self.omega_p * (self.omega_p * protocol.t_r() / 2.0).sin()
    }
}

/// Adds A_p cos(ω_p T_k + φ_p + ω_p t_R/2) to θ_k, with T_k the (possibly jittered) start of window k.
pub fn inject_modulation<R: Rng>(
    theta: &mut [f64],
    modulation: &Modulation,
    protocol: &RamseyProtocol,
    phase_p: f64,
    sigma_cyc: f64,
    rng: &mut R,
) -> Result<()> {
    if !(sigma_cyc >= 0.0 && sigma_cyc.is_finite()) {
        return Err(invalid(format!("sigma_cyc must be >= 0, got {sigma_cyc}")));
    }
    let amp = modulation.phase_amplitude(protocol);
    let offset = phase_p + modulation.omega_p * protocol.t_r() / 2.0;
    if sigma_cyc == 0.0 {
        for (k, th) in theta.iter_mut().enumerate() {
            *th += amp * (modulation.omega_p * k as f64 * protocol.t_cyc() + offset).cos();
        }
    } else {
        let period = Normal::new(protocol.t_cyc(), sigma_cyc).map_err(|e| invalid(e.to_string()))?;
        let mut t = 0.0;
        for th in theta.iter_mut() {
            *th += amp * (modulation.omega_p * t + offset).cos();
            t += period.sample(rng);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_amplitude_is_identity() {
        let mut th = vec![0.1, -0.2, 0.3];
        let m = Modulation { a_p: 0.0, omega_p: 0.3 };
        inject_modulation(&mut th, &m, &RamseyProtocol::default(), 0.4, 0.5, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(th, vec![0.1, -0.2, 0.3]);
    }

    #[test]
    fn small_frequency_amplitude() {
        let p = RamseyProtocol::default();
        let m = Modulation { a_p: 0.1, omega_p: 0.25 };
        assert!((m.phase_amplitude(&p) / 0.1 - 1.0).abs() < 0.01);
    }

    #[test]
    fn full_periods_cancel() {
        let p = RamseyProtocol::default();
        let n = 1000;
        // N ω_p t_cyc / 2π = 7
        let m = Modulation { a_p: 0.1, omega_p: 2.0 * std::f64::consts::PI * 7.0 / (n as f64 * p.t_cyc()) };
        let mut th = vec![0.0; n];
        inject_modulation(&mut th, &m, &p, 1.3, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(th.iter().sum::<f64>().abs() < 1e-10);
    }
}
