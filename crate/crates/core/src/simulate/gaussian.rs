//! Sequential conditional sampling of a stationary Gaussian phase sequence with a finite memory window.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::PhaseCorrelators;

/// Precomputed regression coefficients for drawing θ_k given the previous `min(k, K)` phases.
#[derive(Debug, Clone)]
pub struct WindowedGaussianSampler {
    k_corr: usize,
    /// `coef[j]` predicts θ from the j preceding phases, ordered oldest first.
    coef: Vec<Vec<f64>>,
    /// Conditional standard deviation for each window length j.
    sigma: Vec<f64>,
    /// Relative diagonal shift that was needed to factor the covariance.
    regularization: f64,
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            s -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

impl WindowedGaussianSampler {
    pub fn new(f: &PhaseCorrelators, k_corr: usize) -> Result<Self> {
        if k_corr == 0 {
            return Err(crate::error::invalid("k_corr must be >= 1"));
        }
        let n = k_corr + 1;
        let f0 = f.f0();
        let mut toeplitz = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                toeplitz[i * n + j] = f.get(i.abs_diff(j));
            }
        }
        let mut eps = 0.0;
        let l = loop {
            let mut a = toeplitz.clone();
            for i in 0..n {
                a[i * n + i] += eps * f0;
            }
            if let Some(l) = cholesky(&a, n) {
                break l;
            }
            eps = if eps == 0.0 { 1e-16 } else { eps * 10.0 };
            if eps > 1.0001e-12 {
                return Err(Error::Factorization(format!(
                    "windowed covariance of size {n} is not positive definite even with 1e-12 f0 regularization"
                )));
            }
        };
        // window of length j: θ_j | θ_0..θ_{j−1} has coefficients L_jᵀ⁻¹ ℓ_j and variance L_jj²
        let mut coef = Vec::with_capacity(n);
        let mut sigma = Vec::with_capacity(n);
        for j in 0..n {
            let row = &l[j * n..j * n + j];
            let mut beta = row.to_vec();
            for i in (0..j).rev() {
                let mut s = beta[i];
                for m in i + 1..j {
                    s -= l[m * n + i] * beta[m];
                }
                beta[i] = s / l[i * n + i];
            }
            coef.push(beta);
            sigma.push(l[j * n + j]);
        }
        Ok(WindowedGaussianSampler { k_corr, coef, sigma, regularization: eps })
    }

    pub fn k_corr(&self) -> usize {
        self.k_corr
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    /// Draws n phases.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut theta = Vec::with_capacity(n);
        for k in 0..n {
            let j = k.min(self.k_corr);
            let mean = dot(&self.coef[j], &theta[k - j..k]);
            let z: f64 = rng.sample(StandardNormal);
            theta.push(mean + self.sigma[j] * z);
        }
        theta
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Phases θ_0..θ_{n−1} from correlators f with memory window `k_corr`.
pub fn sample_gaussian_phases<R: Rng>(f: &PhaseCorrelators, n: usize, k_corr: usize, rng: &mut R) -> Result<Vec<f64>> {
    Ok(WindowedGaussianSampler::new(f, k_corr)?.sample(n, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn white_correlators_give_iid() {
        let f = PhaseCorrelators::new(vec![0.3, 0.0, 0.0]).unwrap();
        let s = WindowedGaussianSampler::new(&f, 2).unwrap();
        assert!(s.coef[2].iter().all(|c| c.abs() < 1e-15));
        assert!((s.sigma[2] - 0.3f64.sqrt()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let th = s.sample(n, &mut rng);
        let c1: f64 = th.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n as f64 * 0.3);
        assert!(c1.abs() <= 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn ar1_coefficients() {
        // f_k = ρ^k gives θ_k = ρ θ_{k−1} + noise exactly
        let rho: f64 = 0.8;
        let f = PhaseCorrelators::new((0..6).map(|k| rho.powi(k)).collect()).unwrap();
        let s = WindowedGaussianSampler::new(&f, 5).unwrap();
        let last = &s.coef[5];
        assert!((last[4] - rho).abs() < 1e-12);
        assert!(last[..4].iter().all(|c| c.abs() < 1e-12));
        assert!((s.sigma[5] - (1.0 - rho * rho).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn indefinite_input_rejected() {
        let f = PhaseCorrelators::new(vec![1.0, 1.0, -1.0]).unwrap();
        assert!(matches!(WindowedGaussianSampler::new(&f, 2), Err(Error::Factorization(_))));
    }
}
