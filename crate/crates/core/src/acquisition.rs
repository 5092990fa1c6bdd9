//! Outcome-count distributions for blocks of M measurements.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{ramsey_probability, RamseyProtocol, TlsEnsemble};
use crate::special::ln_binomial;

/// Probability of observing m ones among M measurements, m = 0..=M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    m: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("distribution needs at least one entry"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("probabilities must be finite and >= 0"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(OutcomeDistribution { m: probs.len() - 1, probs })
    }

    pub(crate) fn normalized(mut probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        OutcomeDistribution { m: probs.len() - 1, probs }
    }

    /// Block size M.
    pub fn block_size(&self) -> usize {
        self.m
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Mean of m.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
    }

    /// Variance of m.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.probs.iter().enumerate().map(|(i, p)| (i as f64 - mu).powi(2) * p).sum()
    }

    /// Standard deviation of m/M.
    pub fn fraction_std(&self) -> f64 {
        self.variance().sqrt() / self.m as f64
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> Result<f64> {
        if self.m != other.m {
            return Err(invalid(format!("block sizes differ: {} vs {}", self.m, other.m)));
        }
        Ok(0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    /// Indices m that are strict local maxima and carry at least `min_height` probability.
    pub fn local_maxima(&self, min_height: f64) -> Vec<usize> {
        local_maxima(&self.probs, min_height)
    }

    /// Aggregates the mass into `bins` equal-width bins over m ∈ [lo, hi].
    pub fn rebin(&self, lo: usize, hi: usize, bins: usize) -> Vec<f64> {
        rebin_counts(&self.probs, lo, hi, bins)
    }
}

pub(crate) fn local_maxima(v: &[f64], min_height: f64) -> Vec<usize> {
    let n = v.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        // treat plateaus as a single candidate
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        let left_ok = i == 0 || v[i - 1] < v[i];
        let right_ok = j + 1 == n || v[j + 1] < v[i];
        if left_ok && right_ok && v[i] >= min_height && n > 1 {
            out.push((i + j) / 2);
        }
        i = j + 1;
    }
    out
}

pub(crate) fn rebin_counts(v: &[f64], lo: usize, hi: usize, bins: usize) -> Vec<f64> {
    let mut out = vec![0.0; bins];
    let width = (hi - lo + 1) as f64 / bins as f64;
    for (m, p) in v.iter().enumerate().take(hi + 1).skip(lo) {
        let b = (((m - lo) as f64) / width).floor() as usize;
        out[b.min(bins - 1)] += p;
    }
    out
}

fn binomial_into(out: &mut [f64], m_tot: usize, p: f64, weight: f64) {
    if p <= 0.0 {
        out[0] += weight;
        return;
    }
    if p >= 1.0 {
        out[m_tot] += weight;
        return;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mt = m_tot as u64;
    for (m, slot) in out.iter_mut().enumerate() {
        let mu = m as u64;
        let l = ln_binomial(mt, mu) + m as f64 * lp + (m_tot - m) as f64 * lq;
        if l > -745.0 {
            *slot += weight * l.exp();
        }
    }
}

/// Binomial(M, r₁).
pub fn rho_binomial(m: usize, r1: f64) -> Result<OutcomeDistribution> {
    if !(0.0..=1.0).contains(&r1) {
        return Err(invalid(format!("r1 must lie in [0,1], got {r1}")));
    }
    let mut probs = vec![0.0; m + 1];
    binomial_into(&mut probs, m, r1, 1.0);
    Ok(OutcomeDistribution::normalized(probs))
}

/// Largest ensemble enumerated by `rho_static_tls`.
pub const STATIC_TLS_CAP: usize = 25;

/// Mixture of binomials over frozen TLS configurations.
pub fn rho_static_tls(m: usize, ensemble: &TlsEnsemble, protocol: &RamseyProtocol) -> Result<OutcomeDistribution> {
    let n = ensemble.len();
    if n > STATIC_TLS_CAP {
        return Err(Error::EnsembleTooLarge { n, cap: STATIC_TLS_CAP });
    }
    // (phase, weight) over configurations; merge equal phases as they appear
    let mut configs: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for t in ensemble {
        let (w0, w1, _) = crate::model::tls_stationary(t);
        let shift = t.v() * protocol.t_r();
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(configs.len() * 2);
        for &(th, w) in &configs {
            if w0 > 0.0 {
                next.push((th + shift, w * w0));
            }
            if w1 > 0.0 {
                next.push((th - shift, w * w1));
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        configs.clear();
        for (th, w) in next {
            match configs.last_mut() {
                Some(last) if (last.0 - th).abs() <= 1e-12 * (1.0 + th.abs()) => last.1 += w,
                _ => configs.push((th, w)),
            }
        }
    }
    // the observable phase already contains the mean shift; remove it from the frozen phases
    let mean_shift = crate::model::mean_frequency_shift(ensemble) * protocol.t_r();
    let mut probs = vec![0.0; m + 1];
    for (th, w) in configs {
        binomial_into(&mut probs, m, ramsey_probability(th - mean_shift, protocol), w);
    }
    Ok(OutcomeDistribution::normalized(probs))
}

/// Binomial(M, p(θ)) averaged over θ ~ N(0, f0).
pub fn rho_static_gauss(m: usize, f0: f64, protocol: &RamseyProtocol) -> Result<OutcomeDistribution> {
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(invalid(format!("f0 must be positive, got {f0}")));
    }
    let sigma = f0.sqrt();
    let eval = |panels: usize| -> Vec<f64> {
        // composite 10-point Gauss-Legendre on [−8σ, 8σ]
        const X: [f64; 5] = [
            0.148_874_338_981_631_2,
            0.433_395_394_129_247_2,
            0.679_409_568_299_024_4,
            0.865_063_366_688_984_5,
            0.973_906_528_517_171_7,
        ];
        const W: [f64; 5] = [
            0.295_524_224_714_752_9,
            0.269_266_719_309_996_4,
            0.219_086_362_515_982,
            0.149_451_349_150_580_6,
            0.066_671_344_308_688_1,
        ];
        let mut probs = vec![0.0; m + 1];
        let (lo, hi) = (-8.0 * sigma, 8.0 * sigma);
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * h;
            for (x, w) in X.iter().zip(W) {
                for th in [c - 0.5 * h * x, c + 0.5 * h * x] {
                    let dens = (-th * th / (2.0 * f0)).exp() / (2.0 * std::f64::consts::PI * f0).sqrt();
                    binomial_into(&mut probs, m, ramsey_probability(th, protocol), 0.5 * h * w * dens);
                }
            }
        }
        probs
    };
    // panel width must resolve the binomial's θ-width ~ 1/√M
    let mut panels = ((16.0 * sigma * (m as f64).sqrt()).ceil() as usize).clamp(8, 20_000);
    let mut prev = eval(panels);
    for _ in 0..6 {
        panels *= 2;
        let cur = eval(panels);
        let diff: f64 = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).sum();
        prev = cur;
        if diff < 1e-11 {
            let mass: f64 = prev.iter().sum();
            if (mass - 1.0).abs() > 1e-8 {
                return Err(Error::Quadrature { value: mass, error: (mass - 1.0).abs() });
            }
            return Ok(OutcomeDistribution::normalized(prev));
        }
    }
    let mass: f64 = prev.iter().sum();
    Err(Error::Quadrature { value: mass, error: (mass - 1.0).abs() })
}

/// Variance of m/M including lag correlations: r₁(1 − r₁)/M + (2/M²) Σ_{k<M} (M − k) r̃₂(k).
///
/// `r2[0]` is r̃₂(1); missing lags count as zero.
pub fn variance_predicted(m: usize, r1: f64, r2: &[f64]) -> f64 {
    let mf = m as f64;
    let corr: f64 = r2.iter().take(m.saturating_sub(1)).enumerate().map(|(i, r)| (mf - (i + 1) as f64) * r).sum();
    r1 * (1.0 - r1) / mf + 2.0 / (mf * mf) * corr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TlsParams;

    #[test]
    fn binomial_basics() {
        let d = rho_binomial(1, 0.3).unwrap();
        assert!((d.probs()[0] - 0.7).abs() < 1e-15 && (d.probs()[1] - 0.3).abs() < 1e-15);
        let d = rho_binomial(100, 0.826).unwrap();
        assert!((d.fraction_std() - 0.0379).abs() < 5e-5);
        assert!((d.mean() - 82.6).abs() < 1e-9);
        let big = rho_binomial(100_000, 0.4).unwrap();
        assert!((big.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert_eq!(rho_binomial(5, 1.0).unwrap().probs()[5], 1.0);
    }

    #[test]
    fn single_tls_two_term_mixture() {
        let p = RamseyProtocol::default();
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.4, 1e-9).unwrap()]);
        let d = rho_static_tls(20, &e, &p).unwrap();
        let a = rho_binomial(20, ramsey_probability(0.4, &p)).unwrap();
        let b = rho_binomial(20, ramsey_probability(-0.4, &p)).unwrap();
        for i in 0..=20 {
            assert!((d.probs()[i] - 0.5 * (a.probs()[i] + b.probs()[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coupling_is_binomial() {
        let p = RamseyProtocol::default();
        let e = TlsEnsemble::new(vec![TlsParams::new(0.0, 0.2, 0.5).unwrap(); 3]);
        let d = rho_static_tls(50, &e, &p).unwrap();
        let b = rho_binomial(50, ramsey_probability(0.0, &p)).unwrap();
        assert_eq!(d, b);
    }

    #[test]
    fn four_tls_fine_structure() {
        let p = RamseyProtocol::default();
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.2, 1e-9).unwrap(); 4]);
        let d = rho_static_tls(100, &e, &p).unwrap();
        let peaks = d.local_maxima(1e-4);
        assert_eq!(peaks.len(), 5, "{peaks:?}");
        for (n, &pk) in peaks.iter().enumerate() {
            let th = 0.2 * (2.0 * n as f64 - 4.0);
            let target = 100.0 * ramsey_probability(-th, &p);
            assert!((pk as f64 - target).abs() <= 1.5, "peak {pk} vs {target}");
        }
    }

    #[test]
    fn static_gauss_limits() {
        let p = RamseyProtocol::default();
        let d = rho_static_gauss(100, 1e-8, &p).unwrap();
        let b = rho_binomial(100, ramsey_probability(0.0, &p)).unwrap();
        assert!(d.total_variation(&b).unwrap() < 1e-6);
        let d = rho_static_gauss(100, 0.16, &p).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d.local_maxima(1e-6).len(), 1);
    }

    #[test]
    fn variance_reduces_to_binomial() {
        assert!((variance_predicted(100, 0.8, &[]) - 0.0016).abs() < 1e-15);
        assert!(variance_predicted(100, 0.8, &[0.01; 99]) > 0.0016);
    }
}
