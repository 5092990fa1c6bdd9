use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::CorrelatorEstimate;

/// Which mean is subtracted before forming centered products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// One mean over the whole dataset.
    #[default]
    Global,
    /// Each repetition centered on its own mean; estimates averaged over repetitions.
    PerRepetition,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelatorOptions {
    pub k_max: usize,
    /// Pairs (k, l) with 1 <= k < l.
    pub triple_lags: Vec<(usize, usize)>,
    pub centering: Centering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimates {
    pub r1: CorrelatorEstimate,
    /// r̃₂(k) for k = 0..=k_max.
    pub r2: Vec<CorrelatorEstimate>,
    /// r̃₃(k, l) in the order of `triple_lags`.
    pub r3: Vec<((usize, usize), CorrelatorEstimate)>,
}

/// Raw sums of one unit (a repetition or a pseudo-repetition chunk).
#[derive(Clone, Default)]
struct UnitSums {
    n: f64,
    s: f64,
    // per lag k: [Σ x_{n+k}x_n, Σ x_{n+k}, Σ x_n, count]
    pairs: Vec<[f64; 4]>,
    // per triple: [Σ xxx, Σ x_l x_k, Σ x_l x_0, Σ x_k x_0, Σ x_l, Σ x_k, Σ x_0, count]
    triples: Vec<[f64; 8]>,
}

impl UnitSums {
    fn compute(x: &[u8], k_max: usize, triples: &[(usize, usize)]) -> Self {
        let n = x.len();
        let s: u64 = x.iter().map(|b| *b as u64).sum();
        let pairs = (0..=k_max)
            .map(|k| {
                let m = n - k;
                let (mut p, mut a, mut b) = (0u64, 0u64, 0u64);
                for i in 0..m {
                    let (u, v) = (x[i + k], x[i]);
                    p += (u & v) as u64;
                    a += u as u64;
                    b += v as u64;
                }
                [p as f64, a as f64, b as f64, m as f64]
            })
            .collect();
        let triples = triples
            .iter()
            .map(|&(k, l)| {
                let m = n - l;
                let mut acc = [0u64; 7];
                for i in 0..m {
                    let (xl, xk, x0) = (x[i + l], x[i + k], x[i]);
                    acc[0] += (xl & xk & x0) as u64;
                    acc[1] += (xl & xk) as u64;
                    acc[2] += (xl & x0) as u64;
                    acc[3] += (xk & x0) as u64;
                    acc[4] += xl as u64;
                    acc[5] += xk as u64;
                    acc[6] += x0 as u64;
                }
                let mut out = [0.0; 8];
                for (o, a) in out.iter_mut().zip(acc) {
                    *o = a as f64;
                }
                out[7] = m as f64;
                out
            })
            .collect();
        UnitSums { n: n as f64, s: s as f64, pairs, triples }
    }

    fn add(&mut self, o: &UnitSums) {
        self.n += o.n;
        self.s += o.s;
        for (a, b) in self.pairs.iter_mut().zip(&o.pairs) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.triples.iter_mut().zip(&o.triples) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    fn sub(&self, o: &UnitSums) -> UnitSums {
        let mut r = self.clone();
        r.n -= o.n;
        r.s -= o.s;
        for (a, b) in r.pairs.iter_mut().zip(&o.pairs) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
        }
        for (a, b) in r.triples.iter_mut().zip(&o.triples) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
        }
        r
    }

    /// [r₁, r̃₂(0..), r̃₃(..)] centered on `mu`.
    fn statistics(&self, mu: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + self.pairs.len() + self.triples.len());
        out.push(self.s / self.n);
        for [p, a, b, m] in &self.pairs {
            out.push((p - mu * (a + b) + mu * mu * m) / m);
        }
        for t in &self.triples {
            let v = t[0] - mu * (t[1] + t[2] + t[3]) + mu * mu * (t[4] + t[5] + t[6]) - mu.powi(3) * t[7];
            out.push(v / t[7]);
        }
        out
    }

    fn centered_statistics(&self) -> Vec<f64> {
        self.statistics(self.s / self.n)
    }
}

/// Number of contiguous chunks a single repetition is split into for error estimation.
const SINGLE_SERIES_CHUNKS: usize = 16;

/// r̂₁, r̃̂₂(k ≤ k_max) and r̃̂₃(k, l) with jackknife errors over repetitions.
///
/// A single series is split into 16 contiguous chunks that play the role of repetitions;
/// products straddling chunk boundaries are then dropped.
pub fn estimate_correlators<S: AsRef<[u8]> + Sync>(series: &[S], options: &CorrelatorOptions) -> Result<CorrelatorEstimates> {
    if series.is_empty() {
        return Err(invalid("no series to estimate from"));
    }
    let l_max = options.triple_lags.iter().map(|p| p.1).max().unwrap_or(0).max(options.k_max);
    for &(k, l) in &options.triple_lags {
        if !(1 <= k && k < l) {
            return Err(invalid(format!("triple lags need 1 <= k < l, got ({k}, {l})")));
        }
    }
    let units: Vec<&[u8]> = if series.len() == 1 {
        let s = series[0].as_ref();
        let chunk = s.len() / SINGLE_SERIES_CHUNKS;
        if chunk < l_max + 1 {
            return Err(invalid(format!("series of length {} too short for lag {l_max} with chunked errors", s.len())));
        }
        s.chunks_exact(chunk).take(SINGLE_SERIES_CHUNKS).collect()
    } else {
        series.iter().map(|s| s.as_ref()).collect()
    };
    if let Some(s) = units.iter().find(|s| s.len() < l_max + 1) {
        return Err(invalid(format!("series of length {} too short for lag {l_max}", s.len())));
    }
    if units.iter().any(|s| s.iter().any(|b| *b > 1)) {
        return Err(invalid("outcomes must be 0 or 1"));
    }

    let sums: Vec<UnitSums> =
        units.par_iter().map(|x| UnitSums::compute(x, options.k_max, &options.triple_lags)).collect();
    let r = sums.len();

    let (full, leave_out): (Vec<f64>, Vec<Vec<f64>>) = match options.centering {
        Centering::Global => {
            let mut total = sums[0].clone();
            sums[1..].iter().for_each(|u| total.add(u));
            let full = total.centered_statistics();
            let loo = sums.iter().map(|u| total.sub(u).centered_statistics()).collect();
            (full, loo)
        }
        Centering::PerRepetition => {
            let each: Vec<Vec<f64>> = sums.iter().map(UnitSums::centered_statistics).collect();
            let dim = each[0].len();
            let mean_of = |skip: Option<usize>| -> Vec<f64> {
                let mut acc = vec![0.0; dim];
                let mut count = 0.0;
                for (i, e) in each.iter().enumerate() {
                    if Some(i) == skip {
                        continue;
                    }
                    acc.iter_mut().zip(e).for_each(|(a, v)| *a += v);
                    count += 1.0;
                }
                acc.iter_mut().for_each(|a| *a /= count);
                acc
            };
            (mean_of(None), (0..r).map(|i| mean_of(Some(i))).collect())
        }
    };

    let stderr: Vec<f64> = (0..full.len())
        .map(|j| {
            let mean = leave_out.iter().map(|v| v[j]).sum::<f64>() / r as f64;
            let ss: f64 = leave_out.iter().map(|v| (v[j] - mean).powi(2)).sum();
            ((r as f64 - 1.0) / r as f64 * ss).sqrt()
        })
        .collect();

    let total_n: u64 = units.iter().map(|s| s.len() as u64).sum();
    let est = |j: usize, n: u64| CorrelatorEstimate { value: full[j], stderr: stderr[j], n_samples: n };
    let r2 = (0..=options.k_max).map(|k| est(1 + k, total_n - (r * k) as u64)).collect();
    let r3 = options
        .triple_lags
        .iter()
        .enumerate()
        .map(|(i, &(k, l))| ((k, l), est(2 + options.k_max + i, total_n - (r * l) as u64)))
        .collect();
    Ok(CorrelatorEstimates { r1: est(0, total_n), r2, r3 })
}
