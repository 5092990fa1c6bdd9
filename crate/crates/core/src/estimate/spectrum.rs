use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::model::RamseyProtocol;

/// Periodogram R(m) = E|Σ_n x_n e^{2πimn/N}|², averaged over repetitions, without 1/N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub r: Vec<f64>,
    pub repetitions: usize,
    pub convention: String,
}

impl SpectrumEstimate {
    pub fn len(&self) -> usize {
        self.r.len()
    }
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Index of the largest bin in 1..=N/2.
    pub fn peak_bin(&self) -> Option<usize> {
        let half = self.r.len() / 2;
        (1..=half).max_by(|a, b| self.r[*a].total_cmp(&self.r[*b]))
    }
}

fn periodograms<S: AsRef<[f64]> + Sync>(paths: &[S]) -> Result<Vec<Vec<f64>>> {
    let n = paths.first().map(|p| p.as_ref().len()).ok_or_else(|| invalid("no series"))?;
    if n == 0 {
        return Err(invalid("empty series"));
    }
    if paths.iter().any(|p| p.as_ref().len() != n) {
        return Err(invalid("all series must have the same length"));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    Ok(paths
        .par_iter()
        .map(|p| {
            let mut buf: Vec<Complex64> = p.as_ref().iter().map(|v| Complex64::new(*v, 0.0)).collect();
            fft.process(&mut buf);
            buf.iter().map(|c| c.norm_sqr()).collect()
        })
        .collect())
}

fn average(rows: Vec<Vec<f64>>) -> Vec<f64> {
    let count = rows.len() as f64;
    let mut acc = vec![0.0; rows[0].len()];
    for row in &rows {
        acc.iter_mut().zip(row).for_each(|(a, v)| *a += v);
    }
    acc.iter_mut().for_each(|a| *a /= count);
    acc
}

/// Outcome power spectrum of equal-length binary series.
pub fn outcome_power_spectrum<S: AsRef<[u8]> + Sync>(series: &[S]) -> Result<SpectrumEstimate> {
    let as_f: Vec<Vec<f64>> = series.iter().map(|s| s.as_ref().iter().map(|b| *b as f64).collect()).collect();
    let rows = periodograms(&as_f)?;
    Ok(SpectrumEstimate {
        repetitions: rows.len(),
        r: average(rows),
        convention: "R(m) = mean |sum_n x_n exp(+2 pi i m n / N)|^2, no 1/N".into(),
    })
}

/// Frequency-noise spectrum estimated from sampled δω paths on a dt grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrumEstimate {
    pub omega: Vec<f64>,
    pub s: Vec<f64>,
    /// Standard error of the mean over repetitions (zero for one repetition).
    pub stderr: Vec<f64>,
}

/// Ŝ(ω_k) = dt·|Σ_m D(m) e^{iω_k m dt}|²/Ñ at ω_k = 2πk/(Ñ dt), k = 0..Ñ/2.
pub fn noise_power_spectrum<S: AsRef<[f64]> + Sync>(paths: &[S], dt: f64) -> Result<NoiseSpectrumEstimate> {
    if !(dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let rows = periodograms(paths)?;
    let n = rows[0].len();
    let half = n / 2;
    let r = rows.len() as f64;
    let scale = dt / n as f64;
    let mut s = vec![0.0; half + 1];
    let mut s2 = vec![0.0; half + 1];
    for row in &rows {
        for k in 0..=half {
            let v = row[k] * scale;
            s[k] += v / r;
            s2[k] += v * v / r;
        }
    }
    let stderr = s
        .iter()
        .zip(&s2)
        .map(|(m, q)| if r > 1.0 { ((q - m * m).max(0.0) * r / (r - 1.0) / r).sqrt() } else { 0.0 })
        .collect();
    let omega = (0..=half).map(|k| TAU * k as f64 / (n as f64 * dt)).collect();
    Ok(NoiseSpectrumEstimate { omega, s, stderr })
}

/// Leading-order spectral peak from a modulation of phase amplitude A_p, with Gaussian
/// cycle-period jitter σ_cyc (Δ_cyc = ω_p²σ_cyc²/2). Valid near m ≈ Nω_p t_cyc/2π.
pub fn modulation_peak_theory(a_p: f64, protocol: &RamseyProtocol, n: usize, omega_p: f64, m: f64, sigma_cyc: f64) -> f64 {
    let nf = n as f64;
    let pref = a_p * a_p * protocol.phi_r().sin().powi(2) * protocol.coherence().powi(2) / 8.0;
    let dm = TAU * m / nf - omega_p * protocol.t_cyc();
    let dc = omega_p * omega_p * sigma_cyc * sigma_cyc / 2.0;
    if dc == 0.0 {
        // (1 − cos NΔ_m)/Δ_m² with its Δ_m → 0 limit
        let x = nf * dm;
        return if x.abs() < 1e-4 { pref * nf * nf / 2.0 } else { pref * 2.0 * (x / 2.0).sin().powi(2) / (dm * dm) };
    }
    let q = dm * dm + dc * dc;
    let decay = (-nf * dc).exp();
    let x = nf * dm;
    pref / (q * q) * ((dm * dm - dc * dc) * (1.0 - decay * x.cos()) - 2.0 * dm * dc * decay * x.sin() + nf * dc * q)
}

/// The same peak as an exact lag sum, (1/16)A_p²sin²φ_R e^{−2t_R/T2} Σ_{n1,n2} e^{iΔ_m(n1−n2) − Δ_cyc|n1−n2|}.
pub fn modulation_peak_exact(a_p: f64, protocol: &RamseyProtocol, n: usize, omega_p: f64, m: f64, sigma_cyc: f64) -> f64 {
    let nf = n as f64;
    let pref = a_p * a_p * protocol.phi_r().sin().powi(2) * protocol.coherence().powi(2) / 16.0;
    let dm = TAU * m / nf - omega_p * protocol.t_cyc();
    let dc = omega_p * omega_p * sigma_cyc * sigma_cyc / 2.0;
    let mut total = nf;
    for d in 1..n {
        total += 2.0 * (nf - d as f64) * (-dc * d as f64).exp() * (dm * d as f64).cos();
    }
    pref * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_spectra() {
        let s = outcome_power_spectrum(&[vec![1u8; 4]]).unwrap();
        assert_eq!(s.r.len(), 4);
        assert!((s.r[0] - 16.0).abs() < 1e-12 && s.r[1..].iter().all(|v| v.abs() < 1e-12));
        let s = outcome_power_spectrum(&[vec![1u8, 0, 0, 0, 0]]).unwrap();
        assert!(s.r.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn exponent_sign() {
        // x_n = 1 for n = 1 only: X(m) = e^{2πim/N}; check via a complex-free quantity
        let x = vec![1u8, 1, 0, 0, 0, 0, 0, 0];
        let s = outcome_power_spectrum(&[x]).unwrap();
        // |1 + e^{iπ/4}|² = 2 + 2cos(π/4)
        assert!((s.r[1] - (2.0 + 2.0 * (std::f64::consts::PI / 4.0).cos())).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(outcome_power_spectrum(&[vec![1u8; 4], vec![1u8; 5]]).is_err());
    }

    #[test]
    fn zero_path() {
        let e = noise_power_spectrum(&[vec![0.0; 64]], 0.1).unwrap();
        assert!(e.s.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn peak_forms_agree_near_resonance() {
        let p = RamseyProtocol::default();
        let n = 4096;
        let w = TAU * 0.0173 / p.t_cyc();
        for &sigma in &[0.0, 0.5, 2.0] {
            for dm in [-3.0, -1.0, 0.0, 0.4, 1.0, 2.0] {
                let m = (n as f64 * 0.0173).round() + dm;
                let a = modulation_peak_theory(0.1, &p, n, w, m, sigma);
                let b = modulation_peak_exact(0.1, &p, n, w, m, sigma);
                assert!((a / b - 1.0).abs() < 0.02, "sigma {sigma} m {m}: {a} vs {b}");
            }
        }
        assert_eq!(modulation_peak_theory(0.0, &p, n, w, 70.0, 0.3), 0.0);
    }
}
