//! Hard-coded parameter sets for the published figures and table.

use std::f64::consts::TAU;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::runs::{artifacts, compare_data, distribution_data};
use super::{Artifacts, ScenarioConfig, ScenarioKind, Table};
use crate::acquisition::{rho_binomial, rho_static_gauss, rho_static_tls, variance_predicted};
use crate::error::{invalid, Error, Result};
use crate::estimate::{noise_power_spectrum, outcome_power_spectrum, BlockAccumulator};
use crate::gaussian::{infer_f_from_measurements, log_approx_f_k, non_gaussian_sign_flag, r3_gauss_centered, tls_spectrum_theory};
use crate::model::{GaussianNoiseSpec, RamseyProtocol, TlsEnsemble, TlsParams};
use crate::row;
use crate::simulate::{sample_tls_frequency_path, Experiment, Modulation, NoiseModel, SimulationConfig};
use crate::theory::Theory;
use crate::tls::{approx_r2, tls_gaussian_correlators, R2Approx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "fig2a")]
    Fig2a,
    #[serde(rename = "fig2b")]
    Fig2b,
    #[serde(rename = "fig2c")]
    Fig2c,
    #[serde(rename = "fig2d")]
    Fig2d,
    #[serde(rename = "fig3")]
    Fig3,
    #[serde(rename = "fig4")]
    Fig4,
    #[serde(rename = "fig5")]
    Fig5,
    #[serde(rename = "fig6")]
    Fig6,
    #[serde(rename = "fig7-spectrum")]
    Fig7Spectrum,
    #[serde(rename = "tableD1")]
    TableD1,
    #[serde(rename = "psC1")]
    PsC1,
}

impl Target {
    pub const ALL: [Target; 11] = [
        Target::Fig2a,
        Target::Fig2b,
        Target::Fig2c,
        Target::Fig2d,
        Target::Fig3,
        Target::Fig4,
        Target::Fig5,
        Target::Fig6,
        Target::Fig7Spectrum,
        Target::TableD1,
        Target::PsC1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Fig2a => "fig2a",
            Target::Fig2b => "fig2b",
            Target::Fig2c => "fig2c",
            Target::Fig2d => "fig2d",
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
            Target::Fig6 => "fig6",
            Target::Fig7Spectrum => "fig7-spectrum",
            Target::TableD1 => "tableD1",
            Target::PsC1 => "psC1",
        }
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown target '{s}'")))
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn protocol() -> RamseyProtocol {
    RamseyProtocol::default()
}

/// A derived scenario that keeps the caller's run sizes and analysis settings.
fn derive(base: &ScenarioConfig, noise: NoiseModel, seed_offset: u64) -> ScenarioConfig {
    let mut c = base.clone();
    c.scenario = ScenarioKind::Compare;
    c.protocol = protocol();
    c.noise = noise;
    c.modulation = None;
    c.target = None;
    c.run.seed = base.run.seed.wrapping_add(seed_offset);
    c
}

fn tls(ensemble: TlsEnsemble) -> NoiseModel {
    NoiseModel::Tls { tls: ensemble }
}

fn gauss(spectrum: GaussianNoiseSpec) -> NoiseModel {
    NoiseModel::Gaussian { spectrum, k_corr: None }
}

fn ladder(v: f64, count: usize, n0: f64) -> TlsEnsemble {
    TlsEnsemble::ladder(v, count, 0.75, n0, 1.0).expect("valid ladder")
}

/// Collects per-dataset summaries under their names.
struct Collector {
    tables: Vec<Table>,
    summary: Map<String, Value>,
}

impl Collector {
    fn new() -> Self {
        Collector { tables: Vec::new(), summary: Map::new() }
    }
    fn add(&mut self, name: &str, table: Table, summary: Value) {
        self.tables.push(table);
        self.summary.insert(name.to_string(), summary);
    }
    fn finish(self, base: &ScenarioConfig) -> Artifacts {
        artifacts(base, self.tables, Value::Object(self.summary))
    }
}

/// Compare table plus theory-only approximations for a TLS ensemble.
fn tls_dataset(col: &mut Collector, base: &ScenarioConfig, name: &str, e: &TlsEnsemble, seed_offset: u64) -> Result<super::runs::CompareResult> {
    let cfg = derive(base, tls(e.clone()), seed_offset);
    let res = compare_data(&cfg, name)?;
    let (k_max, off) = (cfg.analysis.k_max, cfg.analysis.triple_offset);
    let p = cfg.protocol;
    let f = tls_gaussian_correlators(e, &p, k_max + off)?;
    let g = Theory::new(&NoiseModel::Correlators { f, k_corr: None }, &p, k_max + off)?;
    let mut t = Table::new(format!("{name}_approx"), &["k", "r2_gaussian_approx", "r3_gaussian_approx", "r2_short_approx"]);
    for k in 1..=k_max {
        t.push(row![k, g.r2(k)?, g.r3(k, k + off)?, approx_r2(e, &p, k, R2Approx::Short).ok()]);
    }
    col.add(name, res.table.clone(), res.summary.clone());
    col.tables.push(t);
    Ok(res)
}

fn fig2a(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    tls_dataset(&mut col, base, "fig2a_v0.2", &ladder(0.2, 10, 0.0), 0)?;
    tls_dataset(&mut col, base, "fig2a_v2", &ladder(2.0, 10, 0.0), 1)?;
    Ok(col.finish(base))
}

fn fig2b(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.75, 1e-3)?]);
    let res = tls_dataset(&mut col, base, "fig2b", &e, 0)?;
    // Gaussian model inferred from the simulated r₁ and r̃₂
    let (k_max, off) = (base.analysis.k_max, base.analysis.triple_offset);
    let est = &res.estimates;
    let r2: Vec<f64> = est.r2[1..].iter().map(|v| v.value).collect();
    let mut t = Table::new("fig2b_inferred", &["k", "f_inferred", "r3_inferred_gaussian"]);
    match infer_f_from_measurements(est.r1.value, &r2, &protocol()) {
        Ok(f) => {
            for k in 1..=k_max {
                t.push(row![k, f.get(k), r3_gauss_centered(&f, &protocol(), k, k + off).ok()]);
            }
        }
        Err(e) => {
            col.summary.insert("fig2b_inferred_error".into(), json!(e.to_string()));
        }
    }
    col.tables.push(t);
    Ok(col.finish(base))
}

fn fig2c(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let e = ladder(2.0, 5, 7.0);
    tls_dataset(&mut col, base, "fig2c", &e, 0)?;
    let p = protocol();
    let singles: Vec<Theory> = e
        .iter()
        .map(|t| Theory::new(&tls(TlsEnsemble::new(vec![*t])), &p, base.analysis.k_max))
        .collect::<Result<_>>()?;
    let header: Vec<String> = std::iter::once("k".to_string()).chain((1..=e.len()).map(|n| format!("r2_tls{n}"))).collect();
    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut t = Table::new("fig2c_partials", &header);
    for k in 1..=base.analysis.k_max {
        let mut r = row![k];
        for s in &singles {
            r.extend(row![s.r2(k)?]);
        }
        t.push(r);
    }
    col.tables.push(t);
    Ok(col.finish(base))
}

fn asymmetric_ladder(v: f64, count: usize) -> Result<TlsEnsemble> {
    (1..=count)
        .map(|n| {
            let n = n as f64;
            TlsParams::new(v, (-0.75 * (n + 1.0)).exp() / 2.0, (-0.75 * n).exp() / 2.0)
        })
        .collect::<Result<Vec<_>>>()
        .map(TlsEnsemble::new)
}

fn fig2d(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let sym = tls_dataset(&mut col, base, "fig2d_symmetric", &ladder(0.2, 5, 0.0), 0)?;
    let asym = tls_dataset(&mut col, base, "fig2d_asymmetric", &asymmetric_ladder(0.2, 5)?, 1)?;
    let p = protocol();
    let flag = |e: &crate::estimate::CorrelatorEstimates| non_gaussian_sign_flag(&e.r2, &e.r3, &p, 10);
    col.summary.insert("sign_test_symmetric".into(), json!(flag(&sym.estimates)));
    col.summary.insert("sign_test_asymmetric".into(), json!(flag(&asym.estimates)));
    Ok(col.finish(base))
}

fn gaussian_compare(col: &mut Collector, base: &ScenarioConfig, name: &str, spec: GaussianNoiseSpec, seed_offset: u64) -> Result<()> {
    let cfg = derive(base, gauss(spec), seed_offset);
    let res = compare_data(&cfg, name)?;
    col.add(name, res.table, res.summary);
    Ok(())
}

fn fig3(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    gaussian_compare(&mut col, base, "fig3", GaussianNoiseSpec::ExpCorrelated { d_corr: 6.51, tau_corr: 20.0 }, 0)?;
    Ok(col.finish(base))
}

const ONE_OVER_F: [(f64, f64, &str); 2] = [(0.04087, 1e-3, "fig4_wmin1e-3"), (0.02574, 1e-5, "fig4_wmin1e-5")];

fn fig4(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let p = protocol();
    for (i, (d, w, name)) in ONE_OVER_F.iter().enumerate() {
        let spec = GaussianNoiseSpec::OneOverF { d_fl: *d, omega_min: *w };
        gaussian_compare(&mut col, base, name, spec.clone(), i as u64)?;
        let th = Theory::new(&gauss(spec), &p, base.analysis.k_max)?;
        let f = th.gaussian_correlators()?;
        let mut t = Table::new(format!("{name}_log_approx"), &["k", "f_k", "f_k_log_approx"]);
        for k in 1..=base.analysis.k_max {
            t.push(row![k, f.get(k), log_approx_f_k(*d, *w, &p, k)]);
        }
        col.tables.push(t);
        col.summary.insert(format!("{name}_f0"), json!(f.f0()));
    }
    Ok(col.finish(base))
}

/// Static-limit and binomial curves without simulation.
fn static_table(name: &str, m: usize, stat: &crate::acquisition::OutcomeDistribution, r1: f64) -> Result<Table> {
    let binom = rho_binomial(m, r1)?;
    let mut t = Table::new(name, &["m", "fraction", "static_limit", "binomial"]);
    for i in 0..=m {
        t.push(row![i, i as f64 / m as f64, stat.probs()[i], binom.probs()[i]]);
    }
    Ok(t)
}

/// Independent short records of `record` cycles, as many as the caller's cycle budget allows.
fn short_records(base: &ScenarioConfig, noise: NoiseModel, record: usize, seed_offset: u64) -> ScenarioConfig {
    let mut c = derive(base, noise, seed_offset);
    let total = base.run.cycles.saturating_mul(base.run.repetitions);
    c.run.cycles = record;
    c.run.repetitions = (total / record).max(2);
    c.scenario = ScenarioKind::Distribution;
    c
}

const BLOCKS: [usize; 2] = [30, 100];

fn simulated_distributions(col: &mut Collector, base: &ScenarioConfig, name: &str, noise: NoiseModel, seed_offset: u64) -> Result<()> {
    for m in BLOCKS {
        let mut c = short_records(base, noise.clone(), 100, seed_offset);
        c.analysis.block_size = m;
        let d = distribution_data(&c, &format!("{name}_m{m}"))?;
        col.add(&format!("{name}_m{m}"), d.table, d.summary);
    }
    Ok(())
}

fn fig5(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let p = protocol();
    for v in [0.05, 0.2] {
        for (label, e) in [("single", TlsEnsemble::new(vec![TlsParams::symmetric(v, 1e-3)?])), ("four", ladder(v, 4, 7.0))] {
            let r1 = Theory::new(&tls(e.clone()), &p, 1)?.r1();
            for m in BLOCKS {
                let name = format!("fig5_static_{label}_v{v}_m{m}");
                let stat = rho_static_tls(m, &e, &p)?;
                col.add(&name, static_table(&name, m, &stat, r1)?, json!({ "r1": r1, "local_maxima_static": stat.local_maxima(0.005) }));
            }
        }
    }
    for (i, w) in [0.02, 0.001].iter().enumerate() {
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.2, *w)?]);
        simulated_distributions(&mut col, base, &format!("fig5c_w{w}"), tls(e), i as u64)?;
    }
    for (i, n0) in [5.0, 7.0].iter().enumerate() {
        simulated_distributions(&mut col, base, &format!("fig5d_n0_{n0}"), tls(ladder(0.2, 4, *n0)), 10 + i as u64)?;
    }
    Ok(col.finish(base))
}

fn fig6(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let p = protocol();
    for f0 in [0.01, 0.16] {
        let r1 = crate::gaussian::r1_gauss(f0, &p);
        for m in BLOCKS {
            let name = format!("fig6_static_f0{f0}_m{m}");
            let stat = rho_static_gauss(m, f0, &p)?;
            col.add(&name, static_table(&name, m, &stat, r1)?, json!({ "r1": r1, "local_maxima_static": stat.local_maxima(0.005) }));
        }
    }
    let specs = [
        ("fig6b_tau20", GaussianNoiseSpec::ExpCorrelated { d_corr: 0.41, tau_corr: 20.0 }),
        ("fig6b_tau100", GaussianNoiseSpec::ExpCorrelated { d_corr: 32.11, tau_corr: 100.0 }),
        ("fig6c_wmin1e-3", GaussianNoiseSpec::OneOverF { d_fl: 0.002575, omega_min: 1e-3 }),
        ("fig6c_wmin1e-5", GaussianNoiseSpec::OneOverF { d_fl: 0.02574, omega_min: 1e-5 }),
    ];
    for (i, (name, spec)) in specs.into_iter().enumerate() {
        simulated_distributions(&mut col, base, name, gauss(spec), i as u64)?;
    }
    Ok(col.finish(base))
}

/// Modulation frequency used for the spectrum target: ω_p t_cyc = 2π·0.0173.
pub const SPECTRUM_CYCLE_FRACTION: f64 = 0.0173;

fn fig7_spectrum(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let p = protocol();
    let omega_p = TAU * SPECTRUM_CYCLE_FRACTION / p.t_cyc();
    let modulation = Modulation { a_p: 0.1, omega_p };
    // jitter with N Δ_cyc = 5 at the shorter record
    let sizes = [1usize << 13, 1 << 14];
    let sigma_jit = (2.0 * 5.0 / (sizes[0] as f64 * omega_p * omega_p)).sqrt();
    let mut heights = Map::new();
    for (label, sigma) in [("no_jitter", 0.0), ("jitter", sigma_jit)] {
        let mut peak = Vec::new();
        for (i, n) in sizes.iter().enumerate() {
            let mut c = derive(base, NoiseModel::None, i as u64);
            c.scenario = ScenarioKind::Spectrum;
            c.modulation = Some(modulation);
            c.run.cycles = *n;
            c.run.sigma_cyc = sigma;
            let exp = Experiment::new(c.simulation())?;
            let runs = exp.map(|s| s.into_bits());
            let spec = outcome_power_spectrum(&runs)?;
            let expected = (*n as f64 * SPECTRUM_CYCLE_FRACTION).round() as usize;
            let a = modulation.phase_amplitude(&p);
            let name = format!("fig7_{label}_n{n}");
            let mut t = Table::new(&name, &["m", "r_sim", "r_peak_theory"]);
            for (m, r) in spec.r.iter().enumerate() {
                let folded = if m > n / 2 { n - m } else { m };
                t.push(row![m, *r, modulation_peak_theory_checked(a, &p, *n, omega_p, folded, sigma)]);
            }
            let found = spec.peak_bin().unwrap_or(0);
            let summary = json!({
                "n": n,
                "sigma_cyc": sigma,
                "expected_peak_bin": expected,
                "peak_bin": found,
                "mirror_bin": n - found,
                "mirror_height": spec.r[n - found],
                "peak_height": spec.r[found],
                "peak_theory": crate::estimate::modulation_peak_theory(a, &p, *n, omega_p, expected as f64, sigma),
            });
            peak.push(spec.r[expected]);
            col.add(&name, t, summary);
        }
        heights.insert(format!("{label}_height_ratio"), json!(peak[1] / peak[0]));
    }
    col.summary.insert("ratios".into(), Value::Object(heights));
    Ok(col.finish(base))
}

fn modulation_peak_theory_checked(a: f64, p: &RamseyProtocol, n: usize, omega_p: f64, m: usize, sigma: f64) -> Option<f64> {
    // the peak form only holds near resonance
    let dm = TAU * m as f64 / n as f64 - omega_p * p.t_cyc();
    (dm.abs() < 0.5).then(|| crate::estimate::modulation_peak_theory(a, p, n, omega_p, m as f64, sigma))
}

/// One row of the block-broadening table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableD1Row {
    pub noise: String,
    pub setup: String,
    pub blocks: u64,
    pub scaled_std_sim: f64,
    pub scaled_std_predicted: f64,
    pub scaled_std_binomial: f64,
    pub reference: f64,
}

/// The six noise settings of the broadening table, with their reference √M σ values.
pub fn table_d1_settings() -> Vec<(String, String, NoiseModel, f64)> {
    vec![
        ("TLS".into(), "n0=5".into(), tls(ladder(0.2, 4, 5.0)), 1.283),
        ("TLS".into(), "n0=7".into(), tls(ladder(0.2, 4, 7.0)), 1.696),
        ("Gaussian EC".into(), "tau_corr=20".into(), gauss(GaussianNoiseSpec::ExpCorrelated { d_corr: 6.51, tau_corr: 20.0 }), 0.605),
        ("Gaussian EC".into(), "tau_corr=100".into(), gauss(GaussianNoiseSpec::ExpCorrelated { d_corr: 32.11, tau_corr: 100.0 }), 1.120),
        ("Gaussian 1/f".into(), "omega_min=1e-3".into(), gauss(GaussianNoiseSpec::OneOverF { d_fl: 0.04087, omega_min: 1e-3 }), 0.956),
        ("Gaussian 1/f".into(), "omega_min=1e-5".into(), gauss(GaussianNoiseSpec::OneOverF { d_fl: 0.02574, omega_min: 1e-5 }), 1.378),
    ]
}

/// √M σ of m/M from `blocks_per_rep × repetitions` consecutive blocks of M cycles.
pub fn table_d1_row(noise: &NoiseModel, m: usize, blocks_per_rep: usize, repetitions: usize, seed: u64) -> Result<(f64, f64, f64, u64)> {
    let p = protocol();
    let cfg = SimulationConfig::new(p, noise.clone())
        .cycles(m * blocks_per_rep)
        .repetitions(repetitions)
        .seed(seed);
    let exp = Experiment::new(cfg)?;
    let parts = exp.map(|s| {
        let mut a = BlockAccumulator::new(m).expect("m >= 1");
        a.add(s.bits());
        a
    });
    let mut acc = BlockAccumulator::new(m)?;
    for a in &parts {
        acc.merge(a)?;
    }
    let th = Theory::new(noise, &p, m - 1)?;
    let r1 = th.r1();
    let predicted = (variance_predicted(m, r1, &th.r2_series(m - 1)?) * m as f64).sqrt();
    Ok((acc.scaled_std()?, predicted, (r1 * (1.0 - r1)).sqrt(), acc.blocks()))
}

pub const TABLE_D1_BLOCK: usize = 10_000;

fn table_d1(base: &ScenarioConfig) -> Result<Artifacts> {
    let m = TABLE_D1_BLOCK;
    let total = base.run.cycles.saturating_mul(base.run.repetitions);
    let reps = base.run.repetitions.max(1);
    let per_rep = (total / reps / m).max(1);
    let mut t = Table::new(
        "tableD1",
        &["noise", "setup", "blocks", "scaled_std_sim", "scaled_std_predicted", "scaled_std_binomial", "reference"],
    );
    let mut rows = Vec::new();
    for (i, (noise, setup, model, reference)) in table_d1_settings().into_iter().enumerate() {
        let (sim, pred, binom, blocks) = table_d1_row(&model, m, per_rep, reps, base.run.seed.wrapping_add(i as u64))?;
        t.push(row![noise.as_str(), setup.as_str(), blocks, sim, pred, binom, reference]);
        rows.push(TableD1Row { noise, setup, blocks, scaled_std_sim: sim, scaled_std_predicted: pred, scaled_std_binomial: binom, reference });
    }
    Ok(artifacts(base, vec![t], json!({ "block_size": m, "rows": rows })))
}

/// Log-spaced band averages of a one-sided spectrum.
fn log_bins(omega: &[f64], s: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let lo = omega[1].ln();
    let hi = omega[omega.len() - 1].ln();
    let width = (hi - lo) / bins as f64;
    let mut acc = vec![(0.0, 0.0, 0usize); bins];
    for (w, v) in omega.iter().zip(s).skip(1) {
        let b = (((w.ln() - lo) / width) as usize).min(bins - 1);
        acc[b].0 += w.ln();
        acc[b].1 += v;
        acc[b].2 += 1;
    }
    acc.into_iter().filter(|a| a.2 > 0).map(|(lw, v, c)| ((lw / c as f64).exp(), v / c as f64, c)).collect()
}

fn ps_c1(base: &ScenarioConfig) -> Result<Artifacts> {
    let mut col = Collector::new();
    let p = protocol();
    let dt = base.run.dt.unwrap_or(0.1 * p.t_r());
    let steps = (base.run.cycles as f64 * p.t_cyc() / dt).round() as usize;
    for (i, count) in [10usize, 20].iter().enumerate() {
        // W01 = W10 = e^{−αn}/t_R
        let e = TlsEnsemble::new(
            (1..=*count)
                .map(|n| TlsParams::new(0.2, (-0.75 * n as f64).exp(), (-0.75 * n as f64).exp()))
                .collect::<Result<Vec<_>>>()?,
        );
        let seed = base.run.seed.wrapping_add(i as u64);
        let per_rep: Vec<Vec<f64>> = (0..base.run.repetitions as u64)
            .into_par_iter()
            .map(|r| -> Result<Vec<f64>> {
                let path = sample_tls_frequency_path(&e, steps, dt, seed, r)?;
                Ok(noise_power_spectrum(&[path], dt)?.s)
            })
            .collect::<Result<_>>()?;
        let omega = noise_power_spectrum(&[vec![0.0; steps]], dt)?.omega;
        let r = per_rep.len() as f64;
        let mean: Vec<f64> = (0..omega.len()).map(|k| per_rep.iter().map(|v| v[k]).sum::<f64>() / r).collect();
        let name = format!("psC1_{count}tls");
        let mut t = Table::new(&name, &["omega", "s_sim", "s_theory", "bins_averaged"]);
        let binned = log_bins(&omega, &mean, 120);
        for (w, v, c) in &binned {
            t.push(row![*w, *v, tls_spectrum_theory(&e, *w), *c]);
        }
        col.add(&name, t, json!({ "steps": steps, "dt": dt, "repetitions": base.run.repetitions }));
    }
    Ok(col.finish(base))
}

/// Produces the datasets for one target; run sizes and seed come from `base.run`.
pub fn reproduce(target: Target, base: &ScenarioConfig) -> Result<Artifacts> {
    if base.run.cycles == 0 || base.run.repetitions == 0 {
        return Err(invalid("cycles and repetitions must be >= 1"));
    }
    match target {
        Target::Fig2a => fig2a(base),
        Target::Fig2b => fig2b(base),
        Target::Fig2c => fig2c(base),
        Target::Fig2d => fig2d(base),
        Target::Fig3 => fig3(base),
        Target::Fig4 => fig4(base),
        Target::Fig5 => fig5(base),
        Target::Fig6 => fig6(base),
        Target::Fig7Spectrum => fig7_spectrum(base),
        Target::TableD1 => table_d1(base),
        Target::PsC1 => ps_c1(base),
    }
}
