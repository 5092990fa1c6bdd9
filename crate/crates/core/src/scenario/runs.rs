use serde_json::{json, Value};

use super::{Artifacts, ScenarioConfig, Table};
use crate::acquisition::{rho_binomial, rho_static_gauss, rho_static_tls, variance_predicted, OutcomeDistribution};
use crate::error::Result;
use crate::estimate::{
    estimate_correlators, modulation_peak_theory, outcome_power_spectrum, BlockAccumulator, CorrelatorEstimates,
    CorrelatorOptions,
};
use crate::gaussian::{gaussianity_score, infer_f_from_measurements};
use crate::row;
use crate::simulate::{Experiment, NoiseModel};
use crate::theory::Theory;

pub(crate) fn artifacts(cfg: &ScenarioConfig, tables: Vec<Table>, summary: Value) -> Artifacts {
    // the output location is not part of the experiment
    let mut c = cfg.clone();
    c.outputs.dir = None;
    Artifacts { config: serde_json::to_value(&c).expect("config serializes"), seed: cfg.run.seed, tables, summary }
}

fn has_noise(noise: &NoiseModel) -> bool {
    match noise {
        NoiseModel::None => false,
        NoiseModel::Composite { parts } => parts.iter().any(has_noise),
        NoiseModel::Tls { tls } => !tls.is_empty(),
        _ => true,
    }
}

/// Theory-only correlators in long format.
pub fn analytic(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let (k_max, off) = (cfg.analysis.k_max, cfg.analysis.triple_offset);
    let th = Theory::new(&cfg.noise, &cfg.protocol, k_max + off)?;
    let mut t = Table::new("analytic", &["quantity", "k", "l", "value"]);
    t.push(row!["r1", "", "", th.r1()]);
    if has_noise(&cfg.noise) {
        // Gaussian part of the phase correlators, when there is one
        if let Ok(f) = th.gaussian_correlators() {
            for k in 0..=k_max {
                t.push(row!["f", k, "", f.get(k)]);
            }
        }
        for k in 1..=k_max {
            t.push(row!["r2", k, "", th.r2(k)?]);
        }
        for k in 1..=k_max {
            t.push(row!["r3", k, k + off, th.r3(k, k + off)?]);
        }
    }
    Ok(artifacts(cfg, vec![t], json!({ "r1": th.r1() })))
}

/// Raw outcome records, one row per repetition.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let exp = Experiment::new(cfg.simulation())?;
    let mut t = Table::new("outcomes", &["repetition", "ones", "bits"]);
    let rows = exp.map(|s| {
        let ones: usize = s.bits().iter().map(|b| *b as usize).sum();
        let text: String = s.bits().iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
        (s.repetition(), ones, text)
    });
    let total: usize = rows.iter().map(|r| r.1).sum();
    for (rep, ones, text) in rows {
        t.push(row![rep, ones, text]);
    }
    let n = (cfg.run.cycles * cfg.run.repetitions) as f64;
    let summary = json!({ "r1_sim": total as f64 / n, "warnings": exp.warnings() });
    Ok(artifacts(cfg, vec![t], summary))
}

pub(crate) struct CompareResult {
    pub table: Table,
    pub summary: Value,
    pub estimates: CorrelatorEstimates,
}

/// Simulated versus theoretical r̃₂(k) and r̃₃(k, k + offset).
pub(crate) fn compare_data(cfg: &ScenarioConfig, name: &str) -> Result<CompareResult> {
    let (k_max, off) = (cfg.analysis.k_max, cfg.analysis.triple_offset);
    let exp = Experiment::new(cfg.simulation())?;
    let runs = exp.map(|s| s.into_bits());
    let lags: Vec<(usize, usize)> = (1..=k_max).map(|k| (k, k + off)).collect();
    let opts = CorrelatorOptions { k_max: k_max + off, triple_lags: lags, centering: cfg.analysis.centering };
    let est = estimate_correlators(&runs, &opts)?;
    let th = Theory::new(&cfg.noise, &cfg.protocol, k_max + off)?;

    let mut t = Table::new(name, &["k", "r2_theory", "r2_sim", "r2_stderr", "r3_theory", "r3_sim", "r3_stderr"]);
    let (mut worst2, mut worst3) = (0.0f64, 0.0f64);
    for k in 1..=k_max {
        let (r2t, r3t) = (th.r2(k)?, th.r3(k, k + off)?);
        let (e2, e3) = (est.r2[k], est.r3[k - 1].1);
        worst2 = worst2.max(((e2.value - r2t) / e2.stderr).abs());
        worst3 = worst3.max(((e3.value - r3t) / e3.stderr).abs());
        t.push(row![k, r2t, e2.value, e2.stderr, r3t, e3.value, e3.stderr]);
    }
    let tol = cfg.analysis.tolerance_sigma;

    // Gaussian hypothesis built from the measured r₁ and r̃₂
    let r2_meas: Vec<f64> = est.r2[1..].iter().map(|e| e.value).collect();
    let gauss = infer_f_from_measurements(est.r1.value, &r2_meas, &cfg.protocol).ok();
    let scores: Vec<Value> = match &gauss {
        Some(f) => (1..=k_max.min(10))
            .map(|k| json!({ "k": k, "l": k + off, "z": gaussianity_score(&est.r3[k - 1].1, f, &cfg.protocol, k, k + off).ok() }))
            .collect(),
        None => Vec::new(),
    };

    let summary = json!({
        "r1_theory": th.r1(),
        "r1_sim": est.r1.value,
        "r1_stderr": est.r1.stderr,
        "max_abs_z_r2": worst2,
        "max_abs_z_r3": worst3,
        "tolerance_sigma": tol,
        "pass": worst2 <= tol && worst3 <= tol && ((est.r1.value - th.r1()) / est.r1.stderr).abs() <= tol,
        "gaussianity_z": scores,
        "warnings": exp.warnings(),
    });
    Ok(CompareResult { table: t, summary, estimates: est })
}

pub fn compare(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let c = compare_data(cfg, "compare")?;
    Ok(artifacts(cfg, vec![c.table], c.summary))
}

/// Static-limit distribution for the configured noise, when it has one.
pub(crate) fn static_limit(noise: &NoiseModel, cfg: &ScenarioConfig, m: usize, th: &Theory) -> Option<OutcomeDistribution> {
    match noise {
        NoiseModel::Tls { tls } => rho_static_tls(m, tls, &cfg.protocol).ok(),
        NoiseModel::Gaussian { .. } | NoiseModel::Correlators { .. } | NoiseModel::StaticGaussian { .. } => {
            let f0 = th.gaussian_correlators().ok()?.f0();
            if f0 > 0.0 {
                rho_static_gauss(m, f0, &cfg.protocol).ok()
            } else {
                None
            }
        }
        _ => None,
    }
}

pub(crate) struct DistributionResult {
    pub table: Table,
    pub summary: Value,
}

/// Block histogram at M = block_size beside the static-limit and binomial distributions.
pub(crate) fn distribution_data(cfg: &ScenarioConfig, name: &str) -> Result<DistributionResult> {
    let m = cfg.analysis.block_size;
    let exp = Experiment::new(cfg.simulation())?;
    let parts = exp.map(|s| {
        let mut a = BlockAccumulator::new(m).expect("m >= 1");
        a.add(s.bits());
        a
    });
    let mut acc = BlockAccumulator::new(m)?;
    for p in &parts {
        acc.merge(p)?;
    }
    let sim = acc.distribution()?;
    let th = Theory::new(&cfg.noise, &cfg.protocol, m.saturating_sub(1).max(1))?;
    let binom = rho_binomial(m, th.r1())?;
    let stat = static_limit(&cfg.noise, cfg, m, &th);
    let mf = m as f64;

    let mut t = Table::new(name, &["m", "fraction", "simulated", "static_limit", "binomial"]);
    for i in 0..=m {
        t.push(row![i, i as f64 / mf, sim.probs()[i], stat.as_ref().map(|d| d.probs()[i]), binom.probs()[i]]);
    }
    let r2 = th.r2_series(m.saturating_sub(1))?;
    let predicted = (variance_predicted(m, th.r1(), &r2) * mf).sqrt();
    let summary = json!({
        "block_size": m,
        "blocks": acc.blocks(),
        "r1_theory": th.r1(),
        "scaled_std_sim": acc.scaled_std()?,
        "scaled_std_predicted": predicted,
        "scaled_std_binomial": (th.r1() * (1.0 - th.r1())).sqrt(),
        "tv_to_static": stat.as_ref().map(|d| sim.total_variation(d).ok()),
        "tv_to_binomial": sim.total_variation(&binom)?,
        "local_maxima_sim": sim.local_maxima(0.005),
        "local_maxima_static": stat.as_ref().map(|d| d.local_maxima(0.005)),
        "warnings": exp.warnings(),
    });
    Ok(DistributionResult { table: t, summary })
}

pub fn distribution(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let d = distribution_data(cfg, "distribution")?;
    Ok(artifacts(cfg, vec![d.table], d.summary))
}

/// Outcome power spectrum, with the modulation-peak theory when a modulation is configured.
pub fn spectrum(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let exp = Experiment::new(cfg.simulation())?;
    let runs = exp.map(|s| s.into_bits());
    let spec = outcome_power_spectrum(&runs)?;
    let n = cfg.run.cycles;
    let th = Theory::new(&cfg.noise, &cfg.protocol, 1)?;
    let floor = n as f64 * th.r1() * (1.0 - th.r1());
    let peak = cfg.modulation.map(|m| {
        let a = m.phase_amplitude(&cfg.protocol);
        let expected = n as f64 * m.omega_p * cfg.protocol.t_cyc() / std::f64::consts::TAU;
        (m, a, expected)
    });

    let mut t = Table::new("spectrum", &["m", "r_sim", "r_peak_theory", "r_floor"]);
    for (i, r) in spec.r.iter().enumerate() {
        let folded = if i > n / 2 { n - i } else { i };
        let theory = peak.map(|(m, a, _)| modulation_peak_theory(a, &cfg.protocol, n, m.omega_p, folded as f64, cfg.run.sigma_cyc));
        t.push(row![i, *r, theory, floor]);
    }
    let peak_bin = spec.peak_bin();
    let summary = json!({
        "n": n,
        "repetitions": spec.repetitions,
        "convention": spec.convention,
        "peak_bin": peak_bin,
        "mirror_bin": peak_bin.map(|b| (n - b) % n),
        "peak_height": peak_bin.map(|b| spec.r[b]),
        "expected_peak_bin": peak.map(|p| p.2.round() as usize),
        "peak_theory_at_expected_bin": peak.map(|(m, a, e)| modulation_peak_theory(a, &cfg.protocol, n, m.omega_p, e.round(), cfg.run.sigma_cyc)),
        "noise_floor": floor,
        "warnings": exp.warnings(),
    });
    Ok(artifacts(cfg, vec![t], summary))
}
