//! Monte-Carlo generation of Ramsey outcome records.

mod gaussian;
mod modulation;
mod telegraph;

pub use gaussian::{sample_gaussian_phases, WindowedGaussianSampler};
pub use modulation::{inject_modulation, Modulation};
pub use telegraph::{check_step, sample_tls_frequency_path, sample_tls_phases, TelegraphScheme};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gaussian::{default_k_corr, phase_correlators};
use crate::model::{
    mean_frequency_shift, ramsey_probability, GaussianNoiseSpec, OutcomeSeries, PhaseCorrelators, RamseyProtocol,
    TlsEnsemble,
};
use crate::rng::{stream, Purpose};

/// Largest Gaussian memory window.
pub const MAX_K_CORR: usize = 2000;

/// Noise acting on the qubit frequency; components of a composite add.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    #[default]
    None,
    Tls { tls: TlsEnsemble },
    Gaussian {
        spectrum: GaussianNoiseSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_corr: Option<usize>,
    },
    /// Gaussian noise given directly by its phase correlators.
    Correlators {
        f: PhaseCorrelators,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_corr: Option<usize>,
    },
    /// Gaussian phase frozen over a repetition.
    StaticGaussian { f0: f64 },
    Composite { parts: Vec<NoiseModel> },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::None | NoiseModel::Tls { .. } => Ok(()),
            NoiseModel::Gaussian { spectrum, .. } => spectrum.validate(),
            NoiseModel::Correlators { f, .. } => PhaseCorrelators::new(f.as_slice().to_vec()).map(|_| ()),
            NoiseModel::StaticGaussian { f0 } => {
                if *f0 >= 0.0 && f0.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("static f0 must be >= 0"))
                }
            }
            NoiseModel::Composite { parts } => parts.iter().try_for_each(NoiseModel::validate),
        }
    }

    /// All TLSs across composite parts, in order.
    pub fn tls_ensemble(&self) -> TlsEnsemble {
        let mut out = Vec::new();
        self.collect_tls(&mut out);
        TlsEnsemble::new(out)
    }

    fn collect_tls(&self, out: &mut Vec<crate::model::TlsParams>) {
        match self {
            NoiseModel::Tls { tls } => out.extend(tls.iter().copied()),
            NoiseModel::Composite { parts } => parts.iter().for_each(|p| p.collect_tls(out)),
            _ => {}
        }
    }
}

/// Everything needed to generate R repetitions of N cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub protocol: RamseyProtocol,
    pub noise: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<Modulation>,
    pub cycles: usize,
    pub repetitions: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub sigma_cyc: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scheme: TelegraphScheme,
    #[serde(default = "default_budget")]
    pub step_budget: f64,
}

fn default_dt() -> f64 {
    0.1
}
fn default_budget() -> f64 {
    1e10
}

impl SimulationConfig {
    /// Desk-scale defaults: 10⁵ cycles, 30 repetitions, dt = 0.1 t_R.
    pub fn new(protocol: RamseyProtocol, noise: NoiseModel) -> Self {
        SimulationConfig {
            protocol,
            noise,
            modulation: None,
            cycles: 100_000,
            repetitions: 30,
            dt: 0.1 * protocol.t_r(),
            sigma_cyc: 0.0,
            seed: 0,
            scheme: TelegraphScheme::Stepwise,
            step_budget: default_budget(),
        }
    }

    pub fn cycles(mut self, n: usize) -> Self {
        self.cycles = n;
        self
    }
    pub fn repetitions(mut self, r: usize) -> Self {
        self.repetitions = r;
        self
    }
    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }
    pub fn dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
    pub fn modulation(mut self, m: Modulation) -> Self {
        self.modulation = Some(m);
        self
    }
    pub fn sigma_cyc(mut self, s: f64) -> Self {
        self.sigma_cyc = s;
        self
    }
    pub fn scheme(mut self, s: TelegraphScheme) -> Self {
        self.scheme = s;
        self
    }

    /// Validates the configuration and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.noise.validate()?;
        if self.cycles == 0 || self.repetitions == 0 {
            return Err(invalid("cycles and repetitions must be >= 1"));
        }
        if self.repetitions as u64 >= 1 << 32 {
            return Err(invalid("too many repetitions"));
        }
        if !(self.dt > 0.0 && self.dt <= self.protocol.t_r() / 5.0 + 1e-15) {
            return Err(invalid(format!("dt must be in (0, t_R/5], got {}", self.dt)));
        }
        if !(self.sigma_cyc >= 0.0 && self.sigma_cyc.is_finite()) {
            return Err(invalid("sigma_cyc must be >= 0"));
        }
        if let Some(m) = &self.modulation {
            m.validate()?;
        }
        let tls = self.noise.tls_ensemble();
        let warnings = check_step(&tls, self.dt)?;
        if !tls.is_empty() {
            let steps = self.cycles as f64 * self.repetitions as f64 * self.protocol.t_cyc() / self.dt;
            if steps > self.step_budget {
                return Err(Error::ResourceCap(format!(
                    "{steps:.3e} telegraph steps exceed the budget of {:.3e}",
                    self.step_budget
                )));
            }
        }
        Ok(warnings)
    }
}

enum Prepared {
    None,
    Tls(TlsEnsemble),
    Gaussian(WindowedGaussianSampler),
    Static(f64),
    Composite(Vec<Prepared>),
}

fn prepare(noise: &NoiseModel, protocol: &RamseyProtocol) -> Result<Prepared> {
    Ok(match noise {
        NoiseModel::None => Prepared::None,
        NoiseModel::Tls { tls } => Prepared::Tls(tls.clone()),
        NoiseModel::Gaussian { spectrum, k_corr } => {
            let k = k_corr.unwrap_or_else(|| default_k_corr(spectrum, protocol));
            if k == 0 || k > MAX_K_CORR {
                return Err(invalid(format!("k_corr must be in 1..={MAX_K_CORR}, got {k}")));
            }
            let f = phase_correlators(spectrum, protocol, k)?;
            Prepared::Gaussian(WindowedGaussianSampler::new(&f, k)?)
        }
        NoiseModel::Correlators { f, k_corr } => {
            let k = k_corr.unwrap_or(f.max_lag().clamp(1, MAX_K_CORR));
            if k == 0 || k > MAX_K_CORR {
                return Err(invalid(format!("k_corr must be in 1..={MAX_K_CORR}, got {k}")));
            }
            Prepared::Gaussian(WindowedGaussianSampler::new(f, k)?)
        }
        NoiseModel::StaticGaussian { f0 } => {
            if !(*f0 >= 0.0 && f0.is_finite()) {
                return Err(invalid("static f0 must be >= 0"));
            }
            Prepared::Static(*f0)
        }
        NoiseModel::Composite { parts } => {
            Prepared::Composite(parts.iter().map(|p| prepare(p, protocol)).collect::<Result<_>>()?)
        }
    })
}

/// Prepared generator: precomputes samplers once and produces repetitions on demand.
pub struct Experiment {
    config: SimulationConfig,
    noise: Prepared,
    /// Protocol with φ̃_R = φ_R − δω t_R, applied to raw TLS phases.
    effective: RamseyProtocol,
    warnings: Vec<String>,
}

impl Experiment {
    pub fn new(config: SimulationConfig) -> Result<Self> {
        let warnings = config.validate()?;
        let noise = prepare(&config.noise, &config.protocol)?;
        let shift = mean_frequency_shift(&config.noise.tls_ensemble()) * config.protocol.t_r();
        let effective = config.protocol.with_phi_r(config.protocol.phi_r() - shift);
        Ok(Experiment { config, noise, effective, warnings })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Accumulated phases of one repetition.
    pub fn phases(&self, repetition: u64) -> Vec<f64> {
        let c = &self.config;
        let mut theta = vec![0.0; c.cycles];
        let mut slot = 0u32;
        add_phases(&self.noise, c, repetition, &mut slot, &mut theta);
        if let Some(m) = &c.modulation {
            let mut rng = stream(c.seed, repetition, Purpose::Modulation, 0);
            let phase_p = rng.random::<f64>() * std::f64::consts::TAU;
            inject_modulation(&mut theta, m, &c.protocol, phase_p, c.sigma_cyc, &mut rng).expect("validated");
        }
        theta
    }

    /// Outcomes of one repetition.
    pub fn repetition(&self, repetition: u64) -> OutcomeSeries {
        let theta = self.phases(repetition);
        let mut rng = stream(self.config.seed, repetition, Purpose::Outcome, 0);
        let bits = outcome_bits(&theta, &self.effective, &mut rng);
        OutcomeSeries::new(bits, self.config.seed, repetition, self.config.protocol).expect("bits are 0/1")
    }

    /// Applies `f` to every repetition in parallel; results are ordered by repetition index.
    pub fn map<T: Send, F: Fn(OutcomeSeries) -> T + Sync>(&self, f: F) -> Vec<T> {
        (0..self.config.repetitions as u64).into_par_iter().map(|r| f(self.repetition(r))).collect()
    }
}

fn add_phases(noise: &Prepared, c: &SimulationConfig, rep: u64, slot: &mut u32, theta: &mut [f64]) {
    // each component gets its own block of stream indices
    let base = *slot;
    *slot += 1 << 16;
    match noise {
        Prepared::None => {}
        Prepared::Tls(e) => telegraph::add_tls_phases(e, &c.protocol, c.dt, c.scheme, c.seed, rep, base, theta),
        Prepared::Gaussian(s) => {
            let mut rng = stream(c.seed, rep, Purpose::Gaussian, base);
            let n = theta.len();
            for (t, g) in theta.iter_mut().zip(s.sample(n, &mut rng)) {
                *t += g;
            }
        }
        Prepared::Static(f0) => {
            let mut rng = stream(c.seed, rep, Purpose::Static, base);
            let z: f64 = rng.sample(StandardNormal);
            let th = f0.sqrt() * z;
            theta.iter_mut().for_each(|t| *t += th);
        }
        Prepared::Composite(parts) => parts.iter().for_each(|p| add_phases(p, c, rep, slot, theta)),
    }
}

fn outcome_bits<R: Rng>(theta: &[f64], protocol: &RamseyProtocol, rng: &mut R) -> Vec<u8> {
    theta.iter().map(|th| (rng.random::<f64>() < ramsey_probability(*th, protocol)) as u8).collect()
}

/// Binary outcomes x_k ~ Bernoulli(p(θ_k)).
pub fn sample_outcomes<R: Rng>(theta: &[f64], protocol: &RamseyProtocol, rng: &mut R) -> Result<OutcomeSeries> {
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(invalid("phases must be finite"));
    }
    OutcomeSeries::from_bits(outcome_bits(theta, protocol, rng), *protocol)
}

/// All R repetitions of a configuration.
pub fn run_experiment(config: &SimulationConfig) -> Result<Vec<OutcomeSeries>> {
    let exp = Experiment::new(config.clone())?;
    Ok(exp.map(|s| s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TlsParams;

    #[test]
    fn deterministic() {
        let e = TlsEnsemble::ladder(0.2, 3, 0.75, 0.0, 1.0).unwrap();
        let c = SimulationConfig::new(RamseyProtocol::default(), NoiseModel::Tls { tls: e }).cycles(500).repetitions(3).seed(9);
        assert_eq!(run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
    }

    #[test]
    fn empty_noise_is_bernoulli() {
        let c = SimulationConfig::new(RamseyProtocol::default(), NoiseModel::None).cycles(100_000).repetitions(1).seed(2);
        let s = &run_experiment(&c).unwrap()[0];
        let mean = s.bits().iter().map(|b| *b as f64).sum::<f64>() / s.len() as f64;
        assert!((mean - 0.853_553_390_593_273_7).abs() < 3.0 * 0.0011);
    }

    #[test]
    fn all_ones_without_noise_at_zero_phase() {
        let p = RamseyProtocol::new(1.0, 3.0, 0.0, 0.0).unwrap();
        let c = SimulationConfig::new(p, NoiseModel::None).cycles(1000).repetitions(1);
        assert!(run_experiment(&c).unwrap()[0].bits().iter().all(|b| *b == 1));
    }

    #[test]
    fn budget_enforced() {
        let e = TlsEnsemble::new(vec![TlsParams::symmetric(0.2, 0.1).unwrap()]);
        let mut c = SimulationConfig::new(RamseyProtocol::default(), NoiseModel::Tls { tls: e }).cycles(1000).repetitions(10);
        c.step_budget = 1e4;
        assert!(matches!(Experiment::new(c), Err(Error::ResourceCap(_))));
    }

    #[test]
    fn serde_round_trip() {
        let c = SimulationConfig::new(
            RamseyProtocol::default(),
            NoiseModel::Composite {
                parts: vec![
                    NoiseModel::Gaussian { spectrum: GaussianNoiseSpec::ExpCorrelated { d_corr: 6.51, tau_corr: 20.0 }, k_corr: None },
                    NoiseModel::StaticGaussian { f0: 0.01 },
                ],
            },
        )
        .modulation(Modulation { a_p: 0.1, omega_p: 0.03 });
        let s = serde_json::to_string(&c).unwrap();
        let back: SimulationConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
