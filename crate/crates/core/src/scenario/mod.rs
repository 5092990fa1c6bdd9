//! JSON-configured scenario runner and the tabular/JSON artifacts it writes.

mod output;
mod reproduce;
mod runs;

pub use output::{write_artifacts, Artifacts, Cell, Table};
pub use reproduce::{reproduce, table_d1_row, table_d1_settings, TableD1Row, Target, TABLE_D1_BLOCK};
pub use runs::{analytic, compare, distribution, simulate, spectrum};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::Centering;
use crate::model::RamseyProtocol;
use crate::simulate::{Modulation, NoiseModel, SimulationConfig, TelegraphScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Analytic,
    Simulate,
    Compare,
    Distribution,
    Spectrum,
    Reproduce,
}

/// Run sizes and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    /// Telegraph step; defaults to 0.1 t_R.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sigma_cyc: f64,
    #[serde(default)]
    pub scheme: TelegraphScheme,
    #[serde(default = "default_budget")]
    pub step_budget: f64,
}

fn default_cycles() -> usize {
    100_000
}
fn default_reps() -> usize {
    30
}
fn default_budget() -> f64 {
    1e10
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            cycles: default_cycles(),
            repetitions: default_reps(),
            dt: None,
            seed: 0,
            sigma_cyc: 0.0,
            scheme: TelegraphScheme::Stepwise,
            step_budget: default_budget(),
        }
    }
}

/// What to compute from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// r̃₃ is reported at lags (k, k + triple_offset).
    #[serde(default = "default_offset")]
    pub triple_offset: usize,
    /// Block size M for distributions.
    #[serde(default = "default_block")]
    pub block_size: usize,
    /// Agreement threshold in standard errors.
    #[serde(default = "default_sigma")]
    pub tolerance_sigma: f64,
    #[serde(default)]
    pub centering: Centering,
}

fn default_k_max() -> usize {
    60
}
fn default_offset() -> usize {
    3
}
fn default_block() -> usize {
    100
}
fn default_sigma() -> f64 {
    3.0
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        AnalysisBlock {
            k_max: default_k_max(),
            triple_offset: default_offset(),
            block_size: default_block(),
            tolerance_sigma: default_sigma(),
            centering: Centering::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub prefix: String,
}

/// One scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub protocol: RamseyProtocol,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<Modulation>,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub outputs: OutputsBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind, protocol: RamseyProtocol, noise: NoiseModel) -> Self {
        ScenarioConfig {
            scenario,
            protocol,
            noise,
            modulation: None,
            run: RunBlock::default(),
            analysis: AnalysisBlock::default(),
            outputs: OutputsBlock::default(),
            target: None,
        }
    }

    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if let Some(m) = &self.modulation {
            m.validate()?;
        }
        if self.scenario == ScenarioKind::Reproduce && self.target.is_none() {
            return Err(Error::Config("reproduce scenario needs a target".into()));
        }
        if self.analysis.k_max == 0 || self.analysis.triple_offset == 0 || self.analysis.block_size == 0 {
            return Err(Error::Config("k_max, triple_offset and block_size must be >= 1".into()));
        }
        if !(self.analysis.tolerance_sigma > 0.0) {
            return Err(Error::Config("tolerance_sigma must be positive".into()));
        }
        if matches!(self.scenario, ScenarioKind::Simulate | ScenarioKind::Compare | ScenarioKind::Distribution | ScenarioKind::Spectrum) {
            self.simulation().validate()?;
        }
        Ok(())
    }

    /// The Monte-Carlo configuration described by this scenario.
    pub fn simulation(&self) -> SimulationConfig {
        let mut s = SimulationConfig::new(self.protocol, self.noise.clone())
            .cycles(self.run.cycles)
            .repetitions(self.run.repetitions)
            .seed(self.run.seed)
            .sigma_cyc(self.run.sigma_cyc)
            .scheme(self.run.scheme);
        if let Some(dt) = self.run.dt {
            s = s.dt(dt);
        }
        if let Some(m) = self.modulation {
            s = s.modulation(m);
        }
        s.step_budget = self.run.step_budget;
        s
    }
}

/// Runs one scenario and returns its artifacts without touching the filesystem.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Artifacts> {
    cfg.validate()?;
    match cfg.scenario {
        ScenarioKind::Analytic => analytic(cfg),
        ScenarioKind::Simulate => simulate(cfg),
        ScenarioKind::Compare => compare(cfg),
        ScenarioKind::Distribution => distribution(cfg),
        ScenarioKind::Spectrum => spectrum(cfg),
        ScenarioKind::Reproduce => reproduce(cfg.target.expect("validated"), cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"scenario":"compare","noise":{"kind":"gaussian","spectrum":{"kind":"exp_correlated","d_corr":6.51,"tau_corr":20.0}},"run":{"cycles":1000,"repetitions":4,"seed":3}}"#;
        let cfg = ScenarioConfig::from_json(text).unwrap();
        let again = ScenarioConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"scenario":"analytic","bogus":1}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"scenario":"analytic","run":{"cycle":5}}"#).is_err());
        let e = ScenarioConfig::from_json(r#"{"scenario":"reproduce"}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn physical_invariants_checked_at_parse() {
        let e = ScenarioConfig::from_json(r#"{"scenario":"analytic","protocol":{"t_r":1,"t_cyc":0.5}}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = ScenarioConfig::from_json(r#"{"scenario":"simulate","run":{"dt":0.5}}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
