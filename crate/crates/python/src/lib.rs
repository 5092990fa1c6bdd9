use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use ramsey_noise::acquisition;
use ramsey_noise::estimate::{self, BlockAccumulator, Centering, CorrelatorOptions};
use ramsey_noise::scenario::{self, ScenarioConfig, ScenarioKind, Target};
use ramsey_noise::simulate::{run_experiment, NoiseModel, SimulationConfig};
use ramsey_noise::{theory, Error, RamseyProtocol, TlsEnsemble, TlsParams};

fn err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Accepts either a JSON string or a JSON-compatible Python object.
fn to_json(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.extract::<String>() {
        return Ok(s);
    }
    py.import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Ramsey cycle timing and phase.
#[pyclass(name = "Protocol", module = "ramsey_noise_py", from_py_object)]
#[derive(Clone, Copy)]
struct PyProtocol(RamseyProtocol);

#[pymethods]
impl PyProtocol {
    #[new]
    #[pyo3(signature = (t_r=1.0, t_cyc=3.0, phi_r=std::f64::consts::FRAC_PI_4, t_r_over_t2=0.0))]
    fn new(t_r: f64, t_cyc: f64, phi_r: f64, t_r_over_t2: f64) -> PyResult<Self> {
        RamseyProtocol::new(t_r, t_cyc, phi_r, t_r_over_t2).map(PyProtocol).map_err(err)
    }
    #[getter]
    fn t_r(&self) -> f64 {
        self.0.t_r()
    }
    #[getter]
    fn t_cyc(&self) -> f64 {
        self.0.t_cyc()
    }
    #[getter]
    fn phi_r(&self) -> f64 {
        self.0.phi_r()
    }
    #[getter]
    fn t_r_over_t2(&self) -> f64 {
        self.0.t_r_over_t2()
    }
    fn __repr__(&self) -> String {
        format!(
            "Protocol(t_r={}, t_cyc={}, phi_r={}, t_r_over_t2={})",
            self.0.t_r(),
            self.0.t_cyc(),
            self.0.phi_r(),
            self.0.t_r_over_t2()
        )
    }
}

/// One two-level fluctuator with coupling `v` and switching rates `w01`, `w10`.
#[pyclass(name = "Tls", module = "ramsey_noise_py", from_py_object)]
#[derive(Clone, Copy)]
struct PyTls(TlsParams);

#[pymethods]
impl PyTls {
    #[new]
    fn new(v: f64, w01: f64, w10: f64) -> PyResult<Self> {
        TlsParams::new(v, w01, w10).map(PyTls).map_err(err)
    }
    #[staticmethod]
    fn symmetric(v: f64, w: f64) -> PyResult<Self> {
        TlsParams::symmetric(v, w).map(PyTls).map_err(err)
    }
    #[getter]
    fn v(&self) -> f64 {
        self.0.v()
    }
    #[getter]
    fn w01(&self) -> f64 {
        self.0.w01()
    }
    #[getter]
    fn w10(&self) -> f64 {
        self.0.w10()
    }
    #[getter]
    fn w(&self) -> f64 {
        self.0.w()
    }
    fn __repr__(&self) -> String {
        format!("Tls(v={}, w01={}, w10={})", self.0.v(), self.0.w01(), self.0.w10())
    }
}

fn ensemble(tls: Vec<PyTls>) -> TlsEnsemble {
    TlsEnsemble::new(tls.into_iter().map(|t| t.0).collect())
}

fn protocol_or_default(p: Option<PyProtocol>) -> RamseyProtocol {
    p.map(|p| p.0).unwrap_or_default()
}

/// Ladder of `count` TLSs with rates W_n t_R = exp(−alpha (n + n0)).
#[pyfunction]
#[pyo3(signature = (v, count, alpha=0.75, n0=0.0, t_r=1.0))]
fn tls_ladder(v: f64, count: usize, alpha: f64, n0: f64, t_r: f64) -> PyResult<Vec<PyTls>> {
    let e = TlsEnsemble::ladder(v, count, alpha, n0, t_r).map_err(err)?;
    Ok(e.iter().map(|t| PyTls(*t)).collect())
}

/// Closed-form outcome correlators for a noise model given as a JSON object.
#[pyclass(name = "Theory", module = "ramsey_noise_py")]
struct PyTheory(theory::Theory);

#[pymethods]
impl PyTheory {
    #[new]
    #[pyo3(signature = (noise, protocol=None, max_lag=100))]
    fn new(py: Python<'_>, noise: &Bound<'_, PyAny>, protocol: Option<PyProtocol>, max_lag: usize) -> PyResult<Self> {
        let noise: NoiseModel = serde_json::from_str(&to_json(py, noise)?).map_err(|e| PyValueError::new_err(e.to_string()))?;
        theory::Theory::new(&noise, &protocol_or_default(protocol), max_lag).map(PyTheory).map_err(err)
    }
    /// Theory for a TLS ensemble.
    #[staticmethod]
    #[pyo3(signature = (tls, protocol=None, max_lag=100))]
    fn from_tls(tls: Vec<PyTls>, protocol: Option<PyProtocol>, max_lag: usize) -> PyResult<Self> {
        let noise = NoiseModel::Tls { tls: ensemble(tls) };
        theory::Theory::new(&noise, &protocol_or_default(protocol), max_lag).map(PyTheory).map_err(err)
    }
    fn r1(&self) -> f64 {
        self.0.r1()
    }
    fn r2(&self, k: usize) -> PyResult<f64> {
        self.0.r2(k).map_err(err)
    }
    fn r3(&self, k: usize, l: usize) -> PyResult<f64> {
        self.0.r3(k, l).map_err(err)
    }
    /// r̃₂(k) for k = 1..=k_max.
    fn r2_series(&self, k_max: usize) -> PyResult<Vec<f64>> {
        self.0.r2_series(k_max).map_err(err)
    }
    /// Gaussian phase correlators f_0..f_max_lag.
    fn phase_correlators(&self) -> PyResult<Vec<f64>> {
        self.0.gaussian_correlators().map(|f| f.as_slice().to_vec()).map_err(err)
    }
}

/// Runs a Monte-Carlo experiment described by a scenario-style JSON object
/// (keys `protocol`, `noise`, `modulation`, `run`) and returns one bytes object of 0/1 outcomes per repetition.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Vec<Bound<'py, PyBytes>>> {
    let mut cfg: ScenarioConfig = {
        let text = to_json(py, config)?;
        let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        if let Some(o) = v.as_object_mut() {
            o.entry("scenario").or_insert_with(|| "simulate".into());
        }
        ScenarioConfig::from_json(&v.to_string()).map_err(err)?
    };
    cfg.scenario = ScenarioKind::Simulate;
    let sim: SimulationConfig = cfg.simulation();
    let runs = py.detach(|| run_experiment(&sim)).map_err(err)?;
    Ok(runs.into_iter().map(|s| PyBytes::new(py, s.bits())).collect())
}

fn series(data: Vec<Vec<u8>>) -> PyResult<Vec<Vec<u8>>> {
    if data.iter().flatten().any(|b| *b > 1) {
        return Err(PyValueError::new_err("outcomes must be 0 or 1"));
    }
    Ok(data)
}

/// Centered correlator estimates with jackknife errors over repetitions.
#[pyfunction]
#[pyo3(signature = (series_list, k_max, triple_lags=Vec::new(), per_repetition_centering=false))]
fn estimate_correlators<'py>(
    py: Python<'py>,
    series_list: Vec<Vec<u8>>,
    k_max: usize,
    triple_lags: Vec<(usize, usize)>,
    per_repetition_centering: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let data = series(series_list)?;
    let opts = CorrelatorOptions {
        k_max,
        triple_lags,
        centering: if per_repetition_centering { Centering::PerRepetition } else { Centering::Global },
    };
    let est = py.detach(|| estimate::estimate_correlators(&data, &opts)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("r1", (est.r1.value, est.r1.stderr))?;
    out.set_item("r2", est.r2.iter().map(|e| (e.value, e.stderr)).collect::<Vec<_>>())?;
    let r3 = PyDict::new(py);
    for (kl, e) in &est.r3 {
        r3.set_item(*kl, (e.value, e.stderr))?;
    }
    out.set_item("r3", r3)?;
    Ok(out)
}

/// Empirical distribution of the number of ones in consecutive blocks of `m` outcomes.
#[pyfunction]
fn block_distribution(series_list: Vec<Vec<u8>>, m: usize) -> PyResult<Vec<f64>> {
    let data = series(series_list)?;
    let mut acc = BlockAccumulator::new(m).map_err(err)?;
    for s in &data {
        acc.add(s);
    }
    acc.distribution().map(|d| d.probs().to_vec()).map_err(err)
}

#[pyfunction]
fn rho_binomial(m: usize, r1: f64) -> PyResult<Vec<f64>> {
    acquisition::rho_binomial(m, r1).map(|d| d.probs().to_vec()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, tls, protocol=None))]
fn rho_static_tls(m: usize, tls: Vec<PyTls>, protocol: Option<PyProtocol>) -> PyResult<Vec<f64>> {
    acquisition::rho_static_tls(m, &ensemble(tls), &protocol_or_default(protocol)).map(|d| d.probs().to_vec()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, f0, protocol=None))]
fn rho_static_gauss(m: usize, f0: f64, protocol: Option<PyProtocol>) -> PyResult<Vec<f64>> {
    acquisition::rho_static_gauss(m, f0, &protocol_or_default(protocol)).map(|d| d.probs().to_vec()).map_err(err)
}

/// Periodogram R(m) averaged over equal-length outcome series.
#[pyfunction]
fn outcome_power_spectrum(py: Python<'_>, series_list: Vec<Vec<u8>>) -> PyResult<Vec<f64>> {
    let data = series(series_list)?;
    py.detach(|| estimate::outcome_power_spectrum(&data)).map(|s| s.r).map_err(err)
}

fn artifacts_to_py<'py>(py: Python<'py>, art: &scenario::Artifacts) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("config", from_json(py, &art.config.to_string())?)?;
    out.set_item("seed", art.seed)?;
    out.set_item("summary", from_json(py, &art.summary.to_string())?)?;
    let tables = PyDict::new(py);
    for t in &art.tables {
        let rows = t.rows.clone();
        let d = PyDict::new(py);
        d.set_item("header", t.header.clone())?;
        d.set_item("rows", rows)?;
        tables.set_item(&t.name, d)?;
    }
    out.set_item("tables", tables)?;
    Ok(out)
}

/// Runs a scenario document (JSON string or object) and returns its tables and summary.
#[pyfunction]
fn run_scenario<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ScenarioConfig::from_json(&to_json(py, config)?).map_err(err)?;
    let art = py.detach(|| scenario::run_scenario(&cfg)).map_err(err)?;
    artifacts_to_py(py, &art)
}

/// Datasets for a named figure or table target.
#[pyfunction]
#[pyo3(signature = (target, cycles=100_000, repetitions=30, seed=0))]
fn reproduce<'py>(py: Python<'py>, target: &str, cycles: usize, repetitions: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let t: Target = target.parse().map_err(|_| PyKeyError::new_err(format!("unknown target '{target}'")))?;
    let mut cfg = ScenarioConfig::new(ScenarioKind::Reproduce, RamseyProtocol::default(), NoiseModel::None);
    cfg.target = Some(t);
    cfg.run.cycles = cycles;
    cfg.run.repetitions = repetitions;
    cfg.run.seed = seed;
    let art = py.detach(|| scenario::reproduce(t, &cfg)).map_err(err)?;
    artifacts_to_py(py, &art)
}

#[pymodule]
fn ramsey_noise_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProtocol>()?;
    m.add_class::<PyTls>()?;
    m.add_class::<PyTheory>()?;
    m.add_function(wrap_pyfunction!(tls_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_correlators, m)?)?;
    m.add_function(wrap_pyfunction!(block_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(rho_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(rho_static_tls, m)?)?;
    m.add_function(wrap_pyfunction!(rho_static_gauss, m)?)?;
    m.add_function(wrap_pyfunction!(outcome_power_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add("TARGETS", Target::ALL.iter().map(|t| t.name()).collect::<Vec<_>>())?;
    Ok(())
}
