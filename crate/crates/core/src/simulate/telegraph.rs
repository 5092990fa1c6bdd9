//! Telegraph paths of independent TLSs and the phases they imprint on Ramsey windows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{RamseyProtocol, TlsEnsemble, TlsParams};
use crate::rng::{stream, Purpose};

/// Time discretization of the telegraph process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TelegraphScheme {
    /// Fixed grid dt with per-step switching probability W·dt.
    #[default]
    Stepwise,
    /// Exact continuous-time switching with exponential waiting times.
    EventDriven,
}

const GRID_EPS: f64 = 1e-9;

/// Window geometry on the dt grid: steps s_k + 1 ..= s_k + n_r belong to window k.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Grid {
    dt: f64,
    t_cyc: f64,
    n_r: u64,
}

impl Grid {
    pub(crate) fn new(protocol: &RamseyProtocol, dt: f64) -> Self {
        Grid { dt, t_cyc: protocol.t_cyc(), n_r: (protocol.t_r() / dt - GRID_EPS).ceil() as u64 }
    }
    fn start(&self, k: usize) -> u64 {
        (k as f64 * self.t_cyc / self.dt + GRID_EPS).floor() as u64
    }
}

/// Steps until the next switch, P(n) = (1 − p)^{n−1} p, drawn by inversion from one uniform.
fn geometric<R: Rng>(rng: &mut R, p: f64) -> u64 {
    if p <= 0.0 {
        return u64::MAX;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    let n = (u.ln() / (-p).ln_1p()).ceil();
    if n >= 1.8e19 {
        u64::MAX
    } else {
        (n as u64).max(1)
    }
}

fn initial_state<R: Rng>(rng: &mut R, tls: &TlsParams) -> bool {
    // true: τ_z = +1, populated with probability w0 = W10/W
    rng.random::<f64>() < tls.w10() / tls.w()
}

/// Adds one TLS's contribution V Σ_window d(m) dt to each of `theta`'s windows.
pub(crate) fn add_tls_stepwise<R: Rng>(tls: &TlsParams, grid: &Grid, rng: &mut R, theta: &mut [f64]) {
    let (p_up, p_down) = (tls.w01() * grid.dt, tls.w10() * grid.dt);
    let mut plus = initial_state(rng, tls);
    let rate = |plus: bool| if plus { p_up } else { p_down };
    let mut next = geometric(rng, rate(plus));
    let scale = tls.v() * grid.dt;
    for (k, th) in theta.iter_mut().enumerate() {
        let s = grid.start(k);
        let e = s + grid.n_r;
        while next <= s {
            plus = !plus;
            next = next.saturating_add(geometric(rng, rate(plus)));
        }
        let mut pos = s + 1;
        let mut acc: i64 = 0;
        while next <= e {
            let run = (next - pos) as i64;
            acc += if plus { run } else { -run };
            plus = !plus;
            pos = next;
            next = next.saturating_add(geometric(rng, rate(plus)));
        }
        let run = (e + 1 - pos) as i64;
        acc += if plus { run } else { -run };
        *th += scale * acc as f64;
    }
}

/// Exact continuous-time version of `add_tls_stepwise`.
pub(crate) fn add_tls_event_driven<R: Rng>(tls: &TlsParams, protocol: &RamseyProtocol, rng: &mut R, theta: &mut [f64]) {
    let mut plus = initial_state(rng, tls);
    let wait = |rng: &mut R, plus: bool| {
        let r = if plus { tls.w01() } else { tls.w10() };
        if r <= 0.0 {
            f64::INFINITY
        } else {
            -(1.0 - rng.random::<f64>()).ln() / r
        }
    };
    let mut next = wait(rng, plus);
    let t_r = protocol.t_r();
    for (k, th) in theta.iter_mut().enumerate() {
        let s = k as f64 * protocol.t_cyc();
        let e = s + t_r;
        while next <= s {
            plus = !plus;
            next += wait(rng, plus);
        }
        let mut pos = s;
        let mut acc = 0.0;
        while next < e {
            acc += if plus { next - pos } else { pos - next };
            plus = !plus;
            pos = next;
            next += wait(rng, plus);
        }
        acc += if plus { e - pos } else { pos - e };
        *th += tls.v() * acc;
    }
}

/// Checks per-step switching probabilities; returns warnings for values above 0.1.
pub fn check_step(ensemble: &TlsEnsemble, dt: f64) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    for (n, t) in ensemble.iter().enumerate() {
        let p = t.w01().max(t.w10()) * dt;
        if p > 0.5 {
            return Err(invalid(format!("TLS {n}: switching probability per step {p} exceeds 0.5; reduce dt")));
        }
        if p > 0.1 {
            warnings.push(format!("TLS {n}: switching probability per step {p} exceeds 0.1"));
        }
    }
    Ok(warnings)
}

/// θ_k for one repetition of a TLS ensemble, k = 0..n_cycles.
pub fn sample_tls_phases(
    ensemble: &TlsEnsemble,
    protocol: &RamseyProtocol,
    n_cycles: usize,
    dt: f64,
    scheme: TelegraphScheme,
    seed: u64,
    repetition: u64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt <= protocol.t_r() / 5.0 + 1e-15) {
        return Err(invalid(format!("dt must be in (0, t_R/5], got {dt}")));
    }
    check_step(ensemble, dt)?;
    let mut theta = vec![0.0; n_cycles];
    add_tls_phases(ensemble, protocol, dt, scheme, seed, repetition, 0, &mut theta);
    Ok(theta)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn add_tls_phases(
    ensemble: &TlsEnsemble,
    protocol: &RamseyProtocol,
    dt: f64,
    scheme: TelegraphScheme,
    seed: u64,
    repetition: u64,
    index_offset: u32,
    theta: &mut [f64],
) {
    let grid = Grid::new(protocol, dt);
    for (n, t) in ensemble.iter().enumerate() {
        let mut rng = stream(seed, repetition, Purpose::Tls, index_offset + n as u32);
        match scheme {
            TelegraphScheme::Stepwise => add_tls_stepwise(t, &grid, &mut rng, theta),
            TelegraphScheme::EventDriven => add_tls_event_driven(t, protocol, &mut rng, theta),
        }
    }
}

/// Instantaneous frequency δω(m) = Σ V d(m) on the dt grid, steps m = 1..=n_steps.
pub fn sample_tls_frequency_path(ensemble: &TlsEnsemble, n_steps: usize, dt: f64, seed: u64, repetition: u64) -> Result<Vec<f64>> {
    check_step(ensemble, dt)?;
    let mut path = vec![0.0; n_steps];
    for (n, t) in ensemble.iter().enumerate() {
        let mut rng = stream(seed, repetition, Purpose::FrequencyPath, n as u32);
        let (p_up, p_down) = (t.w01() * dt, t.w10() * dt);
        let mut plus = initial_state(&mut rng, t);
        let mut pos: u64 = 1;
        while pos <= n_steps as u64 {
            let next = pos - 1 + geometric(&mut rng, if plus { p_up } else { p_down });
            let end = next.min(n_steps as u64 + 1);
            let v = if plus { t.v() } else { -t.v() };
            for x in &mut path[(pos - 1) as usize..(end - 1) as usize] {
                *x += v;
            }
            plus = !plus;
            pos = end;
        }
    }
    Ok(path)
}
