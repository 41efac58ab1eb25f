//! Euler–Maruyama simulation of `dX_i = Σ_j δ_j 1(X_i = X_(j)) dt + dW_i`.
//!
//! Drifts are frozen at the ranks observed at the start of each step. Ties
//! go to the lower particle index (it takes the higher rank).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{DriftSpec, SpacingSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub burn_in: f64,
    /// Steps between emitted samples.
    pub thin: usize,
    /// Multiplies the Brownian increments; 0 gives a deterministic drift-only run.
    pub noise_scale: f64,
}

impl SimConfig {
    /// `thin` = one sample per unit time, `burn_in` = `t_max / 4`.
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        Self {
            dt,
            t_max,
            burn_in: t_max / 4.0,
            thin: ((1.0 / dt).round() as usize).max(1),
            noise_scale: 1.0,
        }
        .validated()
    }

    pub fn with_burn_in(self, burn_in: f64) -> Result<Self> {
        Self { burn_in, ..self }.validated()
    }

    pub fn with_thin(self, thin: usize) -> Result<Self> {
        Self { thin, ..self }.validated()
    }

    pub fn with_noise_scale(self, noise_scale: f64) -> Result<Self> {
        Self {
            noise_scale,
            ..self
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Invalid(format!(
                "t_max must be > 0, got {}",
                self.t_max
            )));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.t_max) {
            return Err(Error::Invalid(format!(
                "burn_in must lie in [0, t_max), got {}",
                self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::Invalid("thin must be ≥ 1".into()));
        }
        if !(self.noise_scale >= 0.0) {
            return Err(Error::Invalid("noise_scale must be ≥ 0".into()));
        }
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// Positions indexed by particle identity (not by rank).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub t: f64,
    pub x: Vec<f64>,
}

impl ParticleState {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("particle positions must be finite".into()));
        }
        Ok(Self { t: 0.0, x })
    }

    /// Particle `i` at `−i·gap` with `gap = 1/(2 min α_k)`, a typical
    /// stationary spacing; unit gaps when the stationarity condition fails.
    pub fn equally_spaced(spec: &DriftSpec) -> Self {
        let min_alpha = spec
            .alpha_vector()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let gap = if min_alpha > 0.0 {
            0.5 / min_alpha
        } else {
            1.0
        };
        Self {
            t: 0.0,
            x: (0..spec.n()).map(|i| -(i as f64) * gap).collect(),
        }
    }

    pub fn spacings(&self) -> SpacingSample {
        SpacingSample::from_positions(&self.x).expect("positions are finite")
    }
}

/// Reusable stepping workspace for one path.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    spec: &'a DriftSpec,
    cfg: SimConfig,
    order: Vec<usize>,
    sqrt_dt: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a DriftSpec, cfg: SimConfig) -> Self {
        Self {
            spec,
            cfg,
            order: (0..spec.n()).collect(),
            sqrt_dt: cfg.dt.sqrt(),
        }
    }

    /// Advances `x` in place by one step.
    pub fn advance<R: Rng + ?Sized>(&mut self, state: &mut ParticleState, rng: &mut R) {
        debug_assert_eq!(state.x.len(), self.spec.n());
        let x = &state.x;
        // insertion sort: ranks change little between steps
        for k in 1..self.order.len() {
            let mut j = k;
            while j > 0 && outranks(x, self.order[j], self.order[j - 1]) {
                self.order.swap(j, j - 1);
                j -= 1;
            }
        }
        let deltas = self.spec.deltas();
        let dt = self.cfg.dt;
        for (rank, &i) in self.order.iter().enumerate() {
            state.x[i] += deltas[rank] * dt;
        }
        if self.cfg.noise_scale > 0.0 {
            let scale = self.cfg.noise_scale * self.sqrt_dt;
            for xi in state.x.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *xi += scale * z;
            }
        }
        state.t += dt;
    }
}

/// `a` is ranked above `b`: larger position, ties to the lower index.
#[inline]
fn outranks(x: &[f64], a: usize, b: usize) -> bool {
    x[a] > x[b] || (x[a] == x[b] && a < b)
}

/// One Euler–Maruyama step.
pub fn step<R: Rng + ?Sized>(
    state: &ParticleState,
    spec: &DriftSpec,
    cfg: &SimConfig,
    rng: &mut R,
) -> ParticleState {
    let mut next = state.clone();
    Stepper::new(spec, *cfg).advance(&mut next, rng);
    next
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub samples: Vec<SpacingSample>,
    pub final_state: ParticleState,
    /// Set when the drifts violate the stationarity condition; the run still
    /// completes so the divergent regime can be observed.
    pub warning: Option<Error>,
}

/// Simulates to `t_max`, emitting the spacings every `thin` steps once past
/// `burn_in`.
pub fn run_to_stationarity<R: Rng + ?Sized>(
    spec: &DriftSpec,
    cfg: &SimConfig,
    init: ParticleState,
    rng: &mut R,
) -> Result<SimulationRun> {
    if init.x.len() != spec.n() {
        return Err(Error::Invalid(format!(
            "initial state has {} particles, drift spec has {}",
            init.x.len(),
            spec.n()
        )));
    }
    let cfg = cfg.validated()?;
    let warning = spec.require_stationary().err();
    let mut stepper = Stepper::new(spec, cfg);
    let mut state = init;
    let mut samples = Vec::new();
    let burn_steps = (cfg.burn_in / cfg.dt).round() as usize;
    for s in 1..=cfg.steps() {
        stepper.advance(&mut state, rng);
        if s > burn_steps && s % cfg.thin == 0 {
            samples.push(state.spacings());
        }
    }
    Ok(SimulationRun {
        samples,
        final_state: state,
        warning,
    })
}
