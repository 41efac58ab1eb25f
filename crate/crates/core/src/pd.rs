//! Poisson–Dirichlet `PD(α)` samplers.
//!
//! Three independent constructions are provided:
//!
//! * normalized atoms of a Poisson point process with intensity
//!   `x^{−α−1} dx` ([`sample_pd_ppp`]),
//! * sorted GEM stick-breaking with `Beta(1 − α, iα)` sticks
//!   ([`sample_pd_stickbreaking`]),
//! * normalized exponentiated order statistics of i.i.d. unit exponentials,
//!   which converge to `PD(1/β)` ([`sample_pd_via_ordered_exponentials`]).
//!
//! Truncated draws keep the unresolved mass as a [`Tail`] whose law is known,
//! so `D_p` and entropy statistics can add its conditional expectation.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stationary::exponential;
use crate::stats::{mean_estimate, MeanEstimate};
use crate::types::{Tail, TailLaw, WeightSequence};

/// Smallest atom floor used by default.
pub const DEFAULT_ATOM_FLOOR: f64 = 1e-8;
/// Expected number of explicit atoms above which the default floor is raised.
pub const DEFAULT_ATOM_BUDGET: f64 = 2048.0;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_STICKS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum Truncation {
    /// Poisson route: atoms above `atom_floor` are sampled exactly.
    Ppp { atom_floor: f64 },
    /// Stick-breaking route. Stops once the remaining mass is below
    /// `residual_tol`, or once it is below the `resolve_rank`-th largest
    /// stick (so the top `resolve_rank` atoms are exact), or after
    /// `max_sticks` sticks.
    StickBreaking {
        residual_tol: f64,
        resolve_rank: usize,
        max_sticks: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdConfig {
    pub alpha: f64,
    pub truncation: Truncation,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "PD parameter must lie in (0, 1), got {alpha}"
        )))
    }
}

impl PdConfig {
    /// Poisson route with floor `max(1e−8, (α·2048)^{−1/α})`: the expected
    /// atom count `ε^{−α}/α` never exceeds the budget.
    pub fn ppp(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let budget_floor = (alpha * DEFAULT_ATOM_BUDGET).powf(-1.0 / alpha);
        Self::ppp_with_floor(alpha, DEFAULT_ATOM_FLOOR.max(budget_floor))
    }

    pub fn ppp_with_floor(alpha: f64, atom_floor: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(atom_floor > 0.0 && atom_floor < 1.0) {
            return Err(Error::Invalid(format!(
                "atom floor must lie in (0, 1), got {atom_floor}"
            )));
        }
        Ok(Self {
            alpha,
            truncation: Truncation::Ppp { atom_floor },
        })
    }

    pub fn stick_breaking(alpha: f64) -> Result<Self> {
        Self::stick_breaking_with(alpha, DEFAULT_RESIDUAL_TOL, 1, DEFAULT_MAX_STICKS)
    }

    pub fn stick_breaking_with(
        alpha: f64,
        residual_tol: f64,
        resolve_rank: usize,
        max_sticks: usize,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if !(residual_tol > 0.0) || resolve_rank == 0 || max_sticks == 0 {
            return Err(Error::Invalid("invalid stick-breaking truncation".into()));
        }
        Ok(Self {
            alpha,
            truncation: Truncation::StickBreaking {
                residual_tol,
                resolve_rank,
                max_sticks,
            },
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WeightSequence> {
        match self.truncation {
            Truncation::Ppp { .. } => sample_pd_ppp(self, rng),
            Truncation::StickBreaking { .. } => sample_pd_stickbreaking(self, rng),
        }
    }
}

/// Normalized atoms of a Poisson process with intensity `x^{−α−1}dx`.
///
/// The atom count above `ε` is `Poisson(ε^{−α}/α)` and each atom is
/// `ε·U^{−1/α}`. The expected mass below the floor, `ε^{1−α}/(1−α)`, is added
/// to the denominator and carried as a power-law tail.
pub fn sample_pd_ppp<R: Rng + ?Sized>(cfg: &PdConfig, rng: &mut R) -> Result<WeightSequence> {
    let Truncation::Ppp { atom_floor: eps } = cfg.truncation else {
        return Err(Error::Invalid("PPP sampler needs an atom floor".into()));
    };
    let alpha = cfg.alpha;
    check_alpha(alpha)?;
    let mean_count = eps.powf(-alpha) / alpha;
    let count = Poisson::new(mean_count)
        .map_err(|e| Error::Invalid(format!("atom count: {e}")))?
        .sample(rng) as usize;
    let mut atoms: Vec<f64> = (0..count)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            eps * u.powf(-1.0 / alpha)
        })
        .collect();
    atoms.sort_by(|a, b| b.total_cmp(a));
    let below = eps.powf(1.0 - alpha) / (1.0 - alpha);
    // smallest first
    let total = atoms.iter().rev().sum::<f64>() + below;
    let weights = atoms.iter().map(|x| x / total).collect();
    let tail = Tail {
        mass: below / total,
        law: TailLaw::PowerLaw {
            alpha,
            ceiling: eps / total,
        },
    };
    WeightSequence::with_tail(weights, Some(tail))
}

/// `Beta(a, b)` as `G_a / (G_a + G_b)`.
fn beta_variate<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let ga: f64 = Gamma::new(a, 1.0).expect("shape > 0").sample(rng);
    let gb: f64 = Gamma::new(b, 1.0).expect("shape > 0").sample(rng);
    if ga + gb == 0.0 {
        // both underflowed; the ratio of shapes is the conditional mean
        a / (a + b)
    } else {
        ga / (ga + gb)
    }
}

/// Sorted GEM(α, 0) stick-breaking.
pub fn sample_pd_stickbreaking<R: Rng + ?Sized>(
    cfg: &PdConfig,
    rng: &mut R,
) -> Result<WeightSequence> {
    let Truncation::StickBreaking {
        residual_tol,
        resolve_rank,
        max_sticks,
    } = cfg.truncation
    else {
        return Err(Error::Invalid(
            "stick-breaking sampler needs a residual tolerance".into(),
        ));
    };
    let alpha = cfg.alpha;
    check_alpha(alpha)?;
    let mut sticks = Vec::new();
    // the `resolve_rank` largest sticks so far, decreasing
    let mut top: Vec<f64> = Vec::with_capacity(resolve_rank + 1);
    let mut remaining = 1.0;
    let tail = loop {
        let i = sticks.len() + 1;
        let w = beta_variate(rng, 1.0 - alpha, i as f64 * alpha);
        let piece = w * remaining;
        remaining *= 1.0 - w;
        sticks.push(piece);
        let pos = top.partition_point(|&t| t >= piece);
        if pos < resolve_rank {
            top.insert(pos, piece);
            top.truncate(resolve_rank);
        }
        if remaining < residual_tol {
            sticks.push(remaining);
            break None;
        }
        let resolved = top.len() == resolve_rank && remaining < top[resolve_rank - 1];
        if resolved || sticks.len() >= max_sticks {
            break Some(Tail {
                mass: remaining,
                law: TailLaw::Gem {
                    alpha,
                    theta: sticks.len() as f64 * alpha,
                },
            });
        }
    };
    sticks.sort_by(|a, b| b.total_cmp(a));
    WeightSequence::with_tail(sticks, tail)
}

/// `exp(β η_(i)) / Σ_j exp(β η_(j))` for decreasing order statistics,
/// evaluated relative to the top term.
pub fn normalized_exponentiated(order_stats: &[f64], beta: f64) -> Result<WeightSequence> {
    let top = order_stats[0];
    let logs: Vec<f64> = order_stats.iter().map(|e| beta * (e - top)).collect();
    let rest: f64 = logs[1..].iter().rev().map(|l| l.exp()).sum();
    let log_z = rest.ln_1p();
    WeightSequence::new(logs.iter().map(|l| (l - log_z).exp()).collect())
}

fn check_beta(beta: f64, n: usize) -> Result<()> {
    if !(beta > 1.0) {
        return Err(Error::InvalidBeta(beta));
    }
    if n < 2 {
        return Err(Error::Invalid(format!("need n ≥ 2 exponentials, got {n}")));
    }
    Ok(())
}

/// Normalized exponentiated order statistics of `n` unit exponentials,
/// approximately `PD(1/β)` for large `n`.
pub fn sample_pd_via_ordered_exponentials<R: Rng + ?Sized>(
    beta: f64,
    n: usize,
    rng: &mut R,
) -> Result<WeightSequence> {
    check_beta(beta, n)?;
    let mut eta: Vec<f64> = (0..n).map(|_| exponential(rng, 1.0)).collect();
    eta.sort_by(|a, b| b.total_cmp(a));
    normalized_exponentiated(&eta, beta)
}

/// As [`sample_pd_via_ordered_exponentials`], generating the order
/// statistics by the Rényi representation `η_(j) = Σ_{i=j..n} E_i / i`.
pub fn sample_pd_via_renyi<R: Rng + ?Sized>(
    beta: f64,
    n: usize,
    rng: &mut R,
) -> Result<WeightSequence> {
    check_beta(beta, n)?;
    let e: Vec<f64> = (0..n).map(|_| exponential(rng, 1.0)).collect();
    let mut order = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        acc += e[j] / (j + 1) as f64;
        order[j] = acc;
    }
    normalized_exponentiated(&order, beta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStatistics {
    pub d_p: Vec<f64>,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub p_values: Vec<f64>,
    pub per_sample: Vec<SampleStatistics>,
    /// Mean and standard error of `D_p`, one per entry of `p_values`.
    pub d_p: Vec<MeanEstimate>,
    pub entropy: MeanEstimate,
}

/// Per-sample `D_p` and entropy, plus their means and standard errors.
pub fn empirical_weight_statistics(
    samples: &[WeightSequence],
    p_values: &[f64],
) -> Result<WeightSummary> {
    if samples.is_empty() {
        return Err(Error::Invalid("no samples".into()));
    }
    if let Some(p) = p_values.iter().find(|p| !(**p > 0.0)) {
        return Err(Error::Invalid(format!("p must be > 0, got {p}")));
    }
    let per_sample: Vec<SampleStatistics> = samples
        .iter()
        .map(|w| SampleStatistics {
            d_p: p_values.iter().map(|&p| w.power_sum(p)).collect(),
            entropy: w.entropy(),
        })
        .collect();
    let d_p = (0..p_values.len())
        .map(|k| mean_estimate(&per_sample.iter().map(|s| s.d_p[k]).collect::<Vec<_>>()))
        .collect();
    let entropy = mean_estimate(&per_sample.iter().map(|s| s.entropy).collect::<Vec<_>>());
    Ok(WeightSummary {
        p_values: p_values.to_vec(),
        per_sample,
        d_p,
        entropy,
    })
}
