//! Bounds on `μ_V = 1 / (1 + Σ_i exp(−(V_1 + … + V_i)))` for independent
//! exponentials `V_i` with means `θ_i`, compared with its deterministic
//! counterpart `μ̄_V` (the same expression at `V = θ`) and `σ² = Σ θ_i²`:
//!
//! ```text
//! E μ_V                 ≥ e^{−σ²} μ̄_V
//! E μ_V^{1/(2σ)}        ≤ 4 e^{1/4} μ̄_V^{1/(2σ)}
//! E (ln μ_V − ln μ̄_V)²  ≤ 8 σ²
//! ```

use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Statistic, Verdict};
use crate::error::{Error, Result};
use crate::stationary::exponential;
use crate::stats;
use crate::streams::Streams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaPhaseConfig {
    /// Means `θ_i` of the exponentials; `K` is the length (may be zero).
    pub thetas: Vec<f64>,
}

impl LemmaPhaseConfig {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Invalid(format!(
                "exponential means must be positive, got {t}"
            )));
        }
        Ok(Self { thetas })
    }

    pub fn k(&self) -> usize {
        self.thetas.len()
    }

    /// `σ² = Σ θ_i²`.
    pub fn sigma_squared(&self) -> f64 {
        self.thetas.iter().map(|t| t * t).sum()
    }

    /// `ln μ̄_V`.
    pub fn ln_mu_bar(&self) -> f64 {
        ln_mu(&self.thetas)
    }
}

/// `ln(1 / (1 + Σ_i exp(−(v_1 + … + v_i))))`.
fn ln_mu(v: &[f64]) -> f64 {
    let mut acc = 0.0;
    let sum: f64 = v
        .iter()
        .map(|x| {
            acc += x;
            (-acc).exp()
        })
        .sum();
    -sum.ln_1p()
}

/// Exact `μ̄_V`, `σ`, Monte Carlo estimates of the three left-hand sides and
/// a verdict per bound. A bound counts as violated only when the estimate is
/// more than three standard errors on the wrong side of it.
pub fn lemma_phase_check(
    cfg: &LemmaPhaseConfig,
    replicates: usize,
    streams: &Streams,
) -> Result<ExperimentReport> {
    if replicates < 2 {
        return Err(Error::Invalid("need at least two replicates".into()));
    }
    let mut report = ExperimentReport::new("lemma", streams.seed(), replicates);
    let sigma2 = cfg.sigma_squared();
    let sigma = sigma2.sqrt();
    let ln_bar = cfg.ln_mu_bar();
    report
        .stat(Statistic::exact("k", cfg.k() as f64))
        .stat(Statistic::exact("sigma_squared", sigma2))
        .stat(Statistic::exact("mu_bar", ln_bar.exp()));

    if cfg.k() == 0 {
        // empty sum: μ_V ≡ μ̄_V ≡ 1 and every bound is an identity or trivial
        report
            .verdict(Verdict::above("mean_lower_bound_slack", 0.0, -1e-12))
            .verdict(Verdict::above(
                "fractional_moment_slack",
                4.0 * 0.25f64.exp() - 1.0,
                0.0,
            ))
            .verdict(Verdict::above("log_square_slack", 0.0, -1e-12))
            .note("K = 0: μ_V ≡ 1");
        return Ok(report);
    }

    let q = 1.0 / (2.0 * sigma);
    let thetas = &cfg.thetas;
    let draws: Vec<(f64, f64, f64)> = streams.map(replicates, |_, rng| {
        let v: Vec<f64> = thetas.iter().map(|t| t * exponential(rng, 1.0)).collect();
        let l = ln_mu(&v);
        (l.exp(), (q * l).exp(), (l - ln_bar) * (l - ln_bar))
    });
    let est = |f: fn(&(f64, f64, f64)) -> f64| {
        stats::mean_estimate(&draws.iter().map(f).collect::<Vec<_>>())
    };
    let mean = est(|d| d.0);
    let frac = est(|d| d.1);
    let logsq = est(|d| d.2);
    report
        .stat(Statistic::estimate("mean_mu", mean.mean, mean.std_error))
        .stat(Statistic::estimate(
            "fractional_moment",
            frac.mean,
            frac.std_error,
        ))
        .stat(Statistic::estimate(
            "mean_log_square",
            logsq.mean,
            logsq.std_error,
        ));

    let lower = (-sigma2 + ln_bar).exp();
    let upper_frac = 4.0 * 0.25f64.exp() * (q * ln_bar).exp();
    let upper_log = 8.0 * sigma2;
    // slack ≥ 0 means consistent with the bound up to 3 SE
    report
        .verdict(Verdict::above(
            "mean_lower_bound_slack",
            mean.mean + 3.0 * mean.std_error - lower,
            0.0,
        ))
        .verdict(Verdict::above(
            "fractional_moment_slack",
            upper_frac - (frac.mean - 3.0 * frac.std_error),
            0.0,
        ))
        .verdict(Verdict::above(
            "log_square_slack",
            upper_log - (logsq.mean - 3.0 * logsq.std_error),
            0.0,
        ));
    Ok(report)
}
