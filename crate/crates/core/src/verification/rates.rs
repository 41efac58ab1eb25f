//! Collapse rates of the largest weight when `η ≥ ½`:
//! `ln μ₁ / ln n → 1/(2η) − 1`, and `ln μ₁ / ln ln n → −1` at the boundary
//! `δ̄ − δ₁ = ½ + O(1/ln n)`.

use serde::{Deserialize, Serialize};

use super::model::DriftModel;
use super::report::{ExperimentReport, Statistic, Verdict};
use super::{largest, median_statistic};
use crate::error::{Error, Result};
use crate::stationary::sample_stationary_weights;
use crate::stats;
use crate::streams::Streams;

/// Suffix on every verdict of the boundary case.
pub const SLOW_CONVERGENCE: &str = "slow-convergence diagnostic";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RateRules {
    pub tolerance: f64,
    /// Looser tolerance for the boundary case, where `ln ln n` grows too
    /// slowly for tight checks at feasible `n`.
    pub critical_tolerance: f64,
}

impl Default for RateRules {
    fn default() -> Self {
        Self {
            tolerance: 0.1,
            critical_tolerance: 0.3,
        }
    }
}

/// Per-`n` medians of the normalized log largest weight, their
/// extrapolation to `n = ∞` (linear in the reciprocal normalizer), and
/// verdicts against the predicted limit.
pub fn rate_regression(
    model: &DriftModel,
    n_grid: &[usize],
    replicates: usize,
    streams: &Streams,
    rules: &RateRules,
) -> Result<ExperimentReport> {
    let lipschitz = model.lipschitz_constant().ok_or_else(|| {
        Error::ModelMismatch(format!(
            "the {} model does not certify |δ_i(n) − δ₁(n)| ≤ C(i − 1)/n",
            model.label()
        ))
    })?;
    let eta = model
        .limit_eta()
        .filter(|e| *e >= 0.5)
        .ok_or_else(|| Error::Domain("collapse rates need lim (δ̄ − δ₁) ≥ 1/2".into()))?;
    let critical = model.is_critical();
    if n_grid.is_empty() || n_grid.iter().any(|&n| n < 3) || replicates < 2 {
        return Err(Error::Invalid(
            "rate regression needs n ≥ 3 and at least two replicates".into(),
        ));
    }
    let (target, tolerance, normalizer, suffix): (f64, f64, fn(f64) -> f64, String) = if critical {
        (
            -1.0,
            rules.critical_tolerance,
            |n| n.ln().ln(),
            format!(" ({SLOW_CONVERGENCE})"),
        )
    } else {
        (
            1.0 / (2.0 * eta) - 1.0,
            rules.tolerance,
            f64::ln,
            String::new(),
        )
    };
    let mut report = ExperimentReport::new("rate-regression", streams.seed(), replicates);
    report
        .stat(Statistic::exact("eta", eta))
        .stat(Statistic::exact("lipschitz_constant", lipschitz))
        .stat(Statistic::exact("predicted_limit", target));
    if critical {
        report.note(format!("normalizer ln ln n; {SLOW_CONVERGENCE}"));
    }

    let mut medians = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let spec = model.generate(n)?;
        let draws = sample_stationary_weights(
            &spec,
            replicates,
            &streams.derive(&format!("stationary/n={n}")),
        )?;
        let scale = normalizer(n as f64);
        let ratios: Vec<f64> = largest(&draws).iter().map(|m| m.ln() / scale).collect();
        let med = median_statistic(format!("median_ratio[n={n}]"), &ratios, streams);
        medians.push(med.value);
        report.stat(med);
    }
    let n_last = *n_grid.last().expect("nonempty grid");
    report.verdict(Verdict::within(
        format!("median_ratio[n={n_last}]{suffix}"),
        *medians.last().expect("nonempty grid"),
        target,
        tolerance,
    ));
    if n_grid.len() >= 2 {
        let x: Vec<f64> = n_grid.iter().map(|&n| 1.0 / normalizer(n as f64)).collect();
        let fit = stats::linear_fit(&x, &medians);
        report
            .stat(Statistic::exact("extrapolated_limit", fit.intercept))
            .stat(Statistic::exact("extrapolation_slope", fit.slope))
            .stat(Statistic::exact("extrapolation_r_squared", fit.r_squared))
            .verdict(Verdict::within(
                format!("extrapolated_limit{suffix}"),
                fit.intercept,
                target,
                tolerance,
            ));
    }
    Ok(report)
}
