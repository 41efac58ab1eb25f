//! Drift arrays whose edge gap lies in `(0, ½)` yet whose weights are not
//! Poisson–Dirichlet.
//!
//! * Top push (`δ₁ = −¼`, all others zero): `α₁, α₂ → ¼`, so `μ₂/μ₁` and
//!   `μ₃/μ₂` become identically distributed, unlike `V₂/V₁` and `V₃/V₂`
//!   under `PD(½)`.
//! * Edge blocks: edge gap `η` but interior gaps `4(1 − η)`; the largest
//!   weight still collapses, at an `n^{−1/4}`-order rate.

use serde::{Deserialize, Serialize};

use super::model::DriftModel;
use super::report::{ExperimentReport, Statistic, Verdict};
use super::{median_statistic, pd_reference};
use crate::error::{Error, Result};
use crate::stationary::sample_stationary_weights;
use crate::stats;
use crate::streams::Streams;
use crate::types::WeightSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleConfig {
    pub push: f64,
    pub push_n: usize,
    pub push_replicates: usize,
    /// Equality threshold on KS(μ₂/μ₁, μ₃/μ₂).
    pub push_ks: f64,
    /// Minimum KS(V₂/V₁, V₃/V₂) on the `PD(2·push)` control.
    pub control_ks: f64,
    pub blocks_eta: f64,
    pub blocks_n_grid: Vec<usize>,
    pub blocks_replicates: usize,
    /// Upper bound on the log-log slope of median μ₁ against n.
    pub blocks_slope: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            push: 0.25,
            push_n: 2000,
            push_replicates: 10_000,
            push_ks: 0.02,
            control_ks: 0.05,
            blocks_eta: 0.25,
            blocks_n_grid: vec![256, 1024, 4096],
            blocks_replicates: 10_000,
            blocks_slope: -0.15,
        }
    }
}

fn consecutive_ratios(ws: &[WeightSequence]) -> (Vec<f64>, Vec<f64>) {
    ws.iter()
        .map(|w| (w.get(1) / w.get(0), w.get(2) / w.get(1)))
        .unzip()
}

/// KS distance between the first two consecutive-weight ratios for the
/// top-push array, and the same statistic on `PD(2·push)` draws.
pub fn top_push_ratios(cfg: &CounterexampleConfig, streams: &Streams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("top-push", streams.seed(), cfg.push_replicates);
    let model = DriftModel::TopPush { push: cfg.push };
    let spec = model.generate(cfg.push_n)?;
    let draws = sample_stationary_weights(&spec, cfg.push_replicates, &streams.derive("top-push"))?;
    let (r2, r3) = consecutive_ratios(&draws);
    let d = stats::ks_two_sample(&r2, &r3);

    let alpha = 2.0 * cfg.push;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "control needs 0 < 2·push < 1, got {alpha}"
        )));
    }
    let control = pd_reference(alpha, cfg.push_replicates, streams)?;
    let (v2, v3) = consecutive_ratios(&control);
    let dc = stats::ks_two_sample(&v2, &v3);
    let n = cfg.push_n;
    report
        .stat(Statistic::exact(format!("ks_ratio12_vs_ratio23[n={n}]"), d))
        .stat(Statistic::exact(
            format!("ks_ratio12_vs_ratio23_p_value[n={n}]"),
            stats::ks_two_sample_p_value(d, r2.len(), r3.len()),
        ))
        .stat(Statistic::exact("pd_control_ks", dc))
        .verdict(Verdict::below(
            format!("ks_ratio12_vs_ratio23[n={n}]"),
            d,
            cfg.push_ks,
        ))
        .verdict(Verdict::above("pd_control_ks", dc, cfg.control_ks));
    Ok(report)
}

/// Median largest weight of the edge-block array along the grid: strictly
/// decreasing, with a log-log slope at most `blocks_slope`.
pub fn edge_blocks_collapse(
    cfg: &CounterexampleConfig,
    streams: &Streams,
) -> Result<ExperimentReport> {
    if cfg.blocks_n_grid.len() < 2 {
        return Err(Error::Invalid(
            "edge-block scenario needs at least two n".into(),
        ));
    }
    let mut report = ExperimentReport::new("edge-blocks", streams.seed(), cfg.blocks_replicates);
    let model = DriftModel::EdgeBlocks {
        eta: cfg.blocks_eta,
    };
    let mut medians = Vec::new();
    for &n in &cfg.blocks_n_grid {
        let spec = model.generate(n)?;
        let draws = sample_stationary_weights(
            &spec,
            cfg.blocks_replicates,
            &streams.derive(&format!("edge-blocks/n={n}")),
        )?;
        let mu1: Vec<f64> = draws.iter().map(WeightSequence::largest).collect();
        let med = median_statistic(format!("median_mu1[n={n}]"), &mu1, streams);
        medians.push(med.value);
        report.stat(med);
    }
    let steepest_rise = medians
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let x: Vec<f64> = cfg.blocks_n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let fit = stats::linear_fit(&x, &y);
    report
        .stat(Statistic::exact("log_log_slope", fit.slope))
        .verdict(Verdict::below(
            "largest_successive_change",
            steepest_rise,
            0.0,
        ))
        .verdict(Verdict::below("log_log_slope", fit.slope, cfg.blocks_slope));
    Ok(report)
}

/// Both counterexamples in one report.
pub fn counterexample_scenarios(
    cfg: &CounterexampleConfig,
    streams: &Streams,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "counterexamples",
        streams.seed(),
        cfg.push_replicates.max(cfg.blocks_replicates),
    );
    report.absorb("top_push/", top_push_ratios(cfg, streams)?);
    report.absorb("edge_blocks/", edge_blocks_collapse(cfg, streams)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counterexamples_run() {
        let cfg = CounterexampleConfig {
            push_n: 200,
            push_replicates: 2000,
            push_ks: 0.05,
            blocks_n_grid: vec![64, 4096],
            blocks_replicates: 300,
            ..CounterexampleConfig::default()
        };
        let r = counterexample_scenarios(&cfg, &Streams::new(3)).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(r.find_verdict("top_push/pd_control_ks").is_some());
    }
}
