//! Statistical harness: finite-`n` diagnostics for the phase trichotomy, the
//! collapse rates, the exponential-sum bounds and the counterexample arrays,
//! plus a registry of named scenarios.
//!
//! Every Monte Carlo quantity is computed from per-replicate substreams and
//! reduced in replicate-index order, so reports are bit-identical for any
//! thread count.

mod conditions;
mod counterexamples;
mod lemma;
mod model;
mod phase;
mod rates;
mod report;
pub mod scenarios;

pub use conditions::{check_theorem2_conditions, ConditionDiagnostics, EdgeDiagnostics};
pub use counterexamples::{
    counterexample_scenarios, edge_blocks_collapse, top_push_ratios, CounterexampleConfig,
};
pub use lemma::{lemma_phase_check, LemmaPhaseConfig};
pub use model::{DriftModel, EtaRule};
pub use phase::{phase_sweep, PhaseRules};
pub use rates::{rate_regression, RateRules};
pub use report::{ExperimentReport, Phase, Statistic, Threshold, Verdict, SCHEMA_VERSION};
pub use scenarios::{run_scenario, scenario_names, ScenarioOptions};

use crate::error::Result;
use crate::pd::PdConfig;
use crate::stats;
use crate::streams::Streams;
use crate::types::WeightSequence;

/// Bootstrap resamples behind every reported median standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Median with a bootstrap standard error.
fn median_statistic(name: String, xs: &[f64], streams: &Streams) -> Statistic {
    let se = stats::bootstrap_median_se(xs, BOOTSTRAP_RESAMPLES, &streams.derive(&name));
    Statistic::estimate(name, stats::median(xs), se)
}

/// `draws` reference samples of `PD(alpha)` from the Poisson-process sampler.
fn pd_reference(alpha: f64, draws: usize, streams: &Streams) -> Result<Vec<WeightSequence>> {
    let cfg = PdConfig::ppp(alpha)?;
    streams
        .derive(&format!("pd-reference/alpha={alpha}"))
        .map(draws, |_, rng| cfg.sample(rng))
        .into_iter()
        .collect()
}

fn largest(ws: &[WeightSequence]) -> Vec<f64> {
    ws.iter().map(WeightSequence::largest).collect()
}
