//! Named, reproducible scenarios: each fixes a model, sample sizes and
//! thresholds and returns one [`ExperimentReport`].

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::counterexamples::{edge_blocks_collapse, top_push_ratios, CounterexampleConfig};
use super::lemma::{lemma_phase_check, LemmaPhaseConfig};
use super::model::{DriftModel, EtaRule};
use super::phase::{phase_sweep, PhaseRules};
use super::rates::{rate_regression, RateRules};
use super::report::{ExperimentReport, Statistic, Verdict};
use super::{largest, pd_reference};
use crate::asymptotics::{limit_dp, limit_entropy, max_weight_moment, EtaParam};
use crate::error::{Error, Result};
use crate::pd::{sample_pd_via_ordered_exponentials, PdConfig};
use crate::sde::{run_to_stationarity, ParticleState, SimConfig};
use crate::stationary::StationaryLaw;
use crate::stats;
use crate::streams::Streams;
use crate::types::{DriftSpec, WeightSequence};

pub const DEFAULT_SEED: u64 = 20_240_917;

const SCENARIOS: &[(&str, &str)] = &[
    (
        "stationary-exactness",
        "exact spacing sampler vs its exponential marginals",
    ),
    (
        "sde-convergence",
        "Euler–Maruyama spacings vs the stationary law",
    ),
    ("pd-cross", "Poisson-process vs stick-breaking PD samplers"),
    (
        "ordered-exponentials",
        "normalized exponentiated order statistics vs PD(1/β)",
    ),
    (
        "asymptotics",
        "limit formulas vs exact values and Monte Carlo",
    ),
    ("trichotomy-pd", "gravity η ≡ 1/4: PD(1/2) limit"),
    ("trichotomy-collapse", "gravity η ≡ 1: all weights vanish"),
    (
        "trichotomy-eta0",
        "Atlas η_n ≡ 1: the largest weight dominates",
    ),
    ("rate-law", "gravity η ≡ 1: ln μ₁ / ln n → −1/2"),
    ("rate-law-eta2", "gravity η ≡ 2: ln μ₁ / ln n → −3/4"),
    (
        "rate-critical",
        "gravity η_n = 1/2 + 1/ln n: ln μ₁ / ln ln n → −1",
    ),
    (
        "lemma9",
        "exponential-sum bounds over random configurations",
    ),
    ("counterexample-1", "top push: equal consecutive-ratio laws"),
    ("counterexample-2", "edge blocks: collapse despite η < 1/2"),
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|(n, _)| *n).collect()
}

pub fn scenario_description(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, d)| *d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioOptions {
    pub seed: u64,
    /// Overrides the scenario's main replicate count.
    pub replicates: Option<usize>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            replicates: None,
        }
    }
}

impl ScenarioOptions {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            replicates: None,
        }
    }

    fn reps(&self, default: usize) -> usize {
        self.replicates.unwrap_or(default)
    }
}

/// Runs a named scenario.
pub fn run_scenario(name: &str, opts: &ScenarioOptions) -> Result<ExperimentReport> {
    let started = Instant::now();
    let streams = Streams::new(opts.seed).derive(name);
    let mut report = match name {
        "stationary-exactness" => stationary_exactness(opts.reps(100_000), &streams),
        "sde-convergence" => sde_convergence(opts.reps(20), &streams),
        "pd-cross" => pd_cross(opts.reps(5000), &streams),
        "ordered-exponentials" => ordered_exponentials(opts.reps(2000), &streams),
        "asymptotics" => asymptotics(opts.reps(100_000), &streams),
        "trichotomy-pd" => trichotomy(
            DriftModel::gravity(EtaRule::Constant { value: 0.25 }),
            2000,
            opts.reps(5000),
            &streams,
        ),
        "trichotomy-collapse" => trichotomy(
            DriftModel::gravity(EtaRule::Constant { value: 1.0 }),
            2000,
            opts.reps(1000),
            &streams,
        ),
        "trichotomy-eta0" => trichotomy(
            DriftModel::atlas(EtaRule::Constant { value: 1.0 }),
            1000,
            opts.reps(1000),
            &streams,
        ),
        "rate-law" => rates(EtaRule::Constant { value: 1.0 }, opts.reps(1000), &streams),
        "rate-law-eta2" => rates(EtaRule::Constant { value: 2.0 }, opts.reps(1000), &streams),
        "rate-critical" => rates(
            EtaRule::InverseLog {
                limit: 0.5,
                scale: 1.0,
            },
            opts.reps(1000),
            &streams,
        ),
        "lemma9" => lemma_suite(100, opts.reps(10_000), &streams),
        "counterexample-1" => {
            let cfg = CounterexampleConfig {
                push_replicates: opts.reps(10_000),
                ..CounterexampleConfig::default()
            };
            top_push_ratios(&cfg, &streams)
        }
        "counterexample-2" => {
            let cfg = CounterexampleConfig {
                blocks_replicates: opts.reps(10_000),
                ..CounterexampleConfig::default()
            };
            edge_blocks_collapse(&cfg, &streams)
        }
        other => Err(Error::Invalid(format!(
            "unknown scenario `{other}`; valid scenarios: {}",
            scenario_names().join(", ")
        ))),
    }?;
    report.scenario = name.to_string();
    report.seed = opts.seed;
    report.runtime = Some(started.elapsed());
    Ok(report)
}

/// Atlas `n = 10`, `η_n = 5` (`α_k = k/2`): every spacing marginal against
/// `Exp(2α_j)` by mean and KS distance.
fn stationary_exactness(replicates: usize, streams: &Streams) -> Result<ExperimentReport> {
    let spec = DriftSpec::atlas(10, 5.0)?;
    let law = StationaryLaw::new(&spec)?;
    let draws = streams.map(replicates, |_, rng| law.sample_spacings(rng));
    let mut report = ExperimentReport::new("", streams.seed(), replicates);
    let (mut worst_z, mut worst_ks) = (0.0f64, 0.0f64);
    for (j, &rate) in law.rates().iter().enumerate() {
        let y: Vec<f64> = draws.iter().map(|s| s.values()[j]).collect();
        let est = stats::mean_estimate(&y);
        let z = (est.mean - 1.0 / rate).abs() / est.std_error;
        let d = stats::ks_one_sample(&y, |x| -(-rate * x.max(0.0)).exp_m1());
        report
            .stat(Statistic::estimate(
                format!("mean_y{}", j + 1),
                est.mean,
                est.std_error,
            ))
            .stat(Statistic::exact(format!("ks_y{}", j + 1), d));
        worst_z = worst_z.max(z);
        worst_ks = worst_ks.max(d);
    }
    report
        .verdict(Verdict::below("max_mean_deviation_in_se", worst_z, 3.0))
        .verdict(Verdict::below("max_ks", worst_ks, 0.006));
    Ok(report)
}

/// Atlas `n = 3`, `δ = (0, 0, 3)`: pooled post-burn-in `Y₁` samples from
/// independent paths against `Exp(2)`.
fn sde_convergence(paths: usize, streams: &Streams) -> Result<ExperimentReport> {
    let spec = DriftSpec::atlas(3, 3.0)?;
    let cfg = SimConfig::new(0.005, 400.0)?.with_burn_in(100.0)?;
    let runs = streams.map(paths, |_, rng| {
        run_to_stationarity(&spec, &cfg, ParticleState::equally_spaced(&spec), rng)
    });
    let mut y1 = Vec::new();
    for run in runs {
        y1.extend(run?.samples.iter().map(|s| s.values()[0]));
    }
    let d = stats::ks_one_sample(&y1, |x| -(-2.0 * x.max(0.0)).exp_m1());
    let est = stats::mean_estimate(&y1);
    let mut report = ExperimentReport::new("", streams.seed(), paths);
    report
        .stat(Statistic::exact("pooled_samples", y1.len() as f64))
        .stat(Statistic::estimate("mean_y1", est.mean, est.std_error))
        .verdict(Verdict::below("ks_y1_vs_exp2", d, 0.02))
        .note("dt = 0.005, t_max = 400, burn_in = 100, one sample per unit time");
    Ok(report)
}

fn sample_all(cfg: PdConfig, draws: usize, streams: &Streams) -> Result<Vec<WeightSequence>> {
    streams
        .map(draws, |_, rng| cfg.sample(rng))
        .into_iter()
        .collect()
}

/// For `α ∈ {0.2, 0.5, 0.8}`: KS on `V₁` between the two samplers and
/// `E D₂ = 1 − α` for each.
fn pd_cross(draws: usize, streams: &Streams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("", streams.seed(), draws);
    for alpha in [0.2, 0.5, 0.8] {
        let ppp = sample_all(
            PdConfig::ppp(alpha)?,
            draws,
            &streams.derive(&format!("ppp/{alpha}")),
        )?;
        let sb = sample_all(
            PdConfig::stick_breaking(alpha)?,
            draws,
            &streams.derive(&format!("stick/{alpha}")),
        )?;
        let d = stats::ks_two_sample(&largest(&ppp), &largest(&sb));
        let p = stats::ks_two_sample_p_value(d, ppp.len(), sb.len());
        report
            .stat(Statistic::exact(format!("ks_v1[alpha={alpha}]"), d))
            .verdict(Verdict::above(
                format!("ks_v1_p_value[alpha={alpha}]"),
                p,
                0.001,
            ));
        for (label, ws) in [("ppp", &ppp), ("stick_breaking", &sb)] {
            let d2 = stats::mean_estimate(&ws.iter().map(|w| w.power_sum(2.0)).collect::<Vec<_>>());
            let name = format!("mean_d2_{label}[alpha={alpha}]");
            report
                .stat(Statistic::estimate(name.clone(), d2.mean, d2.std_error))
                .verdict(Verdict::within(name, d2.mean, 1.0 - alpha, 0.02));
        }
    }
    Ok(report)
}

/// `β = 2`, `n = 10⁴`: largest normalized exponentiated order statistic vs
/// `PD(½)` `V₁`.
fn ordered_exponentials(replicates: usize, streams: &Streams) -> Result<ExperimentReport> {
    let (beta, n) = (2.0, 10_000);
    let top: Vec<f64> = streams
        .derive("ordered")
        .map(replicates, |_, rng| {
            sample_pd_via_ordered_exponentials(beta, n, rng).map(|w| w.largest())
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let reference = largest(&pd_reference(1.0 / beta, replicates, streams)?);
    let d = stats::ks_two_sample(&top, &reference);
    let mut report = ExperimentReport::new("", streams.seed(), replicates);
    report.verdict(Verdict::below("ks_mu1_vs_pd_v1", d, 0.05));
    Ok(report)
}

/// `η = ¼`: exact `E D₂`, the entropy limit and the first moment of the
/// largest weight against a Monte Carlo mean of `PD(½)` `V₁`.
fn asymptotics(draws: usize, streams: &Streams) -> Result<ExperimentReport> {
    let eta = EtaParam::new(0.25)?;
    let dp = limit_dp(eta, 2.0)?;
    let entropy = limit_entropy(eta, 1e-12);
    let moment = max_weight_moment(eta, 1.0, 1e-8);
    let v1 = stats::mean_estimate(&largest(&pd_reference(0.5, draws, streams)?));
    let mut report = ExperimentReport::new("", streams.seed(), draws);
    report
        .stat(Statistic::exact("limit_dp[p=2]", dp))
        .stat(Statistic::exact("limit_entropy", entropy))
        .stat(Statistic::exact("max_weight_moment[p=1]", moment))
        .stat(Statistic::estimate("mc_mean_v1", v1.mean, v1.std_error))
        .verdict(Verdict::within("limit_dp[p=2]", dp, 0.5, 1e-12))
        .verdict(Verdict::within(
            "limit_entropy",
            entropy,
            2.0 * 2f64.ln(),
            1e-9,
        ))
        .verdict(Verdict::within(
            "max_weight_moment[p=1]",
            moment,
            v1.mean,
            3.0 * v1.std_error,
        ));
    Ok(report)
}

fn trichotomy(
    model: DriftModel,
    n: usize,
    replicates: usize,
    streams: &Streams,
) -> Result<ExperimentReport> {
    phase_sweep(&model, &[n], replicates, streams, &PhaseRules::default())
}

fn rates(rule: EtaRule, replicates: usize, streams: &Streams) -> Result<ExperimentReport> {
    rate_regression(
        &DriftModel::gravity(rule),
        &[1000, 2000, 5000],
        replicates,
        streams,
        &RateRules::default(),
    )
}

/// `configs` random `(K, θ)` with `K ∈ [1, 50]`, `θ_i ∈ (0, 1]`, plus the
/// unit case `K = 1`, `θ = 1`.
fn lemma_suite(configs: usize, replicates: usize, streams: &Streams) -> Result<ExperimentReport> {
    let mut rng = streams.derive("configs").rng(0);
    let cfgs: Vec<LemmaPhaseConfig> = (0..configs)
        .map(|_| {
            let k = rng.random_range(1..=50);
            LemmaPhaseConfig::new((0..k).map(|_| 1.0 - rng.random::<f64>()).collect())
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new("", streams.seed(), replicates);
    let mut violations = 0usize;
    let mut min_slack = [f64::INFINITY; 3];
    for (i, cfg) in cfgs.iter().enumerate() {
        let r = lemma_phase_check(cfg, replicates, &streams.derive(&format!("config={i}")))?;
        violations += r.verdicts.iter().filter(|v| !v.passed).count();
        for (slot, v) in min_slack.iter_mut().zip(&r.verdicts) {
            *slot = slot.min(v.measured);
        }
    }
    let unit = lemma_phase_check(
        &LemmaPhaseConfig::new(vec![1.0])?,
        replicates,
        &streams.derive("unit"),
    )?;
    report
        .stat(Statistic::exact("configs", configs as f64))
        .stat(Statistic::exact("min_mean_lower_bound_slack", min_slack[0]))
        .stat(Statistic::exact(
            "min_fractional_moment_slack",
            min_slack[1],
        ))
        .stat(Statistic::exact("min_log_square_slack", min_slack[2]))
        .verdict(Verdict::below("bound_violations", violations as f64, 0.5));
    report.absorb("unit/", unit);
    Ok(report)
}
