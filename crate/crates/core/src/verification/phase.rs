//! Finite-`n` classification of the largest weight into the three phases.

use serde::{Deserialize, Serialize};

use super::model::DriftModel;
use super::report::{ExperimentReport, Phase, Statistic, Verdict};
use super::{largest, median_statistic, pd_reference};
use crate::error::{Error, Result};
use crate::stationary::sample_stationary_weights;
use crate::stats;
use crate::streams::Streams;
use crate::types::WeightSequence;

/// Thresholds of the classification rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseRules {
    /// Dominance when the median largest weight exceeds this.
    pub dominance_median: f64,
    /// Collapse when the median largest weight is below this and decreasing in `n`.
    pub collapse_median: f64,
    /// PD limit when the two-sample KS distance to `PD(2η)` is below this.
    pub pd_ks: f64,
    /// Reference `PD(2η)` draws; defaults to the replicate count.
    pub pd_replicates: Option<usize>,
    /// Ranks compared with the reference quantiles.
    pub top_m: usize,
}

impl Default for PhaseRules {
    fn default() -> Self {
        Self {
            dominance_median: 0.9,
            collapse_median: 0.05,
            pd_ks: 0.05,
            pd_replicates: None,
            top_m: 10,
        }
    }
}

/// The phase the limit theory predicts for `lim (δ̄ − δ₁) = η`.
pub(crate) fn expected_phase(eta: f64) -> Phase {
    if eta == 0.0 {
        Phase::Dominance
    } else if eta >= 0.5 {
        Phase::Collapse
    } else if eta > 0.0 {
        Phase::PdLimit
    } else {
        Phase::Inconclusive
    }
}

/// Dominance, then collapse, then the PD limit; otherwise inconclusive.
fn classify(medians: &[f64], ks: Option<f64>, rules: &PhaseRules) -> Phase {
    let last = *medians.last().expect("nonempty grid");
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    if last > rules.dominance_median {
        Phase::Dominance
    } else if last < rules.collapse_median && decreasing {
        Phase::Collapse
    } else if ks.is_some_and(|d| d < rules.pd_ks) {
        Phase::PdLimit
    } else {
        Phase::Inconclusive
    }
}

/// Median of each of the top `m` coordinates across the reference draws.
fn quantile_profile(reference: &[WeightSequence], m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| stats::median(&reference.iter().map(|w| w.get(i)).collect::<Vec<_>>()))
        .collect()
}

/// Samples the stationary weights at each `n`, reports the median largest
/// weight, its distance to `PD(2η)` when `0 < η < ½`, and the phase verdict.
pub fn phase_sweep(
    model: &DriftModel,
    n_grid: &[usize],
    replicates: usize,
    streams: &Streams,
    rules: &PhaseRules,
) -> Result<ExperimentReport> {
    if n_grid.is_empty() || replicates < 2 {
        return Err(Error::Invalid(
            "phase sweep needs a grid and at least two replicates".into(),
        ));
    }
    let mut report = ExperimentReport::new("phase-sweep", streams.seed(), replicates);
    let eta = model.limit_eta();
    let alpha = eta.filter(|e| *e > 0.0 && *e < 0.5).map(|e| 2.0 * e);
    let reference = match alpha {
        Some(a) => Some(pd_reference(
            a,
            rules.pd_replicates.unwrap_or(replicates),
            streams,
        )?),
        None => None,
    };
    let profile = reference.as_ref().map(|r| quantile_profile(r, rules.top_m));
    let reference_top = reference.as_deref().map(largest);

    let mut medians = Vec::with_capacity(n_grid.len());
    let mut last_ks = None;
    for &n in n_grid {
        let spec = model.generate(n)?;
        let draws = sample_stationary_weights(
            &spec,
            replicates,
            &streams.derive(&format!("stationary/n={n}")),
        )?;
        let mu1 = largest(&draws);
        let med = median_statistic(format!("median_mu1[n={n}]"), &mu1, streams);
        medians.push(med.value);
        report.stat(med);
        if let (Some(reference_top), Some(profile)) = (&reference_top, &profile) {
            let d = stats::ks_two_sample(&mu1, reference_top);
            report.stat(Statistic::exact(format!("ks_mu1_vs_pd[n={n}]"), d));
            last_ks = Some(d);
            let dprime: Vec<f64> = draws
                .iter()
                .map(|w| {
                    (0..profile.len())
                        .map(|i| (w.get(i) - profile[i]).abs())
                        .sum()
                })
                .collect();
            let est = stats::mean_estimate(&dprime);
            report.stat(Statistic::estimate(
                format!("mean_dprime_top{}[n={n}]", rules.top_m),
                est.mean,
                est.std_error,
            ));
        }
    }

    let phase = classify(&medians, last_ks, rules);
    report.classification = Some(phase);
    let n_last = *n_grid.last().expect("nonempty grid");
    if let Some(eta) = eta {
        report.stat(Statistic::exact("eta", eta));
        let expected = expected_phase(eta);
        let last = *medians.last().expect("nonempty grid");
        match expected {
            Phase::PdLimit => {
                report.verdict(Verdict::below(
                    format!("ks_mu1_vs_pd[n={n_last}]"),
                    last_ks.unwrap_or(f64::NAN),
                    rules.pd_ks,
                ));
            }
            Phase::Collapse => {
                report.verdict(Verdict::below(
                    format!("median_mu1[n={n_last}]"),
                    last,
                    rules.collapse_median,
                ));
            }
            Phase::Dominance => {
                report.verdict(Verdict::above(
                    format!("median_mu1[n={n_last}]"),
                    last,
                    rules.dominance_median,
                ));
            }
            Phase::Inconclusive => {}
        }
        report.verdict(Verdict::above(
            format!("phase is {}", expected.as_str()),
            if phase == expected { 1.0 } else { 0.0 },
            0.5,
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verification::EtaRule;

    #[test]
    fn classification_is_exclusive_and_ordered() {
        let r = PhaseRules::default();
        assert_eq!(classify(&[0.95], Some(0.01), &r), Phase::Dominance);
        assert_eq!(classify(&[0.2, 0.01], Some(0.01), &r), Phase::Collapse);
        assert_eq!(classify(&[0.01, 0.02], Some(0.01), &r), Phase::PdLimit);
        assert_eq!(classify(&[0.01, 0.02], None, &r), Phase::Inconclusive);
        assert_eq!(classify(&[0.5], Some(0.2), &r), Phase::Inconclusive);
    }

    #[test]
    fn expected_phases() {
        assert_eq!(expected_phase(0.0), Phase::Dominance);
        assert_eq!(expected_phase(0.25), Phase::PdLimit);
        assert_eq!(expected_phase(0.5), Phase::Collapse);
        assert_eq!(expected_phase(f64::INFINITY), Phase::Collapse);
    }

    #[test]
    fn small_sweeps_classify() {
        let s = Streams::new(21);
        let dom = phase_sweep(
            &DriftModel::atlas(EtaRule::Constant { value: 1.0 }),
            &[200],
            400,
            &s,
            &PhaseRules::default(),
        )
        .unwrap();
        assert_eq!(dom.classification, Some(Phase::Dominance));
        assert!(dom.passed());
        let col = phase_sweep(
            &DriftModel::gravity(EtaRule::Constant { value: 1.0 }),
            &[250, 1000],
            400,
            &s,
            &PhaseRules::default(),
        )
        .unwrap();
        assert_eq!(col.classification, Some(Phase::Collapse));
        assert!(col.passed(), "{col:?}");
    }

    #[test]
    fn rejects_empty_grid() {
        let m = DriftModel::gravity(EtaRule::Constant { value: 1.0 });
        assert!(phase_sweep(&m, &[], 10, &Streams::new(0), &PhaseRules::default()).is_err());
    }
}
