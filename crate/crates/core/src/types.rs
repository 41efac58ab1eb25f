//! Sequence-space types, the metrics `d` and `d′`, and drift vectors.
//!
//! Rank 1 is the topmost (largest) particle throughout: `deltas[0]` is the
//! drift received by the current maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{digamma, ln_gamma};

/// Default number of terms of the series defining `d`.
pub const METRIC_D_DEPTH: usize = 64;

/// Tolerance on `Σ weights = 1` that a [`WeightSequence`] guarantees.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Inputs closer than this to unit mass are renormalized; others rejected.
pub const WEIGHT_RENORMALIZE_TOL: f64 = 1e-9;

/// Rank-dependent drifts `(δ_1(n), …, δ_n(n))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    deltas: Vec<f64>,
}

impl DriftSpec {
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() < 2 {
            return Err(Error::Invalid(format!(
                "drift vector needs n ≥ 2 entries, got {}",
                deltas.len()
            )));
        }
        if let Some(i) = deltas.iter().position(|d| !d.is_finite()) {
            return Err(Error::Invalid(format!("drift δ_{} is not finite", i + 1)));
        }
        Ok(Self { deltas })
    }

    /// Only the bottom particle is pushed, with drift `eta_n`.
    pub fn atlas(n: usize, eta_n: f64) -> Result<Self> {
        let mut deltas = vec![0.0; n];
        if let Some(last) = deltas.last_mut() {
            *last = eta_n;
        }
        Self::new(deltas)
    }

    /// `δ_i = η_n (2i − n − 1)/n`, the sign-kernel attraction model.
    pub fn gravity(n: usize, eta_n: f64) -> Result<Self> {
        let nf = n as f64;
        Self::new(
            (1..=n)
                .map(|i| eta_n * (2.0 * i as f64 - nf - 1.0) / nf)
                .collect(),
        )
    }

    /// The top particle alone receives drift `−push`.
    pub fn top_push(n: usize, push: f64) -> Result<Self> {
        let mut deltas = vec![0.0; n];
        if let Some(first) = deltas.first_mut() {
            *first = -push;
        }
        Self::new(deltas)
    }

    /// Antisymmetric block array: `−η` on the top `⌊n^η⌋` ranks, `−β` down
    /// to rank `⌊n/2⌋` with `β = 4(1 − η)`, mirrored with opposite sign below.
    /// Edge-continuous but with interior gaps far above `η`.
    pub fn edge_blocks(n: usize, eta: f64) -> Result<Self> {
        let beta = 4.0 * (1.0 - eta);
        let edge = (n as f64).powf(eta).floor() as usize;
        let half = n / 2;
        let mut deltas = vec![0.0; n];
        for i in 1..=half {
            deltas[i - 1] = if i <= edge { -eta } else { -beta };
        }
        for i in half + 1..=n {
            deltas[i - 1] = -deltas[n - i];
        }
        Self::new(deltas)
    }

    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// `δ̄(n)`.
    pub fn mean_drift(&self) -> f64 {
        self.deltas.iter().sum::<f64>() / self.n() as f64
    }

    /// `δ̄(n) − δ_i(n)` for every rank.
    pub fn gaps(&self) -> Vec<f64> {
        let mean = self.mean_drift();
        self.deltas.iter().map(|d| mean - d).collect()
    }

    /// `α_k = Σ_{i ≤ k} (δ̄ − δ_i)` for `k = 1..n−1`.
    pub fn alpha_vector(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.gaps()
            .into_iter()
            .take(self.n() - 1)
            .map(|g| {
                acc += g;
                acc
            })
            .collect()
    }

    /// True iff every `α_k > 0`, the condition for a stationary spacing law.
    pub fn check_stationarity_condition(&self) -> bool {
        self.first_violation().is_none()
    }

    /// `Err(ConditionViolated)` naming the first `k` (1-based) with `α_k ≤ 0`.
    pub fn require_stationary(&self) -> Result<Vec<f64>> {
        match self.first_violation() {
            Some((index, value)) => Err(Error::ConditionViolated { index, value }),
            None => Ok(self.alpha_vector()),
        }
    }

    fn first_violation(&self) -> Option<(usize, f64)> {
        self.alpha_vector()
            .into_iter()
            .enumerate()
            .find(|(_, a)| !(*a > 0.0))
            .map(|(k, a)| (k + 1, a))
    }
}

/// Free function form of [`DriftSpec::alpha_vector`].
pub fn alpha_vector(spec: &DriftSpec) -> Vec<f64> {
    spec.alpha_vector()
}

pub fn check_stationarity_condition(spec: &DriftSpec) -> bool {
    spec.check_stationarity_condition()
}

/// Stationary spacings `y[j] = X_(j+1) − X_(j+2)` (0-based `j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSample {
    y: Vec<f64>,
}

impl SpacingSample {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Invalid("spacing sample needs n ≥ 2".into()));
        }
        if let Some(j) = y.iter().position(|v| !(*v >= 0.0) || v.is_nan()) {
            return Err(Error::Invalid(format!(
                "spacing y[{j}] = {} is negative",
                y[j]
            )));
        }
        Ok(Self { y })
    }

    /// Spacings of arbitrary (unsorted) positions.
    pub fn from_positions(x: &[f64]) -> Result<Self> {
        let mut sorted = x.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        Self::new(sorted.windows(2).map(|w| w[0] - w[1]).collect())
    }

    pub fn n(&self) -> usize {
        self.y.len() + 1
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }
}

/// A decreasing sequence in `(S, d)`, conceptually padded with `−∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSequence {
    points: Vec<f64>,
}

impl PointSequence {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| p.is_nan()) {
            return Err(Error::Invalid("point sequence contains NaN".into()));
        }
        if points.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid("point sequence is not nonincreasing".into()));
        }
        Ok(Self { points })
    }

    /// `i`-th coordinate (0-based), `−∞` past the stored prefix.
    pub fn get(&self, i: usize) -> f64 {
        self.points.get(i).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// `d(a, b) = Σ_{i ≤ depth} (|a_i − b_i| ∧ 1) / 2^i`. Two `−∞` coordinates
/// contribute 0; a finite coordinate against `−∞` contributes the full clamp.
pub fn metric_d(a: &PointSequence, b: &PointSequence, depth: usize) -> f64 {
    let mut total = 0.0;
    let mut scale = 0.5;
    for i in 0..depth {
        let (x, y) = (a.get(i), b.get(i));
        let term = if x == y {
            0.0
        } else if x.is_infinite() || y.is_infinite() {
            1.0
        } else {
            (x - y).abs().min(1.0)
        };
        total += term * scale;
        scale *= 0.5;
    }
    total
}

/// Law of the mass that a truncated Poisson–Dirichlet draw leaves unresolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum TailLaw {
    /// Normalized atoms of a Poisson process with intensity `∝ x^{−α−1}`
    /// restricted below `ceiling`.
    PowerLaw { alpha: f64, ceiling: f64 },
    /// Stick-breaking remainder: `mass × PD(α, θ)`.
    Gem { alpha: f64, theta: f64 },
}

/// Unresolved mass of a [`WeightSequence`] together with its law, so that
/// statistics can add the tail's conditional expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub mass: f64,
    #[serde(flatten)]
    pub law: TailLaw,
}

impl Tail {
    /// `E Σ_{tail} w^p` given the resolved atoms.
    pub fn expected_power_sum(&self, p: f64) -> f64 {
        if self.mass == 0.0 {
            return 0.0;
        }
        match self.law {
            TailLaw::PowerLaw { alpha, ceiling } => {
                ceiling.powf(p - 1.0) * self.mass * (1.0 - alpha) / (p - alpha)
            }
            TailLaw::Gem { alpha, theta } => {
                let log_dp = ln_gamma(p - alpha) + ln_gamma(1.0 + theta)
                    - ln_gamma(1.0 - alpha)
                    - ln_gamma(p + theta);
                self.mass.powf(p) * log_dp.exp()
            }
        }
    }

    /// `E[−Σ_{tail} w ln w]` given the resolved atoms.
    pub fn expected_entropy(&self) -> f64 {
        if self.mass == 0.0 {
            return 0.0;
        }
        match self.law {
            TailLaw::PowerLaw { alpha, ceiling } => {
                self.mass * (1.0 / (1.0 - alpha) - ceiling.ln())
            }
            TailLaw::Gem { alpha, theta } => {
                self.mass * (digamma(1.0 + theta) - digamma(1.0 - alpha) - self.mass.ln())
            }
        }
    }
}

/// Decreasing market weights summing to one; an element of `(S′, d′)`.
///
/// PD samplers may leave a diffuse [`Tail`] of unresolved atoms; then
/// `Σ weights + tail.mass = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Tail>,
}

impl WeightSequence {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tail(weights, None)
    }

    /// Validates monotonicity and total mass, renormalizing totals that are
    /// within [`WEIGHT_RENORMALIZE_TOL`] of one.
    pub fn with_tail(mut weights: Vec<f64>, tail: Option<Tail>) -> Result<Self> {
        if weights
            .iter()
            .any(|w| !(0.0..=1.0 + WEIGHT_RENORMALIZE_TOL).contains(w))
        {
            return Err(Error::Invalid("weights must lie in [0, 1]".into()));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid("weights must be nonincreasing".into()));
        }
        let tail_mass = tail.map_or(0.0, |t| t.mass);
        if !(0.0..=1.0).contains(&tail_mass) {
            return Err(Error::Invalid(format!(
                "tail mass {tail_mass} outside [0, 1]"
            )));
        }
        let total: f64 = weights.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > WEIGHT_RENORMALIZE_TOL {
            return Err(Error::Invalid(format!("weights sum to {total}, not 1")));
        }
        let mut tail = tail;
        if total != 1.0 {
            for w in weights.iter_mut() {
                *w /= total;
            }
            if let Some(t) = tail.as_mut() {
                t.mass /= total;
            }
        }
        Ok(Self { weights, tail })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail.map_or(0.0, |t| t.mass)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `i`-th largest weight (0-based), zero past the resolved atoms.
    pub fn get(&self, i: usize) -> f64 {
        self.weights.get(i).copied().unwrap_or(0.0)
    }

    pub fn largest(&self) -> f64 {
        self.get(0)
    }

    /// `D_p = Σ μ_i^p`, including the tail's conditional expectation.
    pub fn power_sum(&self, p: f64) -> f64 {
        let resolved: f64 = self.weights.iter().map(|w| w.powf(p)).sum();
        resolved + self.tail.map_or(0.0, |t| t.expected_power_sum(p))
    }

    /// `S = −Σ μ_i ln μ_i` with `0 ln 0 = 0`, including the tail's
    /// conditional expectation.
    pub fn entropy(&self) -> f64 {
        let resolved: f64 = self
            .weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|w| -w * w.ln())
            .sum();
        resolved + self.tail.map_or(0.0, |t| t.expected_entropy())
    }

    /// The top `m` weights (zero-padded) and the mass outside them.
    pub fn truncate(&self, m: usize) -> (Vec<f64>, f64) {
        let top: Vec<f64> = (0..m).map(|i| self.get(i)).collect();
        let rest = (1.0 - top.iter().sum::<f64>()).max(0.0);
        (top, rest)
    }
}

/// `d′(a, b) = Σ |a_i − b_i|` over the resolved atoms, shorter sequence
/// zero-padded.
pub fn metric_dprime(a: &WeightSequence, b: &WeightSequence) -> f64 {
    dprime_slices(a.weights(), b.weights())
}

pub(crate) fn dprime_slices(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn alpha_atlas() {
        let spec = DriftSpec::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        close(&spec.alpha_vector(), &[0.25, 0.5, 0.75]);
        assert!(spec.check_stationarity_condition());
        assert_eq!(spec, DriftSpec::atlas(4, 1.0).unwrap());
    }

    #[test]
    fn alpha_gravity() {
        let spec = DriftSpec::gravity(4, 1.0).unwrap();
        close(spec.deltas(), &[-0.75, -0.25, 0.25, 0.75]);
        close(&spec.alpha_vector(), &[0.75, 1.0, 0.75]);
    }

    #[test]
    fn zero_drift_has_no_stationary_law() {
        let spec = DriftSpec::new(vec![0.0; 4]).unwrap();
        close(&spec.alpha_vector(), &[0.0, 0.0, 0.0]);
        assert!(!spec.check_stationarity_condition());
        assert!(matches!(
            spec.require_stationary(),
            Err(Error::ConditionViolated { index: 1, .. })
        ));
    }

    #[test]
    fn top_push_alphas() {
        let spec = DriftSpec::top_push(8, 0.25).unwrap();
        assert!(spec.check_stationarity_condition());
        let expected: Vec<f64> = (1..8).map(|k| (8 - k) as f64 / 32.0).collect();
        close(&spec.alpha_vector(), &expected);
    }

    #[test]
    fn edge_blocks_is_antisymmetric() {
        let spec = DriftSpec::edge_blocks(256, 0.25).unwrap();
        // ⌊256^0.25⌋ = 4
        assert_eq!(&spec.deltas()[..5], &[-0.25, -0.25, -0.25, -0.25, -3.0]);
        assert_abs_diff_eq!(spec.mean_drift(), 0.0, epsilon = 1e-15);
        assert!(spec.check_stationarity_condition());
        let a = spec.alpha_vector();
        for k in 1..256 {
            assert_abs_diff_eq!(a[k - 1], a[256 - k - 1], epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_drifts() {
        assert!(DriftSpec::new(vec![1.0]).is_err());
        assert!(DriftSpec::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn metric_d_examples() {
        let a = PointSequence::new(vec![1.0]).unwrap();
        let b = PointSequence::new(vec![0.0]).unwrap();
        assert_eq!(metric_d(&a, &a, METRIC_D_DEPTH), 0.0);
        assert_abs_diff_eq!(metric_d(&a, &b, 1), 0.5);
        assert_abs_diff_eq!(metric_d(&a, &b, METRIC_D_DEPTH), 0.5);
        let c = PointSequence::new(vec![3.0, 0.0]).unwrap();
        let d = PointSequence::new(vec![0.5, 0.0]).unwrap();
        assert_abs_diff_eq!(metric_d(&c, &d, METRIC_D_DEPTH), 0.5);
        // finite vs padded −∞ clamps to 1
        let e = PointSequence::new(vec![1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(metric_d(&a, &e, METRIC_D_DEPTH), 0.25);
    }

    #[test]
    fn metric_dprime_examples() {
        let a = WeightSequence::new(vec![0.6, 0.4]).unwrap();
        let b = WeightSequence::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert_eq!(metric_dprime(&a, &a), 0.0);
        assert_abs_diff_eq!(metric_dprime(&a, &b), 0.4, epsilon = 1e-15);
        let c = WeightSequence::new(vec![1.0]).unwrap();
        let d = WeightSequence::new(vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(metric_dprime(&c, &d), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weight_sequence_validation() {
        assert!(WeightSequence::new(vec![0.4, 0.6]).is_err());
        assert!(WeightSequence::new(vec![0.5, 0.4]).is_err());
        let w = WeightSequence::new(vec![0.5 + 4e-10, 0.5]).unwrap();
        assert_abs_diff_eq!(
            w.weights().iter().sum::<f64>(),
            1.0,
            epsilon = WEIGHT_SUM_TOL
        );
    }

    #[test]
    fn power_sum_and_entropy_simple() {
        let w = WeightSequence::new(vec![1.0]).unwrap();
        assert_eq!(w.power_sum(2.5), 1.0);
        assert_eq!(w.entropy(), 0.0);
        let k = 8;
        let u = WeightSequence::new(vec![1.0 / k as f64; k]).unwrap();
        assert_abs_diff_eq!(u.power_sum(3.0), (k as f64).powf(-2.0), epsilon = 1e-14);
        assert_abs_diff_eq!(u.entropy(), (k as f64).ln(), epsilon = 1e-14);
    }

    #[test]
    fn power_law_tail_moments_match_quadrature() {
        // intensity c x^{-α-1} on (0, ceiling), normalized so that mass matches
        let (alpha, ceiling, mass) = (0.5, 1e-3, 0.02);
        let tail = Tail {
            mass,
            law: TailLaw::PowerLaw { alpha, ceiling },
        };
        let c = mass * (1.0 - alpha) / ceiling.powf(1.0 - alpha);
        let m = crate::quadrature::integrate(
            |u: f64| {
                let x = u * u;
                2.0 * c * x * x.powf(-alpha - 1.0) * u
            },
            0.0,
            ceiling.sqrt(),
            1e-14,
        );
        assert_abs_diff_eq!(m.value, mass, epsilon = 1e-10);
        let h = crate::quadrature::integrate(
            |u: f64| {
                let x = u * u;
                if x == 0.0 {
                    0.0
                } else {
                    -2.0 * c * x * x.ln() * x.powf(-alpha - 1.0) * u
                }
            },
            0.0,
            ceiling.sqrt(),
            1e-14,
        );
        assert_abs_diff_eq!(tail.expected_entropy(), h.value, epsilon = 1e-8);
        assert_abs_diff_eq!(
            tail.expected_power_sum(2.0),
            c * ceiling.powf(2.0 - alpha) / (2.0 - alpha),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(tail.expected_power_sum(1.0), mass, epsilon = 1e-15);
    }

    #[test]
    fn gem_tail_at_theta_zero_is_pd_moment() {
        let tail = Tail {
            mass: 1.0,
            law: TailLaw::Gem {
                alpha: 0.5,
                theta: 0.0,
            },
        };
        assert_abs_diff_eq!(tail.expected_power_sum(2.0), 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(tail.expected_power_sum(1.0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            tail.expected_entropy(),
            2.0 * std::f64::consts::LN_2,
            epsilon = 1e-13
        );
    }

    fn weights_strategy() -> impl Strategy<Value = WeightSequence> {
        prop::collection::vec(0.001f64..1.0, 1..12).prop_map(|mut v| {
            v.sort_by(|a, b| b.total_cmp(a));
            let s: f64 = v.iter().sum();
            WeightSequence::new(v.into_iter().map(|x| x / s).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn alpha_telescopes(deltas in prop::collection::vec(-5.0f64..5.0, 2..40)) {
            let spec = DriftSpec::new(deltas).unwrap();
            let a = spec.alpha_vector();
            let mean = spec.mean_drift();
            let mut prev = 0.0;
            for (k, ak) in a.iter().enumerate() {
                prop_assert!((ak - prev - (mean - spec.deltas()[k])).abs() < 1e-12);
                prev = *ak;
            }
        }

        #[test]
        fn gravity_alpha_symmetric(n in 2usize..300, eta in 0.01f64..5.0) {
            let a = DriftSpec::gravity(n, eta).unwrap().alpha_vector();
            for k in 1..n {
                prop_assert!((a[k - 1] - a[n - k - 1]).abs() < 1e-12 * (1.0 + a[k - 1].abs()));
                let exact = eta * (k * (n - k)) as f64 / n as f64;
                prop_assert!((a[k - 1] - exact).abs() < 1e-12 * (1.0 + exact));
            }
        }

        #[test]
        fn dprime_is_a_metric(a in weights_strategy(), b in weights_strategy(), c in weights_strategy()) {
            prop_assert_eq!(metric_dprime(&a, &b), metric_dprime(&b, &a));
            prop_assert_eq!(metric_dprime(&a, &a), 0.0);
            prop_assert!(metric_dprime(&a, &c) <= metric_dprime(&a, &b) + metric_dprime(&b, &c) + 1e-12);
        }

        #[test]
        fn metric_d_monotone_in_depth(
            xs in prop::collection::vec(-3.0f64..3.0, 0..20),
            ys in prop::collection::vec(-3.0f64..3.0, 0..20),
        ) {
            let sort = |mut v: Vec<f64>| { v.sort_by(|a, b| b.total_cmp(a)); PointSequence::new(v).unwrap() };
            let (a, b) = (sort(xs), sort(ys));
            let mut prev = 0.0;
            for depth in 1..30 {
                let d = metric_d(&a, &b, depth);
                prop_assert!(d >= prev && d <= 1.0);
                prev = d;
            }
        }
    }
}
