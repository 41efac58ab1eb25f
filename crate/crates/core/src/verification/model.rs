//! Triangular arrays of drift vectors indexed by the particle count `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::DriftSpec;

/// How the drift scale `η_n` depends on `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum EtaRule {
    /// `η_n = value`.
    Constant { value: f64 },
    /// `η_n = factor · n`.
    ProportionalToN { factor: f64 },
    /// `η_n = limit + scale / ln n`.
    InverseLog { limit: f64, scale: f64 },
    /// Explicit `(n, η_n)` pairs; other `n` are rejected.
    Table { points: Vec<(usize, f64)> },
}

impl EtaRule {
    pub fn eval(&self, n: usize) -> Result<f64> {
        match self {
            Self::Constant { value } => Ok(*value),
            Self::ProportionalToN { factor } => Ok(factor * n as f64),
            Self::InverseLog { limit, scale } => Ok(limit + scale / (n as f64).ln()),
            Self::Table { points } => points
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Invalid(format!("η_n table has no entry for n = {n}"))),
        }
    }

    /// `sup_n |η_n|` for rules bounded in `n ≥ 2`.
    fn sup_abs(&self) -> Option<f64> {
        match self {
            Self::Constant { value } => Some(value.abs()),
            // monotone in n: the supremum is at n = 2 or in the limit
            Self::InverseLog { limit, scale } => {
                Some((limit + scale / 2f64.ln()).abs().max(limit.abs()))
            }
            Self::ProportionalToN { .. } | Self::Table { .. } => None,
        }
    }

    /// `lim η_n`, when the rule determines it.
    fn limit(&self) -> Option<f64> {
        match self {
            Self::Constant { value } => Some(*value),
            Self::ProportionalToN { .. } => Some(f64::INFINITY),
            Self::InverseLog { limit, .. } => Some(*limit),
            Self::Table { .. } => None,
        }
    }

    /// `lim η_n / n`.
    fn limit_over_n(&self) -> Option<f64> {
        match self {
            Self::Constant { .. } | Self::InverseLog { .. } => Some(0.0),
            Self::ProportionalToN { factor } => Some(*factor),
            Self::Table { .. } => None,
        }
    }
}

/// A family of drift vectors, one per `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DriftModel {
    /// Bottom particle pushed with `η_n`; `δ̄ − δ₁ = η_n / n`.
    Atlas { eta_n: EtaRule },
    /// `δ_i = η_n(2i − n − 1)/n`; `δ̄ − δ₁ = η_n (n − 1)/n`.
    Gravity { eta_n: EtaRule },
    /// Top particle pushed down with `push`.
    TopPush { push: f64 },
    /// `−η` on the top `⌊n^η⌋` ranks, `−4(1 − η)` to the middle, mirrored.
    EdgeBlocks { eta: f64 },
    /// Explicit drift vectors; `n` is each row's length.
    Custom { rows: Vec<Vec<f64>> },
}

impl DriftModel {
    pub fn atlas(eta_n: EtaRule) -> Self {
        Self::Atlas { eta_n }
    }

    pub fn gravity(eta_n: EtaRule) -> Self {
        Self::Gravity { eta_n }
    }

    pub fn generate(&self, n: usize) -> Result<DriftSpec> {
        match self {
            Self::Atlas { eta_n } => DriftSpec::atlas(n, eta_n.eval(n)?),
            Self::Gravity { eta_n } => DriftSpec::gravity(n, eta_n.eval(n)?),
            Self::TopPush { push } => DriftSpec::top_push(n, *push),
            Self::EdgeBlocks { eta } => DriftSpec::edge_blocks(n, *eta),
            Self::Custom { rows } => rows
                .iter()
                .find(|r| r.len() == n)
                .ok_or_else(|| {
                    Error::Invalid(format!("custom drift array has no row with n = {n}"))
                })
                .and_then(|r| DriftSpec::new(r.clone())),
        }
    }

    /// `η = lim (δ̄(n) − δ₁(n))` where the model determines it.
    pub fn limit_eta(&self) -> Option<f64> {
        match self {
            Self::Atlas { eta_n } => eta_n.limit_over_n(),
            Self::Gravity { eta_n } => eta_n.limit(),
            Self::TopPush { push } => Some(*push),
            Self::EdgeBlocks { eta } => Some(*eta),
            Self::Custom { .. } => None,
        }
    }

    /// A constant `C` with `|δ_i(n) − δ₁(n)| ≤ C (i − 1)/n` for all `n`, `i`,
    /// when the model certifies one.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        match self {
            // Atlas: the only nonzero difference is η_n ≤ C(n − 1)/n, worst at n = 2.
            // Gravity: |δ_i − δ₁| = 2η_n(i − 1)/n exactly.
            Self::Atlas { eta_n } | Self::Gravity { eta_n } => eta_n.sup_abs().map(|s| 2.0 * s),
            _ => None,
        }
    }

    /// True when `δ̄ − δ₁ = ½ + O(1/ln n)`, the boundary of the collapse phase.
    pub fn is_critical(&self) -> bool {
        matches!(self, Self::Gravity { eta_n: EtaRule::InverseLog { limit, .. } } if *limit == 0.5)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Atlas { .. } => "atlas",
            Self::Gravity { .. } => "gravity",
            Self::TopPush { .. } => "top-push",
            Self::EdgeBlocks { .. } => "edge-blocks",
            Self::Custom { .. } => "custom",
        }
    }
}
