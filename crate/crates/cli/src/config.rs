//! TOML experiment configuration.
//!
//! ```toml
//! seed = 20240917
//! replicates = 1000
//! top_m = 50
//! p_values = [2.0]
//!
//! [model]
//! kind = "gravity"                       # atlas | gravity | top-push | edge-blocks | custom | pd
//! n = 2000
//! eta_n = { rule = "constant", value = 0.25 }
//!
//! [curve]
//! max_rank = 200
//! fit_ranks = [10, 100]
//!
//! [verify]
//! scenarios = ["lemma9"]
//!
//! [asymptotics]
//! eta = 0.25
//! p = [1.0, 2.0]
//! tol = 1e-8
//! ```

use std::fmt;
use std::path::Path;

use rankdiff::pd::PdConfig;
use rankdiff::verification::{scenario_names, DriftModel};
use serde::Deserialize;

pub const DEFAULT_TOP_M: usize = 50;
pub const DEFAULT_REPLICATES: usize = 1000;

/// A configuration problem, located by line (when known) and dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error in {}", self.path)?;
        if let Some(line) = self.line {
            write!(f, ", line {line}")?;
        }
        write!(f, ", field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PdTruncation {
    #[default]
    Ppp,
    StickBreaking,
}

/// The source of weight sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    /// Stationary market weights of a rank-based drift array at size `n`.
    Drift { model: DriftModel, n: usize },
    /// Poisson–Dirichlet `PD(alpha)` draws.
    Pd {
        alpha: f64,
        truncation: PdTruncation,
    },
}

impl ModelConfig {
    pub fn pd_config(&self) -> Option<PdConfig> {
        match self {
            Self::Pd {
                alpha,
                truncation: PdTruncation::Ppp,
            } => PdConfig::ppp(*alpha).ok(),
            Self::Pd {
                alpha,
                truncation: PdTruncation::StickBreaking,
            } => PdConfig::stick_breaking(*alpha).ok(),
            Self::Drift { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Drift { model, n } => {
                let mut v = serde_json::to_value(model).expect("drift model serializes");
                v["n"] = (*n).into();
                v
            }
            Self::Pd { alpha, truncation } => serde_json::json!({
                "kind": "pd",
                "alpha": alpha,
                "truncation": match truncation {
                    PdTruncation::Ppp => "ppp",
                    PdTruncation::StickBreaking => "stick-breaking",
                },
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(default = "default_max_rank")]
    pub max_rank: usize,
    #[serde(default = "default_fit_ranks")]
    pub fit_ranks: [usize; 2],
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            max_rank: default_max_rank(),
            fit_ranks: default_fit_ranks(),
        }
    }
}

fn default_max_rank() -> usize {
    200
}

fn default_fit_ranks() -> [usize; 2] {
    [10, 100]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub scenarios: Vec<String>,
    /// Overrides every scenario's main replicate count.
    pub replicates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    pub eta: Option<f64>,
    #[serde(default = "default_moment_powers")]
    pub p: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self {
            eta: None,
            p: default_moment_powers(),
            tol: default_tol(),
        }
    }
}

fn default_moment_powers() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    replicates: Option<usize>,
    top_m: Option<usize>,
    p_values: Option<Vec<f64>>,
    model: Option<toml::Table>,
    #[serde(default)]
    curve: CurveConfig,
    verify: Option<VerifyConfig>,
    asymptotics: Option<AsymptoticsConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: Option<u64>,
    pub replicates: usize,
    pub top_m: usize,
    pub p_values: Vec<f64>,
    pub model: Option<ModelConfig>,
    pub curve: CurveConfig,
    pub verify: Option<VerifyConfig>,
    pub asymptotics: Option<AsymptoticsConfig>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.display().to_string(),
            line: None,
            field: "<file>".into(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        let fail = |section: Option<&str>, key: &str, message: String| {
            let field = section.map_or(key.to_string(), |s| format!("{s}.{key}"));
            ConfigError {
                path: path.to_string(),
                line: locate(text, section, key),
                field,
                message,
            }
        };

        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            ConfigError {
                path: path.to_string(),
                line,
                field: line
                    .and_then(|l| field_at(text, l))
                    .unwrap_or_else(|| "<document>".into()),
                message: e.message().trim().to_string(),
            }
        })?;

        let replicates = raw.replicates.unwrap_or(DEFAULT_REPLICATES);
        if replicates == 0 {
            return Err(fail(None, "replicates", "must be at least 1".into()));
        }
        let top_m = raw.top_m.unwrap_or(DEFAULT_TOP_M);
        if top_m == 0 {
            return Err(fail(None, "top_m", "must be at least 1".into()));
        }
        let p_values = raw.p_values.unwrap_or_else(|| vec![2.0]);
        if let Some(p) = p_values.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(fail(
                None,
                "p_values",
                format!("every p must be positive, got {p}"),
            ));
        }

        let model = raw
            .model
            .map(|table| parse_model(table, &fail))
            .transpose()?;

        let [lo, hi] = raw.curve.fit_ranks;
        if lo == 0 || hi <= lo {
            return Err(fail(
                Some("curve"),
                "fit_ranks",
                format!("need 1 ≤ first < second, got [{lo}, {hi}]"),
            ));
        }
        if raw.curve.max_rank == 0 {
            return Err(fail(Some("curve"), "max_rank", "must be at least 1".into()));
        }

        if let Some(v) = &raw.verify {
            let valid = scenario_names();
            if v.scenarios.is_empty() {
                return Err(fail(
                    Some("verify"),
                    "scenarios",
                    format!(
                        "select at least one scenario; valid scenarios: {}",
                        valid.join(", ")
                    ),
                ));
            }
            if let Some(bad) = v.scenarios.iter().find(|s| !valid.contains(&s.as_str())) {
                return Err(fail(
                    Some("verify"),
                    "scenarios",
                    format!(
                        "unknown scenario `{bad}`; valid scenarios: {}",
                        valid.join(", ")
                    ),
                ));
            }
            if v.replicates == Some(0) {
                return Err(fail(
                    Some("verify"),
                    "replicates",
                    "must be at least 1".into(),
                ));
            }
        }

        if let Some(a) = &raw.asymptotics {
            if !(a.tol > 0.0 && a.tol.is_finite()) {
                return Err(fail(
                    Some("asymptotics"),
                    "tol",
                    format!("must be positive, got {}", a.tol),
                ));
            }
            if let Some(p) = a.p.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
                return Err(fail(
                    Some("asymptotics"),
                    "p",
                    format!("every p must be positive, got {p}"),
                ));
            }
        }

        Ok(Self {
            seed: raw.seed,
            replicates,
            top_m,
            p_values,
            model,
            curve: raw.curve,
            verify: raw.verify,
            asymptotics: raw.asymptotics,
        })
    }
}

fn parse_model(
    mut table: toml::Table,
    fail: &impl Fn(Option<&str>, &str, String) -> ConfigError,
) -> Result<ModelConfig, ConfigError> {
    let section = Some("model");
    let kind = match table.get("kind") {
        Some(toml::Value::String(k)) => k.clone(),
        Some(_) => return Err(fail(section, "kind", "must be a string".into())),
        None => return Err(fail(section, "kind", "missing model kind".into())),
    };
    if kind == "pd" {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Pd {
            #[allow(dead_code)]
            kind: String,
            alpha: f64,
            #[serde(default)]
            truncation: PdTruncation,
        }
        let pd: Pd = table
            .try_into()
            .map_err(|e: toml::de::Error| fail(section, "alpha", e.message().trim().to_string()))?;
        if !(pd.alpha > 0.0 && pd.alpha < 1.0) {
            return Err(fail(
                section,
                "alpha",
                format!("PD parameter must lie in (0, 1), got {}", pd.alpha),
            ));
        }
        return Ok(ModelConfig::Pd {
            alpha: pd.alpha,
            truncation: pd.truncation,
        });
    }

    let n = match table.remove("n") {
        Some(toml::Value::Integer(n)) if n >= 2 => n as usize,
        Some(v) => {
            return Err(fail(
                section,
                "n",
                format!("need an integer n ≥ 2, got {v}"),
            ))
        }
        None => {
            return Err(fail(
                section,
                "n",
                format!("missing particle count for model `{kind}`"),
            ))
        }
    };
    let model: DriftModel = table.try_into().map_err(|e: toml::de::Error| {
        let message = e.message().trim().to_string();
        let key = if message.contains("unknown variant") {
            "kind"
        } else {
            ["eta_n", "push", "eta", "rows"]
                .into_iter()
                .find(|k| message.contains(&format!("`{k}`")))
                .unwrap_or("kind")
        };
        fail(
            section,
            key,
            format!("{message} (kinds: atlas, gravity, top-push, edge-blocks, custom, pd)"),
        )
    })?;
    model
        .generate(n)
        .map_err(|e| fail(section, "n", e.to_string()))?;
    Ok(ModelConfig::Drift { model, n })
}

/// 1-based line number of byte `offset`.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Dotted path of the key assigned on `line`, or of the table header there.
fn field_at(text: &str, line: usize) -> Option<String> {
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.starts_with('[') {
            let name = l.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if i + 1 == line {
                return Some(name);
            }
            section = Some(name);
        } else if i + 1 == line {
            let key = l.split('=').next()?.trim();
            if key.is_empty() {
                return section;
            }
            return Some(section.map_or(key.to_string(), |s| format!("{s}.{key}")));
        }
    }
    section
}

/// Line where `key` is assigned inside `section` (top level when `None`).
fn locate(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.starts_with('[') {
            current = Some(l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
            if current.as_deref() == section {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current.as_deref() == section
            && l.split('=').next().map(str::trim) == Some(key)
            && l.contains('=')
        {
            return Some(i + 1);
        }
    }
    header_line
}
