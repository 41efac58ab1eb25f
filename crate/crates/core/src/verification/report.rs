//! Machine-readable experiment reports.

use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Version of the JSON layout of [`ExperimentReport`].
pub const SCHEMA_VERSION: u32 = 1;

/// A named estimate, optionally with its Monte Carlo standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
}

impl Statistic {
    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            std_error: None,
        }
    }

    pub fn estimate(name: impl Into<String>, value: f64, std_error: f64) -> Self {
        Self {
            name: name.into(),
            value,
            std_error: Some(std_error),
        }
    }
}

/// The acceptance region a measured value is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Threshold {
    Below { limit: f64 },
    Above { limit: f64 },
    Within { low: f64, high: f64 },
}

impl Threshold {
    pub fn around(target: f64, tolerance: f64) -> Self {
        Self::Within {
            low: target - tolerance,
            high: target + tolerance,
        }
    }

    /// NaN never passes.
    pub fn accepts(&self, value: f64) -> bool {
        match *self {
            Self::Below { limit } => value < limit,
            Self::Above { limit } => value > limit,
            Self::Within { low, high } => value >= low && value <= high,
        }
    }
}

/// A pass/fail outcome together with what was measured and against what.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub measured: f64,
    pub threshold: Threshold,
    pub passed: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, measured: f64, threshold: Threshold) -> Self {
        Self {
            name: name.into(),
            measured,
            passed: threshold.accepts(measured),
            threshold,
        }
    }

    pub fn below(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self::new(name, measured, Threshold::Below { limit })
    }

    pub fn above(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self::new(name, measured, Threshold::Above { limit })
    }

    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, measured, Threshold::around(target, tolerance))
    }
}

/// Finite-`n` classification of the largest weight's behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    PdLimit,
    Collapse,
    Dominance,
    Inconclusive,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PdLimit => "pd-limit",
            Self::Collapse => "collapse",
            Self::Dominance => "dominance",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<Phase>,
    pub statistics: Vec<Statistic>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Wall-clock time. Kept out of the JSON so reports are byte-identical
    /// across runs and thread counts.
    #[serde(skip)]
    pub runtime: Option<Duration>,
}

impl ExperimentReport {
    pub fn new(scenario: impl Into<String>, seed: u64, replicates: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.into(),
            seed,
            replicates,
            classification: None,
            statistics: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            runtime: None,
        }
    }

    pub fn stat(&mut self, s: Statistic) -> &mut Self {
        self.statistics.push(s);
        self
    }

    pub fn verdict(&mut self, v: Verdict) -> &mut Self {
        self.verdicts.push(v);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn statistic(&self, name: &str) -> Option<&Statistic> {
        self.statistics.iter().find(|s| s.name == name)
    }

    pub fn find_verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn first_failure(&self) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| !v.passed)
    }

    /// Appends another report's statistics, verdicts and notes, prefixing
    /// their names.
    pub fn absorb(&mut self, prefix: &str, other: ExperimentReport) {
        for mut s in other.statistics {
            s.name = format!("{prefix}{}", s.name);
            self.statistics.push(s);
        }
        for mut v in other.verdicts {
            v.name = format!("{prefix}{}", v.name);
            self.verdicts.push(v);
        }
        self.notes.extend(other.notes);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serializable data")
    }
}
