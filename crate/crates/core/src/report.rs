//! Aggregated check results and the self-describing verification report.

use serde::{Deserialize, Serialize};

use crate::verify::PointVerdict;

/// One named property check: how many instances were examined, how many
/// failed or were skipped, and where the smallest slack occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub count: u64,
    pub failures: u64,
    pub skipped: u64,
    /// Smallest observed slack (negative means violated).
    pub worst_margin: Option<f64>,
    /// Location of the smallest slack.
    pub argmax_location: Option<Vec<f64>>,
    /// Parameter `Q` the check ran at, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Informational checks are reported but never counted as failures.
    #[serde(default = "asserted_default")]
    pub asserted: bool,
}

fn asserted_default() -> bool {
    true
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            count: 0,
            failures: 0,
            skipped: 0,
            worst_margin: None,
            argmax_location: None,
            q: None,
            asserted: true,
        }
    }

    /// A check whose violations are recorded but do not fail the report.
    pub fn informational(name: impl Into<String>) -> Self {
        Self { asserted: false, ..Self::new(name) }
    }

    pub fn at_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    /// Records one instance with slack `margin`; it fails when `margin < -tol`.
    pub fn record(&mut self, margin: f64, tol: f64, location: &[f64]) -> bool {
        self.count += 1;
        let ok = margin >= -tol;
        if !ok {
            self.failures += 1;
        }
        if margin.is_finite() && self.worst_margin.is_none_or(|w| margin < w) {
            self.worst_margin = Some(margin);
            self.argmax_location = Some(location.to_vec());
        } else if !margin.is_finite() && !ok {
            self.argmax_location = Some(location.to_vec());
        }
        ok
    }

    pub fn skip(&mut self) {
        self.count += 1;
        self.skipped += 1;
    }

    pub fn merge(&mut self, other: &Check) {
        self.count += other.count;
        self.failures += other.failures;
        self.skipped += other.skipped;
        if let Some(m) = other.worst_margin {
            if self.worst_margin.is_none_or(|w| m < w) {
                self.worst_margin = Some(m);
                self.argmax_location = other.argmax_location.clone();
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    /// Fully resolved configuration that produced this report.
    pub config_echo: serde_json::Value,
    pub checks: Vec<Check>,
    /// Subcommand-specific numerical results.
    #[serde(default)]
    pub results: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<PointVerdict>,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub timestamp: u64,
}

impl VerificationReport {
    pub fn new(config_echo: serde_json::Value) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_echo,
            checks: Vec::new(),
            results: serde_json::Value::Null,
            verdicts: Vec::new(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn total_failures(&self) -> u64 {
        self.checks.iter().filter(|c| c.asserted).map(|c| c.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn check_at(&self, name: &str, q: f64) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.q == Some(q))
    }

    /// Copy with the timestamp zeroed, for determinism comparisons.
    pub fn without_timestamp(&self) -> Self {
        Self { timestamp: 0, ..self.clone() }
    }
}
