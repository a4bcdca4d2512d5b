//! Discrepancy reports produced by the verification sweeps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What one side of a comparison said about `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Verdict {
    Bool(bool),
    Value(String),
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        Verdict::Bool(b)
    }
}

impl From<String> for Verdict {
    fn from(s: String) -> Self {
        Verdict::Value(s)
    }
}

/// A case where the enumerated truth and the claim under test disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Ground truth: direct evaluation, iteration, or brute force.
    pub enumerated: Verdict,
    /// The closed-form or classifier claim.
    pub classifier: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Id of the known-discrepancy entry that explains this mismatch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known: Option<String>,
}

impl Mismatch {
    pub fn new(n: u64, enumerated: impl Into<Verdict>, classifier: impl Into<Verdict>) -> Self {
        Self {
            n,
            k: None,
            enumerated: enumerated.into(),
            classifier: classifier.into(),
            detail: None,
            known: None,
        }
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub equation: String,
    pub bound: u64,
    /// Number of cases examined.
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
    pub resolved_conventions: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub version: String,
}

impl DiscrepancyReport {
    pub fn new(equation: impl Into<String>, bound: u64, checked: u64, mut mismatches: Vec<Mismatch>) -> Self {
        mismatches.sort_by_key(|m| (m.n, m.k));
        Self {
            equation: equation.into(),
            bound,
            checked,
            mismatches,
            resolved_conventions: BTreeMap::new(),
            timestamp: Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            version: VERSION.to_string(),
        }
    }

    pub fn with_convention(mut self, key: &str, value: &str) -> Self {
        self.resolved_conventions
            .insert(key.to_string(), value.to_string());
        self
    }

    /// Drops the timestamp so two runs compare byte-for-byte.
    pub fn without_timestamp(mut self) -> Self {
        self.timestamp = None;
        self
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn unregistered(&self) -> impl Iterator<Item = &Mismatch> {
        self.mismatches.iter().filter(|m| m.known.is_none())
    }

    pub fn mismatched_ns(&self) -> Vec<u64> {
        let mut ns: Vec<u64> = self.mismatches.iter().map(|m| m.n).collect();
        ns.dedup();
        ns
    }
}
