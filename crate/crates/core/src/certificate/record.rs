use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Unsupported,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Unsupported => "UNSUPPORTED",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdEntry {
    pub point: String,
    pub ord: i64,
}

/// One verified (or refuted) statement. Records carry no timing so that
/// identical runs serialize to identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub id: String,
    pub statement: String,
    pub inputs: BTreeMap<String, String>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ord_table: Vec<OrdEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    /// Set on checks of displayed identities that are reported rather than gated.
    #[serde(default)]
    pub paper_discrepancy: bool,
}

impl Certificate {
    pub fn new(id: impl Into<String>, statement: impl Into<String>, verdict: Verdict) -> Self {
        Certificate {
            id: id.into(),
            statement: statement.into(),
            inputs: BTreeMap::new(),
            verdict,
            witness: None,
            ord_table: Vec::new(),
            details: BTreeMap::new(),
            paper_discrepancy: false,
        }
    }

    pub fn input(mut self, k: &str, v: impl ToString) -> Self {
        self.inputs.insert(k.to_string(), v.to_string());
        self
    }

    pub fn detail(mut self, k: &str, v: impl Into<serde_json::Value>) -> Self {
        self.details.insert(k.to_string(), v.into());
        self
    }

    pub fn with_witness(mut self, w: impl ToString) -> Self {
        self.witness = Some(w.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
