//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

use crate::ring::{Element, TruncationParams};

/// One verified identity. `r`, `s` name the table cell when the check is
/// tied to one. `residual` holds the nonzero difference (or a witness) when
/// the check fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    pub check: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<serde_json::Value>,
}

impl Check {
    pub fn new(r: i64, s: i64, check: impl Into<String>, pass: bool) -> Check {
        Check {
            suite: None,
            r: Some(r),
            s: Some(s),
            check: check.into(),
            pass,
            prime: None,
            residual: None,
        }
    }

    /// A check not attached to a table cell.
    pub fn global(check: impl Into<String>, pass: bool) -> Check {
        Check {
            r: None,
            s: None,
            ..Check::new(0, 0, check, pass)
        }
    }

    /// Passes iff `residual` is zero; otherwise records it.
    pub fn from_residual(r: i64, s: i64, check: impl Into<String>, residual: &Element) -> Check {
        let mut c = Check::new(r, s, check, residual.is_zero());
        if !c.pass {
            c.residual = Some(residual.to_json());
        }
        c
    }

    pub fn with_suite(mut self, suite: &str) -> Check {
        self.suite = Some(suite.to_string());
        self
    }

    pub fn with_suite_if_unset(mut self, suite: &str) -> Check {
        self.suite.get_or_insert_with(|| suite.to_string());
        self
    }

    pub fn with_prime(mut self, p: u64) -> Check {
        self.prime = Some(p);
        self
    }

    pub fn with_residual(mut self, residual: serde_json::Value) -> Check {
        self.residual = Some(residual);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub params: TruncationParams,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(params: TruncationParams) -> Report {
        Report {
            params,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn tag_suite(mut self, suite: &str) -> Report {
        for c in &mut self.checks {
            c.suite.get_or_insert_with(|| suite.to_string());
        }
        self
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
