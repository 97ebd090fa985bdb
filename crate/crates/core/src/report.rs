//! Verification report records shared by the check suites and the CLI.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<[f64; 2]>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(check: &str, k: Option<C64>, residual: f64, tol: f64) -> Self {
        CheckRecord {
            check: check.to_string(),
            k: k.map(|k| [k.re, k.im]),
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        }
    }

    pub fn failed(check: &str, msg: &str) -> Self {
        CheckRecord {
            check: format!("{check} [{msg}]"),
            k: None,
            residual: f64::INFINITY,
            tol: 0.0,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn push(&mut self, rec: CheckRecord) {
        self.records.push(rec);
    }

    pub fn merge(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.records.iter().filter(|r| !r.pass).collect()
    }

    /// Worst residual/tolerance ratio over records whose name starts with `prefix`.
    pub fn worst_ratio(&self, prefix: &str) -> f64 {
        self.records
            .iter()
            .filter(|r| r.check.starts_with(prefix))
            .map(|r| {
                if r.tol > 0.0 {
                    r.residual / r.tol
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}
