//! JSON reports.

use serde::Serialize;
use serde_json::{json, Value};

use glab_core::field::FieldRef;
use glab_core::group::{AbelianGroup, GroupElem};
use glab_core::linalg::Mat;
use glab_core::suites::SuiteReport;

pub const SCHEMA: &str = "glab-report-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub index: usize,
    pub op: String,
    pub verdict: Verdict,
    pub expected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<u32>>,
    pub checks: Vec<CheckEntry>,
    pub summary: Summary,
}

impl Report {
    pub fn new(seed: u64, field: Option<&FieldRef>, group: Option<&AbelianGroup>, checks: Vec<CheckEntry>) -> Report {
        let mut summary = Summary::default();
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Error => summary.error += 1,
            }
        }
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            field: field.map(|f| FieldInfo { p: f.characteristic(), k: f.degree(), modulus: f.modulus().to_vec() }),
            group: group.map(|g| g.orders().to_vec()),
            checks,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }
}

/// A suite report wrapped in the versioned envelope.
pub fn suite_json(rep: &SuiteReport) -> Value {
    json!({
        "schema": SCHEMA,
        "version": env!("CARGO_PKG_VERSION"),
        "suite": rep,
        "passed": rep.passed(),
    })
}

pub fn elem_json(g: &GroupElem) -> Value {
    json!(g.0)
}

/// Rows of entries; an entry is an integer over a prime field and a
/// coefficient list otherwise.
pub fn mat_json(m: &Mat) -> Value {
    let f = m.field();
    let n = m.size();
    let rows: Vec<Value> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = m.get(i, j);
                    if f.degree() == 1 {
                        json!(e.raw())
                    } else {
                        json!(f.coeffs(e))
                    }
                })
                .collect()
        })
        .collect();
    Value::Array(rows)
}
