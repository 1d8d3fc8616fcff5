//! Verification reports: one case per check, JSON canonical, CSV flattened.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unconverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unconverged => "unconverged",
        }
    }
}

/// How `value` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value - expected| <= tol`.
    Approx,
    /// `value >= expected - tol`.
    AtLeast,
    /// `value <= expected + tol`.
    AtMost,
}

impl Relation {
    pub fn holds(self, value: f64, expected: f64, tol: f64) -> bool {
        match self {
            Relation::Approx => (value - expected).abs() <= tol,
            Relation::AtLeast => value >= expected - tol,
            Relation::AtMost => value <= expected + tol,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Relation::Approx => "approx",
            Relation::AtLeast => "at_least",
            Relation::AtMost => "at_most",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub status: Status,
    /// Absent when the computation behind the case did not produce a value.
    pub value: Option<f64>,
    pub expected: f64,
    pub tol: f64,
    pub relation: Relation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Case {
    /// A violated check is a failure only when the underlying bracket converged.
    pub fn check(
        name: impl Into<String>,
        value: f64,
        expected: f64,
        tol: f64,
        relation: Relation,
        converged: bool,
        witness: Option<Value>,
    ) -> Self {
        let status = if relation.holds(value, expected, tol) {
            Status::Pass
        } else if converged {
            Status::Fail
        } else {
            Status::Unconverged
        };
        Self { name: name.into(), status, value: Some(value), expected, tol, relation, witness }
    }

    /// A case whose computation gave up; `detail` says why.
    pub fn missing(name: impl Into<String>, expected: f64, tol: f64, relation: Relation, detail: &str) -> Self {
        Self {
            name: name.into(),
            status: Status::Unconverged,
            value: None,
            expected,
            tol,
            relation,
            witness: Some(serde_json::json!({ "error": detail })),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub version: String,
    /// The parameters the suite ran with; the CLI replaces this with its run configuration.
    pub config: Value,
    pub cases: Vec<Case>,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, config: Value, cases: Vec<Case>) -> Self {
        Self { suite: suite.into(), seed, version: crate::VERSION.into(), config, cases }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn has_unconverged(&self) -> bool {
        self.cases.iter().any(|c| c.status == Status::Unconverged)
    }

    /// One row per case, without witnesses.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "seed", "name", "status", "value", "expected", "tol", "relation"])
            .expect("in-memory csv");
        // Shortest round-trip digits, as in the JSON output.
        let num = |x: f64| serde_json::to_string(&x).expect("finite floats serialize");
        for c in &self.cases {
            let value = c.value.map(num).unwrap_or_default();
            w.write_record([
                self.suite.as_str(),
                &self.seed.to_string(),
                &c.name,
                c.status.as_str(),
                &value,
                &num(c.expected),
                &num(c.tol),
                c.relation.as_str(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}
