//! Numerical-index estimates by seeded search over operators, and the
//! falsification suites built on them.
//!
//! Estimates are upper bounds: every reported value is the certified
//! normalized radius `omega_upper(T) / ||T||_lower` of a concrete witness `T`.

mod battery;
mod report;
mod search;
mod suites;

pub use battery::{curated_battery, known_index, structured_matrices, BatteryEntry};
pub use report::{Case, Relation, Status, VerificationReport};
pub use search::{estimate_index, IndexEstimate, Mode, SearchStats, DEFAULT_BUDGET};
pub use suites::{bk_suite, ck_suite, compression_ratio, known_values_suite, rnp_equality_suite, sum_stability_suite};

use crate::linop::{AlphaGrid, LinearOperator, NormBracket, RadiusBracket};
use crate::lipop::PwlOperator;
use crate::maps::{cell_radius_upper, LipschitzMap};
use crate::spaces::{Matrix, NormedSpace};
use serde::{Serialize, Serializer};
use serde_json::Value;
use std::sync::Arc;

/// Tolerance used whenever a bracket is certified.
pub const CERT_TOL: f64 = 1e-9;

/// A linear or continuous piecewise-linear self-map.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Linear(LinearOperator),
    Pwl(PwlOperator),
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum OperatorDoc {
    Linear {
        space: String,
        #[serde(with = "crate::io::cmat")]
        matrix: Matrix,
    },
    Pwl {
        operator: Value,
    },
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match self {
            Operator::Linear(t) => OperatorDoc::Linear { space: t.space().to_string(), matrix: t.matrix().clone() },
            Operator::Pwl(p) => OperatorDoc::Pwl {
                operator: serde_json::from_str(&p.to_json()).expect("operator documents are valid JSON"),
            },
        };
        doc.serialize(s)
    }
}

impl Operator {
    pub fn space(&self) -> &NormedSpace {
        match self {
            Operator::Linear(t) => t.space(),
            Operator::Pwl(p) => p.space(),
        }
    }

    /// `||T||` or `||T||_L`.
    pub fn norm_bracket(&self) -> NormBracket {
        match self {
            Operator::Linear(t) => t.op_norm_bracket(),
            Operator::Pwl(p) => p.lip_norm_bracket(),
        }
    }

    pub fn radius(&self, tol: f64) -> RadiusBracket {
        match self {
            Operator::Linear(t) => t.numerical_radius(tol),
            Operator::Pwl(p) => p.lip_radius(tol),
        }
    }

    /// Certified upper end of the radius (the largest cell radius for CPWL maps).
    pub fn radius_upper(&self) -> f64 {
        match self {
            Operator::Linear(t) => t.numerical_radius(CERT_TOL).upper,
            Operator::Pwl(p) => cell_radius_upper(p, CERT_TOL).expect("CPWL maps have pieces"),
        }
    }

    /// `omega_upper(T) / ||T||_lower`, an upper bound for the normalized radius.
    pub fn normalized_upper(&self) -> f64 {
        let n = self.norm_bracket().lower;
        if n > 0.0 {
            self.radius_upper() / n
        } else {
            f64::INFINITY
        }
    }

    pub fn limit_sequence(&self, schedule: &[f64], alphas: &AlphaGrid) -> crate::Result<Vec<f64>> {
        match self {
            Operator::Linear(t) => t.radius_upper_limit(schedule, alphas),
            Operator::Pwl(p) => p.lip_radius_limit(schedule, alphas),
        }
    }

    /// `(1 + ||T||) - max_alpha ||I + alpha T||` over the field's default grid.
    pub fn daugavet_gap(&self) -> f64 {
        let alphas = AlphaGrid::for_field(self.space().field());
        match self {
            Operator::Linear(t) => t.daugavet_gap(&alphas),
            Operator::Pwl(p) => p.daugavet_gap(&alphas),
        }
    }

    pub fn as_map(&self) -> Arc<dyn LipschitzMap> {
        match self {
            Operator::Linear(t) => Arc::new(t.clone()),
            Operator::Pwl(p) => Arc::new(p.clone()),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("operators serialize")
    }
}

#[cfg(test)]
mod tests;
