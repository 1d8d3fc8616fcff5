//! Constructive steps on Lipschitz maps: extension along a segment, midpoint
//! joins, lush witnesses, witness boosting on `l_inf^n`, compression of maps
//! on two-summand sums to one summand, and blockwise lifts to `l_1^n(X)`.
//!
//! Every result re-checks its own guarantees numerically and can be written
//! out as a [`WitnessRecord`].

mod boost;
mod compress;
mod extend;
mod join;
mod lift;
mod lush;

pub use boost::{ck_witness_boost, linf_witness_align, AlignedPair, BoostResult};
pub use compress::{compress_l1_sum, compress_linf_sum, l1_sum_compress, linf_sum_compress, Component, Compression};
pub use extend::{extension_record, mcshane_extend, segment_extension};
pub use join::{midpoint_join, JoinResult, JoinSet};
pub use lift::{diagonal_lift, DEFAULT_LIFT_CELLS};
pub use lush::{lush_witness, LushOutcome, LushWitness};

use crate::error::{Error, Result};
use crate::spaces::{NormedSpace, SumKind, Vector, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

/// Which summand of `X + Y` a construction works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Inputs, outputs and re-verification residuals of one construction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub construction: String,
    pub inputs: Value,
    pub outputs: Value,
    pub residuals: BTreeMap<String, f64>,
}

impl WitnessRecord {
    pub(crate) fn new(construction: &str, inputs: Value, outputs: Value, residuals: &[(&str, f64)]) -> Self {
        Self {
            construction: construction.into(),
            inputs,
            outputs,
            residuals: residuals.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

pub(crate) fn vec_value(v: &Vector) -> Value {
    crate::io::cvec::serialize(v, serde_json::value::Serializer).expect("vectors serialize")
}

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The two summands of a sum space of the given kind, in `side` order
/// (the working summand first).
pub(crate) fn summands(space: &NormedSpace, kind: SumKind, side: Side) -> Result<(NormedSpace, NormedSpace)> {
    let s = space
        .as_sum()
        .filter(|s| s.kind == kind)
        .ok_or_else(|| Error::UnsupportedKind(format!("expected a {kind:?} sum of two spaces, got {space}")))?;
    Ok(match side {
        Side::Left => (s.left.clone(), s.right.clone()),
        Side::Right => (s.right.clone(), s.left.clone()),
    })
}

/// Splits `z` into (working component, other component).
pub(crate) fn split_side(space: &NormedSpace, z: &Vector, side: Side) -> (Vector, Vector) {
    let k = space.as_sum().expect("sum space").left.dim();
    let a = Vector::from_column_slice(&z.as_slice()[..k]);
    let b = Vector::from_column_slice(&z.as_slice()[k..]);
    match side {
        Side::Left => (a, b),
        Side::Right => (b, a),
    }
}

/// Inverse of [`split_side`].
pub(crate) fn join_side(a: &Vector, b: &Vector, side: Side) -> Vector {
    let (l, r) = match side {
        Side::Left => (a, b),
        Side::Right => (b, a),
    };
    Vector::from_iterator(l.len() + r.len(), l.iter().chain(r.iter()).copied())
}
