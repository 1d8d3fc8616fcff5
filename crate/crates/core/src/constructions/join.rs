//! Midpoints through a join hull.
//!
//! With `d = ||x - y||` and `z0 = (x - y) / d` written as
//! `lambda x1 + (1 - lambda) x2` up to a small residual, `lambda <= 1/2`,
//! the point `z = x - (d/2) x2` satisfies `||z - x|| = (d/2) ||x2||` and
//! `||y - z|| <= (d/2) (1 + 2 residual)`.

use super::{real, split_side, join_side, vec_value, Side, WitnessRecord};
use crate::error::{Error, Result};
use crate::linalg::golden_max;
use crate::spaces::{NormedSpace, SumKind, Vector};
use serde::{Deserialize, Serialize};

/// The set whose join hull is searched.
#[derive(Clone, Debug, PartialEq)]
pub enum JoinSet {
    /// The unit sphere of the space.
    Sphere,
    /// A finite list of points.
    Vertices(Vec<Vector>),
    /// `S_X x B_Y` inside `X (+)_inf Y`, with `side` naming the sphere factor.
    SumSphereBall(Side),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoinResult {
    #[serde(with = "crate::io::cvec")]
    pub z: Vector,
    #[serde(with = "crate::io::cvec")]
    pub x1: Vector,
    #[serde(with = "crate::io::cvec")]
    pub x2: Vector,
    pub lambda: f64,
    pub residual: f64,
    /// `||y - z||` divided by `||x - y|| / 2`.
    pub ratio_yz: f64,
    /// `||x - z||` divided by `||x - y|| / 2`.
    pub ratio_xz: f64,
}

impl JoinResult {
    pub fn record(&self, x: &Vector, y: &Vector, eps: f64) -> WitnessRecord {
        WitnessRecord::new(
            "midpoint_join",
            serde_json::json!({ "x": vec_value(x), "y": vec_value(y), "eps": eps }),
            serde_json::to_value(self).expect("join result serializes"),
            &[("residual", self.residual), ("excess_yz", (self.ratio_yz - 1.0 - eps).max(0.0))],
        )
    }
}

/// Splits a unit vector `z0` through the sphere: `z0 = lambda (-w) + (1 - lambda) w`
/// with `w = z0 / ||z0||` when `z0 != 0`.
fn sphere_split(space: &NormedSpace, a: &Vector) -> (Vector, Vector, f64) {
    let na = space.norm_of(a.as_slice());
    if na == 0.0 {
        let e = space.canonical_unit();
        return (-&e, e, 0.5);
    }
    let w = a.unscale(na);
    if na >= 1.0 - 1e-12 {
        return (w.clone(), w, 0.0);
    }
    (-&w, w, (1.0 - na) / 2.0)
}

fn decompose(space: &NormedSpace, z0: &Vector, set: &JoinSet) -> Result<(Vector, Vector, f64)> {
    match set {
        JoinSet::Sphere => Ok(sphere_split(space, z0)),
        JoinSet::SumSphereBall(side) => {
            let (sx, _) = super::summands(space, SumKind::Linf, *side)?;
            let (a, b) = split_side(space, z0, *side);
            let (a1, a2, lambda) = sphere_split(&sx, &a);
            Ok((join_side(&a1, &b, *side), join_side(&a2, &b, *side), lambda))
        }
        JoinSet::Vertices(pts) => {
            if pts.is_empty() {
                return Err(Error::Input("empty vertex list".into()));
            }
            for p in pts {
                space.check(p)?;
            }
            let mut best = (f64::INFINITY, 0, 0, 0.0);
            for (i, p) in pts.iter().enumerate() {
                for (j, q) in pts.iter().enumerate() {
                    let dist = |l: f64| space.norm_of((z0 - p * real(l) - q * real(1.0 - l)).as_slice());
                    let (l, neg) = golden_max(|l| -dist(l), 0.0, 0.5, 80);
                    let cands = [(l, -neg), (0.0, dist(0.0)), (0.5, dist(0.5))];
                    for (l, r) in cands {
                        if r < best.0 {
                            best = (r, i, j, l);
                        }
                    }
                }
            }
            let (_, i, j, l) = best;
            Ok((pts[i].clone(), pts[j].clone(), l))
        }
    }
}

/// Finds `z` with `z - x in (||x - y|| / 2) (-A)` and
/// `||y - z|| <= (1 + eps) ||x - y|| / 2`.
pub fn midpoint_join(space: &NormedSpace, x: &Vector, y: &Vector, set: &JoinSet, eps: f64) -> Result<JoinResult> {
    space.check(x)?;
    space.check(y)?;
    if !(eps > 0.0) {
        return Err(Error::Input("eps must be positive".into()));
    }
    let d = space.norm(&(x - y))?;
    if d == 0.0 {
        return Err(Error::Input("x and y coincide".into()));
    }
    let z0 = (x - y).unscale(d);
    let (x1, x2, lambda) = decompose(space, &z0, set)?;
    let residual = space.norm_of((&z0 - &x1 * real(lambda) - &x2 * real(1.0 - lambda)).as_slice());
    // A residual below eps/2 keeps ||y - z|| within (1 + eps) d / 2.
    if residual >= eps / 2.0 {
        return Err(Error::NotFound(format!(
            "no decomposition through the set within eps/2 (best residual {residual:e})"
        )));
    }
    let z = x - &x2 * real(d / 2.0);
    let ratio_yz = space.norm_of((y - &z).as_slice()) / (d / 2.0);
    let ratio_xz = space.norm_of((x - &z).as_slice()) / (d / 2.0);
    if ratio_yz > 1.0 + eps + 1e-12 {
        return Err(Error::NotFound(format!("join point fails the distance bound (ratio {ratio_yz})")));
    }
    Ok(JoinResult { z, x1, x2, lambda, residual, ratio_yz, ratio_xz })
}
