//! Witness boosting on `l_inf^n` and witness alignment on `l_inf`-sums.

use super::join::{midpoint_join, JoinSet};
use super::{real, split_side, vec_value, Side, WitnessRecord};
use crate::error::{Error, Result};
use crate::linop::Witness;
use crate::maps::{lip_lower, witness_value, LipschitzMap};
use crate::spaces::{NormKind, SumKind, Vector};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostResult {
    /// The starting point actually used (a small move of `x` when `x - y`
    /// vanishes on the chosen coordinate).
    #[serde(with = "crate::io::cvec")]
    pub x: Vector,
    #[serde(with = "crate::io::cvec")]
    pub z: Vector,
    pub s: usize,
    /// Unit functional in `D(v)`, `v = (z - x) / ||z - x||`.
    #[serde(with = "crate::io::cvec")]
    pub g: Vector,
    /// `|g(Tz - Tx)| / ||z - x||`.
    pub value: f64,
    pub lip_norm: f64,
    pub dist_zx: f64,
    pub dist_zy: f64,
}

impl BoostResult {
    /// The pair `(z, x)` with the functional `||z - x|| g` of `D(z - x)`.
    pub fn witness(&self) -> Witness {
        Witness { x: self.z.clone(), y: self.x.clone(), f: &self.g * real(self.dist_zx) }
    }

    pub fn record(&self, y: &Vector, eps: f64) -> WitnessRecord {
        let half = (self.dist_zx + self.dist_zy) / 2.0;
        WitnessRecord::new(
            "ck_witness_boost",
            serde_json::json!({ "x": vec_value(&self.x), "y": vec_value(y), "eps": eps }),
            serde_json::to_value(self).expect("boost serializes"),
            &[
                ("margin", self.value - (1.0 - 2.0 * eps) * self.lip_norm),
                ("dist_zx_vs_zy", (self.dist_zx - self.dist_zy).abs() / half.max(f64::MIN_POSITIVE)),
            ],
        )
    }
}

/// Boosts a near-norming pair `(x, y)` of a self-map of real `l_inf^n` to a
/// numerical-range witness of value above `(1 - 2 eps) ||T||_L`.
pub fn ck_witness_boost(map: &dyn LipschitzMap, x: &Vector, y: &Vector, eps: f64) -> Result<BoostResult> {
    let space = map.domain();
    let is_linf = matches!(space.kind(), NormKind::PNorm(p) if p.is_infinite()) || space.dim() == 1;
    if !is_linf || !space.field().is_real() || map.codomain() != space {
        return Err(Error::UnsupportedKind("witness boosting works on self-maps of real l_inf^n".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Input("eps must lie in (0, 1/2)".into()));
    }
    let lip = map.lip_upper().ok_or_else(|| Error::Input("the map carries no Lipschitz bound".into()))?;
    let d = space.norm(&(x - y))?;
    if d == 0.0 {
        return Err(Error::Input("x and y coincide".into()));
    }
    let dt = map.apply(x)? - map.apply(y)?;
    let s = (0..dt.len()).max_by(|&i, &j| dt[i].norm().total_cmp(&dt[j].norm()).then(j.cmp(&i))).unwrap();
    let margin = dt[s].norm() - (1.0 - eps) * lip * d;
    if margin <= 0.0 {
        return Err(Error::Input(format!(
            "need ||Tx - Ty|| > (1 - eps) ||T||_L ||x - y||; have {} <= {}",
            dt[s].norm(),
            (1.0 - eps) * lip * d
        )));
    }
    let mut x = x.clone();
    if (x[s] - y[s]).norm() == 0.0 {
        // Move x along e_s; the precondition survives a step below margin / (2 L).
        let step = (margin / (4.0 * lip.max(f64::MIN_POSITIVE))).min(d);
        x[s] += real(step);
    }
    let u = &x - y;
    let d = space.norm_of(u.as_slice());
    let us = u[s].norm();
    let v = u.map(|ut| -ut / ut.norm().max(us));
    let z = &x + &v * real(d / 2.0);
    let g = {
        let mut g = space.zero();
        g[s] = v[s];
        g
    };
    let dist_zx = space.norm_of((&z - &x).as_slice());
    let dist_zy = space.norm_of((&z - y).as_slice());
    let w = Witness { x: z.clone(), y: x.clone(), f: &g * real(dist_zx) };
    let value = witness_value(map, &w)?;
    if value <= (1.0 - 2.0 * eps) * lip - 1e-9 * (1.0 + lip) || (dist_zx - dist_zy).abs() > 1e-9 * (1.0 + d) {
        return Err(Error::Input(format!("boost re-verification failed (value {value})")));
    }
    Ok(BoostResult { x, z, s, g, value, lip_norm: lip, dist_zx, dist_zy })
}

/// A pair `(u, v)` of a map on `X (+)_inf Y` whose difference has the norm of
/// its `side` component and whose quotient is at least `||T||_L - eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    #[serde(with = "crate::io::cvec")]
    pub u: Vector,
    #[serde(with = "crate::io::cvec")]
    pub v: Vector,
    pub side: Side,
    pub quotient: f64,
    pub lip_norm: f64,
    pub eps: f64,
}

impl AlignedPair {
    pub fn record(&self) -> WitnessRecord {
        WitnessRecord::new(
            "linf_witness_align",
            serde_json::json!({ "side": self.side, "eps": self.eps, "lip_norm": self.lip_norm }),
            serde_json::to_value(self).expect("pair serializes"),
            &[("margin", self.quotient - (self.lip_norm - self.eps))],
        )
    }
}

/// Finds an aligned pair: a sampled near-norming pair `(u, w)` with quotient
/// at least `L - eps/2`, followed by the midpoint step through `S_X x B_Y`.
pub fn linf_witness_align(
    map: &dyn LipschitzMap,
    side: Side,
    eps: f64,
    budget: usize,
    seed: u64,
) -> Result<AlignedPair> {
    let space = map.domain();
    super::summands(space, SumKind::Linf, side)?;
    if !(eps > 0.0) {
        return Err(Error::Input("eps must be positive".into()));
    }
    let lip = map.lip_upper().ok_or_else(|| Error::Input("the map carries no Lipschitz bound".into()))?;
    let start = lip_lower(map, map.sample_radius(), budget, seed);
    if start.value < lip - eps / 2.0 {
        return Err(Error::NotFound(format!(
            "best pair has quotient {} < ||T||_L - eps/2 = {}; pair {}",
            start.value,
            lip - eps / 2.0,
            serde_json::json!({ "x": vec_value(&start.x), "y": vec_value(&start.y) })
        )));
    }
    let join = midpoint_join(space, &start.x, &start.y, &JoinSet::SumSphereBall(side), 1e-9)?;
    let (u, v) = (start.x, join.z);
    let gap = space.norm(&(&u - &v))?;
    let (a, _) = split_side(space, &(&u - &v), side);
    let (sx, _) = super::summands(space, SumKind::Linf, side)?;
    let ga = sx.norm(&a)?;
    let quotient = map.codomain().norm(&(map.apply(&u)? - map.apply(&v)?))? / gap;
    if (gap - ga).abs() > 1e-9 * gap || quotient < lip - eps - 1e-12 {
        return Err(Error::NotFound(format!("aligned pair failed re-verification (quotient {quotient})")));
    }
    Ok(AlignedPair { u, v, side, quotient, lip_norm: lip, eps })
}
