//! Compressing a self-map of a two-summand sum to a self-map of one summand
//! without raising the numerical radius.

use super::boost::{linf_witness_align, AlignedPair};
use super::extend::segment_extension;
use super::{join_side, split_side, summands, vec_value, Side, WitnessRecord};
use crate::error::{Error, Result};
use crate::linop::LinearOperator;
use crate::maps::{LipschitzCallable, LipschitzMap, Piece};
use crate::spaces::{pair, Matrix, NormedSpace, SumKind, Vector};
use std::sync::Arc;

/// The `side` output component of a map on a sum space, as a map into that summand.
pub struct Component {
    map: Arc<dyn LipschitzMap>,
    side: Side,
    codomain: NormedSpace,
}

impl Component {
    pub fn new(map: Arc<dyn LipschitzMap>, side: Side) -> Result<Self> {
        let s = map
            .codomain()
            .as_sum()
            .ok_or_else(|| Error::UnsupportedKind("the codomain is not a sum".into()))?;
        let codomain = match side {
            Side::Left => s.left.clone(),
            Side::Right => s.right.clone(),
        };
        Ok(Self { map, side, codomain })
    }

    fn rows(&self) -> std::ops::Range<usize> {
        let k = self.map.codomain().as_sum().expect("sum codomain").left.dim();
        match self.side {
            Side::Left => 0..k,
            Side::Right => k..self.map.codomain().dim(),
        }
    }
}

impl LipschitzMap for Component {
    fn domain(&self) -> &NormedSpace {
        self.map.domain()
    }

    fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        let r = self.rows();
        Ok(self.map.apply(x)?.rows(r.start, r.len()).into_owned())
    }

    fn pieces(&self) -> Option<Vec<Piece>> {
        let r = self.rows();
        Some(
            self.map
                .pieces()?
                .into_iter()
                .map(|p| Piece { jacobian: p.jacobian.rows(r.start, r.len()).into_owned(), ..p })
                .collect(),
        )
    }

    fn lip_upper(&self) -> Option<f64> {
        // Pieces give a sharp bound; otherwise the whole map's bound still holds.
        let pieces = self.pieces();
        match pieces {
            Some(ps) => Some(
                ps.iter()
                    .map(|p| crate::linop::op_norm_between(self.domain(), &self.codomain, &p.jacobian).upper)
                    .fold(0.0, f64::max),
            ),
            None => self.map.lip_upper(),
        }
    }

    fn sample_radius(&self) -> f64 {
        self.map.sample_radius()
    }
}

/// A compressed map together with the pair it keeps near-norming.
#[derive(Clone, Debug)]
pub struct Compression {
    pub map: LipschitzCallable,
    pub side: Side,
    pub x1: Vector,
    pub x2: Vector,
    /// `||S x1 - S x2|| / ||x1 - x2||`.
    pub quotient: f64,
    /// The quotient the construction promises.
    pub target: f64,
}

impl Compression {
    pub fn record(&self, construction: &str) -> WitnessRecord {
        WitnessRecord::new(
            construction,
            serde_json::json!({ "side": self.side, "x1": vec_value(&self.x1), "x2": vec_value(&self.x2) }),
            serde_json::json!({
                "space": self.map.domain().to_string(),
                "bound": self.map.bound(),
                "certificate": self.map.certificate(),
                "quotient": self.quotient,
            }),
            &[("margin", self.quotient - self.target)],
        )
    }
}

fn quotient(map: &dyn LipschitzMap, a: &Vector, b: &Vector) -> Result<f64> {
    let d = map.domain().norm(&(a - b))?;
    Ok(map.codomain().norm(&(map.apply(a)? - map.apply(b)?))? / d)
}

fn self_map(map: &dyn LipschitzMap) -> Result<()> {
    if map.domain() != map.codomain() {
        return Err(Error::Input("compression needs a self-map".into()));
    }
    Ok(())
}

/// `S(w) = T_X(w, F(w)) - T_X(0, F(0))` on the `side` summand `X` of
/// `Z = X (+)_inf Y`, with `F` the 1-Lipschitz extension taking `x1 -> y1`,
/// `x2 -> y2` for the aligned pair `u = (x1, y1)`, `v = (x2, y2)`.
pub fn linf_sum_compress(map: Arc<dyn LipschitzMap>, pair: &AlignedPair, seed: u64) -> Result<Compression> {
    self_map(map.as_ref())?;
    let z = map.domain().clone();
    let side = pair.side;
    let (sx, sy) = summands(&z, SumKind::Linf, side)?;
    let (x1, y1) = split_side(&z, &pair.u, side);
    let (x2, y2) = split_side(&z, &pair.v, side);
    let gx = sx.norm(&(&x1 - &x2))?;
    let gy = sy.norm(&(&y1 - &y2))?;
    if gx == 0.0 || gy > gx * (1.0 + 1e-12) {
        return Err(Error::Input(format!(
            "the pair is not aligned: ||x1 - x2|| = {gx}, ||y1 - y2|| = {gy}"
        )));
    }
    let f = segment_extension(&sx, &sy, (&x1, &x2), (&y1, &y2), 1.0, seed)?;
    let component = Component::new(map.clone(), side)?;
    let bound = component.lip_upper().ok_or_else(|| Error::Input("the map carries no Lipschitz bound".into()))?;
    let base = component.apply(&join_side(&sx.zero(), &f.eval(&sx.zero()), side))?;
    let s = LipschitzCallable::new(
        sx.clone(),
        sx.clone(),
        move |w| {
            let p = join_side(w, &f.eval(w), side);
            component.apply(&p).expect("dimensions checked") - &base
        },
        bound,
        seed ^ 0xc0,
    )?;
    let q = quotient(&s, &x1, &x2)?;
    let target = pair.lip_norm - pair.eps;
    if q < target - 1e-9 * (1.0 + target.abs()) {
        return Err(Error::Input(format!("compressed pair has quotient {q} below {target}")));
    }
    Ok(Compression { map: s, side, x1, x2, quotient: q, target })
}

/// Chooses the output component attaining `||T||_L`, aligns a witness for it
/// and compresses to that summand.
pub fn compress_linf_sum(map: Arc<dyn LipschitzMap>, eps: f64, budget: usize, seed: u64) -> Result<Compression> {
    self_map(map.as_ref())?;
    let left = Component::new(map.clone(), Side::Left)?;
    let right = Component::new(map.clone(), Side::Right)?;
    let side = match (left.lip_upper(), right.lip_upper()) {
        (Some(a), Some(b)) if b > a => Side::Right,
        _ => Side::Left,
    };
    let component = Component::new(map.clone(), side)?;
    let aligned = linf_witness_align(&component, side, eps, budget, seed)?;
    linf_sum_compress(map, &aligned, seed)
}

/// `S(x) = A(x) + y*(Bx) x0` on the `side` summand `X` of `Z = X (+)_1 Y`, where
/// `(A, B)` are the components of `x -> T(x, y2) - T(0, y2)`, `x0` is the unit
/// direction of `A x1 - A x2` and `y*` a unit functional norming `B x1 - B x2`.
///
/// The branch is picked from the witness pair `z1 = (x1, y1)`, `z2 = (x2, y2)`
/// relative to its quotient `q`: the `side` increment at frozen `y2` reaches
/// `q`, or else the other summand's increment at frozen `x1` does and the
/// roles swap. When an increment vanishes any unit `x0` (or `y*`) serves.
pub fn l1_sum_compress(map: Arc<dyn LipschitzMap>, z1: &Vector, z2: &Vector, eps: f64, seed: u64) -> Result<Compression> {
    self_map(map.as_ref())?;
    let z = map.domain().clone();
    summands(&z, SumKind::L1, Side::Left)?;
    let lip = map.lip_upper().ok_or_else(|| Error::Input("the map carries no Lipschitz bound".into()))?;
    let q = quotient(map.as_ref(), z1, z2)?;
    if q < (1.0 - eps) * lip {
        return Err(Error::Input(format!(
            "witness quotient {q} is below (1 - eps) ||T||_L = {}; supply a better witness",
            (1.0 - eps) * lip
        )));
    }
    let slack = 1.0 - 1e-12;
    for side in [Side::Left, Side::Right] {
        let (sx, _) = summands(&z, SumKind::L1, side)?;
        let (x1, y1) = split_side(&z, z1, side);
        let (x2, y2) = split_side(&z, z2, side);
        // For the right summand the frozen point is the left part of z1.
        let (a, b, frozen) = match side {
            Side::Left => (x1, x2, y2),
            Side::Right => (x1, x2, y1),
        };
        let gap = sx.norm(&(&a - &b))?;
        if gap == 0.0 {
            continue;
        }
        let inc = z.norm(&(map.apply(&join_side(&a, &frozen, side))? - map.apply(&join_side(&b, &frozen, side))?))?;
        if inc >= slack * q * gap {
            return build_l1(map, side, (&a, &b), &frozen, q, seed);
        }
    }
    Err(Error::Input("neither branch reaches the witness quotient; supply a better witness".into()))
}

fn build_l1(
    map: Arc<dyn LipschitzMap>,
    side: Side,
    (x1, x2): (&Vector, &Vector),
    frozen: &Vector,
    q: f64,
    seed: u64,
) -> Result<Compression> {
    let z = map.domain().clone();
    let (sx, sy) = summands(&z, SumKind::L1, side)?;
    let shift = |x: &Vector| -> Result<(Vector, Vector)> {
        let t = map.apply(&join_side(x, frozen, side))? - map.apply(&join_side(&sx.zero(), frozen, side))?;
        Ok(split_side(&z, &t, side))
    };
    let (a1, b1) = shift(x1)?;
    let (a2, b2) = shift(x2)?;
    let da = &a1 - &a2;
    let na = sx.norm(&da)?;
    let x0 = if na > 0.0 { da.unscale(na) } else { sx.canonical_unit() };
    let db = &b1 - &b2;
    let nb = sy.norm(&db)?;
    let norming = if nb > 0.0 { db.clone() } else { sy.canonical_unit() };
    let (_, f) = sy.duality_set(&norming)?.argmax_abs(&norming)?;
    let ystar = f.unscale(sy.norm(&norming)?);

    // A single piece of infinite extent means the map is linear.
    let linear = map.pieces().filter(|p| p.len() == 1 && p[0].inradius.is_infinite()).map(|p| p[0].jacobian.clone());
    let s = match linear {
        Some(m) => {
            let (ix, iy) = index_ranges(&z, side);
            let a: Matrix = m.view((ix.start, ix.start), (ix.len(), ix.len())).into_owned();
            let b: Matrix = m.view((iy.start, ix.start), (iy.len(), ix.len())).into_owned();
            let s = a + &x0 * (ystar.transpose() * b);
            LipschitzCallable::from_linear(&LinearOperator::new(sx.clone(), s)?)
        }
        None => {
            let bound = map.lip_upper().ok_or_else(|| Error::Input("the map carries no Lipschitz bound".into()))?;
            let (m2, z2, fr, sx2) = (map.clone(), z.clone(), frozen.clone(), sx.clone());
            let x0c = x0.clone();
            let base = m2.apply(&join_side(&sx2.zero(), &fr, side))?;
            LipschitzCallable::new(
                sx.clone(),
                sx.clone(),
                move |x| {
                    let t = m2.apply(&join_side(x, &fr, side)).expect("dimensions checked") - &base;
                    let (a, b) = split_side(&z2, &t, side);
                    a + &x0c * pair(ystar.as_slice(), b.as_slice())
                },
                bound,
                seed ^ 0x11,
            )?
        }
    };
    let got = quotient(&s, x1, x2)?;
    if got < q * (1.0 - 1e-9) {
        return Err(Error::Input(format!("compressed pair has quotient {got} below {q}")));
    }
    Ok(Compression { map: s, side, x1: x1.clone(), x2: x2.clone(), quotient: got, target: q })
}

fn index_ranges(z: &NormedSpace, side: Side) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let k = z.as_sum().expect("sum space").left.dim();
    let n = z.dim();
    match side {
        Side::Left => (0..k, k..n),
        Side::Right => (k..n, 0..k),
    }
}

/// Searches a near-norming pair and compresses it.
pub fn compress_l1_sum(map: Arc<dyn LipschitzMap>, eps: f64, budget: usize, seed: u64) -> Result<Compression> {
    let best = crate::maps::lip_lower(map.as_ref(), map.sample_radius(), budget, seed);
    l1_sum_compress(map, &best.x, &best.y, eps, seed)
}
