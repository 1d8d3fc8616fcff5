//! Lipschitz maps between normed spaces, and the sampled bounds shared by
//! every concrete representation.
//!
//! A map is evaluated pointwise; when it is piecewise affine it also exposes
//! its pieces (an interior point, an inradius and the Jacobian), which seed
//! the samplers with pairs lying inside a single piece.

use crate::error::{check_dim, Error, Result};
use crate::linop::{op_norm_between, LinearOperator, Witness};
use crate::search::pattern_ascent;
use crate::spaces::{pair, Matrix, NormedSpace, Vector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// An affine piece: the map equals `x -> jacobian x + const` on the Euclidean
/// ball of radius `inradius` around `interior`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub interior: Vector,
    pub inradius: f64,
    pub jacobian: Matrix,
}

pub trait LipschitzMap: Send + Sync {
    fn domain(&self) -> &NormedSpace;
    fn codomain(&self) -> &NormedSpace;
    fn apply(&self, x: &Vector) -> Result<Vector>;

    /// Affine pieces covering the domain, for piecewise-affine maps.
    fn pieces(&self) -> Option<Vec<Piece>> {
        None
    }

    /// A certified upper bound for the Lipschitz constant, when one is known.
    fn lip_upper(&self) -> Option<f64> {
        let pieces = self.pieces()?;
        Some(
            pieces
                .iter()
                .map(|p| op_norm_between(self.domain(), self.codomain(), &p.jacobian).upper)
                .fold(0.0, f64::max),
        )
    }

    /// Scale of the region random sample points are drawn from.
    fn sample_radius(&self) -> f64 {
        1.0
    }
}

impl LipschitzMap for LinearOperator {
    fn domain(&self) -> &NormedSpace {
        self.space()
    }

    fn codomain(&self) -> &NormedSpace {
        self.space()
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        LinearOperator::apply(self, x)
    }

    fn pieces(&self) -> Option<Vec<Piece>> {
        Some(vec![Piece { interior: self.space().zero(), inradius: f64::INFINITY, jacobian: self.matrix().clone() }])
    }
}

/// How the Lipschitz bound of a [`LipschitzCallable`] was established.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The bound holds by construction and was re-checked on sampled pairs.
    SampledQuotients { pairs: usize, max_quotient: f64 },
    /// The map is linear and the bound is its operator norm.
    PerCell,
}

/// A Lipschitz map given by a closure.
#[derive(Clone)]
pub struct LipschitzCallable {
    domain: NormedSpace,
    codomain: NormedSpace,
    f: Arc<dyn Fn(&Vector) -> Vector + Send + Sync>,
    bound: f64,
    certificate: Certificate,
    linear: Option<Matrix>,
}

impl fmt::Debug for LipschitzCallable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzCallable")
            .field("domain", &self.domain.to_string())
            .field("codomain", &self.codomain.to_string())
            .field("bound", &self.bound)
            .field("certificate", &self.certificate)
            .finish()
    }
}

/// Pairs drawn when a callable's bound is re-checked.
pub const CERTIFY_PAIRS: usize = 2000;

impl LipschitzCallable {
    /// Wraps `f` with the claimed bound `bound`, re-checking it on sampled pairs.
    pub fn new(
        domain: NormedSpace,
        codomain: NormedSpace,
        f: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        bound: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut out = Self {
            domain,
            codomain,
            f: Arc::new(f),
            bound,
            certificate: Certificate::PerCell,
            linear: None,
        };
        let worst = max_sampled_quotient(&out, CERTIFY_PAIRS, seed);
        if worst > bound * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::Input(format!(
                "sampled difference quotient {worst} exceeds the claimed Lipschitz bound {bound}"
            )));
        }
        out.certificate = Certificate::SampledQuotients { pairs: CERTIFY_PAIRS, max_quotient: worst };
        Ok(out)
    }

    pub fn from_linear(op: &LinearOperator) -> Self {
        let m = op.matrix().clone();
        let m2 = m.clone();
        Self {
            domain: op.space().clone(),
            codomain: op.space().clone(),
            f: Arc::new(move |x| &m2 * x),
            bound: op.op_norm(),
            certificate: Certificate::PerCell,
            linear: Some(m),
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// The matrix, when the callable is known to be linear.
    pub fn as_linear(&self) -> Option<LinearOperator> {
        self.linear
            .as_ref()
            .map(|m| LinearOperator::new(self.domain.clone(), m.clone()).expect("validated at construction"))
    }

    pub fn eval(&self, x: &Vector) -> Vector {
        (self.f)(x)
    }
}

impl LipschitzMap for LipschitzCallable {
    fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.domain.dim(), x.len())?;
        Ok((self.f)(x))
    }

    fn pieces(&self) -> Option<Vec<Piece>> {
        self.linear.as_ref().map(|m| {
            vec![Piece { interior: self.domain.zero(), inradius: f64::INFINITY, jacobian: m.clone() }]
        })
    }

    fn lip_upper(&self) -> Option<f64> {
        Some(self.bound)
    }
}

/// `||Tx - Ty|| / ||x - y||`.
pub fn difference_quotient(map: &dyn LipschitzMap, x: &Vector, y: &Vector) -> Result<f64> {
    let d = map.domain().norm(&(x - y))?;
    if d == 0.0 {
        return Err(Error::Domain("difference quotient of coincident points".into()));
    }
    let tx = map.apply(x)?;
    let ty = map.apply(y)?;
    Ok(map.codomain().norm(&(tx - ty))? / d)
}

/// `sup { |f(Tx - Ty)| : f in D(x - y) } / ||x - y||^2`, with a maximising `f`.
pub fn range_value(map: &dyn LipschitzMap, x: &Vector, y: &Vector) -> Result<(f64, Vector)> {
    let space = map.domain();
    let d = x - y;
    let nd = space.norm(&d)?;
    if nd == 0.0 {
        return Err(Error::Domain("numerical-range value of coincident points".into()));
    }
    let diff = map.apply(x)? - map.apply(y)?;
    let set = space.duality_set(&d)?;
    let (_, f) = set.argmax_abs(&diff)?;
    Ok((pair(f.as_slice(), diff.as_slice()).norm() / (nd * nd), f))
}

/// A pair `(x, y)` with its certified value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub value: f64,
    #[serde(with = "crate::io::cvec")]
    pub x: Vector,
    #[serde(with = "crate::io::cvec")]
    pub y: Vector,
}

fn piece_step(p: &Piece, w: &Vector, r: f64) -> f64 {
    let e = w.norm();
    if e == 0.0 {
        return 0.0;
    }
    (0.5 * p.inradius / e).min(r)
}

fn best_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn random_pairs(map: &dyn LipschitzMap, r: f64, count: usize, seed: u64) -> Vec<(Vector, Vector)> {
    let space = map.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = map.sample_radius();
    (0..count)
        .map(|_| {
            let x = space.random_vector(&mut rng) * C64::new(0.5 * scale, 0.0);
            let u = space.random_unit(&mut rng);
            let s: f64 = rng.random_range(0.0..1.0);
            // Pairs are kept above r/1000 apart so rounding stays far below the checks.
            let s = r * (1.0 - 0.999 * s);
            let y = &x + u * C64::new(s, 0.0);
            (x, y)
        })
        .collect()
}

fn quotients(map: &dyn LipschitzMap, pairs: &[(Vector, Vector)]) -> Vec<f64> {
    pairs
        .par_iter()
        .map(|(x, y)| difference_quotient(map, x, y).unwrap_or(0.0))
        .collect()
}

fn max_sampled_quotient(map: &dyn LipschitzMap, count: usize, seed: u64) -> f64 {
    let mut pairs = random_pairs(map, map.sample_radius(), count / 2, seed);
    // Short pairs probe the local constant as well.
    pairs.extend(random_pairs(map, 1e-3 * map.sample_radius(), count - count / 2, seed ^ 0x5a5a));
    quotients(map, &pairs).into_iter().fold(0.0, f64::max)
}

/// Lower bound for `||T||_L` from pairs at distance at most `r`: pairs inside
/// single pieces along norming directions, random pairs, then a local ascent
/// on the direction of the best pairs.
pub fn lip_lower(map: &dyn LipschitzMap, r: f64, budget: usize, seed: u64) -> PairBound {
    let dom = map.domain();
    let mut pairs = Vec::new();
    if let Some(pieces) = map.pieces() {
        for p in &pieces {
            let b = op_norm_between(dom, map.codomain(), &p.jacobian);
            let h = piece_step(p, &b.witness, r);
            if h > 0.0 {
                pairs.push((&p.interior + &b.witness * C64::new(h, 0.0), p.interior.clone()));
            }
        }
    }
    pairs.extend(random_pairs(map, r, budget, seed));
    let values = quotients(map, &pairs);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let complex = !dom.field().is_real();
    let refined: Vec<PairBound> = order
        .par_iter()
        .take(4)
        .map(|&i| {
            let (x, y) = &pairs[i];
            let d = y - x;
            let s = dom.norm_of(d.as_slice());
            let objective = |u: &Vector| {
                let y = x + u * C64::new(s, 0.0);
                difference_quotient(map, x, &y).unwrap_or(0.0)
            };
            let (v, u) = pattern_ascent(
                d.unscale(s),
                complex,
                objective,
                |w| {
                    let nw = dom.norm_of(w.as_slice());
                    (nw > 0.0).then(|| w.unscale(nw))
                },
                0.1,
                1e-9,
                2000,
            );
            PairBound { value: v, x: x.clone(), y: x + u * C64::new(s, 0.0) }
        })
        .collect();
    let i = best_index(&refined.iter().map(|p| p.value).collect::<Vec<_>>());
    let mut best = refined[i].clone();
    best.value = difference_quotient(map, &best.x, &best.y).unwrap_or(0.0);
    best
}

/// Lower bound for the numerical radius of a self-map from two-point values
/// `|f(Tx - Ty)| / ||x - y||^2`, `f in D(x - y)`. Pairs inside pieces follow
/// sampled numerical-range witnesses of the piece Jacobians.
pub fn two_point_lower(map: &dyn LipschitzMap, budget: usize, seed: u64) -> (f64, Witness) {
    let dom = map.domain();
    let mut pairs = Vec::new();
    if let Some(pieces) = map.pieces() {
        for p in &pieces {
            let op = LinearOperator::new(dom.clone(), p.jacobian.clone()).expect("square piece");
            let (_, w) = op.radius_lower(budget.clamp(16, 256), seed);
            let h = piece_step(p, &w.x, 1.0);
            if h > 0.0 {
                pairs.push((&p.interior + &w.x * C64::new(h, 0.0), p.interior.clone()));
            }
        }
    }
    pairs.extend(random_pairs(map, map.sample_radius(), budget, seed ^ 0x7e57));
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|(x, y)| range_value(map, x, y).map(|v| v.0).unwrap_or(0.0))
        .collect();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let complex = !dom.field().is_real();
    let refined: Vec<(f64, Vector, Vector)> = order
        .par_iter()
        .take(4)
        .map(|&i| {
            let (x, y) = &pairs[i];
            let d = y - x;
            let s = dom.norm_of(d.as_slice());
            let objective = |u: &Vector| {
                let y = x + u * C64::new(s, 0.0);
                range_value(map, x, &y).map(|v| v.0).unwrap_or(0.0)
            };
            let (v, u) = pattern_ascent(
                d.unscale(s),
                complex,
                objective,
                |w| {
                    let nw = dom.norm_of(w.as_slice());
                    (nw > 0.0).then(|| w.unscale(nw))
                },
                0.1,
                1e-9,
                2000,
            );
            (v, x.clone(), x + u * C64::new(s, 0.0))
        })
        .collect();
    let i = best_index(&refined.iter().map(|p| p.0).collect::<Vec<_>>());
    let (_, x, y) = refined[i].clone();
    match range_value(map, &x, &y) {
        Ok((v, f)) => (v, Witness { x, y, f }),
        Err(_) => (0.0, Witness { x: x.clone(), y: x, f: dom.zero() }),
    }
}

/// Re-evaluates a two-point witness: `|f(Tx - Ty)| / ||x - y||^2`.
pub fn witness_value(map: &dyn LipschitzMap, w: &Witness) -> Result<f64> {
    let tx = map.apply(&w.x)?;
    let ty = map.apply(&w.y)?;
    Ok(w.value_from_images(map.domain(), &tx, &ty))
}

/// Upper bound for the numerical radius from the pieces (the supremum over
/// pieces of the radius of the Jacobian), for piecewise-affine self-maps.
pub fn cell_radius_upper(map: &dyn LipschitzMap, tol: f64) -> Option<f64> {
    let pieces = map.pieces()?;
    Some(
        pieces
            .iter()
            .map(|p| {
                LinearOperator::new(map.domain().clone(), p.jacobian.clone())
                    .expect("square piece")
                    .numerical_radius(tol)
                    .upper
            })
            .fold(0.0, f64::max),
    )
}
