//! Witnesses for the lush condition: a slice `S(y*, eps)` containing `y`
//! and two slice members whose signed convex combination is `eps`-close to `x`.

use super::{real, vec_value, WitnessRecord};
use crate::error::{Error, Result};
use crate::linalg::golden_max;
use crate::spaces::{real_part, real_vector, NormKind, NormedSpace, Vector};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LushWitness {
    #[serde(with = "crate::io::cvec")]
    pub functional: Vector,
    pub epsilon: f64,
    #[serde(with = "crate::io::cvec")]
    pub x1: Vector,
    #[serde(with = "crate::io::cvec")]
    pub x2: Vector,
    pub lambda: f64,
    pub alphas: [f64; 2],
    pub achieved_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LushOutcome {
    Found(LushWitness),
    /// Nothing within `eps`; lists the functionals whose slices were searched.
    NotFound { functionals: Vec<Vec<f64>>, best_distance: f64 },
}

impl LushOutcome {
    pub fn witness(&self) -> Option<&LushWitness> {
        match self {
            LushOutcome::Found(w) => Some(w),
            LushOutcome::NotFound { .. } => None,
        }
    }

    pub fn record(&self, space: &NormedSpace, x: &Vector, y: &Vector, eps: f64) -> WitnessRecord {
        let residuals = match self {
            LushOutcome::Found(w) => vec![
                ("distance", w.achieved_distance),
                ("slice_margin_x1", slice_margin(w, &w.x1)),
                ("slice_margin_x2", slice_margin(w, &w.x2)),
                ("slice_margin_y", slice_margin(w, y)),
            ],
            LushOutcome::NotFound { best_distance, .. } => vec![("distance", *best_distance)],
        };
        WitnessRecord::new(
            "lush_witness",
            serde_json::json!({ "space": space.to_string(), "x": vec_value(x), "y": vec_value(y), "eps": eps }),
            serde_json::to_value(self).expect("outcome serializes"),
            &residuals,
        )
    }
}

/// `Re y*(z) - (1 - eps)`: positive for slice members.
fn slice_margin(w: &LushWitness, z: &Vector) -> f64 {
    crate::spaces::pair(w.functional.as_slice(), z.as_slice()).re - (1.0 - w.epsilon)
}

/// Candidate found for one functional.
struct Candidate {
    x1: Vector,
    x2: Vector,
    lambda: f64,
    alphas: [f64; 2],
    distance: f64,
}

fn combination(c: &Candidate) -> Vector {
    &c.x1 * real(c.lambda * c.alphas[0]) + &c.x2 * real((1.0 - c.lambda) * c.alphas[1])
}

/// Minimises `||x - a1 p - a2 q||` over `p in lambda K`, `q in (1 - lambda) K`,
/// `K = {z : ||z|| <= 1, g(z) >= 1 - margin}`, for a norm given by `facets`.
fn polyhedral_best(
    facets: &[DVector<f64>],
    g: &DVector<f64>,
    x: &DVector<f64>,
    margin: f64,
    alphas: [f64; 2],
) -> Option<(DVector<f64>, DVector<f64>, f64)> {
    let n = x.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let p: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let q: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let lam = lp.add_var(0.0, (0.0, 1.0));
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    let floor = 1.0 - margin;
    for phi in facets {
        for s in [1.0, -1.0] {
            let mut row: Vec<_> = (0..n).map(|j| (p[j], s * phi[j])).collect();
            row.push((lam, -1.0));
            lp.add_constraint(&row[..], ComparisonOp::Le, 0.0);
            let mut row: Vec<_> = (0..n).map(|j| (q[j], s * phi[j])).collect();
            row.push((lam, 1.0));
            lp.add_constraint(&row[..], ComparisonOp::Le, 1.0);
            // s phi(x - a1 p - a2 q) <= t
            let mut row: Vec<_> = (0..n).map(|j| (p[j], -s * alphas[0] * phi[j])).collect();
            row.extend((0..n).map(|j| (q[j], -s * alphas[1] * phi[j])));
            row.push((t, -1.0));
            lp.add_constraint(&row[..], ComparisonOp::Le, -s * phi.dot(x));
        }
    }
    let mut row: Vec<_> = (0..n).map(|j| (p[j], g[j])).collect();
    row.push((lam, -floor));
    lp.add_constraint(&row[..], ComparisonOp::Ge, 0.0);
    let mut row: Vec<_> = (0..n).map(|j| (q[j], g[j])).collect();
    row.push((lam, floor));
    lp.add_constraint(&row[..], ComparisonOp::Ge, floor);
    let sol = lp.solve().ok()?.into_solution().ok()?;
    let pv = DVector::from_fn(n, |j, _| sol[p[j]]);
    let qv = DVector::from_fn(n, |j, _| sol[q[j]]);
    Some((pv, qv, sol[lam]))
}

fn polyhedral_candidate(
    space: &NormedSpace,
    facets: &[DVector<f64>],
    g: &DVector<f64>,
    x: &DVector<f64>,
    margin: f64,
) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for alphas in [[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]] {
        let Some((p, q, lam)) = polyhedral_best(facets, g, x, margin, alphas) else {
            continue;
        };
        let member = |v: &DVector<f64>, w: f64| if w > 1e-12 { Some(v / w) } else { None };
        let (m1, m2) = (member(&p, lam), member(&q, 1.0 - lam));
        let (x1, x2) = match (m1, m2) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a.clone(), a),
            (None, Some(b)) => (b.clone(), b),
            (None, None) => continue,
        };
        let mut c = Candidate { x1: real_vector(x1.as_slice()), x2: real_vector(x2.as_slice()), lambda: lam, alphas, distance: 0.0 };
        c.distance = space.norm_of((real_vector(x.as_slice()) - combination(&c)).as_slice());
        if best.as_ref().is_none_or(|b| c.distance < b.distance) {
            best = Some(c);
        }
    }
    best
}

/// Slice points for a smooth norm: the norming point of `g`, pulled towards
/// `+x` and `-x`, plus random sphere points that fall in the slice.
fn smooth_candidate(space: &NormedSpace, g: &Vector, x: &Vector, margin: f64, samples: &[Vector]) -> Option<Candidate> {
    let (_, top) = space.dual_norm_argmax(g.as_slice());
    let in_slice = |z: &Vector| crate::spaces::pair(g.as_slice(), z.as_slice()).re > 1.0 - margin;
    let mut pts = vec![top.clone()];
    for sign in [1.0, -1.0] {
        for k in 1..=24 {
            let s = k as f64 / 24.0;
            let w = &top * real(1.0 - s) + x * real(sign * s);
            let nw = space.norm_of(w.as_slice());
            if nw > 0.0 {
                let w = w.unscale(nw);
                if in_slice(&w) {
                    pts.push(w);
                }
            }
        }
    }
    pts.extend(samples.iter().filter(|z| in_slice(z)).take(16).cloned());
    let mut best: Option<Candidate> = None;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i..] {
            for alphas in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
                let dist = |l: f64| {
                    let c = Candidate { x1: p.clone(), x2: q.clone(), lambda: l, alphas, distance: 0.0 };
                    space.norm_of((x - combination(&c)).as_slice())
                };
                let (l, _) = golden_max(|l| -dist(l), 0.0, 1.0, 60);
                let d = dist(l);
                if best.as_ref().is_none_or(|b| d < b.distance) {
                    best = Some(Candidate { x1: p.clone(), x2: q.clone(), lambda: l, alphas, distance: d });
                }
            }
        }
    }
    best
}

/// Searches for a lush witness for the unit vectors `x`, `y` at level `eps`.
///
/// Polyhedral norms use the facet functionals and a linear program per sign
/// pattern; smooth norms use a seeded grid of `budget` dual unit functionals
/// and a finite set of slice points. Real spaces only.
pub fn lush_witness(space: &NormedSpace, x: &Vector, y: &Vector, eps: f64, budget: usize, seed: u64) -> Result<LushOutcome> {
    if !space.field().is_real() {
        return Err(Error::UnsupportedKind("lush witnesses are searched on real spaces".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Input("eps must lie in (0, 1)".into()));
    }
    for v in [x, y] {
        let nv = space.norm(v)?;
        if (nv - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!("x and y must be unit vectors (norm {nv})")));
        }
    }
    // Members are kept at depth eps/2 so the slice inequality is strict.
    let margin = eps / 2.0;
    let pair_y = |g: &Vector| crate::spaces::pair(g.as_slice(), y.as_slice()).re;
    let facets = match space.kind() {
        NormKind::PNorm(p) if *p != 1.0 && p.is_finite() && space.dim() > 1 => None,
        _ => space.norming_functionals(),
    };

    let (functionals, candidates): (Vec<Vector>, Vec<Option<Candidate>>) = match &facets {
        Some(fs) => {
            let rows: Vec<DVector<f64>> = fs.iter().map(real_part).collect();
            let xr = real_part(x);
            let gs: Vec<Vector> = fs
                .iter()
                .flat_map(|f| [f.clone(), -f])
                .map(|f| {
                    let nf = space.dual_norm_of(f.as_slice());
                    f.unscale(nf)
                })
                .filter(|g| pair_y(g) > 1.0 - eps)
                .collect();
            let cands = gs
                .par_iter()
                .map(|g| polyhedral_candidate(space, &rows, &real_part(g), &xr, margin))
                .collect();
            (gs, cands)
        }
        None => {
            let dual_grid = dual_sphere(space, budget.max(8), seed);
            let samples = space.sample_sphere(4 * budget.max(8), seed ^ 0x1a5);
            let (_, gy) = space.duality_set(y)?.argmax_abs(y)?;
            let gs: Vec<Vector> = std::iter::once(gy)
                .chain(dual_grid)
                .filter(|g| pair_y(g) > 1.0 - eps)
                .collect();
            let cands = gs.par_iter().map(|g| smooth_candidate(space, g, x, margin, &samples)).collect();
            (gs, cands)
        }
    };

    let mut best: Option<(usize, Candidate)> = None;
    for (i, c) in candidates.into_iter().enumerate() {
        if let Some(c) = c {
            if best.as_ref().is_none_or(|(_, b)| c.distance < b.distance) {
                best = Some((i, c));
            }
        }
    }
    match best {
        Some((i, c)) if c.distance < eps => Ok(LushOutcome::Found(LushWitness {
            functional: functionals[i].clone(),
            epsilon: eps,
            x1: c.x1,
            x2: c.x2,
            lambda: c.lambda,
            alphas: c.alphas,
            achieved_distance: c.distance,
        })),
        other => Ok(LushOutcome::NotFound {
            functionals: functionals.iter().map(|g| real_part(g).iter().copied().collect()).collect(),
            best_distance: other.map_or(f64::INFINITY, |(_, c)| c.distance),
        }),
    }
}

/// Seeded unit functionals of the dual space.
fn dual_sphere(space: &NormedSpace, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let g = space.random_vector(&mut rng);
            let ng = space.dual_norm_of(g.as_slice());
            if ng > 1e-8 {
                break g.unscale(ng);
            }
        })
        .collect()
}
