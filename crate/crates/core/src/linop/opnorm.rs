//! Operator norms between finite-dimensional normed spaces.

use crate::linalg::{is_zero, spectral_norm};
use crate::search::pattern_ascent;
use crate::spaces::{concat, pad, Matrix, NormKind, NormedSpace, SumKind, Vector, C64};
use serde::{Deserialize, Serialize};

const ASCENT_SEED: u64 = 0x5eed_0b5e;

/// Certified enclosure `lower <= ||M|| <= upper` with a unit vector realising `lower`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    #[serde(with = "crate::io::cvec")]
    pub witness: Vector,
}

impl NormBracket {
    pub fn is_exact(&self) -> bool {
        self.upper - self.lower <= 1e-12 * (1.0 + self.upper)
    }
}

fn realised(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix, x: &Vector) -> f64 {
    let nx = dom.norm_of(x.as_slice());
    if nx == 0.0 {
        0.0
    } else {
        cod.norm_of((m * x).as_slice()) / nx
    }
}

fn exact(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix, value: f64, x: Vector) -> NormBracket {
    let lower = realised(dom, cod, m, &x);
    NormBracket { lower, upper: value.max(lower), witness: x }
}

fn pick_larger(a: NormBracket, b: NormBracket, pad_a: impl Fn(&Vector) -> Vector, pad_b: impl Fn(&Vector) -> Vector) -> NormBracket {
    let upper = a.upper.max(b.upper);
    if a.lower >= b.lower {
        NormBracket { lower: a.lower, upper, witness: pad_a(&a.witness) }
    } else {
        NormBracket { lower: b.lower, upper, witness: pad_b(&b.witness) }
    }
}

/// `||M||` from `dom` to `cod`, as a bracket; exact whenever a closed form or a
/// finite enumeration applies.
pub fn op_norm_between(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix) -> NormBracket {
    between(dom, cod, m, true)
}

/// The upper end of the bracket without the ascent for a lower bound.
pub(crate) fn op_norm_upper(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix) -> f64 {
    between(dom, cod, m, false).upper
}

fn between(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix, search: bool) -> NormBracket {
    assert_eq!(m.ncols(), dom.dim(), "matrix columns must match the domain");
    assert_eq!(m.nrows(), cod.dim(), "matrix rows must match the codomain");
    if is_zero(m) {
        return NormBracket { lower: 0.0, upper: 0.0, witness: dom.canonical_unit() };
    }
    let n = dom.dim();
    if let Some(s) = dom.as_sum().filter(|s| s.kind == SumKind::L1) {
        let k = s.left.dim();
        let a = between(&s.left, cod, &m.columns(0, k).into_owned(), search);
        let b = between(&s.right, cod, &m.columns(k, n - k).into_owned(), search);
        return pick_larger(a, b, |w| pad(w.as_slice(), 0, n), |w| pad(w.as_slice(), k, n));
    }
    if let Some(s) = cod.as_sum().filter(|s| s.kind == SumKind::Linf) {
        let k = s.left.dim();
        let a = between(dom, &s.left, &m.rows(0, k).into_owned(), search);
        let b = between(dom, &s.right, &m.rows(k, cod.dim() - k).into_owned(), search);
        return pick_larger(a, b, Vector::clone, Vector::clone);
    }
    if let Some(points) = dom.norming_points() {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, v) in points.iter().enumerate() {
            let val = cod.norm_of((m * v).as_slice());
            if val > best.0 {
                best = (val, i);
            }
        }
        return exact(dom, cod, m, best.0, points[best.1].clone());
    }
    if let Some(funcs) = cod.norming_functionals() {
        let mt = m.transpose();
        let mut best = (f64::NEG_INFINITY, Vector::zeros(0));
        for phi in &funcs {
            let g = &mt * phi;
            let (val, x) = dom.dual_norm_argmax(g.as_slice());
            if val > best.0 {
                best = (val, x);
            }
        }
        return exact(dom, cod, m, best.0, best.1);
    }
    if dom.p() == Some(2.0) && cod.p() == Some(2.0) {
        let (s, v) = spectral_norm(m);
        return exact(dom, cod, m, s, v);
    }

    let mut seeds = Vec::new();
    let mut upper = generic_upper(dom, cod, m);
    if let Some(s) = dom.as_sum() {
        // Linf-sum domain: ||[B C]|| <= ||B|| + ||C||.
        let k = s.left.dim();
        let a = between(&s.left, cod, &m.columns(0, k).into_owned(), search);
        let b = between(&s.right, cod, &m.columns(k, n - k).into_owned(), search);
        upper = upper.min(a.upper + b.upper);
        seeds.push(pad(a.witness.as_slice(), 0, n));
        seeds.push(pad(b.witness.as_slice(), k, n));
        for j in 0..8 {
            let w = C64::from_polar(1.0, std::f64::consts::PI * j as f64 / 4.0);
            seeds.push(concat(a.witness.as_slice(), (&b.witness * w).as_slice()));
        }
    }
    if let Some(s) = cod.as_sum() {
        // L1-sum codomain: ||[B; C]|| <= ||B|| + ||C||.
        let k = s.left.dim();
        let a = between(dom, &s.left, &m.rows(0, k).into_owned(), search);
        let b = between(dom, &s.right, &m.rows(k, cod.dim() - k).into_owned(), search);
        upper = upper.min(a.upper + b.upper);
        seeds.push(a.witness);
        seeds.push(b.witness);
    }
    if !search {
        return NormBracket { lower: 0.0, upper, witness: dom.canonical_unit() };
    }
    let (lower, witness) = ascent_lower(dom, cod, m, seeds);
    NormBracket { lower, upper: upper.max(lower), witness }
}

/// Sound upper bound valid for every pair of spaces.
fn generic_upper(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix) -> f64 {
    let col_max = (0..m.ncols())
        .map(|j| cod.norm_of(m.column(j).into_owned().as_slice()))
        .fold(0.0f64, f64::max);
    let mut best = dom.l1_constant() * col_max;
    if let (NormKind::PNorm(pd), NormKind::PNorm(pc)) = (dom.kind(), cod.kind()) {
        let c1 = (dom.dim() as f64).powf((0.5 - 1.0 / pd).max(0.0));
        let c2 = (cod.dim() as f64).powf((1.0 / pc - 0.5).max(0.0));
        best = best.min(c1 * c2 * spectral_norm(m).0);
        if pd == pc {
            let c = (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
            let r = (0..m.nrows()).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
            best = best.min(c.powf(1.0 / pd) * r.powf(1.0 - 1.0 / pd));
        }
    }
    best
}

fn ascent_lower(dom: &NormedSpace, cod: &NormedSpace, m: &Matrix, mut seeds: Vec<Vector>) -> (f64, Vector) {
    seeds.extend(dom.sample_sphere(64, ASCENT_SEED));
    let mut scored: Vec<(f64, usize)> = seeds
        .iter()
        .enumerate()
        .map(|(i, x)| (realised(dom, cod, m, x), i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let complex = !dom.field().is_real();
    let mut best = (f64::NEG_INFINITY, Vector::zeros(0));
    for &(_, i) in scored.iter().take(4) {
        let x0 = seeds[i].unscale(dom.norm_of(seeds[i].as_slice()));
        let (v, x) = pattern_ascent(
            x0,
            complex,
            |x| realised(dom, cod, m, x),
            |y| {
                let ny = dom.norm_of(y.as_slice());
                (ny > 0.0).then(|| y.unscale(ny))
            },
            0.25,
            1e-9,
            20_000,
        );
        if v > best.0 {
            best = (v, x);
        }
    }
    let lower = realised(dom, cod, m, &best.1);
    (lower, best.1)
}
