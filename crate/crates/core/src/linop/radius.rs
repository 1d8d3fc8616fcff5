use super::limit::{default_schedule, limit_sequence, polygon_max_modulus, refine_polygon, uniform_directions};
use super::{AlphaGrid, LinearOperator, RadiusBracket, UpperMethod, Witness};
use crate::linalg::{hermitian_extremes, hermitian_part};
use crate::search::pattern_ascent;
use crate::spaces::{conj_sign, pad, pair, phase, unit, DualitySet, Matrix, NormKind, NormedSpace, Vector, C64};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::cell::RefCell;

const LOWER_SEED: u64 = 0x0a11_ce5e;
const GENERAL_BUDGET: usize = 1024;
const MAX_FINITE_SEEDS: usize = 4096;

enum Path {
    RealL2,
    ComplexL2,
    Finite(Vec<Vector>),
    ComplexLinf,
    General,
}

fn path(space: &NormedSpace) -> Path {
    if space.p() == Some(2.0) && space.dim() > 1 {
        return if space.field().is_real() { Path::RealL2 } else { Path::ComplexL2 };
    }
    if let Some(points) = space.norming_points() {
        return Path::Finite(points);
    }
    if matches!(space.kind(), NormKind::PNorm(p) if p.is_infinite()) {
        return Path::ComplexLinf;
    }
    Path::General
}

/// `sup { |f(Tx)| : f in D(x) } / ||x||^2` with a maximising functional for `x / ||x||`.
pub(crate) fn quotient(space: &NormedSpace, m: &Matrix, x: &Vector) -> (f64, Vector, Vector) {
    let n = space.norm_of(x.as_slice());
    if n == 0.0 {
        return (0.0, x.clone(), Vector::zeros(x.len()));
    }
    let u = x.unscale(n);
    let d = DualitySet::new(space, &u).expect("unit vector");
    let (_, f) = d.argmax_of((m * &u).as_slice());
    let v = pair(f.as_slice(), (m * &u).as_slice()).norm();
    (v, u, f)
}

fn bracket(lower: f64, w: Witness, upper: f64, method: UpperMethod, tol: f64) -> RadiusBracket {
    let upper = upper.max(lower);
    RadiusBracket { lower, lower_witness: w, upper, upper_method: method, tol, converged: upper - lower <= tol }
}

pub(crate) fn numerical_radius(op: &LinearOperator, tol: f64) -> RadiusBracket {
    let space = op.space();
    let m = op.matrix();
    match path(space) {
        Path::RealL2 => {
            let h = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
            let eig = h.symmetric_eigen();
            let k = eig.eigenvalues.iamax();
            let x = eig.eigenvectors.column(k).map(|r| C64::new(r, 0.0));
            let (lower, x, f) = quotient(space, m, &x);
            bracket(lower, Witness::linear(x, f), eig.eigenvalues[k].abs(), UpperMethod::ClosedForm, tol)
        }
        Path::ComplexL2 => complex_l2(op, tol),
        Path::Finite(points) => {
            let (lower, x, f) = best_of(space, m, &points);
            bracket(lower, Witness::linear(x, f), lower, UpperMethod::ClosedForm, tol)
        }
        Path::ComplexLinf => {
            let n = m.nrows();
            let mut best = (f64::NEG_INFINITY, 0);
            for i in 0..n {
                let s = (0..n).map(|j| m[(i, j)].norm()).sum::<f64>();
                if s > best.0 {
                    best = (s, i);
                }
            }
            let i = best.1;
            let ph = phase(m[(i, i)]);
            let x = Vector::from_fn(n, |j, _| if j == i { C64::new(1.0, 0.0) } else { conj_sign(m[(i, j)]) * ph });
            let f = unit(n, i);
            let lower = pair(f.as_slice(), (m * &x).as_slice()).norm();
            bracket(lower, Witness::linear(x, f), best.0, UpperMethod::ClosedForm, tol)
        }
        Path::General => {
            let seeds = structured_seeds(op);
            let alphas = AlphaGrid::for_field(space.field());
            let schedule = default_schedule();
            let upper = *limit_sequence(op, &schedule, &alphas)
                .expect("default schedule is valid")
                .last()
                .unwrap();
            let method = UpperMethod::LimitFormula { t_min: *schedule.last().unwrap(), alpha_count: alphas.values().len() };
            let mut budget = GENERAL_BUDGET;
            let mut out;
            loop {
                let (lower, w) = radius_lower(op, budget, LOWER_SEED, seeds.clone());
                out = bracket(lower, w, upper, method.clone(), tol);
                if out.converged || budget >= 8 * GENERAL_BUDGET {
                    break;
                }
                budget *= 2;
            }
            out
        }
    }
}

fn best_of(space: &NormedSpace, m: &Matrix, points: &[Vector]) -> (f64, Vector, Vector) {
    let mut best = (f64::NEG_INFINITY, Vector::zeros(0), Vector::zeros(0));
    for v in points {
        let q = quotient(space, m, v);
        if q.0 > best.0 {
            best = q;
        }
    }
    best
}

fn complex_l2(op: &LinearOperator, tol: f64) -> RadiusBracket {
    let m = op.matrix();
    let best = RefCell::new((f64::NEG_INFINITY, Vector::zeros(0)));
    let oracle = |phi: f64| {
        let h = hermitian_part(&(m * C64::from_polar(1.0, phi)));
        let (_, (l, v)) = hermitian_extremes(&h);
        let z = v.adjoint() * m * &v;
        let mut b = best.borrow_mut();
        if z[0].norm() > b.0 {
            *b = (z[0].norm(), v);
        }
        l
    };
    let mut dirs: Vec<(f64, f64)> = uniform_directions(64).into_iter().map(|p| (p, oracle(p))).collect();
    let upper = refine_polygon(
        &mut dirs,
        oracle,
        |_| best.borrow().0 + 0.5 * tol,
        1 << 16,
    );
    let x = best.borrow().1.clone();
    let (lower, x, f) = quotient(op.space(), m, &x);
    bracket(lower, Witness::linear(x, f), upper, UpperMethod::ClosedForm, tol)
}

/// Witnesses of the diagonal blocks of an operator on a sum, padded by zero.
fn structured_seeds(op: &LinearOperator) -> Vec<Vector> {
    let space = op.space();
    let n = space.dim();
    let mut seeds: Vec<Vector> = (0..n).map(|k| unit(n, k)).collect();
    if let Some(s) = space.as_sum() {
        let k = s.left.dim();
        let m = op.matrix();
        let blocks = [(&s.left, 0, k), (&s.right, k, n - k)];
        for (sub, off, d) in blocks {
            let block = m.view((off, off), (d, d)).into_owned();
            let sub_op = LinearOperator::new(sub.clone(), block).expect("diagonal block");
            let w = numerical_radius(&sub_op, 1e-9).lower_witness.x;
            seeds.push(pad(w.as_slice(), off, n));
        }
    }
    seeds
}

pub(crate) fn radius_lower(op: &LinearOperator, budget: usize, seed: u64, mut seeds: Vec<Vector>) -> (f64, Witness) {
    let space = op.space();
    let m = op.matrix();
    if let Some(points) = space.norming_points() {
        if points.len() <= MAX_FINITE_SEEDS {
            seeds.extend(points);
        }
    }
    seeds.extend(space.sample_sphere(budget, seed));
    let mut scored: Vec<(f64, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, x)| (quotient(space, m, x).0, i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let complex = !space.field().is_real();
    let refined: Vec<(f64, Vector)> = scored
        .par_iter()
        .take(6)
        .map(|&(_, i)| {
            pattern_ascent(
                seeds[i].clone(),
                complex,
                |x| quotient(space, m, x).0,
                |y| {
                    let ny = space.norm_of(y.as_slice());
                    (ny > 0.0).then(|| y.unscale(ny))
                },
                0.1,
                1e-10,
                4000,
            )
        })
        .collect();
    let mut best = refined[0].clone();
    for r in refined.into_iter().skip(1) {
        if r.0 > best.0 {
            best = r;
        }
    }
    let (value, x, f) = quotient(space, m, &best.1);
    (value, Witness::linear(x, f))
}

/// A cheap sound upper bound for `omega(T)`, used to screen candidates.
pub(crate) fn screen_upper(op: &LinearOperator) -> f64 {
    let space = op.space();
    match path(space) {
        Path::ComplexL2 => {
            let m = op.matrix();
            let dirs: Vec<(f64, f64)> = uniform_directions(64)
                .into_iter()
                .map(|p| {
                    let h = hermitian_part(&(m * C64::from_polar(1.0, p)));
                    (p, hermitian_extremes(&h).1 .0)
                })
                .collect();
            polygon_max_modulus(&dirs).0
        }
        Path::General => {
            let alphas = AlphaGrid::for_field(space.field());
            limit_sequence(op, &[2f64.powi(-40)], &alphas).expect("valid schedule")[0]
        }
        _ => numerical_radius(op, 1e-9).upper,
    }
}
