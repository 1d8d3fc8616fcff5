//! Upper bounds for the numerical radius from `(||I + t a T|| - 1) / t`.
//!
//! The difference `||I + tA|| - 1` is evaluated without subtracting nearly equal
//! numbers, so the quotient stays accurate down to `t = 2^-40`.

use super::opnorm::op_norm_upper;
use super::{AlphaGrid, LinearOperator};
use crate::error::{Error, Result};
use crate::linalg::{abs_increment, hermitian_extremes, hermitian_part, is_zero};
use crate::spaces::{conjugate_exponent, Matrix, NormKind, NormedSpace, SumKind, ACTIVE_TOL, C64};

pub fn default_schedule() -> Vec<f64> {
    (1..=40).map(|k| 2f64.powi(-k)).collect()
}

fn snap(d: f64, scale: f64) -> f64 {
    if d > -ACTIVE_TOL * scale {
        0.0
    } else {
        d
    }
}

fn pnorm_increment(v: &[C64], w: &[C64], p: f64) -> f64 {
    if p == 1.0 {
        return v.iter().zip(w).map(|(a, d)| abs_increment(*a, *d)).sum();
    }
    if p.is_infinite() {
        let nv = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        return v
            .iter()
            .zip(w)
            .map(|(a, d)| snap(a.norm() - nv, nv) + abs_increment(*a, *d))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    let nv = v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p);
    if p == 2.0 {
        let s: f64 = v.iter().zip(w).map(|(a, d)| 2.0 * (a.conj() * d).re + d.norm_sqr()).sum();
        let nvw = v.iter().zip(w).map(|(a, d)| (a + d).norm_sqr()).sum::<f64>().sqrt();
        return if nvw + nv == 0.0 { 0.0 } else { s / (nvw + nv) };
    }
    let s: f64 = v
        .iter()
        .zip(w)
        .map(|(a, d)| {
            let r = a.norm();
            if r == 0.0 {
                d.norm().powf(p)
            } else {
                r.powf(p) * (p * (abs_increment(*a, *d) / r).ln_1p()).exp_m1()
            }
        })
        .sum();
    if nv == 0.0 {
        return s.max(0.0).powf(1.0 / p);
    }
    nv * ((s / nv.powf(p)).ln_1p() / p).exp_m1()
}

/// `||v + w|| - ||v||`, accurate when `w` is small.
pub(crate) fn norm_increment(space: &NormedSpace, v: &[C64], w: &[C64]) -> f64 {
    match space.kind() {
        NormKind::PNorm(p) => pnorm_increment(v, w, *p),
        NormKind::Polyhedral(poly) => {
            let vals: Vec<(C64, C64)> = poly
                .facets
                .iter()
                .map(|f| {
                    let a: C64 = f.iter().zip(v).map(|(c, z)| z * *c).sum();
                    let b: C64 = f.iter().zip(w).map(|(c, z)| z * *c).sum();
                    (a, b)
                })
                .collect();
            let nv = vals.iter().fold(0.0f64, |m, (a, _)| m.max(a.norm()));
            vals.iter()
                .map(|(a, b)| snap(a.norm() - nv, nv) + abs_increment(*a, *b))
                .fold(f64::NEG_INFINITY, f64::max)
        }
        NormKind::Sum(s) => {
            let k = s.left.dim();
            let (va, vb) = v.split_at(k);
            let (wa, wb) = w.split_at(k);
            let ia = norm_increment(&s.left, va, wa);
            let ib = norm_increment(&s.right, vb, wb);
            match s.kind {
                SumKind::L1 => ia + ib,
                SumKind::Linf => {
                    let (na, nb) = (s.left.norm_of(va), s.right.norm_of(vb));
                    let nv = na.max(nb);
                    (snap(na - nv, nv) + ia).max(snap(nb - nv, nv) + ib)
                }
            }
        }
    }
}

/// `||g + h||_* - ||g||_*` for p-norm duals, accurate when `h` is small.
fn dual_increment(space: &NormedSpace, g: &[C64], h: &[C64]) -> f64 {
    match space.kind() {
        NormKind::PNorm(p) => pnorm_increment(g, h, conjugate_exponent(*p)),
        _ => {
            let gh: Vec<C64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
            space.dual_norm_of(&gh) - space.dual_norm_of(g)
        }
    }
}

/// An upper bound for `||I + tA|| - 1`.
pub(crate) fn excess(space: &NormedSpace, a: &Matrix, t: f64) -> f64 {
    if is_zero(a) {
        return 0.0;
    }
    let n = space.dim();
    if space.p() == Some(2.0) && n > 1 {
        let m = hermitian_part(&(a + a.adjoint() + a.adjoint() * a * C64::new(t, 0.0)));
        let (_, (l, _)) = hermitian_extremes(&m);
        let mu = (t * l).max(-1.0);
        return mu / ((1.0 + mu).sqrt() + 1.0);
    }
    if let Some(points) = space.norming_points() {
        return points
            .iter()
            .map(|v| {
                let w = (a * v) * C64::new(t, 0.0);
                norm_increment(space, v.as_slice(), w.as_slice())
            })
            .fold(f64::NEG_INFINITY, f64::max);
    }
    if let Some(funcs) = space.norming_functionals() {
        let at = a.transpose();
        return funcs
            .iter()
            .map(|phi| {
                let h = (&at * phi) * C64::new(t, 0.0);
                dual_increment(space, phi.as_slice(), h.as_slice())
            })
            .fold(f64::NEG_INFINITY, f64::max);
    }
    if let Some(s) = space.as_sum() {
        let k = s.left.dim();
        let m = n - k;
        let axx = a.view((0, 0), (k, k)).into_owned();
        let ayy = a.view((k, k), (m, m)).into_owned();
        let axy = a.view((0, k), (k, m)).into_owned();
        let ayx = a.view((k, 0), (m, k)).into_owned();
        return match s.kind {
            // Column blocks: ||[I + tAxx; tAyx]|| <= ||I + tAxx|| + t||Ayx||.
            SumKind::L1 => {
                let x = excess(&s.left, &axx, t) + t * op_norm_upper(&s.left, &s.right, &ayx);
                let y = excess(&s.right, &ayy, t) + t * op_norm_upper(&s.right, &s.left, &axy);
                x.max(y)
            }
            // Row blocks: ||[I + tAxx, tAxy]|| <= ||I + tAxx|| + t||Axy||.
            SumKind::Linf => {
                let x = excess(&s.left, &axx, t) + t * op_norm_upper(&s.right, &s.left, &axy);
                let y = excess(&s.right, &ayy, t) + t * op_norm_upper(&s.left, &s.right, &ayx);
                x.max(y)
            }
        };
    }
    let id_plus = Matrix::identity(n, n) + a * C64::new(t, 0.0);
    op_norm_upper(space, space, &id_plus) - 1.0
}

/// Intersection of the lines `Re(e^{i a} z) = qa` and `Re(e^{i b} z) = qb`.
fn vertex((a, qa): (f64, f64), (b, qb): (f64, f64)) -> C64 {
    let det = (a - b).sin();
    let x = (-qa * b.sin() + qb * a.sin()) / det;
    let y = (a.cos() * qb - b.cos() * qa) / det;
    C64::new(x, y)
}

/// Largest modulus over the polygon `{ z : Re(e^{i phi_m} z) <= q_m }`.
/// `dirs` must be sorted by angle in `[0, 2 pi)` with gaps below a half turn.
pub(crate) fn polygon_max_modulus(dirs: &[(f64, f64)]) -> (f64, C64) {
    let m = dirs.len();
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    for i in 0..m {
        let (b, qb) = dirs[(i + 1) % m];
        let z = vertex(dirs[i], (b, qb));
        if z.norm() > best.0 {
            best = (z.norm(), z);
        }
    }
    best
}

/// Cutting-plane refinement: every vertex above `threshold(dirs)` is cut off
/// by the supporting direction through it, in rounds, until no vertex
/// exceeds the threshold or `max_dirs` is reached. Returns the final bound.
pub(crate) fn refine_polygon(
    dirs: &mut Vec<(f64, f64)>,
    mut oracle: impl FnMut(f64) -> f64,
    threshold: impl Fn(&[(f64, f64)]) -> f64,
    max_dirs: usize,
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    loop {
        let thr = threshold(dirs);
        let m = dirs.len();
        let mut cuts = Vec::new();
        for i in 0..m {
            let (a, _) = dirs[i];
            let (mut b, _) = dirs[(i + 1) % m];
            if i + 1 == m {
                b += two_pi;
            }
            let z = vertex(dirs[i], (b, dirs[(i + 1) % m].1));
            if z.norm() > thr {
                let phi = -z.arg();
                let mut phi_in = phi;
                while phi_in < a {
                    phi_in += two_pi;
                }
                while phi_in > a + two_pi {
                    phi_in -= two_pi;
                }
                if phi_in - a > 1e-13 && b - phi_in > 1e-13 {
                    cuts.push(phi.rem_euclid(two_pi));
                }
            }
        }
        if cuts.is_empty() || m + cuts.len() > max_dirs {
            return polygon_max_modulus(dirs).0;
        }
        for phi in cuts {
            let q = oracle(phi);
            dirs.push((phi, q));
        }
        dirs.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
}

pub(crate) fn uniform_directions(m: usize) -> Vec<f64> {
    (0..m).map(|k| 2.0 * std::f64::consts::PI * k as f64 / m as f64).collect()
}

/// The upper-bound sequence `u_k` along the schedule.
pub(crate) fn limit_sequence(op: &LinearOperator, schedule: &[f64], alphas: &AlphaGrid) -> Result<Vec<f64>> {
    if schedule.is_empty() || schedule.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Input("the t schedule must be non-empty and positive".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Input("the t schedule must be strictly decreasing".into()));
    }
    let space = op.space();
    let a = op.matrix();
    let real = space.field().is_real();
    let q = |alpha: C64, t: f64| excess(space, &(a * alpha), t) / t;
    let mut out = Vec::with_capacity(schedule.len());
    for (k, &t) in schedule.iter().enumerate() {
        let u = if real {
            alphas.values().iter().map(|&al| q(al, t)).fold(f64::NEG_INFINITY, f64::max)
        } else {
            let mut dirs: Vec<(f64, f64)> = alphas
                .values()
                .iter()
                .map(|al| (al.arg().rem_euclid(2.0 * std::f64::consts::PI), q(*al, t)))
                .collect();
            dirs.sort_by(|x, y| x.0.total_cmp(&y.0));
            if k + 1 == schedule.len() {
                refine_polygon(
                    &mut dirs,
                    |phi| q(C64::from_polar(1.0, phi), t),
                    |ds| {
                        let top = ds.iter().fold(f64::NEG_INFINITY, |m, d| m.max(d.1));
                        top + 1e-10 * (1.0 + top.abs())
                    },
                    alphas.values().len() * 64,
                )
            } else {
                polygon_max_modulus(&dirs).0
            }
        };
        out.push(u.max(0.0));
    }
    Ok(out)
}
