//! Small dense helpers shared by the operator code.

use crate::spaces::{Matrix, Vector, C64};

/// Maximises a function on `[a, b]` by golden-section search.
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
        if (hi - lo).abs() < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    for (x, fx) in [(a, f(a)), (b, f(b))] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// `|a + d| - |a|` without cancellation.
pub fn abs_increment(a: C64, d: C64) -> f64 {
    let s = (a + d).norm() + a.norm();
    if s == 0.0 {
        0.0
    } else {
        (2.0 * (a.conj() * d).re + d.norm_sqr()) / s
    }
}

pub fn is_zero(m: &Matrix) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// Smallest and largest eigenpairs of a Hermitian matrix.
pub fn hermitian_extremes(h: &Matrix) -> ((f64, Vector), (f64, Vector)) {
    let n = h.nrows();
    match n {
        1 => {
            let v = Vector::from_element(1, C64::new(1.0, 0.0));
            ((h[(0, 0)].re, v.clone()), (h[(0, 0)].re, v))
        }
        2 => {
            let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
            let m = 0.5 * (a + d);
            let r = (0.5 * (a - d)).hypot(b.norm());
            let vec_for = |l: f64| {
                let u = Vector::from_vec(vec![b, C64::new(l - a, 0.0)]);
                let w = Vector::from_vec(vec![C64::new(l - d, 0.0), b.conj()]);
                let v = if u.norm() >= w.norm() { u } else { w };
                let nv = v.norm();
                if nv == 0.0 {
                    Vector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
                } else {
                    v.unscale(nv)
                }
            };
            ((m - r, vec_for(m - r)), (m + r, vec_for(m + r)))
        }
        _ => {
            let eig = h.clone().symmetric_eigen();
            let (mut lo, mut hi) = (0, 0);
            for i in 0..n {
                if eig.eigenvalues[i] < eig.eigenvalues[lo] {
                    lo = i;
                }
                if eig.eigenvalues[i] > eig.eigenvalues[hi] {
                    hi = i;
                }
            }
            (
                (eig.eigenvalues[lo], eig.eigenvectors.column(lo).into_owned()),
                (eig.eigenvalues[hi], eig.eigenvectors.column(hi).into_owned()),
            )
        }
    }
}

pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest singular value with a unit right singular vector.
pub fn spectral_norm(m: &Matrix) -> (f64, Vector) {
    let g = m.adjoint() * m;
    let g = hermitian_part(&g);
    let (_, (l, v)) = hermitian_extremes(&g);
    let s = (m * &v).norm();
    (s.max(l.max(0.0).sqrt()), v)
}
