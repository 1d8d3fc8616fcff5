//! Thin wrappers over `microlp` for the small linear programs used by the
//! cell-complex code.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;

/// Half-space `a . x <= b`.
pub(crate) type HalfSpace = (DVector<f64>, f64);

fn project_out(a: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut v = a.clone();
    for q in basis {
        let c = v.dot(q);
        v -= q * c;
    }
    v
}

fn orthonormalise(vs: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let w = project_out(v, &out);
        let n = w.norm();
        if n > 1e-12 * (1.0 + v.norm()) {
            out.push(w / n);
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of `normals` in R^n.
pub(crate) fn complement_basis(normals: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    let row = orthonormalise(normals);
    let mut all = row.clone();
    let mut out = Vec::new();
    for k in 0..n {
        let e = DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
        let w = project_out(&e, &all);
        let nw = w.norm();
        if nw > 1e-9 {
            let q = w / nw;
            all.push(q.clone());
            out.push(q);
        }
    }
    out
}

/// Centre and radius of the largest ball inside `{a.x <= b} cap {e.x = c} cap [-R, R]^n`,
/// measured within the affine subspace cut out by the equalities.
/// Returns `None` when the region is empty.
pub(crate) fn chebyshev_center(
    ineq: &[HalfSpace],
    eq: &[HalfSpace],
    n: usize,
    box_radius: f64,
) -> Option<(DVector<f64>, f64)> {
    let normals: Vec<DVector<f64>> = eq.iter().map(|(a, _)| a.clone()).collect();
    let basis = orthonormalise(&normals);
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let x: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (-box_radius, box_radius))).collect();
    let r = lp.add_var(1.0, (0.0, box_radius));
    let mut add = |a: &DVector<f64>, b: f64| {
        let pn = project_out(a, &basis).norm();
        let mut terms: Vec<_> = (0..n).filter(|&j| a[j] != 0.0).map(|j| (x[j], a[j])).collect();
        terms.push((r, pn));
        lp.add_constraint(&terms[..], ComparisonOp::Le, b);
    };
    for (a, b) in ineq {
        add(a, *b);
    }
    for j in 0..n {
        let e = DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
        add(&e, box_radius);
        add(&(-e), box_radius);
    }
    for (a, c) in eq {
        let terms: Vec<_> = (0..n).filter(|&j| a[j] != 0.0).map(|j| (x[j], a[j])).collect();
        lp.add_constraint(&terms[..], ComparisonOp::Eq, *c);
    }
    let sol = lp.solve().ok()?.into_solution().ok()?;
    let center = DVector::from_fn(n, |j, _| sol[x[j]]);
    Some((center, sol[r]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_center() {
        // {x <= 1, -x <= 1, y <= 3, -y <= -1}: centre (0, 2), radius 1.
        let h = |a: [f64; 2], b: f64| (DVector::from_row_slice(&a), b);
        let rows = [h([1.0, 0.0], 1.0), h([-1.0, 0.0], 1.0), h([0.0, 1.0], 3.0), h([0.0, -1.0], -1.0)];
        let (c, r) = chebyshev_center(&rows, &[], 2, 10.0).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!((c[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn empty_region() {
        let h = |a: [f64; 1], b: f64| (DVector::from_row_slice(&a), b);
        assert!(chebyshev_center(&[h([1.0], -1.0), h([-1.0], -1.0)], &[], 1, 10.0).is_none());
    }

    #[test]
    fn ball_within_a_line() {
        // Segment {y = 0, -2 <= x <= 1} in the plane: radius 1.5 measured along the line.
        let h = |a: [f64; 2], b: f64| (DVector::from_row_slice(&a), b);
        let (c, r) = chebyshev_center(&[h([1.0, 0.0], 1.0), h([-1.0, 0.0], 2.0)], &[h([0.0, 1.0], 0.0)], 2, 10.0).unwrap();
        assert!((r - 1.5).abs() < 1e-9);
        assert!((c[0] + 0.5).abs() < 1e-9 && c[1].abs() < 1e-9);
    }

    #[test]
    fn complement_of_a_normal() {
        let b = complement_basis(&[DVector::from_row_slice(&[1.0, 1.0, 0.0])], 3);
        assert_eq!(b.len(), 2);
        for q in &b {
            assert!((q[0] + q[1]).abs() < 1e-12);
        }
    }
}
