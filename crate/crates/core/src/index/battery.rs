//! Fixed operators: a per-space structured family seeding every search, and
//! a named battery spanning space kinds.

use super::Operator;
use crate::constructions::diagonal_lift;
use crate::linop::LinearOperator;
use crate::lipop::{random_pwl, Cell, PwlOperator};
use crate::spaces::{Matrix, NormKind, NormedSpace, SumKind, C64};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Coordinate pairs get a rotation each up to this dimension.
const MAX_ROTATION_DIM: usize = 6;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rotation(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(j, i)] = re(1.0);
    m[(i, j)] = re(-1.0);
    m
}

fn padded(m: &Matrix, offset: usize, n: usize) -> Matrix {
    let mut out = Matrix::zeros(n, n);
    out.view_mut((offset, offset), (m.nrows(), m.ncols())).copy_from(m);
    out
}

/// Identity, shifts, rotations, rank-one and sign matrices on `space`; on a
/// sum, also every structured matrix of each summand padded by zero blocks.
pub fn structured_matrices(space: &NormedSpace) -> Vec<(String, Matrix)> {
    let n = space.dim();
    let mut out = vec![("identity".to_string(), Matrix::identity(n, n))];
    if n >= 2 {
        out.push(("shift".into(), Matrix::from_fn(n, n, |i, j| re(if j == i + 1 { 1.0 } else { 0.0 }))));
        out.push(("cyclic".into(), Matrix::from_fn(n, n, |i, j| re(if j == (i + 1) % n { 1.0 } else { 0.0 }))));
        if n <= MAX_ROTATION_DIM {
            for i in 0..n {
                for j in i + 1..n {
                    out.push((format!("rotation_{i}{j}"), rotation(n, i, j)));
                }
            }
        }
        out.push(("rank_one_row".into(), Matrix::from_fn(n, n, |i, _| re(if i == 0 { 1.0 } else { 0.0 }))));
        out.push(("rank_one_col".into(), Matrix::from_fn(n, n, |_, j| re(if j == 0 { 1.0 } else { 0.0 }))));
        out.push((
            "sign_sylvester".into(),
            Matrix::from_fn(n, n, |i, j| re(if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 })),
        ));
        out.push((
            "sign_skew".into(),
            Matrix::from_fn(n, n, |i, j| re(if i == j { 1.0 } else if i < j { -1.0 } else { 1.0 })),
        ));
        if n == 2 {
            for k in (1..12).filter(|&k| k != 6) {
                let t = k as f64 * PI / 12.0;
                let m = Matrix::from_row_slice(2, 2, &[re(t.cos()), re(-t.sin()), re(t.sin()), re(t.cos())]);
                out.push((format!("rotation_{k}pi12"), m));
            }
        }
    }
    if let Some(s) = space.as_sum() {
        let k = s.left.dim();
        for (name, m) in structured_matrices(&s.left) {
            out.push((format!("left_{name}"), padded(&m, 0, n)));
        }
        for (name, m) in structured_matrices(&s.right) {
            out.push((format!("right_{name}"), padded(&m, k, n)));
        }
    }
    out
}

/// The numerical index where it is classical: 1 on lines and on `l_1`,
/// `l_inf`; 0 (real) and 1/2 (complex) on Hilbert spaces of dimension at
/// least 2; the minimum over summands on `l_1` and `l_inf` sums.
pub fn known_index(space: &NormedSpace) -> Option<f64> {
    if space.dim() == 1 {
        return Some(1.0);
    }
    match space.kind() {
        NormKind::PNorm(p) if *p == 1.0 || p.is_infinite() => Some(1.0),
        NormKind::PNorm(p) if *p == 2.0 => Some(if space.field().is_real() { 0.0 } else { 0.5 }),
        NormKind::Sum(s) => Some(known_index(&s.left)?.min(known_index(&s.right)?)),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct BatteryEntry {
    pub name: String,
    pub operator: Operator,
}

fn linear(name: &str, space: NormedSpace, rows: &[&[f64]]) -> BatteryEntry {
    let n = space.dim();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    BatteryEntry {
        name: format!("{name} on {space}"),
        operator: Operator::Linear(LinearOperator::from_real(space, &m).expect("battery matrices fit")),
    }
}

fn pwl(name: &str, op: PwlOperator) -> BatteryEntry {
    BatteryEntry { name: format!("{name} on {}", op.space()), operator: Operator::Pwl(op) }
}

/// Two cells split by the hyperplane `{x_k = 0}`.
fn split_on(space: NormedSpace, k: usize, below: DMatrix<f64>, above: DMatrix<f64>) -> PwlOperator {
    let n = space.dim();
    let row = DMatrix::from_fn(1, n, |_, j| if j == k { 1.0 } else { 0.0 });
    let cells = vec![
        Cell { c: row.clone(), d: DVector::zeros(1), a: below, b: DVector::zeros(n) },
        Cell { c: -row, d: DVector::zeros(1), a: above, b: DVector::zeros(n) },
    ];
    PwlOperator::new(space, cells, 2.0).expect("battery cells are valid")
}

fn regular_hexagon() -> NormedSpace {
    let h = 3f64.sqrt() / 2.0;
    NormedSpace::symmetric_polygon(&[[1.0, 0.0], [0.5, h], [-0.5, h]]).expect("regular hexagon")
}

/// Named operators across space kinds: shifts, rotations, rank-one and sign
/// matrices, block lifts on sums, and a few CPWL maps.
pub fn curated_battery() -> Vec<BatteryEntry> {
    let l2 = NormedSpace::l2;
    let reals = NormedSpace::reals;
    let sum = |a: NormedSpace, b: NormedSpace, k: SumKind| NormedSpace::sum(a, b, k).expect("same field");
    let h = 3f64.sqrt() / 2.0;
    let mut out = vec![
        linear("rotation", l2(2), &[&[0.0, -1.0], &[1.0, 0.0]]),
        linear("shift", l2(2), &[&[0.0, 1.0], &[0.0, 0.0]]),
        linear("shift", NormedSpace::complex_l2(2), &[&[0.0, 1.0], &[0.0, 0.0]]),
        linear("shift", NormedSpace::complex_l2(3), &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]),
        linear("identity", l2(3), &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
        linear("rank_one", l2(2), &[&[1.0, 1.0], &[0.0, 0.0]]),
        linear("shift", NormedSpace::l1(3), &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]),
        linear("shift", NormedSpace::linf(3), &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]),
        linear("sign", NormedSpace::l1(2), &[&[1.0, 1.0], &[1.0, -1.0]]),
        linear("sign", NormedSpace::linf(2), &[&[1.0, -1.0], &[1.0, 1.0]]),
        linear("rank_one", NormedSpace::linf(3), &[&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]),
        linear("rotation", NormedSpace::complex_l1(2), &[&[0.0, -1.0], &[1.0, 0.0]]),
        linear("shift", NormedSpace::complex_linf(2), &[&[0.0, 1.0], &[0.0, 0.0]]),
        linear("rotation60", regular_hexagon(), &[&[0.5, -h], &[h, 0.5]]),
        linear("shift", regular_hexagon(), &[&[0.0, 1.0], &[0.0, 0.0]]),
        linear(
            "block_shift",
            sum(NormedSpace::complex_l2(2), NormedSpace::complex_l1(1), SumKind::Linf),
            &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]],
        ),
        linear(
            "block_rotation",
            sum(l2(2), reals(), SumKind::Linf),
            &[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]],
        ),
        linear(
            "block_rotation",
            sum(l2(2), reals(), SumKind::L1),
            &[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]],
        ),
        linear(
            "identity",
            sum(l2(2), reals(), SumKind::Linf),
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
        ),
        linear(
            "block_shift",
            sum(reals(), reals(), SumKind::L1),
            &[&[0.0, 1.0], &[0.0, 0.0]],
        ),
    ];
    let one = |v: f64| DMatrix::from_element(1, 1, v);
    let abs = split_on(reals(), 0, one(-1.0), one(1.0));
    out.push(pwl("abs", abs.clone()));
    out.push(pwl(
        "abs_first",
        split_on(NormedSpace::linf(2), 0, DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]), DMatrix::identity(2, 2)),
    ));
    out.push(pwl(
        "folded_rotation",
        split_on(l2(2), 1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])),
    ));
    out.push(pwl("random", random_pwl(&NormedSpace::l1(2), 2, 3).expect("seeded generation")));
    out.push(pwl("lifted_abs", diagonal_lift(&abs, 2, 16).expect("four cells")));
    out
}
