//! Linear operators on a finite-dimensional normed space: operator norms,
//! numerical radii and Daugavet-type gaps.

mod limit;
mod opnorm;
mod radius;

pub use limit::default_schedule;
pub use opnorm::{op_norm_between, NormBracket};

pub(crate) use limit::excess;
pub(crate) use opnorm::op_norm_upper;
pub(crate) use radius::screen_upper;

use crate::error::{check_dim, Error, Result};
use crate::linalg::golden_max;
use crate::spaces::{pair, real_matrix, Field, Matrix, NormedSpace, Vector, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    space: NormedSpace,
    matrix: Matrix,
}

/// Unimodular scalars at which `||I + t a T||` is probed.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaGrid(Vec<C64>);

impl AlphaGrid {
    pub fn real() -> Self {
        Self(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
    }

    /// The `m`-th roots of unity.
    pub fn roots_of_unity(m: usize) -> Self {
        Self((0..m.max(3)).map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m.max(3) as f64)).collect())
    }

    pub fn for_field(field: Field) -> Self {
        match field {
            Field::Real => Self::real(),
            Field::Complex => Self::roots_of_unity(64),
        }
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }
}

/// A pair `(x, y)` with a functional `f in D(x - y)`; for linear maps `y = 0`.
/// The certified value is `|f(Tx - Ty)| / ||x - y||^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "crate::io::cvec")]
    pub x: Vector,
    #[serde(with = "crate::io::cvec")]
    pub y: Vector,
    #[serde(with = "crate::io::cvec")]
    pub f: Vector,
}

impl Witness {
    pub fn linear(x: Vector, f: Vector) -> Self {
        let y = Vector::zeros(x.len());
        Self { x, y, f }
    }

    /// Recomputes the certified value from the images `tx`, `ty`.
    pub fn value_from_images(&self, space: &NormedSpace, tx: &Vector, ty: &Vector) -> f64 {
        let d = &self.x - &self.y;
        let n = space.norm_of(d.as_slice());
        if n == 0.0 {
            return 0.0;
        }
        pair(self.f.as_slice(), (tx - ty).as_slice()).norm() / (n * n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpperMethod {
    ClosedForm,
    LimitFormula { t_min: f64, alpha_count: usize },
    CellSup,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusBracket {
    pub lower: f64,
    pub lower_witness: Witness,
    pub upper: f64,
    pub upper_method: UpperMethod,
    pub tol: f64,
    pub converged: bool,
}

impl RadiusBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangePoint {
    pub value: [f64; 2],
    #[serde(with = "crate::io::cvec")]
    pub x: Vector,
    #[serde(with = "crate::io::cvec")]
    pub f: Vector,
}

impl LinearOperator {
    pub fn new(space: NormedSpace, matrix: Matrix) -> Result<Self> {
        check_dim(space.dim(), matrix.nrows())?;
        check_dim(space.dim(), matrix.ncols())?;
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("matrix has non-finite entries".into()));
        }
        if space.field().is_real() && matrix.iter().any(|z| z.im != 0.0) {
            return Err(Error::Input("complex entries in an operator on a real space".into()));
        }
        Ok(Self { space, matrix })
    }

    pub fn from_real(space: NormedSpace, matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(space, real_matrix(matrix))
    }

    pub fn identity(space: NormedSpace) -> Self {
        let n = space.dim();
        Self { space, matrix: Matrix::identity(n, n) }
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.space.dim(), x.len())?;
        Ok(&self.matrix * x)
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        Self { space: self.space.clone(), matrix: &self.matrix * alpha }
    }

    pub fn op_norm_bracket(&self) -> NormBracket {
        op_norm_between(&self.space, &self.space, &self.matrix)
    }

    /// The operator norm (the upper end of its bracket; exact on the closed-form paths).
    pub fn op_norm(&self) -> f64 {
        self.op_norm_bracket().upper
    }

    pub fn numerical_radius(&self, tol: f64) -> RadiusBracket {
        radius::numerical_radius(self, tol)
    }

    /// Sampled lower bound with its witness.
    pub fn radius_lower(&self, budget: usize, seed: u64) -> (f64, Witness) {
        radius::radius_lower(self, budget, seed, Vec::new())
    }

    /// The bound sequence `max_alpha (||I + t_k alpha T|| - 1) / t_k`; for complex
    /// spaces each term is the farthest vertex of the polygon cut out by the
    /// alpha-directions, which is a valid bound at every step.
    pub fn radius_upper_limit(&self, schedule: &[f64], alphas: &AlphaGrid) -> Result<Vec<f64>> {
        limit::limit_sequence(self, schedule, alphas)
    }

    pub fn numerical_range_points(&self, count: usize, seed: u64) -> Vec<RangePoint> {
        self.space
            .sample_sphere(count, seed)
            .into_iter()
            .map(|x| {
                let d = self.space.duality_set(&x).expect("unit vectors are non-zero");
                let tx = &self.matrix * &x;
                let (_, f) = d.argmax_of(tx.as_slice());
                let v = pair(f.as_slice(), tx.as_slice());
                RangePoint { value: [v.re, v.im], x, f }
            })
            .collect()
    }

    /// `(1 + ||T||) - max_alpha ||I + alpha T||`, which vanishes exactly when
    /// `||T||` lies on the numerical radius.
    pub fn daugavet_gap(&self, alphas: &AlphaGrid) -> f64 {
        let norm = self.op_norm();
        let e = |al: C64| excess(&self.space, &(&self.matrix * al), 1.0);
        let best = if self.space.field().is_real() {
            alphas.values().iter().map(|&a| e(a)).fold(f64::NEG_INFINITY, f64::max)
        } else {
            let mut grid: Vec<(f64, f64)> = alphas.values().iter().map(|a| (e(*a), a.arg())).collect();
            grid.sort_by(|a, b| b.0.total_cmp(&a.0));
            let step = 2.0 * std::f64::consts::PI / alphas.values().len() as f64;
            let mut best = grid[0].0;
            for &(_, t0) in grid.iter().take(3) {
                let (_, v) = golden_max(|t| e(C64::from_polar(1.0, t)), t0 - step, t0 + step, 100);
                best = best.max(v);
            }
            best
        };
        (norm - best).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SumKind;

    fn op(space: NormedSpace, v: &[f64]) -> LinearOperator {
        let n = space.dim();
        LinearOperator::from_real(space, &DMatrix::from_row_slice(n, n, v)).unwrap()
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            LinearOperator::new(NormedSpace::l2(2), Matrix::zeros(2, 3)),
            Err(Error::Dimension { .. })
        ));
        let c = Matrix::from_element(2, 2, C64::new(0.0, 1.0));
        assert!(matches!(LinearOperator::new(NormedSpace::l2(2), c), Err(Error::Input(_))));
    }

    #[test]
    fn daugavet_gap_vanishes_for_the_identity_and_not_for_rotations() {
        let id = LinearOperator::identity(NormedSpace::l2(2));
        assert!(id.daugavet_gap(&AlphaGrid::real()) < 1e-12);
        let rot = op(NormedSpace::l2(2), &[0.0, -1.0, 1.0, 0.0]);
        // ||I + R|| = sqrt 2.
        assert!((rot.daugavet_gap(&AlphaGrid::real()) - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn daugavet_gap_is_controlled_by_the_radius() {
        let spaces = [
            NormedSpace::l2(2),
            NormedSpace::l1(3),
            NormedSpace::linf(3),
            NormedSpace::random_hexagon(12),
            NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::Linf).unwrap(),
        ];
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for s in spaces {
            for _ in 0..10 {
                let m = Matrix::from_fn(s.dim(), s.dim(), |_, _| s.random_vector(&mut rng)[0]);
                let t = LinearOperator::new(s.clone(), m).unwrap();
                let gap = t.daugavet_gap(&AlphaGrid::real());
                let nr = t.numerical_radius(1e-9);
                let norm = t.op_norm_bracket();
                // (1 + ||T||) - ||I + aT|| <= ||T|| - omega(T) for the best sign.
                assert!(gap <= norm.upper - nr.lower + 1e-9, "{s}: gap {gap}, norm {}, radius {}", norm.upper, nr.lower);
            }
        }
    }

    #[test]
    fn range_points_are_real_on_real_spaces() {
        let t = op(NormedSpace::l1(2), &[1.0, 2.0, -1.0, 0.5]);
        for p in t.numerical_range_points(20, 4) {
            assert_eq!(p.value[1], 0.0);
            assert!(p.value[0].abs() <= t.op_norm() + 1e-12);
        }
    }
}
