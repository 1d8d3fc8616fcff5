//! Continuous piecewise-linear operators fixing the origin.
//!
//! An operator is a list of polyhedral cells `{x : Cx <= d}`, each carrying an
//! affine map `x -> Ax + b`. Cells are unbounded polyhedra covering the whole
//! space; `box_radius` only bounds the region where validation samples points
//! and where interior points are chosen.

mod generate;
mod json;

pub use generate::{random_pwl, random_pwl_with_limit, DEFAULT_MAX_CELLS};

use crate::error::{check_dim, Error, Result};
use crate::linop::{
    default_schedule, excess, op_norm_between, AlphaGrid, LinearOperator, NormBracket, RadiusBracket, UpperMethod,
    Witness,
};
use crate::lp::{chebyshev_center, complement_basis, HalfSpace};
use crate::maps::{two_point_lower, witness_value, LipschitzMap, Piece};
use crate::spaces::{real_matrix, real_vector, NormedSpace, Vector, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Slack used when deciding whether a point lies in a cell.
const MEMBER_TOL: f64 = 1e-9;
/// Continuity residual accepted on shared facets.
const CONTINUITY_TOL: f64 = 1e-9;
/// `|T(0)|` accepted by validation.
const ORIGIN_TOL: f64 = 1e-12;
/// Cells thinner than this (relative to the box) count as empty.
const EMPTY_TOL: f64 = 1e-9;
const TWO_POINT_BUDGET: usize = 256;
const FAR_FACTOR: f64 = 1e3;

/// One affine piece on the polyhedron `{x : Cx <= d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub c: DMatrix<f64>,
    pub d: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl Cell {
    /// The whole space with a linear map.
    pub fn whole(a: DMatrix<f64>) -> Self {
        let n = a.ncols();
        Self { c: DMatrix::zeros(0, n), d: DVector::zeros(0), b: DVector::zeros(a.nrows()), a }
    }

    fn half_spaces(&self) -> Vec<HalfSpace> {
        (0..self.c.nrows())
            .map(|i| (self.c.row(i).transpose(), self.d[i]))
            .collect()
    }

    /// Largest scaled constraint violation at `x` (non-positive inside).
    fn violation(&self, x: &DVector<f64>) -> f64 {
        (0..self.c.nrows())
            .map(|i| {
                let row = self.c.row(i);
                let scale = 1.0 + self.d[i].abs() + row.abs().dot(&x.abs().transpose());
                (row.dot(&x.transpose()) - self.d[i]) / scale
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.c.nrows() == 0 || self.violation(x) <= tol
    }

    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b
    }
}

/// Interior point and inradius of a cell, inside the domain box when the cell meets it.
#[derive(Clone, Debug, PartialEq)]
struct Geometry {
    center: DVector<f64>,
    inradius: f64,
}

#[derive(Clone, Debug)]
pub struct PwlOperator {
    space: NormedSpace,
    cells: Vec<Cell>,
    box_radius: f64,
    geometry: Vec<Option<Geometry>>,
}

impl PartialEq for PwlOperator {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.cells == other.cells && self.box_radius == other.box_radius
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    EmptyCell,
    Uncovered,
    Overlap,
    Discontinuity,
    NonzeroAtOrigin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub cells: Vec<usize>,
    pub point: Vec<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub points_checked: usize,
    pub facets_checked: usize,
    pub failures: Vec<Failure>,
}

/// The Gateaux derivative at a point, when it exists.
#[derive(Clone, Debug, PartialEq)]
pub enum Derivative {
    Linear(LinearOperator),
    NonSmooth,
}

fn unit_row(v: &DVector<f64>, d: f64) -> Option<(DVector<f64>, f64)> {
    let n = v.norm();
    (n > 0.0).then(|| (v / n, d / n))
}

impl PwlOperator {
    pub fn new(space: NormedSpace, cells: Vec<Cell>, box_radius: f64) -> Result<Self> {
        if !space.field().is_real() {
            return Err(Error::UnsupportedKind("piecewise-linear operators live on real spaces".into()));
        }
        if cells.is_empty() {
            return Err(Error::Input("an operator needs at least one cell".into()));
        }
        if !(box_radius > 0.0 && box_radius.is_finite()) {
            return Err(Error::Input("box radius must be positive and finite".into()));
        }
        let n = space.dim();
        for cell in &cells {
            check_dim(n, cell.c.ncols())?;
            check_dim(cell.c.nrows(), cell.d.len())?;
            check_dim(n, cell.a.nrows())?;
            check_dim(n, cell.a.ncols())?;
            check_dim(n, cell.b.len())?;
            let finite = cell.c.iter().chain(cell.d.iter()).chain(cell.a.iter()).chain(cell.b.iter()).all(|r| r.is_finite());
            if !finite {
                return Err(Error::Input("non-finite entry in a cell".into()));
            }
        }
        let geometry = cells
            .par_iter()
            .map(|cell| {
                // Cells missing the box are looked for further out before being declared empty.
                [box_radius, FAR_FACTOR * box_radius].into_iter().find_map(|radius| {
                    chebyshev_center(&cell.half_spaces(), &[], n, radius)
                        .filter(|(_, r)| *r > EMPTY_TOL * (1.0 + box_radius))
                        .map(|(center, inradius)| Geometry { center, inradius })
                })
            })
            .collect();
        Ok(Self { space, cells, box_radius, geometry })
    }

    pub fn from_linear(op: &LinearOperator) -> Result<Self> {
        if !op.space().field().is_real() {
            return Err(Error::UnsupportedKind("piecewise-linear operators live on real spaces".into()));
        }
        let a = op.matrix().map(|z| z.re);
        Self::new(op.space().clone(), vec![Cell::whole(a)], 1.0)
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    /// Indices of the cells with non-empty interior.
    pub fn live_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells.len()).filter(|&i| self.geometry[i].is_some())
    }

    fn real_point(&self, x: &Vector) -> Result<DVector<f64>> {
        check_dim(self.space.dim(), x.len())?;
        if x.iter().any(|z| z.im != 0.0 || !z.re.is_finite()) {
            return Err(Error::Domain("points of a real space have finite real coordinates".into()));
        }
        Ok(x.map(|z| z.re))
    }

    /// Cells containing `x` up to the membership tolerance.
    pub fn containing_cells(&self, x: &Vector) -> Result<Vec<usize>> {
        let p = self.real_point(x)?;
        Ok(self.live_cells().filter(|&i| self.cells[i].contains(&p, MEMBER_TOL)).collect())
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        let p = self.real_point(x)?;
        if p.iter().all(|r| *r == 0.0) {
            return Ok(self.space.zero());
        }
        let i = self
            .live_cells()
            .find(|&i| self.cells[i].contains(&p, MEMBER_TOL))
            .ok_or_else(|| Error::Domain("point lies outside every cell".into()))?;
        Ok(real_vector(self.cells[i].value(&p).as_slice()))
    }

    pub fn gateaux_derivative(&self, x: &Vector) -> Result<Derivative> {
        let cells = self.containing_cells(x)?;
        let Some(&first) = cells.first() else {
            return Err(Error::Domain("point lies outside every cell".into()));
        };
        let a = &self.cells[first].a;
        let scale = 1.0 + a.amax();
        let smooth = cells.iter().all(|&j| (&self.cells[j].a - a).amax() <= 1e-12 * scale);
        Ok(if smooth {
            Derivative::Linear(LinearOperator::from_real(self.space.clone(), a).expect("square cell map"))
        } else {
            Derivative::NonSmooth
        })
    }

    fn cell_operator(&self, i: usize) -> LinearOperator {
        LinearOperator::from_real(self.space.clone(), &self.cells[i].a).expect("square cell map")
    }

    /// `max` over cells of the operator norm of the cell map, as a bracket.
    pub fn lip_norm_bracket(&self) -> NormBracket {
        let brackets: Vec<NormBracket> = self
            .live_cells()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&i| op_norm_between(&self.space, &self.space, &real_matrix(&self.cells[i].a)))
            .collect();
        let mut best = brackets[0].clone();
        for b in &brackets[1..] {
            if b.lower > best.lower {
                best.lower = b.lower;
                best.witness = b.witness.clone();
            }
            best.upper = best.upper.max(b.upper);
        }
        best
    }

    /// The Lipschitz norm: the largest operator norm of a cell map.
    pub fn lip_norm(&self) -> f64 {
        self.lip_norm_bracket().upper
    }

    /// Largest difference quotient over sampled pairs at distance at most `r`.
    pub fn lip_norm_sampled(&self, r: f64, budget: usize, seed: u64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Input("the pair radius must be positive".into()));
        }
        Ok(crate::maps::lip_lower(self, r, budget, seed).value)
    }

    /// Lower bound from two-point numerical-range values.
    pub fn two_point_radius_lower(&self, budget: usize, seed: u64) -> (f64, Witness) {
        two_point_lower(self, budget, seed)
    }

    /// Radius bracket: the upper end is the largest cell radius, the lower end
    /// the best two-point value, including the cell witnesses moved to a pair
    /// of points inside the cell.
    pub fn lip_radius(&self, tol: f64) -> RadiusBracket {
        let live: Vec<usize> = self.live_cells().collect();
        let per_cell: Vec<(usize, RadiusBracket)> = live
            .par_iter()
            .map(|&i| (i, self.cell_operator(i).numerical_radius(tol)))
            .collect();
        let upper = per_cell.iter().map(|(_, b)| b.upper).fold(0.0, f64::max);
        let mut best = self.two_point_radius_lower(TWO_POINT_BUDGET, 0x2b0b);
        for (i, b) in &per_cell {
            let g = self.geometry[*i].as_ref().expect("live cell");
            let u = &b.lower_witness.x;
            let h = 0.5 * g.inradius / u.norm();
            let y = real_vector(g.center.as_slice());
            let x = &y + u * C64::new(h, 0.0);
            let w = Witness { x, y, f: &b.lower_witness.f * C64::new(h, 0.0) };
            let v = witness_value(self, &w).unwrap_or(0.0);
            if v > best.0 {
                best = (v, w);
            }
        }
        let (lower, lower_witness) = best;
        let upper = upper.max(lower);
        RadiusBracket {
            lower,
            lower_witness,
            upper,
            upper_method: UpperMethod::CellSup,
            tol,
            converged: upper - lower <= tol,
        }
    }

    /// The limit-formula sequence for `(||I + t alpha T||_L - 1) / t`; every
    /// `I + t alpha T` has the same cells, so each term is a maximum over cells.
    pub fn lip_radius_limit(&self, schedule: &[f64], alphas: &AlphaGrid) -> Result<Vec<f64>> {
        let seqs: Vec<Result<Vec<f64>>> = self
            .live_cells()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&i| self.cell_operator(i).radius_upper_limit(schedule, alphas))
            .collect();
        let mut out = vec![0.0f64; schedule.len()];
        for s in seqs {
            for (o, v) in out.iter_mut().zip(s?) {
                *o = (*o).max(v);
            }
        }
        Ok(out)
    }

    /// Default-schedule limit bound.
    pub fn lip_radius_limit_default(&self) -> f64 {
        *self
            .lip_radius_limit(&default_schedule(), &AlphaGrid::real())
            .expect("default schedule is valid")
            .last()
            .unwrap()
    }

    /// `(1 + ||T||_L) - max_alpha ||I + alpha T||_L`.
    pub fn daugavet_gap(&self, alphas: &AlphaGrid) -> f64 {
        let norm = self.lip_norm();
        let best = self
            .live_cells()
            .flat_map(|i| {
                let a = real_matrix(&self.cells[i].a);
                alphas
                    .values()
                    .iter()
                    .map(|&al| excess(&self.space, &(&a * al), 1.0))
                    .collect::<Vec<_>>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        (norm - best).max(0.0)
    }

    /// Runs the structural checks and lists every failure with a witness point.
    pub fn validate(&self) -> ValidationReport {
        let n = self.space.dim();
        let mut failures = Vec::new();
        for (i, g) in self.geometry.iter().enumerate() {
            if g.is_none() {
                failures.push(Failure {
                    kind: FailureKind::EmptyCell,
                    cells: vec![i],
                    point: vec![],
                    detail: "the cell has no interior point".into(),
                });
            }
        }

        let points = self.sample_points();
        let live: Vec<usize> = self.live_cells().collect();
        let per_point: Vec<(Vec<usize>, Vec<usize>)> = points
            .par_iter()
            .map(|p| {
                let near: Vec<usize> = live.iter().copied().filter(|&i| self.cells[i].contains(p, MEMBER_TOL)).collect();
                let strict: Vec<usize> = near
                    .iter()
                    .copied()
                    .filter(|&i| self.cells[i].c.nrows() == 0 || self.cells[i].violation(p) < -MEMBER_TOL)
                    .collect();
                (near, strict)
            })
            .collect();
        let mut seen_overlap = std::collections::BTreeSet::new();
        let mut uncovered = 0;
        for (p, (near, strict)) in points.iter().zip(&per_point) {
            if near.is_empty() && uncovered < 8 {
                uncovered += 1;
                failures.push(Failure {
                    kind: FailureKind::Uncovered,
                    cells: vec![],
                    point: p.iter().copied().collect(),
                    detail: "point of the domain box lies in no cell".into(),
                });
            }
            if strict.len() > 1 && seen_overlap.insert(strict.clone()) {
                failures.push(Failure {
                    kind: FailureKind::Overlap,
                    cells: strict.clone(),
                    point: p.iter().copied().collect(),
                    detail: "point interior to several cells".into(),
                });
            }
        }

        let (facets_checked, discontinuities) = self.check_continuity(&live);
        failures.extend(discontinuities);

        let origin = DVector::zeros(n);
        for &i in &live {
            let cell = &self.cells[i];
            if cell.contains(&origin, MEMBER_TOL) {
                let scale = 1.0 + cell.b.amax().max(cell.a.amax());
                if cell.b.amax() > ORIGIN_TOL * scale {
                    failures.push(Failure {
                        kind: FailureKind::NonzeroAtOrigin,
                        cells: vec![i],
                        point: vec![0.0; n],
                        detail: format!("offset of size {:e} on a cell containing 0", cell.b.amax()),
                    });
                }
            }
        }
        ValidationReport { passed: failures.is_empty(), points_checked: points.len(), facets_checked, failures }
    }

    /// A grid over the domain box (shifted off the coordinate hyperplanes) plus
    /// seeded random points.
    fn sample_points(&self) -> Vec<DVector<f64>> {
        let n = self.space.dim();
        let r = self.box_radius;
        let per_axis = ((4096f64).powf(1.0 / n as f64).floor() as usize).clamp(3, 64);
        let total = per_axis.pow(n as u32);
        let mut out = Vec::with_capacity(total + 512);
        for k in 0..total {
            let mut idx = k;
            let p = DVector::from_fn(n, |_, _| {
                let j = idx % per_axis;
                idx /= per_axis;
                // An irrational shift keeps grid points off most facets.
                -r + (2.0 * r) * (j as f64 + 0.5 + 0.1 * std::f64::consts::FRAC_1_SQRT_2) / per_axis as f64
            });
            out.push(p);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x9a1d);
        for _ in 0..512 {
            out.push(DVector::from_fn(n, |_, _| rng.random_range(-r..r)));
        }
        out
    }

    /// Facets shared by two cells, found by matching opposite constraint rows,
    /// and the residual of the two affine maps on an affine basis of the facet.
    fn check_continuity(&self, live: &[usize]) -> (usize, Vec<Failure>) {
        let n = self.space.dim();
        let mut jobs = Vec::new();
        for (ai, &i) in live.iter().enumerate() {
            for &j in &live[ai + 1..] {
                for ri in 0..self.cells[i].c.nrows() {
                    let Some((ni, di)) = unit_row(&self.cells[i].c.row(ri).transpose(), self.cells[i].d[ri]) else {
                        continue;
                    };
                    for rj in 0..self.cells[j].c.nrows() {
                        let Some((nj, dj)) = unit_row(&self.cells[j].c.row(rj).transpose(), self.cells[j].d[rj])
                        else {
                            continue;
                        };
                        let scale = 1.0 + di.abs();
                        if (&ni + &nj).amax() <= 1e-9 && (di + dj).abs() <= 1e-9 * scale {
                            jobs.push((i, j, ri, rj));
                        }
                    }
                }
            }
        }
        let results: Vec<Option<Failure>> = jobs
            .par_iter()
            .map(|&(i, j, ri, rj)| {
                let (ci, cj) = (&self.cells[i], &self.cells[j]);
                let mut ineq: Vec<HalfSpace> = ci.half_spaces();
                ineq.remove(ri);
                let mut other = cj.half_spaces();
                other.remove(rj);
                ineq.extend(other);
                let normal = ci.c.row(ri).transpose();
                let eq = vec![(normal.clone(), ci.d[ri])];
                let (center, rad) = chebyshev_center(&ineq, &eq, n, self.box_radius)?;
                if rad <= EMPTY_TOL * (1.0 + self.box_radius) {
                    return None;
                }
                let mut basis = vec![center.clone()];
                for q in complement_basis(&[normal], n) {
                    basis.push(&center + q * rad);
                }
                let scale = 1.0 + ci.a.amax().max(cj.a.amax()) * (center.amax() + rad) + ci.b.amax().max(cj.b.amax());
                for p in basis {
                    let gap = (ci.value(&p) - cj.value(&p)).amax();
                    if gap > CONTINUITY_TOL * scale {
                        return Some(Failure {
                            kind: FailureKind::Discontinuity,
                            cells: vec![i, j],
                            point: p.iter().copied().collect(),
                            detail: format!("maps differ by {gap:e} on the shared facet"),
                        });
                    }
                }
                None
            })
            .collect();
        (jobs.len(), results.into_iter().flatten().collect())
    }
}

impl LipschitzMap for PwlOperator {
    fn domain(&self) -> &NormedSpace {
        &self.space
    }

    fn codomain(&self) -> &NormedSpace {
        &self.space
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        self.eval(x)
    }

    fn pieces(&self) -> Option<Vec<Piece>> {
        Some(
            self.live_cells()
                .map(|i| {
                    let g = self.geometry[i].as_ref().expect("live cell");
                    Piece {
                        interior: real_vector(g.center.as_slice()),
                        inradius: g.inradius,
                        jacobian: real_matrix(&self.cells[i].a),
                    }
                })
                .collect(),
        )
    }

    fn lip_upper(&self) -> Option<f64> {
        Some(self.lip_norm())
    }

    fn sample_radius(&self) -> f64 {
        self.box_radius
    }
}

#[cfg(test)]
mod tests;
