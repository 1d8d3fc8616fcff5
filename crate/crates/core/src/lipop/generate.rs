//! Seeded random operators `x -> A0 x + A2 clamp(A1 x + a1) - T(0)`.
//!
//! Each clamp unit splits space into three slabs (below, inside, above), so
//! the cells are the non-empty intersections of one slab per unit.

use super::{Cell, PwlOperator};
use crate::error::{Error, Result};
use crate::lp::chebyshev_center;
use crate::spaces::NormedSpace;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const DEFAULT_MAX_CELLS: usize = 81;
/// Patterns we are willing to enumerate before giving up.
const MAX_PATTERNS: usize = 3usize.pow(10);

pub fn random_pwl(space: &NormedSpace, pieces: usize, seed: u64) -> Result<PwlOperator> {
    random_pwl_with_limit(space, pieces, seed, DEFAULT_MAX_CELLS)
}

fn gaussian(rows: usize, cols: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

/// `pieces` is the number of clamp units.
pub fn random_pwl_with_limit(space: &NormedSpace, pieces: usize, seed: u64, max_cells: usize) -> Result<PwlOperator> {
    if pieces == 0 {
        return Err(Error::Input("at least one clamp unit is needed".into()));
    }
    if !space.field().is_real() {
        return Err(Error::UnsupportedKind("piecewise-linear operators live on real spaces".into()));
    }
    let patterns = 3usize.checked_pow(pieces as u32).filter(|&p| p <= MAX_PATTERNS).ok_or_else(|| {
        Error::Generation(format!("{pieces} clamp units give too many candidate cells; use fewer pieces"))
    })?;
    let n = space.dim();
    let k = pieces;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = gaussian(n, n, 1.0 / (n as f64).sqrt(), &mut rng);
    let a1 = gaussian(k, n, 1.0, &mut rng);
    let off = DVector::from_fn(k, |_, _| 0.5 * rng.sample::<f64, _>(StandardNormal));
    let half = DVector::from_fn(k, |_, _| rng.random_range(0.25..1.25));
    let a2 = gaussian(n, k, 1.0 / (k as f64).sqrt(), &mut rng);

    // Every slab boundary passes within `reach` of the origin.
    let reach = (0..k)
        .map(|i| (off[i].abs() + half[i]) / a1.row(i).norm().max(1e-12))
        .fold(0.0f64, f64::max);
    let box_radius = (1.0 + 2.0 * reach).min(1e3);

    let mut cells = Vec::new();
    for mut code in 0..patterns {
        let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
        let mut pass = DVector::zeros(k);
        let mut sat = DVector::zeros(k);
        for i in 0..k {
            let row = a1.row(i).transpose();
            match code % 3 {
                0 => {
                    rows.push((row.clone(), -half[i] - off[i]));
                    sat[i] = -half[i];
                }
                1 => {
                    rows.push((row.clone(), half[i] - off[i]));
                    rows.push((-row.clone(), half[i] + off[i]));
                    pass[i] = 1.0;
                }
                _ => {
                    rows.push((-row.clone(), off[i] - half[i]));
                    sat[i] = half[i];
                }
            }
            code /= 3;
        }
        let far = 1e3 * box_radius;
        match chebyshev_center(&rows, &[], n, far) {
            Some((_, r)) if r > 1e-9 * (1.0 + box_radius) => {}
            _ => continue,
        }
        if cells.len() == max_cells {
            return Err(Error::Generation(format!(
                "more than {max_cells} cells; use fewer pieces or raise the cell limit"
            )));
        }
        let d = DMatrix::from_diagonal(&pass);
        let a = &a0 + &a2 * &d * &a1;
        let b = &a2 * (&d * &off + &sat);
        let c = DMatrix::from_fn(rows.len(), n, |r, j| rows[r].0[j]);
        let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        cells.push(Cell { c, d: rhs, a, b });
    }

    let clamped = DVector::from_fn(k, |i, _| off[i].clamp(-half[i], half[i]));
    let t0 = &a2 * clamped;
    let origin = DVector::zeros(n);
    for cell in &mut cells {
        if cell.contains(&origin, super::MEMBER_TOL) {
            cell.b.fill(0.0);
        } else {
            cell.b -= &t0;
        }
    }
    PwlOperator::new(space.clone(), cells, box_radius)
}
