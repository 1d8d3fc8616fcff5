//! The blockwise lift `(x_1, ..., x_n) -> (S x_1, ..., S x_n)` to `l_1^n(X)`.

use crate::error::{Error, Result};
use crate::lipop::{Cell, PwlOperator};
use crate::spaces::{NormedSpace, SumKind};
use nalgebra::{DMatrix, DVector};

pub const DEFAULT_LIFT_CELLS: usize = 4096;

fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

fn stack(parts: &[&DVector<f64>]) -> DVector<f64> {
    DVector::from_iterator(parts.iter().map(|p| p.len()).sum(), parts.iter().flat_map(|p| p.iter().copied()))
}

/// Lifts `S` blockwise to `l_1^n(X)`; the cells are products of the live cells of `S`.
pub fn diagonal_lift(s: &PwlOperator, n: usize, max_cells: usize) -> Result<PwlOperator> {
    if n == 0 {
        return Err(Error::Input("the lift needs at least one block".into()));
    }
    let live: Vec<usize> = s.live_cells().collect();
    let count = live.len().checked_pow(n as u32).filter(|&c| c <= max_cells).ok_or_else(|| {
        Error::Generation(format!("{}^{n} product cells exceed the limit of {max_cells}", live.len()))
    })?;
    let space = NormedSpace::sum_many(SumKind::L1, vec![s.space().clone(); n])?;
    let cells = s.cells();
    let mut out = Vec::with_capacity(count);
    for mut code in 0..count {
        let mut pick = Vec::with_capacity(n);
        for _ in 0..n {
            pick.push(&cells[live[code % live.len()]]);
            code /= live.len();
        }
        out.push(Cell {
            c: block_diag(&pick.iter().map(|c| &c.c).collect::<Vec<_>>()),
            d: stack(&pick.iter().map(|c| &c.d).collect::<Vec<_>>()),
            a: block_diag(&pick.iter().map(|c| &c.a).collect::<Vec<_>>()),
            b: stack(&pick.iter().map(|c| &c.b).collect::<Vec<_>>()),
        });
    }
    PwlOperator::new(space, out, s.box_radius())
}
