//! Derivative-free local ascent used to sharpen sampled lower bounds.

use crate::spaces::{Vector, C64};

/// Coordinate pattern search maximising a scale-invariant objective.
///
/// Each accepted move is renormalised with `normalize`; the step halves when
/// no coordinate move improves the objective.
pub(crate) fn pattern_ascent(
    mut x: Vector,
    complex: bool,
    f: impl Fn(&Vector) -> f64,
    normalize: impl Fn(&Vector) -> Option<Vector>,
    step0: f64,
    step_min: f64,
    max_evals: usize,
) -> (f64, Vector) {
    let mut fx = f(&x);
    let mut step = step0;
    let mut evals = 1;
    let dirs: &[C64] = if complex {
        &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)]
    } else {
        &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]
    };
    while step > step_min && evals < max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for d in dirs {
                let mut y = x.clone();
                y[i] += d * step;
                let Some(y) = normalize(&y) else { continue };
                let v = f(&y);
                evals += 1;
                if v > fx {
                    fx = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (fx, x)
}
