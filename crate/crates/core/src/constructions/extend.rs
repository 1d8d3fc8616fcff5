//! Lipschitz extension from the two endpoints of a segment.

use super::{real, vec_value, WitnessRecord};
use crate::error::{Error, Result};
use crate::maps::LipschitzCallable;
use crate::spaces::{NormedSpace, Vector};

/// The 1-Lipschitz function `x -> inf_t ( t ||x2 - x1|| + ||x - x1 - t (x2 - x1)|| )`,
/// which extends `z -> ||z - x1||` from the segment `[x1, x2]`.
///
/// By the triangle inequality every term is at least `||x - x1||`, with
/// equality at `t = 0`, so the infimum is `||x - x1||`.
pub fn mcshane_extend(space: &NormedSpace, x1: &Vector, x2: &Vector, seed: u64) -> Result<LipschitzCallable> {
    space.check(x1)?;
    space.check(x2)?;
    if space.norm(&(x2 - x1))? == 0.0 {
        return Err(Error::Input("the segment endpoints coincide".into()));
    }
    let s = space.clone();
    let x1 = x1.clone();
    LipschitzCallable::new(
        space.clone(),
        NormedSpace::reals(),
        move |x| Vector::from_element(1, real(s.norm_of((x - &x1).as_slice()))),
        1.0,
        seed,
    )
}

/// An `M`-Lipschitz map `F: X -> Y` with `F(x1) = y1` and `F(x2) = y2`:
/// `F = phi o clamp_[0, a] o f` with `a = ||x2 - x1||`, `f` from
/// [`mcshane_extend`] and `phi(t) = (t/a) y2 + (1 - t/a) y1`.
pub fn segment_extension(
    domain: &NormedSpace,
    codomain: &NormedSpace,
    (x1, x2): (&Vector, &Vector),
    (y1, y2): (&Vector, &Vector),
    m: f64,
    seed: u64,
) -> Result<LipschitzCallable> {
    domain.check(x1)?;
    domain.check(x2)?;
    codomain.check(y1)?;
    codomain.check(y2)?;
    let a = domain.norm(&(x2 - x1))?;
    if a == 0.0 {
        return Err(Error::Input("the segment endpoints coincide".into()));
    }
    let gap = codomain.norm(&(y2 - y1))?;
    if !(m >= 0.0) || gap > m * a * (1.0 + 1e-12) {
        return Err(Error::Input(format!(
            "extension needs ||y1 - y2|| <= M ||x1 - x2||, got {gap} > {m} * {a}"
        )));
    }
    let d = domain.clone();
    let (x1, y1, y2) = (x1.clone(), y1.clone(), y2.clone());
    LipschitzCallable::new(
        domain.clone(),
        codomain.clone(),
        move |x| {
            let t = d.norm_of((x - &x1).as_slice()).clamp(0.0, a) / a;
            y2.scale(t) + y1.scale(1.0 - t)
        },
        m,
        seed,
    )
}

/// Inputs, endpoint images and endpoint residuals of a segment extension.
pub fn extension_record(
    f: &LipschitzCallable,
    (x1, x2): (&Vector, &Vector),
    (y1, y2): (&Vector, &Vector),
    m: f64,
) -> WitnessRecord {
    let e1 = f.eval(x1) - y1;
    let e2 = f.eval(x2) - y2;
    WitnessRecord::new(
        "segment_extension",
        serde_json::json!({ "x1": vec_value(x1), "x2": vec_value(x2), "y1": vec_value(y1), "y2": vec_value(y2), "M": m }),
        serde_json::json!({ "F(x1)": vec_value(&f.eval(x1)), "F(x2)": vec_value(&f.eval(x2)), "certificate": f.certificate() }),
        &[("endpoint_x1", e1.camax()), ("endpoint_x2", e2.camax())],
    )
}
