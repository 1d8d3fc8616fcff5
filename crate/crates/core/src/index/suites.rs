//! Falsification suites: each case is a numerical consequence of a known bound
//! or identity, checked on seeded operators.

use super::battery::{known_index, structured_matrices};
use super::report::{Case, Relation, VerificationReport};
use super::search::{estimate_index, IndexEstimate, Mode};
use super::{Operator, CERT_TOL};
use crate::constructions::{ck_witness_boost, compress_l1_sum, compress_linf_sum, Compression};
use crate::error::{Error, Result};
use crate::linop::LinearOperator;
use crate::lipop::random_pwl;
use crate::maps::{lip_lower, range_value, two_point_lower, LipschitzMap};
use crate::spaces::{real_matrix, Matrix, NormedSpace, SumKind, Vector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Tolerance for searched index values.
pub const SEARCH_TOL: f64 = 5e-3;
/// Tolerance for the sum-stability comparisons.
pub const SUM_TOL: f64 = 2e-2;
/// Margin below which a Lipschitz estimate counts as beating the linear one.
pub const RNP_TOL: f64 = 1e-2;
const BK_TOL: f64 = 1e-6;
const PER_OPERATOR_SAMPLES: usize = 20;
const COMPRESS_EPS: f64 = 1e-3;
const COMPRESS_BUDGET: usize = 2000;
const CK_EPS: f64 = 1e-2;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_matrix(space: &NormedSpace, rng: &mut ChaCha8Rng) -> Matrix {
    let n = space.dim();
    if space.field().is_real() {
        Matrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), 0.0))
    } else {
        Matrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }
}

fn estimate_value(e: &IndexEstimate) -> Value {
    serde_json::to_value(e).expect("estimates serialize")
}

/// `omega(T) >= ||T|| / e` on complex spaces, one case per operator: the
/// structured matrices of the space first, then Gaussian matrices. Each
/// operator is scaled to norm one, so the case value is `omega_lower`.
pub fn bk_suite(space: &NormedSpace, samples: usize, seed: u64) -> Result<VerificationReport> {
    if space.field().is_real() {
        return Err(Error::UnsupportedKind(format!("the 1/e bound concerns complex spaces, got {space}")));
    }
    let mut ops: Vec<(String, Matrix)> = structured_matrices(space).into_iter().take(samples).collect();
    let k = ops.len();
    ops.extend((k..samples).map(|i| (format!("gaussian_{i}"), gaussian_matrix(space, &mut rng_for(seed, i as u64)))));
    let cases = ops
        .par_iter()
        .map(|(name, m)| {
            let t = LinearOperator::new(space.clone(), m.clone()).expect("square matrix");
            let norm = t.op_norm_bracket().upper;
            if norm == 0.0 {
                return Case::check(name, 1.0, 1.0, 0.0, Relation::Approx, true, None);
            }
            let t = t.scaled(C64::new(1.0 / norm, 0.0));
            let b = t.numerical_radius(CERT_TOL);
            let witness = json!({ "operator": Operator::Linear(t.clone()).to_value(), "radius": b });
            Case::check(name, b.lower, 1.0 / std::f64::consts::E, BK_TOL, Relation::AtLeast, b.converged, Some(witness))
        })
        .collect();
    let config = json!({ "space": space.to_string(), "samples": samples });
    Ok(VerificationReport::new("bk", seed, config, cases))
}

/// The largest-norm cell map of a CPWL witness, as a linear operator.
fn dominant_cell(op: &Operator) -> Option<LinearOperator> {
    let Operator::Pwl(p) = op else { return None };
    let space = p.space();
    p.live_cells()
        .map(|i| LinearOperator::from_real(space.clone(), &p.cells()[i].a).expect("square cell map"))
        .map(|t| (t.op_norm_bracket().lower, t))
        .fold(None, |best: Option<(f64, LinearOperator)>, (n, t)| match best {
            Some((m, _)) if m >= n => best,
            _ => Some((n, t)),
        })
        .map(|(_, t)| t)
}

/// Per-operator check `omega_lower(T) >= (index - tol) ||T||_L` on sampled
/// CPWL maps (real spaces) or Gaussian matrices (complex spaces).
fn per_operator_cases(space: &NormedSpace, index: f64, seed: u64) -> Vec<Case> {
    (0..PER_OPERATOR_SAMPLES)
        .into_par_iter()
        .filter_map(|k| {
            let op = if space.field().is_real() {
                Operator::Pwl(random_pwl(space, 1 + k % 2, seed.wrapping_add(k as u64)).ok()?)
            } else {
                let m = gaussian_matrix(space, &mut rng_for(seed, 1 << 32 | k as u64));
                Operator::Linear(LinearOperator::new(space.clone(), m).expect("square matrix"))
            };
            let norm = op.norm_bracket().upper;
            if norm == 0.0 {
                return None;
            }
            let b = op.radius(1e-6);
            Some(Case::check(
                format!("operator_{k}: omega_lower / norm"),
                b.lower / norm,
                index,
                SEARCH_TOL,
                Relation::AtLeast,
                b.converged,
                Some(json!({ "operator": op.to_value(), "radius": b })),
            ))
        })
        .collect()
}

/// Searches both modes. The Lipschitz estimate may not exceed the linear one;
/// it falling more than `RNP_TOL` below is a counterexample candidate. Such a
/// candidate is first reduced: the witness's largest-norm cell is a linear
/// operator whose normalized radius is at most the CPWL one, so a linear
/// search that missed it was merely unsaturated.
pub fn rnp_equality_suite(space: &NormedSpace, budget: usize, seed: u64) -> Result<VerificationReport> {
    let lin = estimate_index(space, Mode::Linear, budget, seed)?;
    let lip = estimate_index(space, Mode::Lipschitz, budget, seed)?;
    let mut cases = vec![Case::check(
        "lipschitz upper <= linear upper",
        lip.upper,
        lin.upper,
        1e-9,
        Relation::AtMost,
        true,
        Some(json!({ "linear": estimate_value(&lin), "lipschitz": estimate_value(&lip) })),
    )];
    let mut linear_upper = lin.upper;
    let mut reduction = Value::Null;
    if lip.upper < lin.upper - RNP_TOL {
        if let Some(cell) = dominant_cell(&lip.witness) {
            let value = Operator::Linear(cell.clone()).normalized_upper();
            reduction = json!({ "cell_operator": Operator::Linear(cell).to_value(), "normalized_upper": value });
            linear_upper = linear_upper.min(value);
        }
    }
    cases.push(Case::check(
        "no lipschitz estimate below the linear one",
        lip.upper,
        linear_upper,
        RNP_TOL,
        Relation::AtLeast,
        lip.search_stats.witness_converged,
        Some(json!({ "linear_search_upper": lin.upper, "cell_reduction": reduction })),
    ));
    if let Some(k) = known_index(space) {
        cases.push(Case::check("linear upper vs known index", lin.upper, k, SEARCH_TOL, Relation::Approx, true, None));
        cases.push(Case::check("lipschitz upper vs known index", lip.upper, k, SEARCH_TOL, Relation::Approx, true, None));
        cases.extend(per_operator_cases(space, linear_upper, seed));
    }
    let config = json!({ "space": space.to_string(), "budget": budget });
    Ok(VerificationReport::new("rnp", seed, config, cases))
}

/// Normalized radius of a compressed map: exact when it is linear, otherwise
/// the best two-point value (including its own pair) over the certified bound.
pub fn compression_ratio(c: &Compression, seed: u64) -> f64 {
    if let Some(t) = c.map.as_linear() {
        return Operator::Linear(t).normalized_upper();
    }
    let bound = c.map.bound();
    if bound == 0.0 {
        return 0.0;
    }
    let (sampled, _) = two_point_lower(&c.map, COMPRESS_BUDGET, seed);
    let own = range_value(&c.map, &c.x1, &c.x2).map(|v| v.0).unwrap_or(0.0);
    sampled.max(own) / bound
}

/// `n_L(X (+) Y) = min(n_L(X), n_L(Y))`, with the compression of the sum's
/// witness to a summand map of about the same normalized radius.
pub fn sum_stability_suite(
    x: &NormedSpace,
    y: &NormedSpace,
    kind: SumKind,
    budget: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if x.dim() + y.dim() > 5 {
        return Err(Error::Input(format!("dim X + dim Y = {} exceeds the search limit of 5", x.dim() + y.dim())));
    }
    let z = NormedSpace::sum(x.clone(), y.clone(), kind)?;
    let ex = estimate_index(x, Mode::Lipschitz, budget, seed)?;
    let ey = estimate_index(y, Mode::Lipschitz, budget, seed)?;
    let ez = estimate_index(&z, Mode::Lipschitz, budget, seed)?;
    let min = ex.upper.min(ey.upper);
    let mut cases = vec![Case::check(
        "index(Z) vs min(index(X), index(Y))",
        ez.upper,
        min,
        SUM_TOL,
        Relation::Approx,
        true,
        Some(json!({ "x": estimate_value(&ex), "y": estimate_value(&ey), "z": estimate_value(&ez) })),
    )];
    for (name, space, e) in [("X", x, &ex), ("Y", y, &ey), ("Z", &z, &ez)] {
        if let Some(k) = known_index(space) {
            cases.push(Case::check(format!("index({name}) vs known index"), e.upper, k, SEARCH_TOL, Relation::Approx, true, None));
        }
    }
    let map = ez.witness.as_map();
    let compressed = match kind {
        SumKind::Linf => compress_linf_sum(map, COMPRESS_EPS, COMPRESS_BUDGET, seed),
        SumKind::L1 => compress_l1_sum(map, COMPRESS_EPS, COMPRESS_BUDGET, seed),
    };
    let name = "compressed witness keeps the normalized radius";
    cases.push(match compressed {
        Ok(c) => {
            let ratio = compression_ratio(&c, seed);
            let construction = match kind {
                SumKind::Linf => "linf_sum_compress",
                SumKind::L1 => "l1_sum_compress",
            };
            Case::check(name, ratio, ez.upper, SUM_TOL, Relation::Approx, true, Some(serde_json::to_value(c.record(construction)).expect("records serialize")))
        }
        Err(e) => Case::missing(name, ez.upper, SUM_TOL, Relation::Approx, &e.to_string()),
    });
    let config = json!({ "x": x.to_string(), "y": y.to_string(), "kind": format!("{kind:?}").to_lowercase(), "budget": budget });
    Ok(VerificationReport::new("sums", seed, config, cases))
}

fn known_spaces() -> Vec<NormedSpace> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(NormedSpace::l1(n));
        out.push(NormedSpace::linf(n));
    }
    out.push(NormedSpace::l2(2));
    out.push(NormedSpace::complex_l2(2));
    out
}

fn known_tol(space: &NormedSpace) -> f64 {
    match space.p() {
        Some(p) if p == 2.0 && space.field().is_real() => 1e-6,
        Some(p) if p == 2.0 => 1e-3,
        _ => SEARCH_TOL,
    }
}

/// The structured battery (plus seeded CPWL maps on real spaces) over
/// `l_1^n`, `l_inf^n` (n = 2, 3, 4) and real and complex `l_2^2`: the battery
/// minimum of the normalized radius is the documented index, and on the
/// index-one spaces every operator's bracket has `omega >= (1 - tol) ||T||`.
pub fn known_values_suite(seed: u64) -> Result<VerificationReport> {
    let mut cases = Vec::new();
    for space in known_spaces() {
        let expected = known_index(&space).expect("classical space");
        let mut ops: Vec<(String, Operator)> = structured_matrices(&space)
            .into_iter()
            .map(|(name, m)| (name, Operator::Linear(LinearOperator::new(space.clone(), m).expect("square matrix"))))
            .collect();
        if space.field().is_real() {
            for k in 0..4u64 {
                if let Ok(p) = random_pwl(&space, 1 + (k as usize) % 2, seed.wrapping_add(k)) {
                    ops.push((format!("cpwl_{k}"), Operator::Pwl(p)));
                }
            }
        }
        let evaluated: Vec<(f64, f64, f64, bool)> = ops
            .par_iter()
            .map(|(_, op)| {
                let norm = op.norm_bracket();
                let b = op.radius(CERT_TOL);
                (b.upper / norm.lower, b.lower / norm.upper, norm.upper, b.converged)
            })
            .collect();
        let mut best = 0;
        for (i, e) in evaluated.iter().enumerate() {
            if e.0 < evaluated[best].0 {
                best = i;
            }
        }
        cases.push(Case::check(
            format!("{space}: battery minimum"),
            evaluated[best].0,
            expected,
            known_tol(&space),
            Relation::Approx,
            evaluated[best].3,
            Some(json!({ "name": ops[best].0, "operator": ops[best].1.to_value() })),
        ));
        if expected == 1.0 {
            for ((name, _), e) in ops.iter().zip(&evaluated) {
                cases.push(Case::check(
                    format!("{space}: {name} omega_lower / norm"),
                    e.1,
                    1.0,
                    SEARCH_TOL,
                    Relation::AtLeast,
                    e.3,
                    None,
                ));
            }
        }
    }
    Ok(VerificationReport::new("known", seed, json!({}), cases))
}

/// Witness boosting on `l_inf^3`: alternately Gaussian matrices (paired with
/// a norming vector and 0) and CPWL maps (paired by the Lipschitz search),
/// each boosted to a two-point value above `(1 - 2 eps) ||T||_L`.
pub fn ck_suite(samples: usize, seed: u64) -> Result<VerificationReport> {
    let space = NormedSpace::linf(3);
    let expected = 1.0 - 2.0 * CK_EPS;
    let cases = (0..samples)
        .into_par_iter()
        .map(|k| {
            let name = format!("instance_{k}");
            let (map, x, y): (Box<dyn LipschitzMap>, Vector, Vector) = if k % 2 == 0 {
                let mut rng = rng_for(seed, k as u64);
                let m = real_matrix(&nalgebra::DMatrix::from_fn(3, 3, |_, _| rng.sample(StandardNormal)));
                let t = LinearOperator::new(space.clone(), m).expect("square matrix");
                let x = t.op_norm_bracket().witness;
                (Box::new(t), x, space.zero())
            } else {
                let p = match random_pwl(&space, 1 + (k / 2) % 2, seed.wrapping_add(k as u64)) {
                    Ok(p) => p,
                    Err(e) => return Case::missing(name, expected, 0.0, Relation::AtLeast, &e.to_string()),
                };
                let pair = lip_lower(&p, p.box_radius(), 500, seed.wrapping_add(k as u64));
                (Box::new(p), pair.x, pair.y)
            };
            let lip = map.lip_upper().expect("linear and CPWL maps carry bounds");
            match ck_witness_boost(map.as_ref(), &x, &y, CK_EPS) {
                Ok(r) => Case::check(
                    name,
                    r.value / lip,
                    expected,
                    0.0,
                    Relation::AtLeast,
                    true,
                    Some(serde_json::to_value(r.record(&y, CK_EPS)).expect("records serialize")),
                ),
                Err(e) => Case::missing(name, expected, 0.0, Relation::AtLeast, &e.to_string()),
            }
        })
        .collect();
    Ok(VerificationReport::new("ck", seed, json!({ "space": space.to_string(), "samples": samples, "eps": CK_EPS }), cases))
}
