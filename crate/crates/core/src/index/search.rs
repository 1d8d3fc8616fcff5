//! Multi-start search for operators of small normalized radius.
//!
//! Candidates are screened with cheap sound bounds (`omega_upper / ||T||_upper`),
//! the best few are refined by coordinate descent on their entries, and the
//! finalists are certified as `omega_upper / ||T||_lower`.

use super::battery::structured_matrices;
use super::Operator;
use crate::error::{Error, Result};
use crate::linop::{op_norm_upper, screen_upper, LinearOperator};
use crate::lipop::{random_pwl, PwlOperator};
use crate::search::pattern_ascent;
use crate::spaces::{real_matrix, Matrix, NormedSpace, Vector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};

pub const DEFAULT_BUDGET: usize = 10_000;
const DESCENT_STARTS: usize = 6;
const DESCENT_EVALS: usize = 600;
const CERTIFIED_RAW: usize = 8;
const CERTIFIED_PWL: usize = 4;
const MIN_PWL_POOL: usize = 50;
const PWL_STREAM: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Lipschitz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Every screened candidate: structured, random, descended and CPWL.
    pub starts: usize,
    pub structured: usize,
    pub random: usize,
    pub descents: usize,
    pub pwl: usize,
    /// Objective evaluations spent in descent.
    pub iterations: usize,
    pub certified: usize,
    /// Position of the witness in the candidate order.
    pub best_start: usize,
    pub seed: u64,
    /// Whether the witness's radius bracket closes at the certification tolerance.
    pub witness_converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexEstimate {
    pub space: String,
    pub mode: Mode,
    /// The certified normalized radius of the witness; `n(X)` (or `n_L(X)`) is at most this.
    pub upper: f64,
    pub witness: Operator,
    /// The smallest screened ratio seen, uncertified.
    pub heuristic_value: f64,
    pub search_stats: SearchStats,
}

impl IndexEstimate {
    /// Recomputes the witness's certified normalized radius.
    pub fn reevaluate(&self) -> f64 {
        self.witness.normalized_upper()
    }
}

fn random_matrix(space: &NormedSpace, seed: u64, stream: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n = space.dim();
    if space.field().is_real() {
        Matrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), 0.0))
    } else {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Matrix::from_fn(n, n, |_, _| {
            C64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
        })
    }
}

fn screen(space: &NormedSpace, m: &Matrix) -> f64 {
    let norm = op_norm_upper(space, space, m);
    if !(norm > 0.0) || !norm.is_finite() {
        return f64::INFINITY;
    }
    screen_upper(&LinearOperator::new(space.clone(), m.clone()).expect("square matrix")) / norm
}

fn flatten(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.iter().copied())
}

fn unflatten(v: &Vector, n: usize) -> Matrix {
    Matrix::from_column_slice(n, n, v.as_slice())
}

/// Coordinate descent on the entries, minimising the screened ratio.
fn descend(space: &NormedSpace, m: &Matrix, evals: &AtomicUsize) -> Matrix {
    let n = space.dim();
    let complex = !space.field().is_real();
    let (_, v) = pattern_ascent(
        flatten(m),
        complex,
        |v| {
            evals.fetch_add(1, Ordering::Relaxed);
            -screen(space, &unflatten(v, n))
        },
        |v| {
            let s = v.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            (s > 0.0).then(|| v.unscale(s))
        },
        0.25,
        1e-6,
        DESCENT_EVALS,
    );
    unflatten(&v, n)
}

/// The index of the smallest value, ties going to the earlier index.
fn argmin(values: &[(f64, usize)]) -> (f64, usize) {
    let mut best = (f64::INFINITY, usize::MAX);
    for &(v, i) in values {
        if v < best.0 || (v == best.0 && i < best.1) {
            best = (v, i);
        }
    }
    best
}

fn top(scored: &[(f64, usize)], k: usize) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = scored.iter().copied().filter(|(v, _)| v.is_finite()).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.into_iter().take(k).map(|(_, i)| i).collect()
}

struct Found {
    upper: f64,
    witness: Operator,
    heuristic: f64,
    stats: SearchStats,
}

fn search_linear(space: &NormedSpace, budget: usize, seed: u64) -> Found {
    let structured: Vec<Matrix> = structured_matrices(space).into_iter().map(|(_, m)| m).collect();
    let s = structured.len();
    let mut pool = structured;
    pool.extend((0..budget).map(|i| random_matrix(space, seed, i as u64)));
    let scored: Vec<(f64, usize)> = pool.par_iter().enumerate().map(|(i, m)| (screen(space, m), i)).collect();

    let evals = AtomicUsize::new(0);
    let starts = top(&scored, DESCENT_STARTS);
    let descended: Vec<Matrix> = starts.par_iter().map(|&i| descend(space, &pool[i], &evals)).collect();
    let base = pool.len();
    let mut heuristic = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    for m in &descended {
        heuristic = heuristic.min(screen(space, m));
    }
    pool.extend(descended);

    let mut finalists = top(&scored, CERTIFIED_RAW);
    finalists.extend(base..pool.len());
    let certified: Vec<(f64, usize)> = finalists
        .par_iter()
        .map(|&i| {
            let op = Operator::Linear(LinearOperator::new(space.clone(), pool[i].clone()).expect("square matrix"));
            (op.normalized_upper(), i)
        })
        .collect();
    let (upper, best) = argmin(&certified);
    let witness = Operator::Linear(LinearOperator::new(space.clone(), pool[best].clone()).expect("square matrix"));
    let stats = SearchStats {
        starts: pool.len(),
        structured: s,
        random: budget,
        descents: pool.len() - base,
        pwl: 0,
        iterations: evals.load(Ordering::Relaxed),
        certified: certified.len(),
        best_start: best,
        seed,
        witness_converged: false,
    };
    Found { upper, witness, heuristic, stats }
}

fn pwl_screen(p: &PwlOperator) -> f64 {
    let space = p.space();
    let (mut radius, mut norm) = (0.0f64, 0.0f64);
    for i in p.live_cells() {
        let a = real_matrix(&p.cells()[i].a);
        norm = norm.max(op_norm_upper(space, space, &a));
        radius = radius.max(screen_upper(&LinearOperator::new(space.clone(), a).expect("square cell map")));
    }
    if norm > 0.0 {
        radius / norm
    } else {
        f64::INFINITY
    }
}

/// Seeded CPWL candidates with one to three clamp units; failed generations are skipped.
fn pwl_pool(space: &NormedSpace, count: usize, seed: u64) -> Vec<PwlOperator> {
    (0..count)
        .into_par_iter()
        .filter_map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(PWL_STREAM + j as u64);
            random_pwl(space, 1 + j % 3, rng.random()).ok()
        })
        .collect()
}

/// Estimates `n(X)` (linear mode) or `n_L(X)` (Lipschitz mode) from above.
///
/// Lipschitz mode searches the linear pool first and then `max(budget / 20, 50)`
/// CPWL operators, so its value never exceeds the linear one for the same seed.
/// CPWL operators exist on real spaces only; on complex spaces both modes search
/// the same pool.
pub fn estimate_index(space: &NormedSpace, mode: Mode, budget: usize, seed: u64) -> Result<IndexEstimate> {
    if budget == 0 {
        return Err(Error::Input("the search budget must be at least 1".into()));
    }
    let mut found = search_linear(space, budget, seed);
    if mode == Mode::Lipschitz && space.field().is_real() {
        let pool = pwl_pool(space, (budget / 20).max(MIN_PWL_POOL), seed);
        let scored: Vec<(f64, usize)> = pool.par_iter().enumerate().map(|(i, p)| (pwl_screen(p), i)).collect();
        found.heuristic = scored.iter().map(|s| s.0).fold(found.heuristic, f64::min);
        let finalists = top(&scored, CERTIFIED_PWL);
        let certified: Vec<(f64, usize)> = finalists
            .par_iter()
            .map(|&i| (Operator::Pwl(pool[i].clone()).normalized_upper(), i))
            .collect();
        let (value, best) = argmin(&certified);
        found.stats.starts += pool.len();
        found.stats.pwl = pool.len();
        found.stats.certified += certified.len();
        // Ties keep the linear witness.
        if value < found.upper {
            found.upper = value;
            found.witness = Operator::Pwl(pool[best].clone());
            found.stats.best_start = found.stats.starts - pool.len() + best;
        }
    }
    found.stats.witness_converged = found.witness.radius(super::CERT_TOL).converged;
    Ok(IndexEstimate {
        space: space.to_string(),
        mode,
        upper: found.upper,
        witness: found.witness,
        heuristic_value: found.heuristic,
        search_stats: found.stats,
    })
}
