//! Finite-dimensional normed spaces over R or C.
//!
//! Vectors are stored as complex columns in every case; real spaces simply keep
//! the imaginary parts at zero. Functionals act by the bilinear pairing
//! `f(x) = sum_i f_i x_i`, with no conjugation.

mod duality;
mod parse;

pub use duality::{DualitySet, Face};
pub use parse::parse_space;

use crate::error::{check_dim, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;
pub type Vector = DVector<C64>;
pub type Matrix = DMatrix<C64>;

/// Largest enumeration of extreme points or norming functionals we agree to build.
pub const ENUMERATION_CAP: usize = 1 << 16;

/// Relative tolerance for deciding that a coordinate or facet attains the norm.
pub(crate) const ACTIVE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn is_real(self) -> bool {
        matches!(self, Field::Real)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    L1,
    Linf,
}

/// Centrally symmetric polytope given by its vertices and by facet functionals,
/// so that `||x|| = max_j |phi_j(x)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    /// p in [1, inf]; `f64::INFINITY` encodes the max norm.
    PNorm(f64),
    Polyhedral(Polytope),
    Sum(Box<SumSpace>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumSpace {
    pub left: NormedSpace,
    pub right: NormedSpace,
    pub kind: SumKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormedSpace {
    dim: usize,
    field: Field,
    kind: NormKind,
}

pub fn conj_sign(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        z.conj() / r
    }
}

/// Phase of `z`, with the convention that the phase of 0 is 1.
pub(crate) fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

pub fn pair(f: &[C64], x: &[C64]) -> C64 {
    f.iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn real_vector(v: &[f64]) -> Vector {
    DVector::from_iterator(v.len(), v.iter().map(|&r| C64::new(r, 0.0)))
}

pub fn real_part(v: &Vector) -> DVector<f64> {
    v.map(|z| z.re)
}

pub fn real_matrix(m: &DMatrix<f64>) -> Matrix {
    m.map(|r| C64::new(r, 0.0))
}

pub(crate) fn unit(n: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub(crate) fn concat(a: &[C64], b: &[C64]) -> Vector {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b).copied())
}

pub(crate) fn pad(v: &[C64], offset: usize, n: usize) -> Vector {
    let mut out = Vector::zeros(n);
    for (i, z) in v.iter().enumerate() {
        out[offset + i] = *z;
    }
    out
}

fn pnorm(x: &[C64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|z| z.norm()).sum()
    } else if p == 2.0 {
        let m = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        m * x.iter().map(|z| (z.norm() / m).powi(2)).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        x.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    } else {
        let m = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        m * x.iter().map(|z| (z.norm() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub(crate) fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn sign_vectors(n: usize, modulo_sign: bool) -> Vec<Vector> {
    let count = if modulo_sign { 1usize << (n - 1) } else { 1usize << n };
    (0..count)
        .map(|mask| {
            DVector::from_fn(n, |i, _| {
                // With `modulo_sign` the first coordinate is pinned to +1.
                let bit = if modulo_sign {
                    if i == 0 {
                        0
                    } else {
                        (mask >> (i - 1)) & 1
                    }
                } else {
                    (mask >> i) & 1
                };
                C64::new(if bit == 1 { -1.0 } else { 1.0 }, 0.0)
            })
        })
        .collect()
}

fn first_nonzero_positive(v: &Vector) -> bool {
    v.iter()
        .find(|z| z.norm() > 1e-12)
        .map(|z| z.re > 0.0)
        .unwrap_or(false)
}

impl Polytope {
    fn validate(&self, n: usize) -> Result<()> {
        if self.vertices.is_empty() || self.facets.is_empty() {
            return Err(Error::Input("polytope needs vertices and facets".into()));
        }
        for v in self.vertices.iter().chain(&self.facets) {
            check_dim(n, v.len())?;
            if v.iter().any(|r| !r.is_finite()) {
                return Err(Error::Input("non-finite polytope entry".into()));
            }
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        for (i, v) in self.vertices.iter().enumerate() {
            let has_opposite = self
                .vertices
                .iter()
                .any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() <= 1e-9));
            if !has_opposite {
                return Err(Error::Input(format!("vertex {i} has no opposite vertex")));
            }
            let nv = self.facets.iter().fold(0.0f64, |m, f| m.max(dot(f, v).abs()));
            if (nv - 1.0).abs() > 1e-9 {
                return Err(Error::Input(format!(
                    "vertex {i} has norm {nv}, expected 1"
                )));
            }
        }
        for (j, f) in self.facets.iter().enumerate() {
            let nf = self.vertices.iter().fold(0.0f64, |m, v| m.max(dot(f, v).abs()));
            if (nf - 1.0).abs() > 1e-9 {
                return Err(Error::Input(format!(
                    "facet {j} has dual norm {nf}, expected 1"
                )));
            }
        }
        let fm = DMatrix::from_fn(self.facets.len(), n, |i, j| self.facets[i][j]);
        let rank = fm.clone().svd(false, false).rank(1e-9);
        if rank < n {
            return Err(Error::Input("facets do not span the dual space".into()));
        }
        Ok(())
    }
}

impl NormedSpace {
    pub fn lp(n: usize, p: f64, field: Field) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("dimension must be positive".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::Input(format!("exponent p = {p} must be in [1, inf]")));
        }
        Ok(Self { dim: n, field, kind: NormKind::PNorm(p) })
    }

    pub fn l1(n: usize) -> Self {
        Self::lp(n, 1.0, Field::Real).expect("positive dimension")
    }

    pub fn l2(n: usize) -> Self {
        Self::lp(n, 2.0, Field::Real).expect("positive dimension")
    }

    pub fn linf(n: usize) -> Self {
        Self::lp(n, f64::INFINITY, Field::Real).expect("positive dimension")
    }

    /// The scalar field viewed as a one-dimensional real space.
    pub fn reals() -> Self {
        Self::l1(1)
    }

    pub fn complex_l1(n: usize) -> Self {
        Self::lp(n, 1.0, Field::Complex).expect("positive dimension")
    }

    pub fn complex_l2(n: usize) -> Self {
        Self::lp(n, 2.0, Field::Complex).expect("positive dimension")
    }

    pub fn complex_linf(n: usize) -> Self {
        Self::lp(n, f64::INFINITY, Field::Complex).expect("positive dimension")
    }

    pub fn polyhedral(vertices: Vec<Vec<f64>>, facets: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::Input("polytope needs vertices".into()))?;
        if n == 0 {
            return Err(Error::Input("dimension must be positive".into()));
        }
        let poly = Polytope { vertices, facets };
        poly.validate(n)?;
        Ok(Self { dim: n, field: Field::Real, kind: NormKind::Polyhedral(poly) })
    }

    /// Symmetric polygon whose vertices are `half` (counter-clockwise, spanning
    /// less than a half turn) together with their negatives.
    pub fn symmetric_polygon(half: &[[f64; 2]]) -> Result<Self> {
        let k = half.len();
        if k < 2 {
            return Err(Error::Input("a polygon needs at least two half vertices".into()));
        }
        let mut cycle: Vec<[f64; 2]> = half.to_vec();
        cycle.extend(half.iter().map(|v| [-v[0], -v[1]]));
        let mut facets = Vec::with_capacity(k);
        for i in 0..k {
            let a = cycle[i];
            let b = cycle[i + 1];
            let det = a[0] * b[1] - a[1] * b[0];
            if det <= 1e-12 {
                return Err(Error::Input(format!(
                    "half vertices {i} and {} are not in counter-clockwise order",
                    i + 1
                )));
            }
            facets.push(vec![(b[1] - a[1]) / det, (a[0] - b[0]) / det]);
        }
        let vertices = cycle.iter().map(|v| v.to_vec()).collect();
        Self::polyhedral(vertices, facets)
    }

    /// A random centrally symmetric hexagon whose six vertices are all extreme.
    pub fn random_hexagon(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut angles = [0.0, rng.random_range(0.3..2.8), rng.random_range(0.3..2.8)];
            angles[1..].sort_by(f64::total_cmp);
            if angles[2] - angles[1] < 0.3 {
                continue;
            }
            let half: Vec<[f64; 2]> = angles
                .iter()
                .map(|&t| {
                    let r = rng.random_range(0.6..1.4);
                    [r * f64::cos(t), r * f64::sin(t)]
                })
                .collect();
            let Ok(space) = Self::symmetric_polygon(&half) else { continue };
            let NormKind::Polyhedral(poly) = &space.kind else { unreachable!() };
            let strictly_extreme = poly.vertices.iter().all(|v| {
                let active = poly
                    .facets
                    .iter()
                    .filter(|f| (f[0] * v[0] + f[1] * v[1]).abs() > 1.0 - 1e-3)
                    .count();
                active == 2
            });
            if strictly_extreme {
                return space;
            }
        }
    }

    pub fn sum(left: NormedSpace, right: NormedSpace, kind: SumKind) -> Result<Self> {
        if left.field != right.field {
            return Err(Error::Input("summands must share the scalar field".into()));
        }
        Ok(Self {
            dim: left.dim + right.dim,
            field: left.field,
            kind: NormKind::Sum(Box::new(SumSpace { left, right, kind })),
        })
    }

    /// Left-nested sum `((X1 + X2) + X3) + ...`.
    pub fn sum_many(kind: SumKind, spaces: Vec<NormedSpace>) -> Result<Self> {
        let mut it = spaces.into_iter();
        let mut acc = it
            .next()
            .ok_or_else(|| Error::Input("empty sum".into()))?;
        for s in it {
            acc = Self::sum(acc, s, kind)?;
        }
        Ok(acc)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn as_sum(&self) -> Option<&SumSpace> {
        match &self.kind {
            NormKind::Sum(s) => Some(s),
            _ => None,
        }
    }

    pub fn p(&self) -> Option<f64> {
        match self.kind {
            NormKind::PNorm(p) => Some(p),
            _ => None,
        }
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dim)
    }

    pub fn check(&self, x: &Vector) -> Result<()> {
        check_dim(self.dim, x.len())?;
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("vector has non-finite entries".into()));
        }
        if self.field.is_real() && x.iter().any(|z| z.im != 0.0) {
            return Err(Error::Input("complex entries in a real space".into()));
        }
        Ok(())
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.norm_of(x.as_slice()))
    }

    pub fn dual_norm(&self, f: &Vector) -> Result<f64> {
        check_dim(self.dim, f.len())?;
        Ok(self.dual_norm_of(f.as_slice()))
    }

    pub(crate) fn norm_of(&self, x: &[C64]) -> f64 {
        match &self.kind {
            NormKind::PNorm(p) => pnorm(x, *p),
            NormKind::Polyhedral(poly) => poly.facets.iter().fold(0.0f64, |m, f| {
                let s: C64 = f.iter().zip(x).map(|(a, b)| b * *a).sum();
                m.max(s.norm())
            }),
            NormKind::Sum(s) => {
                let (a, b) = x.split_at(s.left.dim);
                let (na, nb) = (s.left.norm_of(a), s.right.norm_of(b));
                match s.kind {
                    SumKind::L1 => na + nb,
                    SumKind::Linf => na.max(nb),
                }
            }
        }
    }

    pub(crate) fn dual_norm_of(&self, f: &[C64]) -> f64 {
        match &self.kind {
            NormKind::PNorm(p) => pnorm(f, conjugate_exponent(*p)),
            NormKind::Polyhedral(poly) => poly.vertices.iter().fold(0.0f64, |m, v| {
                let s: C64 = v.iter().zip(f).map(|(a, b)| b * *a).sum();
                m.max(s.norm())
            }),
            NormKind::Sum(s) => {
                let (a, b) = f.split_at(s.left.dim);
                let (na, nb) = (s.left.dual_norm_of(a), s.right.dual_norm_of(b));
                match s.kind {
                    SumKind::L1 => na.max(nb),
                    SumKind::Linf => na + nb,
                }
            }
        }
    }

    /// A unit vector `x` with `g(x) = ||g||_*` (a real, non-negative number),
    /// returned together with `||g||_*`.
    pub fn dual_norm_argmax(&self, g: &[C64]) -> (f64, Vector) {
        let n = self.dim;
        let value = self.dual_norm_of(g);
        let x = match &self.kind {
            NormKind::PNorm(_) if n == 1 => DVector::from_element(1, phase(g[0]).conj()),
            NormKind::PNorm(p) if *p == 1.0 => {
                let k = argmax_abs(g);
                let mut x = unit(n, k);
                if g[k].norm() > 0.0 {
                    x[k] = conj_sign(g[k]);
                }
                x
            }
            NormKind::PNorm(p) if p.is_infinite() => DVector::from_iterator(
                n,
                g.iter().map(|&z| if z.norm() == 0.0 { C64::new(1.0, 0.0) } else { conj_sign(z) }),
            ),
            NormKind::PNorm(p) => {
                let q = conjugate_exponent(*p);
                if value == 0.0 {
                    unit(n, 0)
                } else {
                    DVector::from_iterator(
                        n,
                        g.iter().map(|&z| conj_sign(z) * (z.norm() / value).powf(q - 1.0)),
                    )
                }
            }
            NormKind::Polyhedral(poly) => {
                let mut best = (0.0f64, 0usize, C64::new(1.0, 0.0));
                for (k, v) in poly.vertices.iter().enumerate() {
                    let s: C64 = v.iter().zip(g).map(|(a, b)| b * *a).sum();
                    if s.norm() > best.0 {
                        best = (s.norm(), k, conj_sign(s));
                    }
                }
                let v = &poly.vertices[best.1];
                let ph = if best.0 == 0.0 { C64::new(1.0, 0.0) } else { best.2 };
                DVector::from_iterator(n, v.iter().map(|&r| ph * r))
            }
            NormKind::Sum(s) => {
                let (a, b) = g.split_at(s.left.dim);
                let (va, xa) = s.left.dual_norm_argmax(a);
                let (vb, xb) = s.right.dual_norm_argmax(b);
                match s.kind {
                    SumKind::L1 => {
                        if va >= vb {
                            pad(xa.as_slice(), 0, n)
                        } else {
                            pad(xb.as_slice(), s.left.dim, n)
                        }
                    }
                    SumKind::Linf => concat(xa.as_slice(), xb.as_slice()),
                }
            }
        };
        (value, x)
    }

    /// `sup { ||x||_1 : ||x|| <= 1 }`.
    pub fn l1_constant(&self) -> f64 {
        match &self.kind {
            NormKind::PNorm(p) => (self.dim as f64).powf(1.0 - 1.0 / p),
            NormKind::Polyhedral(poly) => poly
                .vertices
                .iter()
                .fold(0.0f64, |m, v| m.max(v.iter().map(|r| r.abs()).sum())),
            NormKind::Sum(s) => match s.kind {
                SumKind::L1 => s.left.l1_constant().max(s.right.l1_constant()),
                SumKind::Linf => s.left.l1_constant() + s.right.l1_constant(),
            },
        }
    }

    pub fn duality_set(&self, x: &Vector) -> Result<DualitySet> {
        check_dim(self.dim, x.len())?;
        DualitySet::new(self, x)
    }

    pub fn random_vector(&self, rng: &mut impl Rng) -> Vector {
        DVector::from_fn(self.dim, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if self.field.is_real() { 0.0 } else { rng.sample(StandardNormal) };
            C64::new(re, im)
        })
    }

    pub(crate) fn random_unit(&self, rng: &mut impl Rng) -> Vector {
        loop {
            let v = self.random_vector(rng);
            let n = self.norm_of(v.as_slice());
            if n > 1e-8 {
                return v.unscale(n);
            }
        }
    }

    /// Seeded sample of unit vectors. Every vector has norm 1 within 1e-12.
    pub fn sample_sphere(&self, count: usize, seed: u64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.random_unit(&mut rng)).collect()
    }

    /// Extreme points of the closed unit ball (real polyhedral kinds only).
    pub fn ball_extreme_points(&self) -> Result<Vec<Vector>> {
        if !self.field.is_real() {
            return Err(Error::UnsupportedKind(
                "the unit ball of a complex space has infinitely many extreme points".into(),
            ));
        }
        let n = self.dim;
        let pts = match &self.kind {
            NormKind::PNorm(_) if n == 1 => vec![unit(1, 0), -unit(1, 0)],
            NormKind::PNorm(p) if *p == 1.0 => (0..n)
                .flat_map(|k| [unit(n, k), -unit(n, k)])
                .collect(),
            NormKind::PNorm(p) if p.is_infinite() => {
                if n > 16 {
                    return Err(Error::UnsupportedKind(format!(
                        "2^{n} extreme points exceed the enumeration cap"
                    )));
                }
                sign_vectors(n, false)
            }
            NormKind::PNorm(p) => {
                return Err(Error::UnsupportedKind(format!(
                    "l_{p} has a smooth unit ball without isolated extreme points"
                )))
            }
            NormKind::Polyhedral(poly) => poly.vertices.iter().map(|v| real_vector(v)).collect(),
            NormKind::Sum(s) => {
                let a = s.left.ball_extreme_points()?;
                let b = s.right.ball_extreme_points()?;
                match s.kind {
                    SumKind::L1 => a
                        .iter()
                        .map(|v| pad(v.as_slice(), 0, n))
                        .chain(b.iter().map(|v| pad(v.as_slice(), s.left.dim, n)))
                        .collect(),
                    SumKind::Linf => {
                        if a.len() * b.len() > ENUMERATION_CAP {
                            return Err(Error::UnsupportedKind(
                                "too many extreme points to enumerate".into(),
                            ));
                        }
                        a.iter()
                            .flat_map(|u| b.iter().map(move |w| concat(u.as_slice(), w.as_slice())))
                            .collect()
                    }
                }
            }
        };
        Ok(pts)
    }

    /// Extreme points of the unit ball up to unimodular scalars, when finitely
    /// many of them exist. The norm of an operator with this domain, and any
    /// convex function on the sphere, is maximised on this set.
    pub fn norming_points(&self) -> Option<Vec<Vector>> {
        let n = self.dim;
        if self.field.is_real() {
            let pts = self.ball_extreme_points().ok()?;
            let kept: Vec<Vector> = pts.into_iter().filter(first_nonzero_positive).collect();
            return (kept.len() <= ENUMERATION_CAP).then_some(kept);
        }
        match &self.kind {
            NormKind::PNorm(_) if n == 1 => Some(vec![unit(1, 0)]),
            NormKind::PNorm(p) if *p == 1.0 => Some((0..n).map(|k| unit(n, k)).collect()),
            NormKind::Sum(s) if s.kind == SumKind::L1 => {
                let a = s.left.norming_points()?;
                let b = s.right.norming_points()?;
                Some(
                    a.iter()
                        .map(|v| pad(v.as_slice(), 0, n))
                        .chain(b.iter().map(|v| pad(v.as_slice(), s.left.dim, n)))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// A finite set of unit functionals with `||x|| = max_j |phi_j(x)|`, when one exists.
    pub fn norming_functionals(&self) -> Option<Vec<Vector>> {
        let n = self.dim;
        match &self.kind {
            NormKind::PNorm(_) if n == 1 => Some(vec![unit(1, 0)]),
            NormKind::PNorm(p) if p.is_infinite() => Some((0..n).map(|k| unit(n, k)).collect()),
            NormKind::PNorm(p) if *p == 1.0 && self.field.is_real() && n <= 17 => {
                Some(sign_vectors(n, true))
            }
            NormKind::PNorm(_) => None,
            NormKind::Polyhedral(poly) => Some(poly.facets.iter().map(|f| real_vector(f)).collect()),
            NormKind::Sum(s) => {
                let a = s.left.norming_functionals()?;
                let b = s.right.norming_functionals()?;
                match s.kind {
                    SumKind::Linf => Some(
                        a.iter()
                            .map(|v| pad(v.as_slice(), 0, n))
                            .chain(b.iter().map(|v| pad(v.as_slice(), s.left.dim, n)))
                            .collect(),
                    ),
                    SumKind::L1 if self.field.is_real() => {
                        if 2 * a.len() * b.len() > ENUMERATION_CAP {
                            return None;
                        }
                        let mut out = Vec::with_capacity(2 * a.len() * b.len());
                        for u in &a {
                            for w in &b {
                                out.push(concat(u.as_slice(), w.as_slice()));
                                out.push(concat(u.as_slice(), (-w).as_slice()));
                            }
                        }
                        Some(out)
                    }
                    SumKind::L1 => None,
                }
            }
        }
    }

    /// A canonical unit vector, used wherever an arbitrary sphere point is needed.
    pub fn canonical_unit(&self) -> Vector {
        let e = unit(self.dim, 0);
        let n = self.norm_of(e.as_slice());
        e.unscale(n)
    }

    /// True when the norm is a maximum of finitely many moduli of linear
    /// functionals and the ball has finitely many extreme points up to scalars.
    pub fn is_polyhedral_type(&self) -> bool {
        self.field.is_real() && self.norming_points().is_some() && self.norming_functionals().is_some()
    }
}

pub(crate) fn argmax_abs(v: &[C64]) -> usize {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spaces() -> Vec<NormedSpace> {
        vec![
            NormedSpace::l1(3),
            NormedSpace::l2(3),
            NormedSpace::linf(3),
            NormedSpace::lp(3, 3.0, Field::Real).unwrap(),
            NormedSpace::complex_l2(2),
            NormedSpace::complex_l1(2),
            NormedSpace::complex_linf(2),
            NormedSpace::random_hexagon(7),
            NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::Linf).unwrap(),
            NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::L1).unwrap(),
        ]
    }

    #[test]
    fn trivial_norms() {
        let x = real_vector(&[3.0, -4.0]);
        assert_eq!(NormedSpace::l2(2).norm(&x).unwrap(), 5.0);
        assert_eq!(NormedSpace::l1(2).norm(&x).unwrap(), 7.0);
        assert_eq!(NormedSpace::linf(2).norm(&x).unwrap(), 4.0);
        let z = Vector::from_vec(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        assert!((NormedSpace::complex_l2(2).norm(&z).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = NormedSpace::l2(3).norm(&real_vector(&[1.0, 2.0])).unwrap_err();
        assert_eq!(err, Error::Dimension { expected: 3, got: 2 });
    }

    #[test]
    fn sum_norms() {
        let x = real_vector(&[3.0, 4.0, -2.0]);
        let linf = NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::Linf).unwrap();
        let l1 = NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::L1).unwrap();
        assert_eq!(linf.norm(&x).unwrap(), 5.0);
        assert_eq!(l1.norm(&x).unwrap(), 7.0);
        assert_eq!(linf.dual_norm(&x).unwrap(), 7.0);
        assert_eq!(l1.dual_norm(&x).unwrap(), 5.0);
    }

    #[test]
    fn square_as_polygon_matches_linf() {
        let sq = NormedSpace::symmetric_polygon(&[[1.0, -1.0], [1.0, 1.0]]).unwrap();
        let x = real_vector(&[0.3, -0.8]);
        assert!((sq.norm(&x).unwrap() - 0.8).abs() < 1e-15);
        assert!((sq.dual_norm(&x).unwrap() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn polytope_validation_rejects_asymmetric_lists() {
        let r = NormedSpace::polyhedral(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn extreme_point_counts() {
        assert_eq!(NormedSpace::l1(3).ball_extreme_points().unwrap().len(), 6);
        assert_eq!(NormedSpace::linf(3).ball_extreme_points().unwrap().len(), 8);
        assert_eq!(NormedSpace::random_hexagon(1).ball_extreme_points().unwrap().len(), 6);
        assert!(matches!(
            NormedSpace::l2(2).ball_extreme_points(),
            Err(Error::UnsupportedKind(_))
        ));
        assert!(matches!(
            NormedSpace::complex_l1(2).ball_extreme_points(),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn norming_functionals_reproduce_norm() {
        for s in spaces() {
            if let Some(fs) = s.norming_functionals() {
                for x in s.sample_sphere(50, 3) {
                    let m = fs.iter().fold(0.0f64, |m, f| m.max(pair(f.as_slice(), x.as_slice()).norm()));
                    assert!((m - 1.0).abs() < 1e-12, "{s:?}");
                }
            }
        }
    }

    #[test]
    fn sampled_points_are_unit() {
        for s in spaces() {
            let pts = s.sample_sphere(100, 11);
            assert_eq!(pts, s.sample_sphere(100, 11));
            for x in pts {
                assert!((s.norm(&x).unwrap() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn dual_norm_argmax_attains() {
        for s in spaces() {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..40 {
                let g = s.random_vector(&mut rng);
                let (v, x) = s.dual_norm_argmax(g.as_slice());
                assert!((s.norm(&x).unwrap() - 1.0).abs() < 1e-12, "{s:?}");
                let gx = pair(g.as_slice(), x.as_slice());
                assert!((gx.re - v).abs() < 1e-10 * (1.0 + v) && gx.im.abs() < 1e-10 * (1.0 + v), "{s:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn norm_axioms(a in proptest::collection::vec(-10.0f64..10.0, 3),
                       b in proptest::collection::vec(-10.0f64..10.0, 3),
                       t in -5.0f64..5.0) {
            for s in spaces() {
                if s.dim() != 3 || !s.field().is_real() {
                    continue;
                }
                let x = real_vector(&a);
                let y = real_vector(&b);
                let nx = s.norm(&x).unwrap();
                prop_assert!(nx >= 0.0);
                prop_assert!((s.norm(&(&x * C64::new(t, 0.0))).unwrap() - t.abs() * nx).abs() <= 1e-12 * (1.0 + nx * t.abs()));
                prop_assert!(s.norm(&(&x + &y)).unwrap() <= nx + s.norm(&y).unwrap() + 1e-12);
                // Pairing bounded by the product of the norm and its dual.
                let g = pair(y.as_slice(), x.as_slice()).norm();
                prop_assert!(g <= s.dual_norm(&y).unwrap() * nx * (1.0 + 1e-12) + 1e-12);
            }
        }

        #[test]
        fn complex_homogeneity(re in proptest::collection::vec(-3.0f64..3.0, 2),
                               im in proptest::collection::vec(-3.0f64..3.0, 2),
                               theta in 0.0f64..6.3) {
            let x = Vector::from_fn(2, |i, _| C64::new(re[i], im[i]));
            let w = C64::from_polar(1.0, theta);
            for s in [NormedSpace::complex_l1(2), NormedSpace::complex_l2(2), NormedSpace::complex_linf(2)] {
                let a = s.norm(&x).unwrap();
                let b = s.norm(&(&x * w)).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
            }
        }
    }
}
