use super::{conj_sign, pair, phase, unit, Field, NormKind, NormedSpace, SumKind, Vector, ACTIVE_TOL, C64};
use crate::error::{check_dim, Error, Result};
use crate::linalg::golden_max;
use std::f64::consts::PI;

/// A convex set of unit dual functionals, all norming one fixed vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Face {
    Singleton(Vector),
    /// Convex hull of finitely many functionals.
    FiniteExtremes(Vec<Vector>),
    /// `g_i` prescribed on `fixed`, `|g_i| <= bound` on `free`, zero elsewhere.
    BoxFace {
        dim: usize,
        fixed: Vec<(usize, C64)>,
        free: Vec<usize>,
        bound: f64,
    },
    /// The whole dual unit ball of a summand on which the base vector vanishes.
    DualBall(Box<NormedSpace>),
    Zero(usize),
    Product(Box<Face>, Box<Face>),
    Hull(Vec<Face>),
}

/// `D(x) = { f : f(x) = ||x||^2, ||f||_* = ||x|| }`, stored as `scale * face`
/// with `scale = ||x||`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualitySet {
    base: Vector,
    scale: f64,
    face: Face,
    field: Field,
}

impl Face {
    pub fn dim(&self) -> usize {
        match self {
            Face::Singleton(g) => g.len(),
            Face::FiniteExtremes(gs) => gs[0].len(),
            Face::BoxFace { dim, .. } => *dim,
            Face::DualBall(s) => s.dim(),
            Face::Zero(n) => *n,
            Face::Product(a, b) => a.dim() + b.dim(),
            Face::Hull(fs) => fs[0].dim(),
        }
    }

    /// `sup { Re(conj(dir) g(v)) : g in face }` for a unimodular `dir`.
    pub fn support(&self, v: &[C64], dir: C64) -> f64 {
        match self {
            Face::Singleton(g) => (dir.conj() * pair(g.as_slice(), v)).re,
            Face::FiniteExtremes(gs) => gs
                .iter()
                .map(|g| (dir.conj() * pair(g.as_slice(), v)).re)
                .fold(f64::NEG_INFINITY, f64::max),
            Face::BoxFace { fixed, free, bound, .. } => {
                let s: C64 = fixed.iter().map(|&(i, g)| g * v[i]).sum();
                (dir.conj() * s).re + bound * free.iter().map(|&i| v[i].norm()).sum::<f64>()
            }
            Face::DualBall(s) => s.norm_of(v),
            Face::Zero(_) => 0.0,
            Face::Product(a, b) => {
                let (va, vb) = v.split_at(a.dim());
                a.support(va, dir) + b.support(vb, dir)
            }
            Face::Hull(fs) => fs
                .iter()
                .map(|f| f.support(v, dir))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// An element of the face attaining `support(v, dir)`.
    pub fn maximizer(&self, v: &[C64], dir: C64) -> Vector {
        match self {
            Face::Singleton(g) => g.clone(),
            Face::FiniteExtremes(gs) => {
                let mut best = 0;
                let mut val = f64::NEG_INFINITY;
                for (k, g) in gs.iter().enumerate() {
                    let s = (dir.conj() * pair(g.as_slice(), v)).re;
                    if s > val {
                        val = s;
                        best = k;
                    }
                }
                gs[best].clone()
            }
            Face::BoxFace { dim, fixed, free, bound } => {
                let mut g = Vector::zeros(*dim);
                for &(i, z) in fixed {
                    g[i] = z;
                }
                for &i in free {
                    g[i] = dir * conj_sign(v[i]) * *bound;
                }
                g
            }
            Face::DualBall(s) => {
                if s.norm_of(v) == 0.0 {
                    Vector::zeros(s.dim())
                } else {
                    let face = unit_face(s, v);
                    face.maximizer(v, C64::new(1.0, 0.0)) * dir
                }
            }
            Face::Zero(n) => Vector::zeros(*n),
            Face::Product(a, b) => {
                let (va, vb) = v.split_at(a.dim());
                let ga = a.maximizer(va, dir);
                let gb = b.maximizer(vb, dir);
                super::concat(ga.as_slice(), gb.as_slice())
            }
            Face::Hull(fs) => {
                let mut best = 0;
                let mut val = f64::NEG_INFINITY;
                for (k, f) in fs.iter().enumerate() {
                    let s = f.support(v, dir);
                    if s > val {
                        val = s;
                        best = k;
                    }
                }
                fs[best].maximizer(v, dir)
            }
        }
    }

    /// Unimodular direction maximising `support(v, dir)`.
    fn best_direction(&self, v: &[C64], field: Field) -> C64 {
        let one = C64::new(1.0, 0.0);
        if field.is_real() {
            return if self.support(v, one) >= self.support(v, -one) { one } else { -one };
        }
        match self {
            Face::Singleton(g) => phase(pair(g.as_slice(), v)),
            Face::FiniteExtremes(gs) => {
                let vals: Vec<C64> = gs.iter().map(|g| pair(g.as_slice(), v)).collect();
                phase(vals[super::argmax_abs(&vals)])
            }
            Face::BoxFace { fixed, .. } => phase(fixed.iter().map(|&(i, g)| g * v[i]).sum()),
            Face::DualBall(_) | Face::Zero(_) => one,
            Face::Product(..) | Face::Hull(_) => {
                let h = |t: f64| self.support(v, C64::from_polar(1.0, t));
                let m = 64;
                let step = 2.0 * PI / m as f64;
                let mut grid: Vec<(f64, f64)> = (0..m).map(|k| (h(k as f64 * step), k as f64 * step)).collect();
                grid.sort_by(|a, b| b.0.total_cmp(&a.0));
                let mut best = (grid[0].0, grid[0].1);
                for &(_, t0) in grid.iter().take(3) {
                    let (t, val) = golden_max(&h, t0 - step, t0 + step, 80);
                    if val > best.0 {
                        best = (val, t);
                    }
                }
                C64::from_polar(1.0, best.1)
            }
        }
    }

    /// `sup { |g(v)| : g in face }` and a maximising element.
    pub fn sup_abs(&self, v: &[C64], field: Field) -> (f64, Vector) {
        let dir = self.best_direction(v, field);
        let g = self.maximizer(v, dir);
        (pair(g.as_slice(), v).norm(), g)
    }
}

/// The set of unit functionals `g` with `g(x) = ||x||`; `x` must be non-zero.
pub(crate) fn unit_face(space: &NormedSpace, x: &[C64]) -> Face {
    let n = space.dim();
    let nx = space.norm_of(x);
    match space.kind() {
        NormKind::PNorm(_) if n == 1 => Face::Singleton(Vector::from_element(1, conj_sign(x[0]))),
        NormKind::PNorm(p) if *p == 1.0 => {
            let mut fixed = Vec::new();
            let mut free = Vec::new();
            for (i, z) in x.iter().enumerate() {
                if z.norm() > 1e-15 * nx {
                    fixed.push((i, conj_sign(*z)));
                } else {
                    free.push(i);
                }
            }
            Face::BoxFace { dim: n, fixed, free, bound: 1.0 }
        }
        NormKind::PNorm(p) if p.is_infinite() => Face::FiniteExtremes(
            x.iter()
                .enumerate()
                .filter(|(_, z)| z.norm() >= (1.0 - ACTIVE_TOL) * nx)
                .map(|(k, z)| unit(n, k) * conj_sign(*z))
                .collect(),
        ),
        NormKind::PNorm(p) => Face::Singleton(Vector::from_iterator(
            n,
            x.iter().map(|z| conj_sign(*z) * (z.norm() / nx).powf(p - 1.0)),
        )),
        NormKind::Polyhedral(poly) => Face::FiniteExtremes(
            poly.facets
                .iter()
                .filter_map(|f| {
                    let f = super::real_vector(f);
                    let s = pair(f.as_slice(), x);
                    (s.norm() >= (1.0 - ACTIVE_TOL) * nx).then(|| f * conj_sign(s))
                })
                .collect(),
        ),
        NormKind::Sum(s) => {
            let (a, b) = x.split_at(s.left.dim());
            let (na, nb) = (s.left.norm_of(a), s.right.norm_of(b));
            match s.kind {
                SumKind::L1 => {
                    let fa = if na > 0.0 { unit_face(&s.left, a) } else { Face::DualBall(Box::new(s.left.clone())) };
                    let fb = if nb > 0.0 { unit_face(&s.right, b) } else { Face::DualBall(Box::new(s.right.clone())) };
                    Face::Product(Box::new(fa), Box::new(fb))
                }
                SumKind::Linf => {
                    let mut parts = Vec::new();
                    if na >= (1.0 - ACTIVE_TOL) * nx {
                        parts.push(Face::Product(
                            Box::new(unit_face(&s.left, a)),
                            Box::new(Face::Zero(s.right.dim())),
                        ));
                    }
                    if nb >= (1.0 - ACTIVE_TOL) * nx {
                        parts.push(Face::Product(
                            Box::new(Face::Zero(s.left.dim())),
                            Box::new(unit_face(&s.right, b)),
                        ));
                    }
                    if parts.len() == 1 {
                        parts.pop().unwrap()
                    } else {
                        Face::Hull(parts)
                    }
                }
            }
        }
    }
}

impl DualitySet {
    pub(crate) fn new(space: &NormedSpace, x: &Vector) -> Result<Self> {
        let scale = space.norm_of(x.as_slice());
        if scale == 0.0 {
            return Err(Error::Domain("the duality set of the zero vector is not used".into()));
        }
        Ok(Self {
            base: x.clone(),
            scale,
            face: unit_face(space, x.as_slice()),
            field: space.field(),
        })
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn face(&self) -> &Face {
        &self.face
    }

    /// `sup { |f(v)| : f in D(x) }`.
    pub fn sup_abs(&self, v: &Vector) -> Result<f64> {
        check_dim(self.base.len(), v.len())?;
        Ok(self.sup_abs_of(v.as_slice()))
    }

    /// The supremum together with a functional of `D(x)` attaining it.
    pub fn argmax_abs(&self, v: &Vector) -> Result<(f64, Vector)> {
        check_dim(self.base.len(), v.len())?;
        Ok(self.argmax_of(v.as_slice()))
    }

    pub(crate) fn sup_abs_of(&self, v: &[C64]) -> f64 {
        self.argmax_of(v).0
    }

    pub(crate) fn argmax_of(&self, v: &[C64]) -> (f64, Vector) {
        let (s, g) = self.face.sup_abs(v, self.field);
        (self.scale * s, g.scale(self.scale))
    }

    /// Some element of `D(x)`.
    pub fn representative(&self) -> Vector {
        let zero = vec![C64::new(0.0, 0.0); self.base.len()];
        self.face.maximizer(&zero, C64::new(1.0, 0.0)).scale(self.scale)
    }

    /// Membership test up to a relative tolerance.
    pub fn contains(&self, space: &NormedSpace, f: &Vector, tol: f64) -> bool {
        let n = self.scale;
        let fx = pair(f.as_slice(), self.base.as_slice());
        (fx - C64::new(n * n, 0.0)).norm() <= tol * (1.0 + n * n)
            && (space.dual_norm_of(f.as_slice()) - n).abs() <= tol * (1.0 + n)
    }
}
