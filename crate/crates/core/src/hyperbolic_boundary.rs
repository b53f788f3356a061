//! Ideal boundaries of real and complex hyperbolic space.
//!
//! Both spaces use the form `diag(1, …, 1, −1)` on `𝕂^{n+1}`. A point of
//! `∂Hⁿ_ℝ = S^{n−1}` is stored as its unit direction `d` and lifts to the
//! null vector `(d, 1)`; a point of `∂Hⁿ_ℂ = S^{2n−1}` is stored as a unit
//! null lift whose last coordinate is positive real. Interior points of
//! `Hⁿ_ℝ` live on the upper sheet of the hyperboloid `q(x) = −1`.
//!
//! The identification `∂H³ ≅ ℙ¹(ℂ)` is stereographic projection from the
//! north pole, `(x, y, z) ↦ (x + iy)/(1 − z)`, and `∂H² ≅ ℙ¹(ℝ)` is its
//! restriction to the great circle `y = 0`, written as `(x, z) ↦ x/(1 − z)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::projective::{self, ExtendedScalar, Field, ProjectivePoint, EPS_DIST};
use crate::rng::{gaussian, unit_vector};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// `q(u, v) = Σ_{i<n} u_i v_i − u_n v_n`.
pub fn lorentz(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let n = u.len() - 1;
    u.rows(0, n).dot(&v.rows(0, n)) - u[n] * v[n]
}

/// `⟨u, v⟩ = Σ_{i<n} u_i v̄_i − u_n v̄_n`.
pub fn hermitian(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    let n = u.len() - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += u[i] * v[i].conj();
    }
    acc - u[n] * v[n].conj()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealBoundaryPoint {
    direction: DVector<f64>,
}

impl RealBoundaryPoint {
    pub fn new(direction: impl Into<Vec<f64>>) -> Result<Self> {
        let v = DVector::from_vec(direction.into());
        let norm = v.norm();
        if v.len() < 2 || !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidConfig(
                "boundary direction must be a nonzero vector of length ≥ 2".into(),
            ));
        }
        Ok(Self { direction: v / norm })
    }

    /// Point `(cos θ, sin θ)` of `∂H² = S¹`.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            direction: DVector::from_vec(vec![theta.cos(), theta.sin()]),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        Self {
            direction: DVector::from_vec(unit_vector(rng, dim)),
        }
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    /// Dimension of the ambient `ℝⁿ`, so this is a point of `∂Hⁿ_ℝ`.
    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// Angle on `S¹` in `(−π, π]`; only meaningful for `dim() == 2`.
    pub fn angle(&self) -> f64 {
        self.direction[1].atan2(self.direction[0])
    }

    /// The null vector `(d, 1)`.
    pub fn lift(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n + 1, |i, _| if i < n { self.direction[i] } else { 1.0 })
    }

    pub fn chordal_distance(&self, other: &Self) -> f64 {
        (&self.direction - &other.direction).norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBoundaryPoint {
    lift: DVector<Complex64>,
}

impl ComplexBoundaryPoint {
    /// Point of `∂Hⁿ_ℂ` from ball coordinates `w ∈ S^{2n−1} ⊂ ℂⁿ` (rescaled to unit norm).
    pub fn from_sphere(w: impl Into<Vec<Complex64>>) -> Result<Self> {
        let w = DVector::from_vec(w.into());
        let norm = w.norm();
        if w.is_empty() || !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidConfig("ball coordinates must be a nonzero vector".into()));
        }
        let n = w.len();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let lift = DVector::from_fn(n + 1, |i, _| {
            if i < n {
                w[i] * (s / norm)
            } else {
                Complex64::new(s, 0.0)
            }
        });
        Ok(Self { lift })
    }

    /// Normalizes an arbitrary null lift.
    pub fn from_lift(v: DVector<Complex64>) -> Result<Self> {
        let n = v.len().saturating_sub(1);
        let norm = v.norm();
        if n == 0 || !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidConfig("null lift must be a nonzero vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        if hermitian(&v, &v).norm() > 1e-10 {
            return Err(Error::InvalidConfig("lift is not null for the Hermitian form".into()));
        }
        let last = v[n];
        if last.norm() < 1e-12 {
            return Err(Error::InvalidConfig("null lift has vanishing last coordinate".into()));
        }
        let phase = last.conj() / last.norm();
        Ok(Self { lift: v * phase })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        let raw = unit_vector(rng, 2 * dim);
        let w: Vec<Complex64> = (0..dim).map(|i| Complex64::new(raw[2 * i], raw[2 * i + 1])).collect();
        Self::from_sphere(w).expect("unit vector")
    }

    pub fn lift(&self) -> &DVector<Complex64> {
        &self.lift
    }

    pub fn dim(&self) -> usize {
        self.lift.len() - 1
    }

    /// Ball coordinates `w = z_{<n} / z_n`, a unit vector of `ℂⁿ`.
    pub fn ball_coords(&self) -> DVector<Complex64> {
        let n = self.dim();
        let last = self.lift[n];
        DVector::from_fn(n, |i, _| self.lift[i] / last)
    }

    pub fn chordal_distance(&self, other: &Self) -> f64 {
        (self.ball_coords() - other.ball_coords()).norm()
    }
}

/// Point of `Hⁿ_ℝ` on the upper sheet of the hyperboloid.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicPoint {
    lift: DVector<f64>,
}

impl HyperbolicPoint {
    pub fn new(lift: DVector<f64>) -> Result<Self> {
        let n = lift.len().saturating_sub(1);
        if n == 0 || (lorentz(&lift, &lift) + 1.0).abs() > 1e-10 || lift[n] <= 0.0 {
            return Err(Error::InvalidConfig("point is not on the upper hyperboloid sheet".into()));
        }
        Ok(Self { lift })
    }

    /// Rescales a future timelike vector onto the hyperboloid.
    pub fn from_timelike(v: DVector<f64>) -> Result<Self> {
        let q = lorentz(&v, &v);
        let n = v.len().saturating_sub(1);
        if n == 0 || !(q < 0.0) || v[n] <= 0.0 {
            return Err(Error::InvalidConfig("vector is not future timelike".into()));
        }
        Ok(Self { lift: v / (-q).sqrt() })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            lift: DVector::from_fn(n + 1, |i, _| if i == n { 1.0 } else { 0.0 }),
        }
    }

    pub fn lift(&self) -> &DVector<f64> {
        &self.lift
    }

    pub fn dim(&self) -> usize {
        self.lift.len() - 1
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d = &self.lift - &other.lift;
        2.0 * (0.5 * lorentz(&d, &d).max(0.0).sqrt()).asinh()
    }
}

/// An isometry of `Hⁿ_ℝ` as a matrix of `O(n, 1)` preserving the upper sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct RealIsometry {
    matrix: DMatrix<f64>,
}

impl RealIsometry {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let n1 = matrix.nrows();
        if n1 < 3 || matrix.ncols() != n1 {
            return Err(Error::InvalidConfig("isometry must be a square matrix of size ≥ 3".into()));
        }
        let j = DMatrix::from_fn(n1, n1, |r, c| match (r == c, r + 1 == n1) {
            (true, false) => 1.0,
            (true, true) => -1.0,
            _ => 0.0,
        });
        let defect = (matrix.transpose() * &j * &matrix - &j).amax();
        if defect > 1e-8 * matrix.amax().powi(2).max(1.0) || matrix[(n1 - 1, n1 - 1)] <= 0.0 {
            return Err(Error::InvalidConfig("matrix does not preserve the Lorentz form".into()));
        }
        Ok(Self { matrix })
    }

    /// Random element: rotation, boost of Gaussian rapidity along the first axis, rotation.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let rot = |rng: &mut R| {
            let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
            let q = g.qr().q();
            DMatrix::from_fn(n + 1, n + 1, |r, c| match (r < n, c < n) {
                (true, true) => q[(r, c)],
                (false, false) => 1.0,
                _ => 0.0,
            })
        };
        let t = gaussian(rng);
        let mut boost = DMatrix::identity(n + 1, n + 1);
        boost[(0, 0)] = t.cosh();
        boost[(n, n)] = t.cosh();
        boost[(0, n)] = t.sinh();
        boost[(n, 0)] = t.sinh();
        let a = rot(rng);
        let b = rot(rng);
        Self { matrix: a * boost * b }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply_boundary(&self, p: &RealBoundaryPoint) -> RealBoundaryPoint {
        let v = &self.matrix * p.lift();
        let n = p.dim();
        RealBoundaryPoint::new(v.rows(0, n).iter().map(|x| x / v[n]).collect::<Vec<_>>())
            .expect("isometries send null rays to null rays")
    }

    pub fn apply_point(&self, p: &HyperbolicPoint) -> HyperbolicPoint {
        HyperbolicPoint::from_timelike(&self.matrix * p.lift()).expect("isometries preserve the hyperboloid")
    }
}

/// An isometry of `Hⁿ_ℂ` as a matrix of `U(n, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexIsometry {
    matrix: DMatrix<Complex64>,
}

impl ComplexIsometry {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let unitary = |rng: &mut R| {
            let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
            let q = g.qr().q();
            let phase = Complex64::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
            DMatrix::from_fn(n + 1, n + 1, |r, c| match (r < n, c < n) {
                (true, true) => q[(r, c)],
                (false, false) => phase,
                _ => Complex64::new(0.0, 0.0),
            })
        };
        let t = gaussian(rng);
        let mut boost = DMatrix::<Complex64>::identity(n + 1, n + 1);
        boost[(0, 0)] = Complex64::new(t.cosh(), 0.0);
        boost[(n, n)] = Complex64::new(t.cosh(), 0.0);
        boost[(0, n)] = Complex64::new(t.sinh(), 0.0);
        boost[(n, 0)] = Complex64::new(t.sinh(), 0.0);
        let a = unitary(rng);
        let b = unitary(rng);
        Self { matrix: a * boost * b }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, p: &ComplexBoundaryPoint) -> ComplexBoundaryPoint {
        ComplexBoundaryPoint::from_lift(&self.matrix * p.lift()).expect("isometries preserve null lines")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint {
    Real(RealBoundaryPoint),
    Complex(ComplexBoundaryPoint),
}

impl BoundaryPoint {
    fn model(&self) -> (bool, usize) {
        match self {
            BoundaryPoint::Real(p) => (false, p.dim()),
            BoundaryPoint::Complex(p) => (true, p.dim()),
        }
    }

    fn chordal_distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (BoundaryPoint::Real(a), BoundaryPoint::Real(b)) => a.chordal_distance(b),
            (BoundaryPoint::Complex(a), BoundaryPoint::Complex(b)) => a.chordal_distance(b),
            _ => unreachable!("models are checked before distances"),
        }
    }
}

impl From<RealBoundaryPoint> for BoundaryPoint {
    fn from(p: RealBoundaryPoint) -> Self {
        BoundaryPoint::Real(p)
    }
}

impl From<ComplexBoundaryPoint> for BoundaryPoint {
    fn from(p: ComplexBoundaryPoint) -> Self {
        BoundaryPoint::Complex(p)
    }
}

/// Rank-one genericity: all pairwise chordal distances exceed `tol`.
pub fn is_generic_tuple(points: &[BoundaryPoint], tol: f64) -> Result<bool> {
    if let Some(first) = points.first() {
        let model = first.model();
        if points.iter().any(|p| p.model() != model) {
            return Err(Error::MixedModels);
        }
    }
    Ok(points
        .iter()
        .enumerate()
        .all(|(i, p)| points[i + 1..].iter().all(|q| p.chordal_distance(q) > tol)))
}

fn ensure_distinct_by<T>(points: &[&T], dist: impl Fn(&T, &T) -> f64) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist(points[i], points[j]);
            if d < EPS_DIST {
                return Err(Error::DegenerateTuple(format!(
                    "points {i} and {j} coincide (chordal distance {d:e})"
                )));
            }
        }
    }
    Ok(())
}

fn same_dim(dims: &[usize]) -> Result<()> {
    if dims.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::MixedModels);
    }
    Ok(())
}

/// Cartan's angular invariant `arg(−⟨x,y⟩⟨y,z⟩⟨z,x⟩)`, in `[−π/2, π/2]`.
pub fn cartan_invariant(
    x: &ComplexBoundaryPoint,
    y: &ComplexBoundaryPoint,
    z: &ComplexBoundaryPoint,
) -> Result<f64> {
    same_dim(&[x.dim(), y.dim(), z.dim()])?;
    ensure_distinct_by(&[x, y, z], ComplexBoundaryPoint::chordal_distance)?;
    let triple = hermitian(x.lift(), y.lift()) * hermitian(y.lift(), z.lift()) * hermitian(z.lift(), x.lift());
    Ok((-triple).arg())
}

/// The point of the ideal triangle `xyz` fixed by all its symmetries.
///
/// Lifts are rescaled so that all three pairings equal `−1`; their sum is
/// then invariant under every permutation of the vertices. In the upper
/// half-plane this is the incenter `1/2 + i√3/2` of `(0, 1, ∞)`.
pub fn barycenter_ideal_triangle(
    x: &RealBoundaryPoint,
    y: &RealBoundaryPoint,
    z: &RealBoundaryPoint,
) -> Result<HyperbolicPoint> {
    same_dim(&[x.dim(), y.dim(), z.dim()])?;
    ensure_distinct_by(&[x, y, z], RealBoundaryPoint::chordal_distance)?;
    // canonical order so every permutation of the input runs the same arithmetic
    let mut v = [x, y, z];
    v.sort_by(|a, b| {
        a.direction
            .iter()
            .zip(b.direction.iter())
            .map(|(s, t)| s.total_cmp(t))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let lifts: Vec<DVector<f64>> = v.iter().map(|p| p.lift()).collect();
    let a = -lorentz(&lifts[1], &lifts[2]);
    let b = -lorentz(&lifts[0], &lifts[2]);
    let c = -lorentz(&lifts[0], &lifts[1]);
    let scales = [(a / (b * c)).sqrt(), (b / (a * c)).sqrt(), (c / (a * b)).sqrt()];
    let sum = &lifts[0] * scales[0] + &lifts[1] * scales[1] + &lifts[2] * scales[2];
    HyperbolicPoint::from_timelike(sum).map_err(|_| Error::DegenerateTuple("ideal triangle collapsed".into()))
}

/// Upper half-plane to hyperboloid, extending the stereographic boundary chart.
pub fn hyperboloid_from_upper_half_plane(z: Complex64) -> Result<HyperbolicPoint> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidConfig("point is not in the upper half-plane".into()));
    }
    let i = Complex64::i();
    let w = i * (z - i) / (z + i);
    let r2 = w.norm_sqr();
    let lift = DVector::from_vec(vec![2.0 * w.re, 2.0 * w.im, 1.0 + r2]) / (1.0 - r2);
    HyperbolicPoint::from_timelike(lift)
}

/// `∂H² = S¹ → ℙ¹(ℝ)`, `(x, z) ↦ x/(1 − z)`.
pub fn projective_from_circle(p: &RealBoundaryPoint) -> Result<ProjectivePoint> {
    if p.dim() != 2 {
        return Err(Error::InvalidConfig("expected a point of S¹".into()));
    }
    let (x, z) = (p.direction[0], p.direction[1]);
    let r = |t: f64| Complex64::new(t, 0.0);
    if z < 0.0 {
        ProjectivePoint::from_homogeneous(r(x), r(1.0 - z), Field::Real)
    } else {
        ProjectivePoint::from_homogeneous(r(1.0 + z), r(x), Field::Real)
    }
}

pub fn circle_from_projective(p: &ProjectivePoint) -> Result<RealBoundaryPoint> {
    if p.field() != Field::Real {
        return Err(Error::InvalidConfig("expected a point of ℙ¹(ℝ)".into()));
    }
    let [a, b] = p.coords();
    let (a, b) = (a.re, b.re);
    RealBoundaryPoint::new(vec![2.0 * a * b, a * a - b * b])
}

/// `∂H³ = S² → ℙ¹(ℂ)`, `(x, y, z) ↦ (x + iy)/(1 − z)`.
pub fn projective_from_sphere(p: &RealBoundaryPoint) -> Result<ProjectivePoint> {
    if p.dim() != 3 {
        return Err(Error::InvalidConfig("expected a point of S²".into()));
    }
    let d = &p.direction;
    let (x, y, z) = (d[0], d[1], d[2]);
    if z < 0.0 {
        ProjectivePoint::from_homogeneous(Complex64::new(x, y), Complex64::new(1.0 - z, 0.0), Field::Complex)
    } else {
        ProjectivePoint::from_homogeneous(Complex64::new(1.0 + z, 0.0), Complex64::new(x, -y), Field::Complex)
    }
}

pub fn sphere_from_projective(p: &ProjectivePoint) -> Result<RealBoundaryPoint> {
    let [a, b] = p.coords();
    let ab = a * b.conj();
    RealBoundaryPoint::new(vec![2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
}

/// A 4-tuple of `∂Hⁿ_ℝ` moved into the coordinate `∂H³`.
#[derive(Clone, Debug)]
pub struct H3Restriction {
    /// The tuple as points of `S² = ∂H³`.
    pub points: [RealBoundaryPoint; 4],
    /// Columns `s₁, s₂, s₃, t`: a Lorentz-orthonormal frame of `ℝ^{n+1}`
    /// vectors whose span contains the lifts (`s_k = 0` beyond the rank).
    pub frame: DMatrix<f64>,
    /// Dimension of the span of the four lifts (3 or 4).
    pub rank: usize,
    /// Original lift `i` equals `scales[i]` times the image of the output lift.
    pub scales: [f64; 4],
}

impl H3Restriction {
    pub fn projective_points(&self) -> Result<[ProjectivePoint; 4]> {
        let p = |i: usize| projective_from_sphere(&self.points[i]);
        Ok([p(0)?, p(1)?, p(2)?, p(3)?])
    }

    /// Cross ratio of the restricted tuple in the `ℙ¹(ℂ)` chart.
    pub fn cross_ratio(&self) -> Result<ExtendedScalar> {
        let [a, b, c, d] = self.projective_points()?;
        projective::cross_ratio(&a, &b, &c, &d)
    }

    /// Same restriction composed with a reflection of `H³` if needed, so
    /// that the cross ratio has nonnegative imaginary part.
    ///
    /// For `n ≥ 4` the orientation of the slice is not determined by the
    /// tuple, so this is the canonical form under all admissible embeddings.
    pub fn oriented(&self) -> Result<Self> {
        let z = self.cross_ratio()?;
        if z.finite().map(|z| z.im >= 0.0).unwrap_or(true) {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        for p in out.points.iter_mut() {
            let mut d = p.direction.clone();
            d[1] = -d[1];
            *p = RealBoundaryPoint { direction: d };
        }
        let mut col = out.frame.column_mut(1);
        col.neg_mut();
        Ok(out)
    }
}

/// Moves four boundary points of `∂Hⁿ_ℝ` into a copy of `∂H³`.
///
/// The span `V` of the null lifts has signature `(r−1, 1)` for distinct
/// points. A Lorentz-orthonormal frame of `V` is chosen by Gram–Schmidt
/// on the projections of `e_n, e_0, e_1, …` to `V`, so a tuple already in
/// the coordinate `∂H³` comes back unchanged.
pub fn restrict_to_h3(points: [&RealBoundaryPoint; 4]) -> Result<H3Restriction> {
    let n = points[0].dim();
    same_dim(&points.iter().map(|p| p.dim()).collect::<Vec<_>>())?;
    ensure_distinct_by(&points, RealBoundaryPoint::chordal_distance)?;

    let lifts: Vec<DVector<f64>> = points.iter().map(|p| p.lift()).collect();
    let m = DMatrix::from_columns(&lifts);
    let svd = SVD::new(m, true, false);
    let sigma_max = svd.singular_values[0];
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * sigma_max)
        .count();
    if !(3..=4).contains(&rank) {
        return Err(Error::SignatureError(format!("lifts span a subspace of rank {rank}")));
    }
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let basis = u.columns(0, rank).into_owned();

    let mut j = DMatrix::<f64>::identity(n + 1, n + 1);
    j[(n, n)] = -1.0;
    let gram = basis.transpose() * &j * &basis;
    let eig = SymmetricEigen::new(gram);
    let lam_max = eig.eigenvalues.amax();
    let negatives = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    if negatives != 1 || eig.eigenvalues.iter().any(|l| l.abs() < RANK_TOL * lam_max) {
        return Err(Error::SignatureError(format!(
            "restricted form has eigenvalues {:?}",
            eig.eigenvalues.as_slice()
        )));
    }
    // Lorentz-orthonormal frame of V from the eigenbasis
    let eig_frame: Vec<(DVector<f64>, f64)> = (0..rank)
        .map(|k| {
            let l = eig.eigenvalues[k];
            (&basis * eig.eigenvectors.column(k) / l.abs().sqrt(), l.signum())
        })
        .collect();
    let project = |v: &DVector<f64>| -> DVector<f64> {
        eig_frame
            .iter()
            .fold(DVector::zeros(n + 1), |acc, (b, eps)| acc + b * (eps * lorentz(v, b)))
    };
    let unit = |i: usize| DVector::from_fn(n + 1, |r, _| if r == i { 1.0 } else { 0.0 });

    let mut time = project(&unit(n));
    let qt = lorentz(&time, &time);
    if qt < -1e-3 {
        time /= (-qt).sqrt();
    } else {
        time = eig_frame
            .iter()
            .find(|(_, eps)| *eps < 0.0)
            .map(|(b, _)| b.clone())
            .expect("one negative eigenvalue");
    }
    if time[n] < 0.0 {
        time = -time;
    }

    let mut space: Vec<DVector<f64>> = Vec::with_capacity(3);
    let candidates = (0..n)
        .map(|i| project(&unit(i)))
        .chain(eig_frame.iter().filter(|(_, e)| *e > 0.0).map(|(b, _)| b.clone()));
    for c in candidates {
        if space.len() + 1 == rank {
            break;
        }
        let mut w = &c + &time * lorentz(&c, &time);
        for s in &space {
            w -= s * lorentz(&w, s);
        }
        let q = lorentz(&w, &w);
        if q > 1e-8 {
            space.push(w / q.sqrt());
        }
    }
    if space.len() + 1 != rank {
        return Err(Error::SignatureError("could not complete a spacelike frame".into()));
    }

    let mut frame = DMatrix::zeros(n + 1, 4);
    for (k, s) in space.iter().enumerate() {
        frame.set_column(k, s);
    }
    frame.set_column(3, &time);

    let mut scales = [0.0; 4];
    let mut out = Vec::with_capacity(4);
    for (i, l) in lifts.iter().enumerate() {
        let c0 = -lorentz(l, &time);
        if !(c0 > 0.0) {
            return Err(Error::SignatureError("lift is not future directed in the frame".into()));
        }
        let mut coords = [0.0; 3];
        for (k, s) in space.iter().enumerate() {
            coords[k] = lorentz(l, s) / c0;
        }
        scales[i] = c0;
        out.push(RealBoundaryPoint::new(coords.to_vec())?);
    }
    let points: [RealBoundaryPoint; 4] = out.try_into().expect("four points");
    Ok(H3Restriction {
        points,
        frame,
        rank,
        scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn genericity_examples() {
        let a: BoundaryPoint = RealBoundaryPoint::from_angle(0.0).into();
        let b: BoundaryPoint = RealBoundaryPoint::from_angle(PI).into();
        assert!(is_generic_tuple(&[a.clone(), b.clone()], 1e-9).unwrap());
        assert!(!is_generic_tuple(&[a.clone(), b.clone(), a.clone()], 1e-9).unwrap());

        let tol = 1e-3;
        // chord 2 sin(θ/2) = tol/2
        let theta = 2.0 * (tol / 4.0f64).asin();
        let near: BoundaryPoint = RealBoundaryPoint::from_angle(theta).into();
        assert!(!is_generic_tuple(&[a.clone(), near], tol).unwrap());

        let z: BoundaryPoint = ComplexBoundaryPoint::from_sphere(vec![c(1.0, 0.0)]).unwrap().into();
        assert!(matches!(is_generic_tuple(&[a, z], 1e-9), Err(Error::MixedModels)));
    }

    #[test]
    fn cartan_of_totally_real_triple_is_zero() {
        let p = |v: Vec<f64>| ComplexBoundaryPoint::from_sphere(v.into_iter().map(|x| c(x, 0.0)).collect::<Vec<_>>()).unwrap();
        let a = cartan_invariant(&p(vec![1.0, 0.0]), &p(vec![0.0, 1.0]), &p(vec![-0.6, -0.8])).unwrap();
        assert!(a.abs() <= 1e-10, "{a}");
    }

    #[test]
    fn cartan_of_chain_triple_is_extremal() {
        let p = |t: f64| ComplexBoundaryPoint::from_sphere(vec![Complex64::from_polar(1.0, t), c(0.0, 0.0)]).unwrap();
        let a = cartan_invariant(&p(0.0), &p(2.0), &p(4.0)).unwrap();
        assert!((a.abs() - FRAC_PI_2).abs() <= 1e-10, "{a}");
        let b = cartan_invariant(&p(2.0), &p(0.0), &p(4.0)).unwrap();
        assert!((a + b).abs() <= 1e-10);
    }

    #[test]
    fn cartan_rejects_repeated_points() {
        let p = ComplexBoundaryPoint::from_sphere(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let q = ComplexBoundaryPoint::from_sphere(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(cartan_invariant(&p, &q, &p), Err(Error::DegenerateTuple(_))));
    }

    #[test]
    fn barycenter_of_zero_one_infinity_is_the_incenter() {
        let circle = |x: ProjectivePoint| circle_from_projective(&x).unwrap();
        let a = circle(ProjectivePoint::real(0.0));
        let b = circle(ProjectivePoint::real(1.0));
        let inf = circle(ProjectivePoint::infinity(Field::Real));
        let bar = barycenter_ideal_triangle(&a, &b, &inf).unwrap();
        let incenter = hyperboloid_from_upper_half_plane(c(0.5, 3f64.sqrt() / 2.0)).unwrap();
        assert!(bar.distance(&incenter) < 1e-7, "{}", bar.distance(&incenter));
        assert!((bar.lift() - incenter.lift()).amax() < 1e-12);
    }

    #[test]
    fn barycenter_is_symmetric_bitwise() {
        let mut rng = substream(11, 0);
        let v: Vec<_> = (0..3).map(|_| RealBoundaryPoint::random(&mut rng, 4)).collect();
        let base = barycenter_ideal_triangle(&v[0], &v[1], &v[2]).unwrap();
        for (i, j, k) in [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            assert_eq!(barycenter_ideal_triangle(&v[i], &v[j], &v[k]).unwrap(), base);
        }
    }

    #[test]
    fn stereographic_charts_invert_each_other() {
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(-2.5, 0.75), c(1e5, -3.0)] {
            let p = ProjectivePoint::complex(z);
            let back = projective_from_sphere(&sphere_from_projective(&p).unwrap()).unwrap();
            assert!(back.chordal_distance(&p) < 1e-12);
        }
        let inf = ProjectivePoint::infinity(Field::Complex);
        let north = sphere_from_projective(&inf).unwrap();
        assert!((north.direction()[2] - 1.0).abs() < 1e-15);
        for t in [-3.0, 0.0, 0.5, 7.0] {
            let p = ProjectivePoint::real(t);
            let back = projective_from_circle(&circle_from_projective(&p).unwrap()).unwrap();
            assert!(back.chordal_distance(&p) < 1e-12);
        }
    }

    #[test]
    fn restriction_of_coordinate_h3_tuple_is_identity() {
        let mut rng = substream(5, 0);
        let pts: Vec<RealBoundaryPoint> = (0..4)
            .map(|_| {
                let d = unit_vector(&mut rng, 3);
                RealBoundaryPoint::new(vec![d[0], d[1], d[2], 0.0, 0.0]).unwrap()
            })
            .collect();
        let r = restrict_to_h3([&pts[0], &pts[1], &pts[2], &pts[3]]).unwrap();
        assert_eq!(r.rank, 4);
        for (p, q) in pts.iter().zip(r.points.iter()) {
            assert!((p.direction().rows(0, 3) - q.direction()).amax() < 1e-12);
        }
    }

    #[test]
    fn restriction_of_planar_tuple_lands_in_h2() {
        let mut rng = substream(6, 0);
        let plane = [unit_vector(&mut rng, 5), unit_vector(&mut rng, 5)];
        // four points on the great circle spanned by two orthonormalized directions
        let a = DVector::from_vec(plane[0].clone());
        let mut b = DVector::from_vec(plane[1].clone());
        b -= &a * a.dot(&b);
        b /= b.norm();
        let pts: Vec<RealBoundaryPoint> = [0.3, 1.4, 2.9, 4.4]
            .iter()
            .map(|t: &f64| RealBoundaryPoint::new((&a * t.cos() + &b * t.sin()).as_slice().to_vec()).unwrap())
            .collect();
        let r = restrict_to_h3([&pts[0], &pts[1], &pts[2], &pts[3]]).unwrap();
        assert_eq!(r.rank, 3);
        for p in &r.points {
            assert!(p.direction()[2].abs() < 1e-12);
        }
        let z = r.cross_ratio().unwrap().finite().unwrap();
        assert!(z.im.abs() < 1e-9);
    }
}
