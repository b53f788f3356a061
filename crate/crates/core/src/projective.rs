//! Points and Möbius maps of the real and complex projective lines.
//!
//! Everything is done on homogeneous pairs so that the point at infinity is
//! an ordinary value: `∞ = (1, 0)` and a finite `x` is `(x, 1)` rescaled.
//! Differences `x_i - x_j` become 2×2 determinants of the pairs, which keeps
//! cross ratios well conditioned near `∞`.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two points closer than this in the chordal metric count as coincident.
pub const EPS_DIST: f64 = 1e-9;
/// Relative determinant threshold, `|det| / ‖m‖²_F`, below which a matrix is singular.
pub const EPS_DET: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

/// A scalar of the field or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedScalar {
    Finite(Complex64),
    Infinity,
}

impl ExtendedScalar {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtendedScalar::Finite(z) => Some(z),
            ExtendedScalar::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedScalar::Infinity)
    }
}

impl fmt::Display for ExtendedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedScalar::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            ExtendedScalar::Finite(z) => write!(f, "{z}"),
            ExtendedScalar::Infinity => write!(f, "∞"),
        }
    }
}

/// A point of ℙ¹(ℝ) or ℙ¹(ℂ) in normalized homogeneous coordinates.
///
/// The representative has unit Euclidean norm and its first coordinate of
/// largest modulus is positive real, so two equal points have (up to
/// rounding) equal coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: [Complex64; 2],
    field: Field,
}

impl ProjectivePoint {
    pub fn from_homogeneous(a: Complex64, b: Complex64, field: Field) -> Result<Self> {
        if field == Field::Real && (a.im != 0.0 || b.im != 0.0) {
            return Err(Error::InvalidConfig(
                "real projective point with non-real coordinates".into(),
            ));
        }
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegenerateTuple(format!(
                "homogeneous pair ({a}, {b}) does not define a point"
            )));
        }
        let pivot = if b.norm() > a.norm() { b } else { a };
        let phase = match field {
            Field::Real => Complex64::new(pivot.re.signum() / norm, 0.0),
            Field::Complex => pivot.conj() / (pivot.norm() * norm),
        };
        Ok(Self {
            coords: [a * phase, b * phase],
            field,
        })
    }

    pub fn infinity(field: Field) -> Self {
        Self {
            coords: [ONE, ZERO],
            field,
        }
    }

    /// Real point; `±∞` maps to the point at infinity.
    pub fn real(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not a point of the projective line");
        if x.is_infinite() {
            return Self::infinity(Field::Real);
        }
        Self::from_homogeneous(Complex64::new(x, 0.0), ONE, Field::Real)
            .expect("(x, 1) is never zero")
    }

    pub fn complex(z: Complex64) -> Self {
        assert!(!z.is_nan(), "NaN is not a point of the projective line");
        if z.is_infinite() {
            return Self::infinity(Field::Complex);
        }
        Self::from_homogeneous(z, ONE, Field::Complex).expect("(z, 1) is never zero")
    }

    pub fn from_extended(value: ExtendedScalar, field: Field) -> Self {
        match (value, field) {
            (ExtendedScalar::Infinity, f) => Self::infinity(f),
            (ExtendedScalar::Finite(z), Field::Real) => Self::real(z.re),
            (ExtendedScalar::Finite(z), Field::Complex) => Self::complex(z),
        }
    }

    pub fn coords(&self) -> [Complex64; 2] {
        self.coords
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The affine coordinate `a / b`, or `Infinity` when `b = 0`.
    pub fn to_extended(&self) -> ExtendedScalar {
        let [a, b] = self.coords;
        if b == ZERO {
            ExtendedScalar::Infinity
        } else if self.field == Field::Real {
            ExtendedScalar::Finite(Complex64::new(a.re / b.re, 0.0))
        } else {
            ExtendedScalar::Finite(a / b)
        }
    }

    /// Same point viewed in ℙ¹(ℂ).
    pub fn complexify(&self) -> Self {
        Self {
            coords: self.coords,
            field: Field::Complex,
        }
    }

    /// Chordal distance `|a₁b₂ − a₂b₁|` of the unit representatives, in `[0, 1]`.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        det(self, other).norm()
    }
}

fn det(p: &ProjectivePoint, q: &ProjectivePoint) -> Complex64 {
    p.coords[0] * q.coords[1] - q.coords[0] * p.coords[1]
}

fn ensure_distinct(points: &[&ProjectivePoint]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            let d = p.chordal_distance(q);
            if d < EPS_DIST {
                return Err(Error::DegenerateTuple(format!(
                    "points {i} and {j} coincide (chordal distance {d:e})"
                )));
            }
        }
    }
    Ok(())
}

/// `[x0,x1,x2,x3] = (x0−x2)(x1−x3) / ((x0−x3)(x1−x2))`, so that `[∞,0,1,x] = x`.
pub fn cross_ratio(
    x0: &ProjectivePoint,
    x1: &ProjectivePoint,
    x2: &ProjectivePoint,
    x3: &ProjectivePoint,
) -> Result<ExtendedScalar> {
    ensure_distinct(&[x0, x1, x2, x3])?;
    let num = det(x0, x2) * det(x1, x3);
    let den = det(x0, x3) * det(x1, x2);
    if den == ZERO {
        return Ok(ExtendedScalar::Infinity);
    }
    let real = x0.field.join(x1.field).join(x2.field).join(x3.field) == Field::Real;
    Ok(ExtendedScalar::Finite(if real {
        Complex64::new(num.re / den.re, 0.0)
    } else {
        num / den
    }))
}

/// A projective transformation `z ↦ (az + b)/(cz + d)`.
///
/// Stored with `|det| = 1` and the first entry of largest modulus positive
/// real; real maps keep real entries and may have determinant `−1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    m: [[Complex64; 2]; 2],
    field: Field,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64, field: Field) -> Result<Self> {
        if field == Field::Real && [a, b, c, d].iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidConfig("real Möbius map with non-real entries".into()));
        }
        let frob = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        let det = a * d - b * c;
        if !frob.is_finite() || frob == 0.0 || det.norm() < EPS_DET * frob {
            return Err(Error::SingularMatrix(if frob > 0.0 { det.norm() / frob } else { 0.0 }));
        }
        let entries = [a, b, c, d];
        let pivot = entries
            .iter()
            .fold(ZERO, |best, z| if z.norm() > best.norm() { *z } else { best });
        let scale = det.norm().sqrt();
        let phase = match field {
            Field::Real => Complex64::new(pivot.re.signum() / scale, 0.0),
            Field::Complex => pivot.conj() / (pivot.norm() * scale),
        };
        Ok(Self {
            m: [[a * phase, b * phase], [c * phase, d * phase]],
            field,
        })
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let r = |x: f64| Complex64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d), Field::Real)
    }

    pub fn complex(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::new(a, b, c, d, Field::Complex)
    }

    pub fn identity(field: Field) -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
            field,
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn determinant(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self::new(d, -b, -c, a, self.field).expect("normalized maps are invertible")
    }

    pub fn apply(&self, x: &ProjectivePoint) -> ProjectivePoint {
        let [[a, b], [c, d]] = self.m;
        let [u, v] = x.coords;
        ProjectivePoint::from_homogeneous(a * u + b * v, c * u + d * v, self.field.join(x.field))
            .expect("invertible maps send points to points")
    }

    /// Equality as projective transformations, up to a common scalar.
    pub fn projectively_equal(&self, other: &Self, tol: f64) -> bool {
        let flat = |m: &Self| [m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1]];
        let (p, q) = (flat(self), flat(other));
        let k = (0..4)
            .max_by(|&i, &j| q[i].norm().total_cmp(&q[j].norm()))
            .unwrap_or(0);
        let lambda = p[k] / q[k];
        p.iter().zip(q.iter()).all(|(x, y)| (x - lambda * y).norm() <= tol)
    }
}

/// `(self * other)` acts as `self ∘ other`.
impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, rhs: MoebiusMap) -> MoebiusMap {
        let (p, q) = (self.m, rhs.m);
        let e = |i: usize, j: usize| p[i][0] * q[0][j] + p[i][1] * q[1][j];
        MoebiusMap::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1), self.field.join(rhs.field))
            .expect("product of invertible maps is invertible")
    }
}

pub fn apply_moebius(m: &MoebiusMap, x: &ProjectivePoint) -> ProjectivePoint {
    m.apply(x)
}

/// The map sending `(x0, x1, x2)` to `(∞, 0, 1)`, i.e. `z ↦ [x0, x1, x2, z]`.
pub fn normalize_to_standard(
    x0: &ProjectivePoint,
    x1: &ProjectivePoint,
    x2: &ProjectivePoint,
) -> Result<MoebiusMap> {
    ensure_distinct(&[x0, x1, x2])?;
    let d02 = det(x0, x2);
    let d12 = det(x1, x2);
    let [a0, b0] = x0.coords;
    let [a1, b1] = x1.coords;
    MoebiusMap::new(
        -d02 * b1,
        d02 * a1,
        -d12 * b0,
        d12 * a0,
        x0.field.join(x1.field).join(x2.field),
    )
}
