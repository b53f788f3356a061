//! Full flags in ℝ³, the Furstenberg boundary of `SL(3, ℝ)`.
//!
//! A flag is a line `⟨e⟩` inside a plane `ker φ`. Opposition, the six flags
//! at infinity of the flat spanned by an opposite pair, genericity of
//! triples and the triple ratio are all expressed through the pairings
//! `φ_i(e_j)`.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::gaussian;

/// Pairing threshold for transversality of unit-normalized lines and planes.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Permutations of `{0, 1, 2}` indexing the flags of a flat boundary.
/// Entry 0 is the identity and entry 5 the longest element.
pub const WEYL_GROUP: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn sign_normalized(v: Vector3<f64>) -> Option<Vector3<f64>> {
    let norm = v.norm();
    if !norm.is_finite() || norm < 1e-300 {
        return None;
    }
    let pivot = v.iter().fold(0.0f64, |best, &x| if x.abs() > best.abs() { x } else { best });
    Some(v * (pivot.signum() / norm))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flag3 {
    line: Vector3<f64>,
    plane: Vector3<f64>,
}

impl Flag3 {
    /// Flag from a line vector and the covector cutting out the plane.
    pub fn new(line: Vector3<f64>, plane: Vector3<f64>) -> Result<Self> {
        let (Some(line), Some(plane)) = (sign_normalized(line), sign_normalized(plane)) else {
            return Err(Error::InvalidConfig("flag vectors must be nonzero".into()));
        };
        if plane.dot(&line).abs() > 1e-12 {
            return Err(Error::InvalidConfig("line is not contained in the plane".into()));
        }
        Ok(Self { line, plane })
    }

    /// The flag `⟨u₁⟩ ⊂ ⟨u₁, u₂⟩`.
    pub fn from_frame(u1: &Vector3<f64>, u2: &Vector3<f64>) -> Result<Self> {
        let normal = u1.cross(u2);
        let (Some(line), Some(plane)) = (sign_normalized(*u1), sign_normalized(normal)) else {
            return Err(Error::InvalidConfig("frame vectors are dependent".into()));
        };
        Ok(Self { line, plane })
    }

    /// Orthonormalized Gaussian frame `(q₁, q₂, q₃)` gives `⟨q₁⟩ ⊂ q₃^⊥`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let g = Matrix3::from_fn(|_, _| gaussian(rng));
            if g.determinant().abs() < 1e-12 {
                continue;
            }
            let q = g.qr().q();
            if let Ok(f) = Self::from_frame(&q.column(0).into_owned(), &q.column(1).into_owned()) {
                return f;
            }
        }
    }

    pub fn line(&self) -> &Vector3<f64> {
        &self.line
    }

    pub fn plane(&self) -> &Vector3<f64> {
        &self.plane
    }

    /// `φ_self(e_other)`.
    pub fn pairing(&self, other: &Self) -> f64 {
        self.plane.dot(&other.line)
    }

    /// `g·(e, φ) = (g e, φ ∘ g⁻¹)`.
    pub fn transform(&self, g: &Matrix3<f64>) -> Result<Self> {
        let inv_t = g
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix(g.determinant().abs()))?
            .transpose();
        let line = sign_normalized(g * self.line).ok_or(Error::SingularMatrix(0.0))?;
        let plane = sign_normalized(inv_t * self.plane).ok_or(Error::SingularMatrix(0.0))?;
        Ok(Self { line, plane })
    }

    /// Same line and plane, up to the sign of the representatives.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |a: &Vector3<f64>, b: &Vector3<f64>| (a - b).norm().min((a + b).norm()) <= tol;
        close(&self.line, &other.line) && close(&self.plane, &other.plane)
    }
}

/// Random element of `SL(3, ℝ)` with Gaussian entries.
pub fn random_sl3<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    loop {
        let mut g = Matrix3::from_fn(|_, _| gaussian(rng));
        let det = g.determinant();
        if det.abs() < 1e-6 {
            continue;
        }
        if det < 0.0 {
            g.column_mut(0).neg_mut();
        }
        return g / det.abs().cbrt();
    }
}

/// The six flags at infinity of the flat spanned by an opposite pair.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatBoundary {
    /// One flag per element of [`WEYL_GROUP`], in that order.
    pub flags: [Flag3; 6],
    /// Adapted basis: `u₁ ∈ L₁`, `u₂ ∈ P₁ ∩ P₂`, `u₃ ∈ L₂`.
    pub basis: [Vector3<f64>; 3],
}

impl FlatBoundary {
    pub fn contains(&self, f: &Flag3, tol: f64) -> bool {
        self.flags.iter().any(|g| g.approx_eq(f, tol))
    }
}

/// `L₁ ⊕ P₂ = ℝ³ = L₂ ⊕ P₁`, tested as `|φ₁(e₂)| > tol` and `|φ₂(e₁)| > tol`.
pub fn is_opposite(f1: &Flag3, f2: &Flag3, tol: f64) -> bool {
    f1.pairing(f2).abs() > tol && f2.pairing(f1).abs() > tol
}

fn adapted_flat(f1: &Flag3, f2: &Flag3) -> Result<FlatBoundary> {
    let u1 = f1.line;
    let u3 = f2.line;
    let u2 = sign_normalized(f1.plane.cross(&f2.plane)).ok_or(Error::NotOpposite)?;
    let basis = [u1, u2, u3];
    let mut flags = [*f1; 6];
    for (slot, w) in flags.iter_mut().zip(WEYL_GROUP.iter()) {
        *slot = Flag3::from_frame(&basis[w[0]], &basis[w[1]]).map_err(|_| Error::NotOpposite)?;
    }
    Ok(FlatBoundary { flags, basis })
}

/// Flat boundary of an opposite pair; the identity flag is `F1` and the longest one `F2`.
pub fn flat_boundary(f1: &Flag3, f2: &Flag3) -> Result<FlatBoundary> {
    if !is_opposite(f1, f2, DEFAULT_TOL) {
        return Err(Error::NotOpposite);
    }
    adapted_flat(f1, f2)
}

/// Pairwise opposite, and each flag opposite to all six boundary flags of
/// the flat spanned by the other two (for both orders of that pair).
pub fn is_generic_triple(f1: &Flag3, f2: &Flag3, f3: &Flag3, tol: f64) -> bool {
    let f = [f1, f2, f3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j && !is_opposite(f[i], f[j], tol) {
                return false;
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            let Ok(flat) = adapted_flat(f[i], f[j]) else {
                return false;
            };
            if !flat.flags.iter().all(|b| is_opposite(f[k], b, tol)) {
                return false;
            }
        }
    }
    true
}

/// `T = φ₁(e₂)φ₂(e₃)φ₃(e₁) / (φ₁(e₃)φ₂(e₁)φ₃(e₂))`.
pub fn triple_ratio(f1: &Flag3, f2: &Flag3, f3: &Flag3) -> Result<f64> {
    let den = [f1.pairing(f3), f2.pairing(f1), f3.pairing(f2)];
    if let Some(d) = den.iter().find(|d| d.abs() <= DEFAULT_TOL) {
        return Err(Error::NotGeneric(format!("denominator pairing {d:e}")));
    }
    let num = f1.pairing(f2) * f2.pairing(f3) * f3.pairing(f1);
    Ok(num / (den[0] * den[1] * den[2]))
}
