//! Volume cocycles of ideal simplices in `H²` and `H³`.
//!
//! `Vol₂` is `±π` according to the cyclic orientation of three points of
//! `S¹`. `Vol₃` is the signed volume of the ideal tetrahedron with shape
//! parameter `z = [x0, x1, x2, x3]`, the sum of Lobachevsky functions of its
//! three dihedral angles `arg z`, `arg 1/(1−z)`, `arg(1 − 1/z)` taken in
//! `(−π, π]`. The sign is `sign(Im z)`; flat tetrahedra (real `z`) have volume 0.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyperbolic_boundary::{projective_from_sphere, RealBoundaryPoint};
use crate::projective::{cross_ratio, ProjectivePoint, EPS_DIST};

/// Terms of the rapidly convergent expansion used by [`LobachevskyEvaluator::fast`].
const ZETA_TERMS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Method {
    Fourier,
    Zeta,
}

/// Evaluator of `Λ(θ) = −∫₀^θ log|2 sin t| dt = ½ Σ sin(2nθ)/n²` with a stated error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LobachevskyEvaluator {
    truncation: usize,
    tail_bound: f64,
    method: Method,
}

impl Default for LobachevskyEvaluator {
    fn default() -> Self {
        Self::fast()
    }
}

impl LobachevskyEvaluator {
    /// Fourier series truncated after `terms` terms; the tail is at most `1/(2·terms)`.
    pub fn fourier(terms: usize) -> Self {
        let terms = terms.max(1);
        Self {
            truncation: terms,
            tail_bound: 0.5 / terms as f64,
            method: Method::Fourier,
        }
    }

    /// After reduction to `|θ| ≤ π/2`:
    /// `Λ(θ) = θ(1 − log 2θ) + θ Σ_{n≥1} ζ(2n)/(n(2n+1)) (θ/π)^{2n}`,
    /// whose terms shrink by at least a factor 4.
    pub fn fast() -> Self {
        Self {
            truncation: ZETA_TERMS,
            tail_bound: 1e-14,
            method: Method::Zeta,
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Guaranteed absolute error of [`Self::eval`].
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self.method {
            Method::Fourier => {
                let s: f64 = (1..=self.truncation)
                    .map(|n| {
                        let n = n as f64;
                        (2.0 * n * theta).sin() / (n * n)
                    })
                    .sum();
                0.5 * s
            }
            Method::Zeta => {
                let t = theta - PI * (theta / PI).round();
                if t == 0.0 {
                    return 0.0;
                }
                let (sign, t) = (t.signum(), t.abs());
                let x2 = (t / PI) * (t / PI);
                let coeffs = zeta_coefficients();
                let mut pow = x2;
                let mut series = 0.0;
                for c in coeffs.iter() {
                    series += c * pow;
                    pow *= x2;
                }
                sign * t * (1.0 - (2.0 * t).ln() + series)
            }
        }
    }
}

/// `ζ(2n) / (n(2n+1))` for `n = 1..=ZETA_TERMS`.
fn zeta_coefficients() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; ZETA_TERMS];
        for (i, slot) in out.iter_mut().enumerate() {
            let n = i + 1;
            let zeta = match n {
                1 => PI * PI / 6.0,
                2 => PI.powi(4) / 90.0,
                _ => (1..=20_000u32).rev().map(|k| (k as f64).powi(-2 * n as i32)).sum(),
            };
            *slot = zeta / (n as f64 * (2 * n + 1) as f64);
        }
        out
    })
}

/// `Λ(θ)` with the default evaluator.
pub fn lobachevsky(theta: f64) -> f64 {
    LobachevskyEvaluator::fast().eval(theta)
}

/// Signed volume of the ideal tetrahedron with shape `z` (the Bloch–Wigner dilogarithm).
pub fn tetrahedron_volume(z: Complex64, lob: &LobachevskyEvaluator) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    lob.eval(z.arg()) + lob.eval((one / (one - z)).arg()) + lob.eval((one - one / z).arg())
}

/// `±π`: `+π` when `x, y, z` run counterclockwise around `S¹`.
pub fn vol2(x: &RealBoundaryPoint, y: &RealBoundaryPoint, z: &RealBoundaryPoint) -> Result<f64> {
    if [x, y, z].iter().any(|p| p.dim() != 2) {
        return Err(Error::InvalidConfig("vol2 takes points of S¹".into()));
    }
    let pts = [x, y, z];
    for i in 0..3 {
        for j in i + 1..3 {
            if pts[i].chordal_distance(pts[j]) < EPS_DIST {
                return Err(Error::DegenerateTuple(format!("points {i} and {j} coincide")));
            }
        }
    }
    // cyclic order read off the angles: counterclockwise iff the sorting
    // permutation of (θx, θy, θz) is even
    let a = [x.angle(), y.angle(), z.angle()];
    let mut inversions = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            match a[i].total_cmp(&a[j]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => {
                    return Err(Error::DegenerateTuple("repeated angle".into()));
                }
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Ok(if inversions % 2 == 0 { PI } else { -PI })
}

/// Signed volume of the ideal tetrahedron `x0 x1 x2 x3` in `∂H³ ≅ ℙ¹(ℂ)`.
pub fn vol3(x0: &ProjectivePoint, x1: &ProjectivePoint, x2: &ProjectivePoint, x3: &ProjectivePoint) -> Result<f64> {
    vol3_with(&LobachevskyEvaluator::fast(), x0, x1, x2, x3)
}

pub fn vol3_with(
    lob: &LobachevskyEvaluator,
    x0: &ProjectivePoint,
    x1: &ProjectivePoint,
    x2: &ProjectivePoint,
    x3: &ProjectivePoint,
) -> Result<f64> {
    match cross_ratio(x0, x1, x2, x3)?.finite() {
        Some(z) => Ok(tetrahedron_volume(z, lob)),
        None => Err(Error::DegenerateTuple("cross ratio at infinity".into())),
    }
}

/// [`vol3`] for points of `S² = ∂H³` through the stereographic chart.
pub fn vol3_sphere(points: [&RealBoundaryPoint; 4]) -> Result<f64> {
    let p = |i: usize| projective_from_sphere(points[i]);
    vol3(&p(0)?, &p(1)?, &p(2)?, &p(3)?)
}
