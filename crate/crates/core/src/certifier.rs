//! Boundedness certificates for one-variable reductions of 4-point cochains.
//!
//! For an invariant alternating `f` on 4-tuples of ℙ¹, `F(x) = f(∞, 0, 1, x)`
//! recovers `f` through the cross ratio, and `δf(∞, 0, 1, x, y)` is the
//! five-term expression [`five_term_defect`]. At `y = x²` it becomes the
//! doubling expression `2F(x) − F(x²) − F(1 + x) + F((1 + x)/x)`. Near `x = 1`
//! the last two terms are evaluated near 2, where `F` is continuous, so
//!
//! ```text
//! |F(x) − F(x²)/2| ≤ C,   C = B_defect + 2·M_near2,
//! ```
//!
//! on the target region. Squaring pushes any target point into the base
//! region after finitely many steps, and summing the geometric series gives
//! `|F| ≤ M_base + 2C` on the target.
//!
//! The three inputs are suprema over grids unless the caller supplies them,
//! and every certificate records which of the two happened.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cochain::{Alternation, Cochain};
use crate::error::{Error, Result};
use crate::hyperbolic_boundary::{sphere_from_projective, RealBoundaryPoint};
use crate::projective::{Field, ProjectivePoint};

/// Arguments closer than this to `0`, `1` or each other, or larger than its
/// inverse, are treated as degenerate.
pub const ARG_EPS: f64 = 1e-12;

/// Relative slack on the sector edge `|arg| = δ` when deciding that a
/// squared point has left the target.
const EDGE_SLACK: f64 = 1e-12;

pub const DEFAULT_DELTA_REAL: f64 = 0.125;
pub const DEFAULT_DELTA_COMPLEX: f64 = 0.1;

type ScalarEval = Arc<dyn Fn(Complex64) -> Result<f64> + Send + Sync>;

/// `F : 𝕂 ∖ {0, 1} → ℝ`.
#[derive(Clone)]
pub struct ScalarFunction {
    eval: ScalarEval,
    field: Field,
    alternating: bool,
    name: String,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("field", &self.field)
            .field("alternating", &self.alternating)
            .finish_non_exhaustive()
    }
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        field: Field,
        eval: impl Fn(Complex64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            field,
            alternating: false,
            name: name.into(),
        }
    }

    /// Real function of a real variable.
    pub fn real(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(name, Field::Real, move |z: Complex64| Ok(eval(z.re)))
    }

    /// Declares that `F` comes from an alternating cochain, so
    /// `F(x) = −F(1/x) = −F(1 − x)`.
    pub fn declare_alternating(mut self) -> Self {
        self.alternating = true;
        self
    }

    /// `F(x) = f(∞, 0, 1, x)` for a cochain on four points of ℙ¹.
    pub fn from_cochain(f: &Cochain<ProjectivePoint>, field: Field) -> Result<Self> {
        if f.arity() != 4 {
            return Err(Error::ArityMismatch {
                expected: 4,
                got: f.arity(),
            });
        }
        let inner = f.clone();
        let point = move |z: Complex64| match field {
            Field::Real => ProjectivePoint::real(z.re),
            Field::Complex => ProjectivePoint::complex(z),
        };
        let out = Self::new("cochain slice", field, move |z: Complex64| {
            inner.evaluate(&[
                ProjectivePoint::infinity(field),
                point(Complex64::new(0.0, 0.0)),
                point(Complex64::new(1.0, 0.0)),
                point(z),
            ])
        });
        Ok(if f.alternation() == Alternation::Declared {
            out.declare_alternating()
        } else {
            out
        })
    }

    /// `F(z) = f(ι∞, ι0, ι1, ιz)` for a cochain on `∂Hⁿ_ℝ`, `n ≥ 3`, with
    /// `ι : ℙ¹(ℂ) ≅ S² ⊂ S^{n−1}` the stereographic chart on the first three coordinates.
    pub fn from_boundary_cochain(f: &Cochain<RealBoundaryPoint>, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidConfig("need n ≥ 3 to contain ∂H³".into()));
        }
        if f.arity() != 4 {
            return Err(Error::ArityMismatch {
                expected: 4,
                got: f.arity(),
            });
        }
        let embed = move |p: ProjectivePoint| -> Result<RealBoundaryPoint> {
            let s = sphere_from_projective(&p)?;
            let mut d = vec![0.0; n];
            d[..3].copy_from_slice(s.direction().as_slice());
            RealBoundaryPoint::new(d)
        };
        let inner = f.clone();
        let out = Self::new("boundary cochain slice", Field::Complex, move |z: Complex64| {
            inner.evaluate(&[
                embed(ProjectivePoint::infinity(Field::Complex))?,
                embed(ProjectivePoint::complex(Complex64::new(0.0, 0.0)))?,
                embed(ProjectivePoint::complex(Complex64::new(1.0, 0.0)))?,
                embed(ProjectivePoint::complex(z))?,
            ])
        });
        Ok(if f.alternation() == Alternation::Declared {
            out.declare_alternating()
        } else {
            out
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_alternating(&self) -> bool {
        self.alternating
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, z: Complex64) -> Result<f64> {
        let v = (self.eval)(z)?;
        if v.is_nan() {
            return Err(Error::EvaluationError(format!("{} returned NaN at {z}", self.name)));
        }
        Ok(v)
    }
}

fn check_arg(z: Complex64, what: &str) -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    if !z.is_finite() || z.norm() > 1.0 / ARG_EPS || z.norm() < ARG_EPS || (z - one).norm() < ARG_EPS {
        return Err(Error::DegenerateArguments(format!("{what} = {z} is at or next to 0, 1 or ∞")));
    }
    Ok(())
}

/// `F(x) − F(y) + F(y/x) − F((1−y)/(1−x)) + F(x(1−y)/(y(1−x)))`, which is
/// `δf(∞, 0, 1, x, y)` for `F(x) = f(∞, 0, 1, x)`.
pub fn five_term_defect(f: &ScalarFunction, x: Complex64, y: Complex64) -> Result<f64> {
    check_arg(x, "x")?;
    check_arg(y, "y")?;
    if (x - y).norm() < ARG_EPS {
        return Err(Error::DegenerateArguments("x and y coincide".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let args = [x, y, y / x, (one - y) / (one - x), x * (one - y) / (y * (one - x))];
    for (k, a) in args.iter().enumerate().skip(2) {
        check_arg(*a, &format!("argument {k}"))?;
    }
    let v: Vec<f64> = args.iter().map(|a| f.evaluate(*a)).collect::<Result<_>>()?;
    Ok(v[0] - v[1] + v[2] - v[3] + v[4])
}

/// `2F(x) − F(x²) − F(1 + x) + F((1 + x)/x)`, the five-term defect at `y = x²`.
pub fn doubling_defect(f: &ScalarFunction, x: Complex64) -> Result<f64> {
    check_arg(x, "x")?;
    let one = Complex64::new(1.0, 0.0);
    let args = [x * x, one + x, (one + x) / x];
    for (k, a) in args.iter().enumerate() {
        check_arg(*a, &format!("argument {k}"))?;
    }
    Ok(2.0 * f.evaluate(x)? - f.evaluate(args[0])? - f.evaluate(args[1])? + f.evaluate(args[2])?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// Target `[1−δ, 1)`, base `[(1−δ)², 1−δ]`.
    RealInterval,
    /// Target `U = {z ≠ 1 : 1−δ < |z| ≤ 1, |arg z| < δ}`, base the closure of
    /// `{(1−δ)² < |w| ≤ 1, |arg w| < 2δ} ∖ U`.
    ComplexSector,
    /// `U ∪ 1/U`, a punctured neighborhood of 1 on both sides of the unit circle.
    Annulus,
    /// The whole punctured line `𝕂 ∖ {0, 1}`.
    Global,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub field: Field,
    pub delta: f64,
    pub target: String,
    pub base: String,
}

impl RegionSpec {
    pub fn real_interval(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidConfig(format!("δ = {delta} must lie in (0, 1)")));
        }
        Ok(Self {
            kind: RegionKind::RealInterval,
            field: Field::Real,
            delta,
            target: format!("[{}, 1)", 1.0 - delta),
            base: format!("[{}, {}]", (1.0 - delta).powi(2), 1.0 - delta),
        })
    }

    pub fn complex_sector(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.25) {
            return Err(Error::InvalidConfig(format!("δ = {delta} must lie in (0, 1/4)")));
        }
        Ok(Self {
            kind: RegionKind::ComplexSector,
            field: Field::Complex,
            delta,
            target: format!("{{z ≠ 1 : {} < |z| ≤ 1, |arg z| < {delta}}}", 1.0 - delta),
            base: format!(
                "closure of {{{} < |w| ≤ 1, |arg w| < {}}} minus the target",
                (1.0 - delta).powi(2),
                2.0 * delta
            ),
        })
    }

    fn s_max(&self) -> f64 {
        -(1.0 - self.delta).ln()
    }

    /// Membership in the target region.
    pub fn contains_target(&self, z: Complex64) -> bool {
        let d = self.delta;
        match self.kind {
            RegionKind::RealInterval => z.im == 0.0 && z.re >= 1.0 - d && z.re < 1.0,
            RegionKind::ComplexSector => {
                let r = z.norm();
                z != Complex64::new(1.0, 0.0) && r > 1.0 - d && r <= 1.0 && z.arg().abs() < d
            }
            RegionKind::Annulus | RegionKind::Global => false,
        }
    }

    /// Radius of the neighborhood of 2 containing `1 + x` and `(1 + x)/x` for
    /// every target `x`: the real interval `[2 − δ, max(2 + δ, 2/(1 − δ))]`,
    /// or the closed disc about 2 of radius `2δ/(1 − δ)`.
    pub fn near_two_radius(&self) -> f64 {
        let d = self.delta;
        match self.field {
            Field::Real => (2.0 + d).max(2.0 / (1.0 - d)) - 2.0,
            Field::Complex => 2.0 * d / (1.0 - d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Supremum over a finite grid: witnessed, not proved.
    Empirical,
    /// Supplied by the caller.
    Analytic,
}

/// Caller-supplied replacements for the grid suprema.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticBounds {
    pub m_base: Option<f64>,
    pub m_near2: Option<f64>,
    pub b_defect: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Grid points per region.
    pub points: usize,
    /// Dyadic shells of the target region sampled towards the puncture at 1.
    pub shells: usize,
    /// Defect supremum above which no certificate is issued.
    pub blowup_threshold: f64,
    /// Cap on the number of squarings needed to leave the target.
    pub max_doublings: usize,
    pub analytic: AnalyticBounds,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: 10_000,
            shells: 20,
            blowup_threshold: 1e6,
            max_doublings: 64,
            analytic: AnalyticBounds::default(),
        }
    }
}

impl GridConfig {
    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.points < 16 || self.shells == 0 {
            return Err(Error::InvalidConfig("grid needs at least 16 points and one shell".into()));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::InvalidConfig("blowup threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// `sup |F|` on the base region.
    pub m_base: f64,
    /// `sup |F|` on the neighborhood of 2.
    pub m_near2: f64,
    /// `sup |2F(x) − F(x²) − F(1+x) + F((1+x)/x)|` on the target region.
    pub b_defect: f64,
}

impl BoundInputs {
    /// `C = B_defect + 2·M_near2`.
    pub fn constant_c(&self) -> f64 {
        self.b_defect + 2.0 * self.m_near2
    }

    /// `M_base + 2C`.
    pub fn recursion_bound(&self) -> f64 {
        self.m_base + 2.0 * self.constant_c()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputProvenance {
    pub m_base: Provenance,
    pub m_near2: Provenance,
    pub b_defect: Provenance,
}

/// One region of a global certificate and its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedPiece {
    pub description: String,
    pub bound: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub function: String,
    pub region: RegionSpec,
    pub certified_bound: f64,
    pub inputs: BoundInputs,
    pub provenance: InputProvenance,
    /// Largest number of squarings any target grid point needed.
    pub k_max: usize,
    pub near2_radius: f64,
    pub grid: GridConfig,
    /// Pieces of a symmetry-extended certificate; empty for a single region.
    pub pieces: Vec<CertifiedPiece>,
}

impl BoundCertificate {
    pub fn constant_c(&self) -> f64 {
        self.inputs.constant_c()
    }

    /// The bound implied by the recorded fields alone.
    pub fn recompute(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.bound)
            .fold(self.inputs.recursion_bound(), f64::max)
    }
}

/// `F(x)` from `F(x^{2^k})`: `|F(x)| ≤ |F(x^{2^k})|/2^k + C·Σ_{i<k} 2^{−i}`.
pub fn chain_bound(landing_abs: f64, k: usize, c: f64) -> f64 {
    let k = k as i32;
    landing_abs * 2f64.powi(-k) + c * (2.0 - 2f64.powi(1 - k))
}

/// Result of squaring a target point until it leaves the target region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoublingChain {
    /// Number of squarings.
    pub k: usize,
    /// `z^{2^k}`, a point of the base region.
    pub landing: Complex64,
}

/// Squares `z` until it leaves the target of `region`.
///
/// Runs on `log z`, where squaring is an exact doubling.
pub fn doubling_chain(z: Complex64, region: &RegionSpec, max_doublings: usize) -> Result<DoublingChain> {
    if !region.contains_target(z) {
        return Err(Error::InvalidConfig(format!("{z} is not in the target region")));
    }
    let mut w = z.ln();
    if region.field == Field::Real {
        w.im = 0.0;
    }
    let mut k = 0;
    loop {
        w *= 2.0;
        k += 1;
        let landing = w.exp();
        let inside = match region.kind {
            RegionKind::RealInterval => w.re >= -region.s_max(),
            _ => w.re > -region.s_max() && w.im.abs() < region.delta * (1.0 - EDGE_SLACK),
        };
        if !inside {
            return Ok(DoublingChain { k, landing });
        }
        if k >= max_doublings {
            return Err(Error::IterationOverflow(max_doublings));
        }
    }
}

/// Target grid: uniform points on each dyadic shell `2^{−j}(R ∖ R/2)` of
/// the target written in the coordinates `(s, θ) = (−log|z|, arg z)`.
pub fn target_grid(region: &RegionSpec, grid: &GridConfig) -> Vec<Complex64> {
    let s_max = region.s_max();
    let per_shell = (grid.points / grid.shells).max(2);
    let mut out = Vec::with_capacity(per_shell * grid.shells);
    match region.kind {
        RegionKind::RealInterval => {
            for j in 0..grid.shells {
                let scale = s_max * 2f64.powi(-(j as i32));
                for i in 0..per_shell {
                    let u = 0.5 + 0.5 * (i + 1) as f64 / per_shell as f64;
                    out.push(Complex64::new((-scale * u).exp(), 0.0));
                }
            }
        }
        _ => {
            let d = region.delta;
            let m = ((4.0 * per_shell as f64 / 3.0).sqrt().ceil() as usize).max(2);
            for j in 0..grid.shells {
                let scale = 2f64.powi(-(j as i32));
                for i in 0..m {
                    let s = s_max * i as f64 / m as f64;
                    for l in 0..m {
                        let theta = -d + d * (2 * l + 1) as f64 / m as f64;
                        if s < 0.5 * s_max && theta.abs() < 0.5 * d {
                            continue;
                        }
                        out.push(Complex64::from_polar((-s * scale).exp(), theta * scale));
                    }
                }
            }
        }
    }
    out.retain(|z| region.contains_target(*z));
    out
}

/// Grid on the base region.
pub fn base_grid(region: &RegionSpec, grid: &GridConfig) -> Vec<Complex64> {
    let d = region.delta;
    match region.kind {
        RegionKind::RealInterval => {
            let (lo, hi) = ((1.0 - d).powi(2), 1.0 - d);
            uniform(lo, hi, grid.points).map(|x| Complex64::new(x, 0.0)).collect()
        }
        _ => {
            let s_max = region.s_max();
            let m = ((4.0 * grid.points as f64 / 3.0).sqrt().ceil() as usize).max(2);
            let mut out = Vec::new();
            for s in uniform(0.0, 2.0 * s_max, m) {
                for theta in uniform(-2.0 * d, 2.0 * d, m) {
                    if s < s_max && theta.abs() < d {
                        continue;
                    }
                    out.push(Complex64::from_polar((-s).exp(), theta));
                }
            }
            out
        }
    }
}

/// Grid on the neighborhood of 2.
pub fn near_two_grid(region: &RegionSpec, grid: &GridConfig) -> Vec<Complex64> {
    let rho = region.near_two_radius();
    match region.field {
        Field::Real => uniform(2.0 - region.delta, 2.0 + rho, grid.points)
            .map(|x| Complex64::new(x, 0.0))
            .collect(),
        Field::Complex => {
            let rings = ((grid.points as f64 / PI).sqrt().ceil() as usize).max(2);
            let mut out = vec![Complex64::new(2.0, 0.0)];
            for i in 1..=rings {
                let r = rho * i as f64 / rings as f64;
                let spokes = 6 * i.max(3);
                for l in 0..spokes {
                    out.push(Complex64::new(2.0, 0.0) + Complex64::from_polar(r, 2.0 * PI * l as f64 / spokes as f64));
                }
            }
            out
        }
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn sup_abs(values: &[Complex64], eval: impl Fn(Complex64) -> Result<f64> + Sync) -> Result<f64> {
    let v: Vec<f64> = values.par_iter().map(|z| eval(*z).map(f64::abs)).collect::<Result<_>>()?;
    Ok(v.into_iter().fold(0.0, |a, b| if b > a || b.is_nan() { b } else { a }))
}

fn certify(f: &ScalarFunction, region: RegionSpec, grid: &GridConfig) -> Result<BoundCertificate> {
    grid.validate()?;
    let targets = target_grid(&region, grid);
    let k_max = targets
        .iter()
        .map(|z| doubling_chain(*z, &region, grid.max_doublings).map(|c| c.k))
        .try_fold(0, |acc, k| k.map(|k| acc.max(k)))?;

    let pick = |supplied: Option<f64>, compute: &dyn Fn() -> Result<f64>| -> Result<(f64, Provenance)> {
        match supplied {
            Some(v) if v >= 0.0 => Ok((v, Provenance::Analytic)),
            Some(v) => Err(Error::InvalidConfig(format!("analytic bound {v} is negative"))),
            None => Ok((compute()?, Provenance::Empirical)),
        }
    };
    let (b_defect, b_prov) = pick(grid.analytic.b_defect, &|| sup_abs(&targets, |z| doubling_defect(f, z)))?;
    if !(b_defect <= grid.blowup_threshold) {
        return Err(Error::UnboundedDefect {
            defect: b_defect,
            threshold: grid.blowup_threshold,
        });
    }
    let (m_base, base_prov) = pick(grid.analytic.m_base, &|| sup_abs(&base_grid(&region, grid), |z| f.evaluate(z)))?;
    let (m_near2, near_prov) =
        pick(grid.analytic.m_near2, &|| sup_abs(&near_two_grid(&region, grid), |z| f.evaluate(z)))?;
    if !(m_base.is_finite() && m_near2.is_finite()) {
        return Err(Error::EvaluationError("non-finite supremum".into()));
    }
    let inputs = BoundInputs {
        m_base,
        m_near2,
        b_defect,
    };
    Ok(BoundCertificate {
        function: f.name.clone(),
        near2_radius: region.near_two_radius(),
        region,
        certified_bound: inputs.recursion_bound(),
        inputs,
        provenance: InputProvenance {
            m_base: base_prov,
            m_near2: near_prov,
            b_defect: b_prov,
        },
        k_max,
        grid: *grid,
        pieces: Vec::new(),
    })
}

/// Certificate for `sup |F|` on `[1−δ, 1)`.
pub fn certify_interval(f: &ScalarFunction, delta: f64, grid: &GridConfig) -> Result<BoundCertificate> {
    certify(f, RegionSpec::real_interval(delta)?, grid)
}

/// Certificate for `sup |F|` on the sector `U` next to `1`, `δ ∈ (0, 1/4)`.
pub fn certify_complex_region(f: &ScalarFunction, delta: f64, grid: &GridConfig) -> Result<BoundCertificate> {
    certify(f, RegionSpec::complex_sector(delta)?, grid)
}

/// Certificate assembled from caller-supplied bounds only; no grid is evaluated
/// except to count doublings.
pub fn certify_from_bounds(region: RegionSpec, inputs: BoundInputs, grid: &GridConfig) -> Result<BoundCertificate> {
    let f = ScalarFunction::new("analytic", region.field, |_| Ok(0.0));
    let mut g = *grid;
    g.analytic = AnalyticBounds {
        m_base: Some(inputs.m_base),
        m_near2: Some(inputs.m_near2),
        b_defect: Some(inputs.b_defect),
    };
    certify(&f, region, &g).map(|mut c| {
        c.function = "analytic".into();
        c
    })
}

/// Extends a certificate near 1 to all of `𝕂 ∖ {0, 1}` using
/// `F(x) = −F(1/x)` and `F(x) = −F(1 − x)`: the bound near 1 carries over to
/// `1/U`, to `1 − (U ∪ 1/U)` near 0 and to its inverse near ∞. The rest is
/// compact and is covered by a grid supremum.
pub fn extend_by_symmetry(cert: &BoundCertificate, f: &ScalarFunction) -> Result<BoundCertificate> {
    if !f.alternating {
        return Err(Error::MissingAlternation);
    }
    if !matches!(cert.region.kind, RegionKind::RealInterval | RegionKind::ComplexSector) {
        return Err(Error::InvalidConfig("can only extend a certificate near 1".into()));
    }
    let region = cert.region.clone();
    let bound = cert.certified_bound;
    let points = complement_grid(&region, cert.grid.points);
    let m_compact = sup_abs(&points, |z| f.evaluate(z))?;

    let near = match region.kind {
        RegionKind::RealInterval => format!("[{}, 1) ∪ (1, {}]", 1.0 - region.delta, 1.0 / (1.0 - region.delta)),
        _ => "U ∪ 1/U".to_string(),
    };
    let pieces = vec![
        CertifiedPiece {
            description: format!("near 1: {near}"),
            bound,
            provenance: Provenance::Empirical,
        },
        CertifiedPiece {
            description: "near 0: 1 − (near 1), via F(x) = −F(1 − x)".into(),
            bound,
            provenance: Provenance::Empirical,
        },
        CertifiedPiece {
            description: "near ∞: 1/(near 0), via F(x) = −F(1/x)".into(),
            bound,
            provenance: Provenance::Empirical,
        },
        CertifiedPiece {
            description: format!("compact complement ({} grid points)", points.len()),
            bound: m_compact,
            provenance: Provenance::Empirical,
        },
    ];
    let mut out = cert.clone();
    out.function = f.name.clone();
    out.region = RegionSpec {
        kind: RegionKind::Global,
        field: region.field,
        delta: region.delta,
        target: match region.field {
            Field::Real => "ℝ ∖ {0, 1}".into(),
            Field::Complex => "ℂ ∖ {0, 1}".into(),
        },
        base: region.base.clone(),
    };
    out.pieces = pieces;
    out.certified_bound = out.recompute();
    Ok(out)
}

/// Which symmetry piece of an extended certificate covers `z`, if any.
pub fn symmetry_piece(region: &RegionSpec, z: Complex64) -> Option<usize> {
    let one = Complex64::new(1.0, 0.0);
    let near1 = |w: Complex64| region.contains_target(w) || (w != Complex64::new(0.0, 0.0) && region.contains_target(one / w));
    if near1(z) {
        Some(0)
    } else if near1(one - z) {
        Some(1)
    } else if z != Complex64::new(0.0, 0.0) && near1(one - one / z) {
        Some(2)
    } else {
        None
    }
}

/// Points of `ℙ¹ ∖ {0, 1, ∞}` outside the three symmetry pieces.
fn complement_grid(region: &RegionSpec, points: usize) -> Vec<Complex64> {
    let candidates: Vec<Complex64> = match region.field {
        Field::Real => (0..points)
            .map(|i| {
                let phi = -PI + 2.0 * PI * (i as f64 + 0.5) / points as f64;
                Complex64::new((phi / 2.0).tan(), 0.0)
            })
            .collect(),
        Field::Complex => {
            let m = ((points as f64 / 2.0).sqrt().ceil() as usize).max(2);
            let mut out = Vec::with_capacity(2 * m * m);
            for i in 0..m {
                let alpha = PI * (i as f64 + 0.5) / m as f64;
                for l in 0..2 * m {
                    let beta = 2.0 * PI * l as f64 / (2 * m) as f64;
                    // stereographic image of the sphere point with polar angle α
                    out.push(Complex64::from_polar(1.0 / (alpha / 2.0).tan(), beta));
                }
            }
            out
        }
    };
    candidates
        .into_iter()
        .filter(|z| check_arg(*z, "z").is_ok() && symmetry_piece(region, *z).is_none())
        .collect()
}
