//! Seeded rejection sampling of generic tuples.
//!
//! Tuple `i` is drawn from substream `i` of the master seed and redrawn
//! until it passes the model's genericity predicate. Draws for all tuples
//! share one budget of `100·N`; exceeding it is an error rather than a hang.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flags::{self, Flag3};
use crate::hyperbolic_boundary::{ComplexBoundaryPoint, HyperbolicPoint, RealBoundaryPoint};
use crate::projective::{Field, ProjectivePoint};
use crate::rng::{substream, unit_vector, StreamRng};

/// Draws allowed per requested tuple.
pub const REJECTION_BUDGET: usize = 100;

pub trait TupleSampler<P>: Sync {
    fn draw(&self, rng: &mut StreamRng, size: usize) -> Vec<P>;
    fn is_generic(&self, tuple: &[P]) -> bool;
}

/// Flat numeric coordinates for reports.
pub trait Coordinates {
    fn coordinates(&self) -> Vec<f64>;
}

impl Coordinates for RealBoundaryPoint {
    fn coordinates(&self) -> Vec<f64> {
        self.direction().iter().copied().collect()
    }
}

impl Coordinates for ComplexBoundaryPoint {
    fn coordinates(&self) -> Vec<f64> {
        self.ball_coords().iter().flat_map(|z| [z.re, z.im]).collect()
    }
}

impl Coordinates for HyperbolicPoint {
    fn coordinates(&self) -> Vec<f64> {
        self.lift().iter().copied().collect()
    }
}

impl Coordinates for ProjectivePoint {
    fn coordinates(&self) -> Vec<f64> {
        self.coords().iter().flat_map(|z| [z.re, z.im]).collect()
    }
}

impl Coordinates for Flag3 {
    fn coordinates(&self) -> Vec<f64> {
        self.line().iter().chain(self.plane().iter()).copied().collect()
    }
}

/// Uniform points of `∂Hⁿ_ℝ = S^{n−1}`.
#[derive(Clone, Copy, Debug)]
pub struct RealBoundarySampler {
    pub dim: usize,
    pub tol: f64,
}

impl TupleSampler<RealBoundaryPoint> for RealBoundarySampler {
    fn draw(&self, rng: &mut StreamRng, size: usize) -> Vec<RealBoundaryPoint> {
        (0..size).map(|_| RealBoundaryPoint::random(rng, self.dim)).collect()
    }

    fn is_generic(&self, tuple: &[RealBoundaryPoint]) -> bool {
        pairwise_far(tuple, self.tol, RealBoundaryPoint::chordal_distance)
    }
}

/// Uniform points of `∂Hⁿ_ℂ = S^{2n−1}`.
#[derive(Clone, Copy, Debug)]
pub struct ComplexBoundarySampler {
    pub dim: usize,
    pub tol: f64,
}

impl TupleSampler<ComplexBoundaryPoint> for ComplexBoundarySampler {
    fn draw(&self, rng: &mut StreamRng, size: usize) -> Vec<ComplexBoundaryPoint> {
        (0..size).map(|_| ComplexBoundaryPoint::random(rng, self.dim)).collect()
    }

    fn is_generic(&self, tuple: &[ComplexBoundaryPoint]) -> bool {
        pairwise_far(tuple, self.tol, ComplexBoundaryPoint::chordal_distance)
    }
}

/// Points of ℙ¹(ℝ) or ℙ¹(ℂ) distributed as the round measure of `S¹` or `S²`.
#[derive(Clone, Copy, Debug)]
pub struct ProjectiveSampler {
    pub field: Field,
    pub tol: f64,
}

impl TupleSampler<ProjectivePoint> for ProjectiveSampler {
    fn draw(&self, rng: &mut StreamRng, size: usize) -> Vec<ProjectivePoint> {
        (0..size)
            .map(|_| match self.field {
                Field::Real => {
                    let v = unit_vector(rng, 2);
                    let r = |t: f64| Complex64::new(t, 0.0);
                    ProjectivePoint::from_homogeneous(r(v[0]), r(v[1]), Field::Real).expect("unit vector")
                }
                Field::Complex => {
                    let v = unit_vector(rng, 4);
                    ProjectivePoint::from_homogeneous(
                        Complex64::new(v[0], v[1]),
                        Complex64::new(v[2], v[3]),
                        Field::Complex,
                    )
                    .expect("unit vector")
                }
            })
            .collect()
    }

    fn is_generic(&self, tuple: &[ProjectivePoint]) -> bool {
        pairwise_far(tuple, self.tol, ProjectivePoint::chordal_distance)
    }
}

/// Flags from orthonormalized Gaussian frames; pairs must be opposite,
/// triples generic, larger tuples pairwise opposite.
#[derive(Clone, Copy, Debug)]
pub struct FlagSampler {
    pub tol: f64,
}

impl TupleSampler<Flag3> for FlagSampler {
    fn draw(&self, rng: &mut StreamRng, size: usize) -> Vec<Flag3> {
        (0..size).map(|_| Flag3::random(rng)).collect()
    }

    fn is_generic(&self, tuple: &[Flag3]) -> bool {
        match tuple {
            [a, b, c] => flags::is_generic_triple(a, b, c, self.tol),
            _ => (0..tuple.len()).all(|i| {
                (0..tuple.len()).all(|j| i == j || flags::is_opposite(&tuple[i], &tuple[j], self.tol))
            }),
        }
    }
}

fn pairwise_far<P>(tuple: &[P], tol: f64, dist: impl Fn(&P, &P) -> f64) -> bool {
    tuple
        .iter()
        .enumerate()
        .all(|(i, p)| tuple[i + 1..].iter().all(|q| dist(p, q) > tol))
}

/// Outcome of a batch of rejection sampling.
#[derive(Clone, Debug)]
pub struct SampledBatch<P> {
    /// Tuples in index order.
    pub tuples: Vec<Vec<P>>,
    /// Total draws including rejected ones.
    pub draws: usize,
}

impl<P> SampledBatch<P> {
    pub fn acceptance_rate(&self) -> f64 {
        if self.draws == 0 {
            1.0
        } else {
            self.tuples.len() as f64 / self.draws as f64
        }
    }
}

/// `count` generic tuples of `size` points, deterministic in `seed`.
pub fn sample_generic<P, S>(sampler: &S, size: usize, count: usize, seed: u64) -> Result<SampledBatch<P>>
where
    P: Send,
    S: TupleSampler<P> + ?Sized,
{
    if count == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    let budget = REJECTION_BUDGET * count;
    let spent = AtomicUsize::new(0);
    let results: Vec<(Option<Vec<P>>, usize)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let mut draws = 0;
            while spent.fetch_add(1, Ordering::Relaxed) < budget {
                draws += 1;
                let t = sampler.draw(&mut rng, size);
                if sampler.is_generic(&t) {
                    return (Some(t), draws);
                }
            }
            (None, draws)
        })
        .collect();
    let draws: usize = results.iter().map(|(_, d)| d).sum();
    if results.iter().any(|(t, _)| t.is_none()) {
        return Err(Error::SamplerExhausted { draws, requested: count });
    }
    Ok(SampledBatch {
        tuples: results.into_iter().map(|(t, _)| t.expect("checked above")).collect(),
        draws,
    })
}
