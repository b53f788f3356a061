//! Homogeneous cochains and the operators acting on them.
//!
//! A [`Cochain`] is a real function of a fixed number of points, kept as a
//! shared closure. [`coboundary`] and [`alternate`] build new closures on
//! top of old ones, so `δ(δf)` or `Alt(Alt f)` can be evaluated directly and
//! compared against the algebraic identities they satisfy.
//!
//! [`BiCochain`] adds a block of model-space slots in front of the boundary
//! slots; [`cone_homotopy`] inserts a cone point computed from the boundary
//! slots, which contracts the coboundary in the model slots:
//! `f = H(δ↑f) + δ↑(Hf)`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyperbolic_boundary::{barycenter_ideal_triangle, HyperbolicPoint, RealBoundaryPoint};
use crate::projective::Field;
use crate::sampling::{sample_generic, TupleSampler};

/// Largest arity accepted by [`alternate`]; the sum has `p!` terms.
pub const MAX_ALTERNATION_ARITY: usize = 6;

pub type Evaluator<P> = Arc<dyn Fn(&[P]) -> Result<f64> + Send + Sync>;
pub type BiEvaluator<M, B> = Arc<dyn Fn(&[M], &[B]) -> Result<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternation {
    Declared,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Circle,
    RealBoundary(usize),
    ComplexBoundary(usize),
    ProjectiveLine(Field),
    Flags3,
    Hyperboloid(usize),
    Custom(String),
}

pub struct Cochain<P> {
    arity: usize,
    eval: Evaluator<P>,
    alternation: Alternation,
    domain: Domain,
}

impl<P> Clone for Cochain<P> {
    fn clone(&self) -> Self {
        Self {
            arity: self.arity,
            eval: Arc::clone(&self.eval),
            alternation: self.alternation,
            domain: self.domain.clone(),
        }
    }
}

impl<P> std::fmt::Debug for Cochain<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cochain")
            .field("arity", &self.arity)
            .field("alternation", &self.alternation)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<P: 'static> Cochain<P> {
    pub fn new(arity: usize, domain: Domain, eval: impl Fn(&[P]) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            arity,
            eval: Arc::new(eval),
            alternation: Alternation::Unknown,
            domain,
        }
    }

    /// Marks the cochain as alternating; checked by [`Cochain::spot_check_alternating`].
    pub fn declare_alternating(mut self) -> Self {
        self.alternation = Alternation::Declared;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn alternation(&self) -> Alternation {
        self.alternation
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn evaluate(&self, args: &[P]) -> Result<f64> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        (self.eval)(args)
    }
}

impl<P: Clone + 'static> Cochain<P> {
    /// `f(x∘τ) = −f(x)` for every adjacent transposition `τ`, to `tol`.
    pub fn spot_check_alternating(&self, tuples: &[Vec<P>], tol: f64) -> Result<bool> {
        for t in tuples {
            let base = self.evaluate(t)?;
            for i in 0..self.arity.saturating_sub(1) {
                let mut s = t.clone();
                s.swap(i, i + 1);
                if (self.evaluate(&s)? + base).abs() > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn omit<P: Clone>(args: &[P], i: usize) -> Vec<P> {
    args.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| p.clone())
        .collect()
}

fn sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `δf(x₀,…,x_{q+1}) = Σᵢ (−1)ⁱ f(x₀,…,x̂ᵢ,…,x_{q+1})`.
pub fn coboundary<P: Clone + Send + Sync + 'static>(f: &Cochain<P>) -> Cochain<P> {
    let inner = f.clone();
    Cochain {
        arity: f.arity + 1,
        eval: Arc::new(move |args: &[P]| {
            let mut acc = 0.0;
            for i in 0..args.len() {
                acc += sign(i) * inner.evaluate(&omit(args, i))?;
            }
            Ok(acc)
        }),
        alternation: f.alternation,
        domain: f.domain.clone(),
    }
}

/// Permutations of `0..p` with their signs, in lexicographic order.
pub fn signed_permutations(p: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            let inv = (0..prefix.len())
                .flat_map(|i| (i + 1..prefix.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), sign(inv)));
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(p), &mut (0..p).collect(), &mut out);
    out
}

/// `Alt f = Σ_σ sgn(σ) f∘σ`.
pub fn alternate<P: Clone + Send + Sync + 'static>(f: &Cochain<P>) -> Result<Cochain<P>> {
    alternate_scaled(f, 1.0)
}

/// The projection `f ↦ Alt f / p!` onto alternating cochains.
pub fn alternation_projection<P: Clone + Send + Sync + 'static>(f: &Cochain<P>) -> Result<Cochain<P>> {
    let factorial: f64 = (1..=f.arity).map(|k| k as f64).product();
    alternate_scaled(f, 1.0 / factorial)
}

fn alternate_scaled<P: Clone + Send + Sync + 'static>(f: &Cochain<P>, scale: f64) -> Result<Cochain<P>> {
    if f.arity > MAX_ALTERNATION_ARITY {
        return Err(Error::ArityTooLarge(f.arity, MAX_ALTERNATION_ARITY));
    }
    let perms = signed_permutations(f.arity);
    let inner = f.clone();
    Ok(Cochain {
        arity: f.arity,
        eval: Arc::new(move |args: &[P]| {
            if args.len() != inner.arity {
                return Err(Error::ArityMismatch {
                    expected: inner.arity,
                    got: args.len(),
                });
            }
            let mut acc = 0.0;
            for (perm, s) in &perms {
                let permuted: Vec<P> = perm.iter().map(|&k| args[k].clone()).collect();
                acc += s * inner.evaluate(&permuted)?;
            }
            Ok(scale * acc)
        }),
        alternation: Alternation::Declared,
        domain: f.domain.clone(),
    })
}

/// A function of `model_arity` model-space points and `boundary_arity`
/// boundary parameters, `f(m₀,…,m_p; b)`.
pub struct BiCochain<M, B> {
    model_arity: usize,
    boundary_arity: usize,
    eval: BiEvaluator<M, B>,
}

impl<M, B> Clone for BiCochain<M, B> {
    fn clone(&self) -> Self {
        Self {
            model_arity: self.model_arity,
            boundary_arity: self.boundary_arity,
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<M: 'static, B: 'static> BiCochain<M, B> {
    pub fn new(
        model_arity: usize,
        boundary_arity: usize,
        eval: impl Fn(&[M], &[B]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            model_arity,
            boundary_arity,
            eval: Arc::new(eval),
        }
    }

    pub fn model_arity(&self) -> usize {
        self.model_arity
    }

    pub fn boundary_arity(&self) -> usize {
        self.boundary_arity
    }

    pub fn evaluate(&self, model: &[M], boundary: &[B]) -> Result<f64> {
        if model.len() != self.model_arity {
            return Err(Error::ArityMismatch {
                expected: self.model_arity,
                got: model.len(),
            });
        }
        if boundary.len() != self.boundary_arity {
            return Err(Error::ArityMismatch {
                expected: self.boundary_arity,
                got: boundary.len(),
            });
        }
        (self.eval)(model, boundary)
    }
}

/// `δ↑`: the homogeneous coboundary in the model slots, boundary slots untouched.
pub fn model_coboundary<M, B>(f: &BiCochain<M, B>) -> BiCochain<M, B>
where
    M: Clone + Send + Sync + 'static,
    B: 'static,
{
    let inner = f.clone();
    BiCochain::new(f.model_arity + 1, f.boundary_arity, move |m: &[M], b: &[B]| {
        let mut acc = 0.0;
        for i in 0..m.len() {
            acc += sign(i) * inner.evaluate(&omit(m, i), b)?;
        }
        Ok(acc)
    })
}

/// `(Hf)(m₀,…,m_{p−1}; b) = f(c(b), m₀,…,m_{p−1}; b)` for a cone point `c(b)`.
pub fn cone_with<M, B>(
    f: &BiCochain<M, B>,
    cone_point: impl Fn(&[B]) -> Result<M> + Send + Sync + 'static,
) -> Result<BiCochain<M, B>>
where
    M: Clone + Send + Sync + 'static,
    B: 'static,
{
    if f.model_arity == 0 {
        return Err(Error::InvalidConfig("cone homotopy needs at least one model slot".into()));
    }
    let inner = f.clone();
    Ok(BiCochain::new(f.model_arity - 1, f.boundary_arity, move |m: &[M], b: &[B]| {
        let mut args = Vec::with_capacity(m.len() + 1);
        args.push(cone_point(b)?);
        args.extend_from_slice(m);
        inner.evaluate(&args, b)
    }))
}

/// Cone homotopy through the barycenter of the ideal triangle spanned by
/// the first three boundary parameters.
pub fn cone_homotopy(
    f: &BiCochain<HyperbolicPoint, RealBoundaryPoint>,
) -> Result<BiCochain<HyperbolicPoint, RealBoundaryPoint>> {
    if f.boundary_arity < 3 {
        return Err(Error::InvalidConfig(
            "cone homotopy needs three boundary parameters for the barycenter".into(),
        ));
    }
    cone_with(f, |b: &[RealBoundaryPoint]| barycenter_ideal_triangle(&b[0], &b[1], &b[2]))
}

/// Empirical `sup |δf|` over sampled generic tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport<P> {
    pub sup_abs: f64,
    pub samples: usize,
    /// Index of the first sample attaining the supremum.
    pub argmax_index: usize,
    pub argmax_tuple: Vec<P>,
    pub seed: u64,
    /// Draws made by the rejection sampler, including rejected ones.
    pub draws: usize,
}

/// Samples `n` generic tuples of size `arity + 1` from substreams of `seed`
/// and records the largest `|δf|` together with its witness.
pub fn empirical_sup_defect<P, S>(f: &Cochain<P>, sampler: &S, n: usize, seed: u64) -> Result<DefectReport<P>>
where
    P: Clone + Send + Sync + 'static,
    S: TupleSampler<P> + ?Sized,
{
    let df = coboundary(f);
    let batch = sample_generic(sampler, df.arity(), n, seed)?;
    let values: Vec<f64> = batch
        .tuples
        .par_iter()
        .map(|t| df.evaluate(t).map(f64::abs))
        .collect::<Result<_>>()?;
    let (argmax_index, sup_abs) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    Ok(DefectReport {
        sup_abs,
        samples: n,
        argmax_index,
        argmax_tuple: batch.tuples[argmax_index].clone(),
        seed,
        draws: batch.draws,
    })
}
