//! Samples, data distributions and the two risk functionals.

use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::rng::{rng_from, Rng};

/// Tolerance on `Σ p = 1` for exact probability tables.
pub const PMF_TOLERANCE: f64 = 1e-12;

/// A feature vector with a real label. Regression-style problems that have no
/// label set `y = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: f64,
}

/// A probability mass function over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmf {
    probs: Vec<f64>,
}

impl FinitePmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Distribution("empty pmf".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Distribution("pmf entries must be finite and >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::Distribution(format!("pmf sums to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Self {
        Self { probs: vec![1.0 / k as f64; k] }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }
}

type DrawFn<Z> = dyn Fn(&mut Rng) -> Z + Send + Sync;

/// A seeded generator of i.i.d. samples.
#[derive(Clone)]
pub struct Sampler<Z> {
    draw: Arc<DrawFn<Z>>,
    seed: u64,
    budget: usize,
}

impl<Z> Sampler<Z> {
    /// `seed` and `budget` describe the held-out set used for population risk.
    pub fn new(draw: impl Fn(&mut Rng) -> Z + Send + Sync + 'static, seed: u64, budget: usize) -> Self {
        Self { draw: Arc::new(draw), seed, budget }
    }

    pub fn draw(&self, rng: &mut Rng) -> Z {
        (self.draw)(rng)
    }

    pub fn draw_n(&self, n: usize, rng: &mut Rng) -> Vec<Z> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The fixed held-out sample standing in for `P_Z`.
    pub fn held_out(&self) -> Vec<Z> {
        self.draw_n(self.budget, &mut rng_from(self.seed))
    }
}

impl<Z> fmt::Debug for Sampler<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sampler")
            .field("seed", &self.seed)
            .field("budget", &self.budget)
            .finish_non_exhaustive()
    }
}

/// The data distribution `P_Z`.
#[derive(Debug, Clone)]
pub enum DataDistribution<Z> {
    /// Exact pmf over an explicit support.
    Finite { support: Vec<Z>, pmf: FinitePmf },
    /// Only accessible through draws.
    Sampled(Sampler<Z>),
}

impl DataDistribution<usize> {
    /// Pmf over the index set `0..pmf.len()`.
    pub fn indexed(pmf: FinitePmf) -> Self {
        let support = (0..pmf.len()).collect();
        DataDistribution::Finite { support, pmf }
    }
}

impl<Z> DataDistribution<Z> {
    pub fn finite(support: Vec<Z>, pmf: FinitePmf) -> Result<Self> {
        if support.len() != pmf.len() {
            return Err(Error::Distribution("support and pmf lengths differ".into()));
        }
        Ok(DataDistribution::Finite { support, pmf })
    }
}

/// `L_{P_Z}(w) = E_{P_Z}[ℓ(w, Z)]`: exact for finite distributions, a mean
/// over the held-out draws otherwise.
pub fn population_risk<W, Z, L>(w: &W, loss: &L, dist: &DataDistribution<Z>) -> Result<f64>
where
    W: ?Sized,
    L: Loss<W, Z> + ?Sized,
{
    match dist {
        DataDistribution::Finite { support, pmf } => Ok(support
            .iter()
            .zip(pmf.probs())
            .map(|(z, p)| p * loss.eval(w, z))
            .sum()),
        DataDistribution::Sampled(sampler) => {
            if sampler.budget() == 0 {
                return Err(Error::Distribution("population_eval_budget must be >= 1".into()));
            }
            empirical_risk(w, loss, &sampler.held_out())
        }
    }
}

/// `L_S(w) = (1/N) Σ ℓ(w, Z_i)`.
pub fn empirical_risk<W, Z, L>(w: &W, loss: &L, data: &[Z]) -> Result<f64>
where
    W: ?Sized,
    L: Loss<W, Z> + ?Sized,
{
    if data.is_empty() {
        return Err(Error::Usage("empirical risk of an empty dataset".into()));
    }
    Ok(mean_loss(w, loss, data.iter()))
}

pub(crate) fn mean_loss<'a, W, Z, L, I>(w: &W, loss: &L, data: I) -> f64
where
    W: ?Sized,
    Z: 'a,
    L: Loss<W, Z> + ?Sized,
    I: ExactSizeIterator<Item = &'a Z>,
{
    let n = data.len() as f64;
    data.map(|z| loss.eval(w, z)).sum::<f64>() / n
}

fn std_normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Binary classification with `y = ±1` equiprobable and
/// `x ~ N(y·(separation/2)·e_1, noise² I_d)`, projected onto the ball of
/// radius `clip_radius` so that features stay bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMixtureTask {
    pub dim: usize,
    pub separation: f64,
    pub noise: f64,
    pub clip_radius: f64,
}

impl GaussianMixtureTask {
    pub fn draw(&self, rng: &mut Rng) -> LabeledPoint {
        let y = if rand::Rng::random::<bool>(rng) { 1.0 } else { -1.0 };
        let mut x: Vec<f64> = (0..self.dim).map(|_| self.noise * std_normal(rng)).collect();
        x[0] += 0.5 * self.separation * y;
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > self.clip_radius {
            let s = self.clip_radius / norm;
            x.iter_mut().for_each(|v| *v *= s);
        }
        LabeledPoint { x, y }
    }

    pub fn sampler(self, held_out_seed: u64, budget: usize) -> Sampler<LabeledPoint> {
        Sampler::new(move |rng| self.draw(rng), held_out_seed, budget)
    }
}

/// One-dimensional location problem: `x ~ N(mean, spread²)`, `y = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimationTask {
    pub mean: f64,
    pub spread: f64,
}

impl MeanEstimationTask {
    pub fn draw(&self, rng: &mut Rng) -> LabeledPoint {
        LabeledPoint { x: vec![self.mean + self.spread * std_normal(rng)], y: 1.0 }
    }

    pub fn sampler(self, held_out_seed: u64, budget: usize) -> Sampler<LabeledPoint> {
        Sampler::new(move |rng| self.draw(rng), held_out_seed, budget)
    }
}
