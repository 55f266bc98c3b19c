//! Stochastic gradient Langevin dynamics and the per-iteration quantities of
//! its generalization bounds.
//!
//! Iterations are 1-based: `thetas[t]` is `θ_t`, `batches[t - 1]` is `V_t`.
//! The update is `θ_t = θ_{t−1} − η_t ∇L_{S_{V_t}}(θ_{t−1}) + σ_t ε_t`.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::info::mixture_gaussian_kl_bound;
use crate::loss::SmoothLoss;
use crate::rng::{rng_from, Rng};
use crate::subsample::SuperSample;

/// A positive sequence indexed by iteration `t ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// `base / ⌈t / every⌉`.
    StepDecay { base: f64, every: usize },
}

impl Schedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            Schedule::Constant(v) => v,
            Schedule::StepDecay { base, every } => base / t.div_ceil(every).max(1) as f64,
        }
    }

    fn validate(&self, name: &str, allow_zero: bool) -> Result<()> {
        let v = match *self {
            Schedule::Constant(v) => v,
            Schedule::StepDecay { base, every } => {
                if every == 0 {
                    return Err(Error::Usage(format!("{name}: decay period must be >= 1")));
                }
                base
            }
        };
        let ok = v.is_finite() && if allow_zero { v >= 0.0 } else { v > 0.0 };
        if !ok {
            return Err(Error::Usage(format!("{name} schedule has invalid value {v}")));
        }
        Ok(())
    }
}

/// Everything that determines an SGLD run besides the data and the loss.
#[derive(Debug, Clone, PartialEq)]
pub struct SgldConfig {
    pub t_max: usize,
    pub batch_size: usize,
    pub dim: usize,
    pub eta: Schedule,
    pub sigma: Schedule,
    /// `θ_0 ~ N(0, init_scale² I)`.
    pub init_scale: f64,
    pub theta0_seed: u64,
    pub noise_seed: u64,
    pub batch_seed: u64,
}

impl SgldConfig {
    /// Zero step sizes and zero noise are accepted here; the bound estimators
    /// additionally require `σ_t > 0`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.batch_size == 0 || self.batch_size > n {
            return Err(Error::Usage(format!("batch size {} not in 1..={n}", self.batch_size)));
        }
        if self.dim == 0 {
            return Err(Error::Usage("parameter dimension must be >= 1".into()));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::Usage(format!("init scale {} must be finite and >= 0", self.init_scale)));
        }
        self.eta.validate("eta", true)?;
        self.sigma.validate("sigma", true)
    }
}

/// A recorded SGLD run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `θ_0 ..= θ_T`.
    pub thetas: Vec<Vec<f64>>,
    /// Sorted batch indices into the training set, `V_1 ..= V_T`.
    pub batches: Vec<Vec<usize>>,
    /// `ε_1 ..= ε_T`.
    pub noises: Vec<Vec<f64>>,
    /// `∇L_{S_{V_t}}(θ_{t−1})` for `t = 1 ..= T`.
    pub batch_grads: Vec<Vec<f64>>,
    pub etas: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl Trajectory {
    pub fn t_max(&self) -> usize {
        self.batches.len()
    }

    pub fn theta(&self, t: usize) -> &[f64] {
        &self.thetas[t]
    }

    pub fn batch(&self, t: usize) -> &[usize] {
        &self.batches[t - 1]
    }

    pub fn eta(&self, t: usize) -> f64 {
        self.etas[t - 1]
    }

    pub fn sigma(&self, t: usize) -> f64 {
        self.sigmas[t - 1]
    }

    pub fn in_batch(&self, j: usize, t: usize) -> bool {
        self.batch(t).binary_search(&j).is_ok()
    }

    /// `T_j(V^T)`: the iterations whose batch contains `j`.
    pub fn visits(&self, j: usize) -> Vec<usize> {
        (1..=self.t_max()).filter(|&t| self.in_batch(j, t)).collect()
    }

    /// One line per iteration: `t θ_1 .. θ_d | batch` with 1-based batch
    /// indices. Line 0 holds `θ_0` and an empty batch.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, theta) in self.thetas.iter().enumerate() {
            let _ = write!(out, "{t}");
            for v in theta {
                let _ = write!(out, " {v:?}");
            }
            out.push_str(" |");
            if t > 0 {
                for j in self.batch(t) {
                    let _ = write!(out, " {}", j + 1);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// One parsed line of [`Trajectory::to_text`]; batch indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TextRecord {
    pub t: usize,
    pub theta: Vec<f64>,
    pub batch: Vec<usize>,
}

pub fn parse_trajectory_text(text: &str) -> Result<Vec<TextRecord>> {
    let bad = |line: usize, what: &str| Error::Usage(format!("trajectory line {}: {what}", line + 1));
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, line)| {
            let (head, tail) = line.split_once('|').ok_or_else(|| bad(k, "missing '|'"))?;
            let mut fields = head.split_whitespace();
            let t = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(k, "bad iteration number"))?;
            let theta = fields
                .map(|s| s.parse::<f64>().map_err(|_| bad(k, "bad coordinate")))
                .collect::<Result<Vec<_>>>()?;
            let batch = tail
                .split_whitespace()
                .map(|s| match s.parse::<usize>() {
                    Ok(j) if j >= 1 => Ok(j - 1),
                    _ => Err(bad(k, "bad batch index")),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TextRecord { t, theta, batch })
        })
        .collect()
}

fn gaussian_vec(rng: &mut Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let e: f64 = StandardNormal.sample(rng);
            scale * e
        })
        .collect()
}

/// `V_1 ..= V_T`, each uniform without replacement and sorted.
pub fn draw_batches(n: usize, k: usize, t_max: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = rng_from(seed);
    (0..t_max)
        .map(|_| {
            let mut b = sample(&mut rng, n, k).into_vec();
            b.sort_unstable();
            b
        })
        .collect()
}

/// Runs SGLD on `data` from the seeds in `cfg`.
pub fn run_sgld<Z, L>(cfg: &SgldConfig, data: &[Z], loss: &L) -> Result<Trajectory>
where
    L: SmoothLoss<Z> + ?Sized,
{
    cfg.validate(data.len())?;
    let d = cfg.dim;
    let k = cfg.batch_size as f64;
    let batches = draw_batches(data.len(), cfg.batch_size, cfg.t_max, cfg.batch_seed);
    let mut noise_rng = rng_from(cfg.noise_seed);
    let theta0 = gaussian_vec(&mut rng_from(cfg.theta0_seed), d, cfg.init_scale);
    let mut thetas = Vec::with_capacity(cfg.t_max + 1);
    thetas.push(theta0);
    let mut noises = Vec::with_capacity(cfg.t_max);
    let mut batch_grads = Vec::with_capacity(cfg.t_max);
    let mut etas = Vec::with_capacity(cfg.t_max);
    let mut sigmas = Vec::with_capacity(cfg.t_max);
    let mut g = vec![0.0; d];
    for t in 1..=cfg.t_max {
        let prev = &thetas[t - 1];
        let mut grad = vec![0.0; d];
        for &i in &batches[t - 1] {
            loss.grad_into(prev, &data[i], &mut g);
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
        grad.iter_mut().for_each(|a| *a /= k);
        let (eta, sigma) = (cfg.eta.at(t), cfg.sigma.at(t));
        let eps = gaussian_vec(&mut noise_rng, d, 1.0);
        let next: Vec<f64> = (0..d).map(|c| prev[c] - eta * grad[c] + sigma * eps[c]).collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { iteration: t });
        }
        thetas.push(next);
        noises.push(eps);
        batch_grads.push(grad);
        etas.push(eta);
        sigmas.push(sigma);
    }
    Ok(Trajectory { thetas, batches, noises, batch_grads, etas, sigmas })
}

/// `ζ_{j,t} = ∇ℓ(θ_{t−1}, Z̃_j) − ∇ℓ(θ_{t−1}, Z̃_{j+N})`.
pub fn incoherence<Z, L>(traj: &Trajectory, ss: &SuperSample<Z>, j: usize, t: usize, loss: &L) -> Vec<f64>
where
    L: SmoothLoss<Z> + ?Sized,
{
    let theta = traj.theta(t - 1);
    let n = ss.n();
    let a = loss.grad(theta, &ss.ztilde()[j]);
    let b = loss.grad(theta, &ss.ztilde()[j + n]);
    a.iter().zip(&b).map(|(x, y)| x - y).collect()
}

/// `Y_{j,t,u} = ‖θ_t − θ_{t−1} + (η_t/K)(∇ℓ(θ_{t−1}, Z̃_{j+uN}) + Σ_{i ∈ V_t∖j} ∇ℓ(θ_{t−1}, S_i))‖² / (2σ_t²)`:
/// the negative log-likelihood, up to a constant, of step `t` when the
/// sample at position `j` of the batch is `Z̃_{j+uN}`.
pub fn y_statistic<Z, L>(
    traj: &Trajectory,
    ss: &SuperSample<Z>,
    j: usize,
    t: usize,
    u: bool,
    loss: &L,
) -> Result<f64>
where
    L: SmoothLoss<Z> + ?Sized,
{
    if !traj.in_batch(j, t) {
        return Err(Error::Usage(format!("index {j} is not in the batch of iteration {t}")));
    }
    let sigma = traj.sigma(t);
    if sigma <= 0.0 {
        return Err(Error::Usage(format!("sigma_{t} must be > 0 for the likelihood statistic")));
    }
    let k = traj.batch(t).len() as f64;
    let prev = traj.theta(t - 1);
    let cur = traj.theta(t);
    let n = ss.n();
    let used = loss.grad(prev, ss.selected(j));
    let cand = loss.grad(prev, &ss.ztilde()[j + if u { n } else { 0 }]);
    let eta = traj.eta(t);
    let sq: f64 = (0..prev.len())
        .map(|c| {
            let rest = k * traj.batch_grads[t - 1][c] - used[c];
            let r = cur[c] - prev[c] + eta / k * (cand[c] + rest);
            r * r
        })
        .sum();
    Ok(sq / (2.0 * sigma * sigma))
}

/// `1 / (1 + e^{−x})` without overflow.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Running log-odds `Λ = Σ (Y_0 − Y_1)` of `U_j = 1` over past visits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EstimatorState {
    pub log_odds: f64,
}

impl EstimatorState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, y0: f64, y1: f64) {
        self.log_odds += y0 - y1;
    }

    /// Posterior `P(U_j = 1 | history)` under a uniform prior.
    pub fn pi(&self) -> f64 {
        logistic(self.log_odds)
    }
}

/// `(t, π_{j,t})` for each `t ∈ T_j`, where `π_{j,t}` uses visits strictly
/// before `t`.
pub fn pi_path<Z, L>(traj: &Trajectory, ss: &SuperSample<Z>, j: usize, loss: &L) -> Result<Vec<(usize, f64)>>
where
    L: SmoothLoss<Z> + ?Sized,
{
    let mut state = EstimatorState::new();
    let mut out = Vec::new();
    for t in traj.visits(j) {
        out.push((t, state.pi()));
        state.update(y_statistic(traj, ss, j, t, false, loss)?, y_statistic(traj, ss, j, t, true, loss)?);
    }
    Ok(out)
}

/// `c = η² ‖ζ‖² / (2σ² K²)`.
pub fn summand_scale(eta: f64, sigma: f64, k: usize, zeta_sq: f64) -> f64 {
    let k = k as f64;
    eta * eta * zeta_sq / (2.0 * sigma * sigma * k * k)
}

fn bit(u: bool) -> f64 {
    if u {
        1.0
    } else {
        0.0
    }
}

/// `c (u − π)²`.
pub fn summand_f(c: f64, pi: f64, u: bool) -> f64 {
    let e = bit(u) - pi;
    c * e * e
}

/// `−ln(|u − π| e^{−c} + |1 − π − u|)`.
pub fn summand_g(c: f64, pi: f64, u: bool) -> f64 {
    mixture_gaussian_kl_bound(c, pi, u)
}

fn scale_at<Z, L>(traj: &Trajectory, ss: &SuperSample<Z>, j: usize, t: usize, loss: &L) -> Result<f64>
where
    L: SmoothLoss<Z> + ?Sized,
{
    if !traj.in_batch(j, t) {
        return Err(Error::Usage(format!("index {j} is not in the batch of iteration {t}")));
    }
    let zeta = incoherence(traj, ss, j, t, loss);
    let zsq = zeta.iter().map(|v| v * v).sum();
    Ok(summand_scale(traj.eta(t), traj.sigma(t), traj.batch(t).len(), zsq))
}

/// `f_{j,t} = (η_t² ‖ζ_{j,t}‖² / (2σ_t² K²)) (U_j − π)²`.
pub fn per_iter_f<Z, L>(traj: &Trajectory, ss: &SuperSample<Z>, j: usize, t: usize, pi: f64, loss: &L) -> Result<f64>
where
    L: SmoothLoss<Z> + ?Sized,
{
    Ok(summand_f(scale_at(traj, ss, j, t, loss)?, pi, ss.bit(j)))
}

/// `g_{j,t}`: the mixture KL bound with the same scale as `f_{j,t}`.
pub fn per_iter_g<Z, L>(traj: &Trajectory, ss: &SuperSample<Z>, j: usize, t: usize, pi: f64, loss: &L) -> Result<f64>
where
    L: SmoothLoss<Z> + ?Sized,
{
    Ok(summand_g(scale_at(traj, ss, j, t, loss)?, pi, ss.bit(j)))
}

/// One row of a crossover scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverPoint {
    pub c: f64,
    /// `η ‖ζ‖ / (σ K) = √(2c)`.
    pub r: f64,
    pub f: f64,
    pub g: f64,
}

/// `f` and `g` at `steps` evenly spaced scales in `[c_min, c_max]`.
pub fn crossover_scan(pi: f64, u: bool, c_min: f64, c_max: f64, steps: usize) -> Result<Vec<CrossoverPoint>> {
    if !(0.0..=1.0).contains(&pi) || !(c_min >= 0.0 && c_max > c_min && c_max.is_finite()) || steps < 2 {
        return Err(Error::Usage(format!(
            "crossover scan needs pi in [0,1], 0 <= c_min < c_max and >= 2 steps (got pi={pi}, [{c_min}, {c_max}], {steps})"
        )));
    }
    Ok((0..steps)
        .map(|k| {
            let c = c_min + (c_max - c_min) * k as f64 / (steps - 1) as f64;
            CrossoverPoint { c, r: (2.0 * c).sqrt(), f: summand_f(c, pi, u), g: summand_g(c, pi, u) }
        })
        .collect())
}

/// The scale `c` in `[lo, hi]` where `f − g` changes sign, found by
/// bisection, or `None` unless it has strictly opposite signs at the ends.
pub fn crossover_root(pi: f64, u: bool, lo: f64, hi: f64) -> Option<f64> {
    let h = |c: f64| summand_f(c, pi, u) - summand_g(c, pi, u);
    let (mut a, mut b) = (lo, hi);
    let (ha, hb) = (h(a), h(b));
    if ha == 0.0 || hb == 0.0 || ha.signum() == hb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if h(m).signum() == ha.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}
