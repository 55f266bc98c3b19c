//! Nested Monte Carlo estimates of the SGLD generalization bounds.
//!
//! Each outer replication draws a supersample `S̃`, selection bits `U` and a
//! batch sequence `V^T`. Inside it, `n_inner` trajectories share those draws
//! but have fresh initializations and noise; per-iteration summands are
//! averaged over them before the square root. The index `J` is enumerated over
//! all of `[N]` when `N ≤ 16` and drawn once per outer replication otherwise.
//!
//! All bounds are computed from the same trajectories, so for every seed
//! `min ≤ f`, `min ≤ g` and `f ≤ lipschitz` hold exactly.

use std::sync::Arc;

use crate::data::{LabeledPoint, Sampler};
use crate::error::{Error, Result};
use crate::loss::SmoothLoss;
use crate::rng::{fork, rng_from};
use crate::sgld::{
    draw_batches, incoherence, run_sgld, summand_f, summand_g, summand_scale, y_statistic, EstimatorState, SgldConfig,
};
use crate::subsample::SuperSample;

/// Largest `N` for which `J` is enumerated instead of sampled.
pub const ENUMERATE_J_UP_TO: usize = 16;

pub const BOUND_NAMES: [&str; 5] = ["f", "g", "min", "lipschitz", "negrea31"];

/// A learning task for SGLD: dataset size, loss and data distribution.
#[derive(Clone)]
pub struct SgldProblem {
    n: usize,
    loss: Arc<dyn SmoothLoss<LabeledPoint>>,
    sampler: Sampler<LabeledPoint>,
    held_out: Arc<Vec<LabeledPoint>>,
}

impl std::fmt::Debug for SgldProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SgldProblem").field("n", &self.n).field("sampler", &self.sampler).finish_non_exhaustive()
    }
}

impl SgldProblem {
    pub fn new(n: usize, loss: Arc<dyn SmoothLoss<LabeledPoint>>, sampler: Sampler<LabeledPoint>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("dataset size N must be >= 1".into()));
        }
        if sampler.budget() == 0 {
            return Err(Error::Distribution("population_eval_budget must be >= 1".into()));
        }
        let held_out = Arc::new(sampler.held_out());
        Ok(Self { n, loss, sampler, held_out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn loss(&self) -> &dyn SmoothLoss<LabeledPoint> {
        self.loss.as_ref()
    }

    pub fn held_out(&self) -> &[LabeledPoint] {
        &self.held_out
    }

    fn risk(&self, theta: &[f64], data: &[LabeledPoint]) -> f64 {
        data.iter().map(|z| self.loss.eval(theta, z)).sum::<f64>() / data.len() as f64
    }
}

/// Monte Carlo sizes and the master seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub n_outer: usize,
    pub n_inner: usize,
    pub seed: u64,
    /// Held-out points used for the per-iteration gap column. The final gap
    /// always uses the full held-out set.
    pub trace_holdout: usize,
}

impl McSettings {
    pub fn new(n_outer: usize, n_inner: usize, seed: u64) -> Self {
        Self { n_outer, n_inner, seed, trace_holdout: 2000 }
    }
}

/// A mean over outer replications with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let value = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self { value, stderr: 0.0 };
        }
        let var = xs.iter().map(|x| (x - value) * (x - value)).sum::<f64>() / (n - 1.0);
        Self { value, stderr: (var / n).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
    /// Outer replications that entered the estimate (divergent ones excluded).
    pub n_outer: usize,
    pub n_inner: usize,
    pub seed: u64,
    pub gen_gap: f64,
    pub gen_gap_stderr: f64,
}

/// Per-iteration averages. Summand means are over outer replications, inner
/// trajectories and indices `j ∈ V_t`; `cumulative` holds each bound computed
/// with the sums truncated at `t`, in the order of [`BOUND_NAMES`].
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub eta: f64,
    pub sigma: f64,
    pub mean_f: f64,
    pub mean_g: f64,
    pub mean_min: f64,
    pub mean_sq_pi_error: f64,
    pub cumulative: [Option<f64>; 5],
    pub gen_gap: f64,
    pub gen_gap_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    /// One report per entry of [`BOUND_NAMES`]; the last two are absent
    /// when the loss has no Lipschitz constant.
    pub reports: Vec<BoundReport>,
    pub trace: Vec<TraceRow>,
    pub gen_gap: Estimate,
    pub emp_gen_gap: Estimate,
    pub diverged_trajectories: usize,
    pub total_trajectories: usize,
}

impl Experiment {
    pub fn report(&self, name: &str) -> Option<&BoundReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn divergence_rate(&self) -> f64 {
        self.diverged_trajectories as f64 / self.total_trajectories as f64
    }
}

struct Outer {
    diverged: usize,
    first_bad: Option<usize>,
    /// `[bound][t - 1]`
    cumulative: [Vec<f64>; 5],
    /// `[f, g, min, sq_err, count][t - 1]`
    summands: [Vec<f64>; 5],
    gap: f64,
    emp_gap: f64,
    gap_trace: Vec<f64>,
}

fn check_inputs(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<()> {
    cfg.validate(problem.n)?;
    if mc.n_outer < 2 || mc.n_inner < 1 {
        return Err(Error::Usage(format!(
            "need n_outer >= 2 and n_inner >= 1 (got {} and {})",
            mc.n_outer, mc.n_inner
        )));
    }
    if mc.trace_holdout == 0 {
        return Err(Error::Usage("trace_holdout must be >= 1".into()));
    }
    if (1..=cfg.t_max).any(|t| cfg.sigma.at(t) <= 0.0) {
        return Err(Error::Usage("the bounds need sigma_t > 0 at every iteration".into()));
    }
    Ok(())
}

fn index_set(n: usize, outer_seed: u64) -> Vec<usize> {
    if n <= ENUMERATE_J_UP_TO {
        (0..n).collect()
    } else {
        vec![rand::Rng::random_range(&mut rng_from(fork(outer_seed, 2)), 0..n)]
    }
}

fn run_outer(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings, k: usize) -> Result<Outer> {
    let n = problem.n;
    let t_max = cfg.t_max;
    let os = fork(mc.seed, k as u64);
    let mut rng = rng_from(fork(os, 0));
    let zt = problem.sampler.draw_n(2 * n, &mut rng);
    let bits = SuperSample::<LabeledPoint>::draw_bits(n, &mut rng);
    let ss = SuperSample::new(zt, bits)?;
    let data = ss.compose_dataset();
    let js = index_set(n, os);
    let loss = problem.loss();
    let width = loss.range().width();
    let lip = loss.lipschitz();

    // inner sums of the f, g, min and Lipschitz summands, `[slot][jpos * T + t - 1]`
    let mut inner: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; js.len() * t_max]);
    let batch_seed = fork(os, 1);
    let batches = draw_batches(n, cfg.batch_size, t_max, batch_seed);
    let mut summands: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; t_max]);
    let mut diverged = 0;
    let mut first_bad = None;
    let mut gaps = Vec::with_capacity(mc.n_inner);
    let mut emp_gaps = Vec::with_capacity(mc.n_inner);
    let mut gap_trace = Vec::new();
    let trace_set = &problem.held_out[..mc.trace_holdout.min(problem.held_out.len())];
    let mut position = vec![usize::MAX; n];
    for (p, &j) in js.iter().enumerate() {
        position[j] = p;
    }

    for i in 0..mc.n_inner {
        let run_cfg = SgldConfig {
            theta0_seed: fork(fork(os, 3), i as u64),
            noise_seed: fork(fork(os, 4), i as u64),
            batch_seed,
            ..cfg.clone()
        };
        let traj = match run_sgld(&run_cfg, &data, loss) {
            Ok(tr) => tr,
            Err(Error::Diverged { iteration }) => {
                diverged += 1;
                first_bad.get_or_insert(iteration);
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut states = vec![EstimatorState::new(); js.len()];
        for t in 1..=t_max {
            let (eta, sigma) = (traj.eta(t), traj.sigma(t));
            let kb = traj.batch(t).len();
            for &j in traj.batch(t) {
                let p = position[j];
                if p == usize::MAX {
                    continue;
                }
                let zeta = incoherence(&traj, &ss, j, t, loss);
                let c = summand_scale(eta, sigma, kb, zeta.iter().map(|v| v * v).sum());
                let pi = states[p].pi();
                let u = ss.bit(j);
                let f = summand_f(c, pi, u);
                let g = summand_g(c, pi, u);
                let slot = p * t_max + t - 1;
                inner[0][slot] += f;
                inner[1][slot] += g;
                inner[2][slot] += f.min(g);
                if let Some(l) = lip {
                    inner[3][slot] += summand_f(summand_scale(eta, sigma, kb, 4.0 * l * l), pi, u);
                }
                let e = if u { 1.0 - pi } else { pi };
                summands[0][t - 1] += f;
                summands[1][t - 1] += g;
                summands[2][t - 1] += f.min(g);
                summands[3][t - 1] += e * e;
                summands[4][t - 1] += 1.0;
                let y0 = y_statistic(&traj, &ss, j, t, false, loss)?;
                let y1 = y_statistic(&traj, &ss, j, t, true, loss)?;
                states[p].update(y0, y1);
            }
        }
        let last = traj.theta(t_max);
        let emp = problem.risk(last, &data);
        gaps.push(problem.risk(last, &problem.held_out) - emp);
        let unselected: Vec<LabeledPoint> = (0..n).map(|i| ss.unselected(i).clone()).collect();
        emp_gaps.push(problem.risk(last, &unselected) - emp);
        if gap_trace.is_empty() {
            gap_trace = (1..=t_max)
                .map(|t| problem.risk(traj.theta(t), trace_set) - problem.risk(traj.theta(t), &data))
                .collect();
        }
    }

    let mut cumulative: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; t_max]);
    let used = mc.n_inner - diverged;
    if diverged == 0 {
        let root2w = std::f64::consts::SQRT_2 * width;
        let share = 1.0 / js.len() as f64;
        for (p, &j) in js.iter().enumerate() {
            let mut acc = [0.0f64; 5];
            for t in 1..=t_max {
                let slot = p * t_max + t - 1;
                for b in 0..4 {
                    acc[b] += inner[b][slot] / used as f64;
                }
                if batches[t - 1].binary_search(&j).is_ok() {
                    let r = cfg.eta.at(t) / cfg.sigma.at(t);
                    acc[4] += r * r;
                }
                for b in 0..3 {
                    cumulative[b][t - 1] += share * root2w * acc[b].sqrt();
                }
                if let Some(l) = lip {
                    cumulative[3][t - 1] += share * root2w * acc[3].sqrt();
                    let k = cfg.batch_size as f64;
                    cumulative[4][t - 1] += share * l * width / (std::f64::consts::SQRT_2 * k) * acc[4].sqrt();
                }
            }
        }
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    Ok(Outer {
        diverged,
        first_bad,
        cumulative,
        summands,
        gap: mean(&gaps),
        emp_gap: mean(&emp_gaps),
        gap_trace,
    })
}

#[cfg(feature = "parallel")]
fn run_all(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Vec<Result<Outer>> {
    use rayon::prelude::*;
    (0..mc.n_outer).into_par_iter().map(|k| run_outer(problem, cfg, mc, k)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Vec<Result<Outer>> {
    (0..mc.n_outer).map(|k| run_outer(problem, cfg, mc, k)).collect()
}

/// Runs the full nested estimate once and returns every bound.
pub fn run_experiment(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<Experiment> {
    check_inputs(problem, cfg, mc)?;
    let t_max = cfg.t_max;
    let outers = run_all(problem, cfg, mc).into_iter().collect::<Result<Vec<_>>>()?;
    let diverged: usize = outers.iter().map(|o| o.diverged).sum();
    let ok: Vec<&Outer> = outers.iter().filter(|o| o.diverged == 0).collect();
    if ok.len() < 2 {
        let iteration = outers.iter().find_map(|o| o.first_bad).unwrap_or(0);
        return Err(Error::Diverged { iteration });
    }
    let has_lip = problem.loss().lipschitz().is_some();
    let column = |f: &dyn Fn(&Outer) -> f64| Estimate::from_samples(&ok.iter().map(|o| f(o)).collect::<Vec<_>>());
    let gen_gap = column(&|o| o.gap);
    let emp_gen_gap = column(&|o| o.emp_gap);

    let mut reports = Vec::new();
    for (b, name) in BOUND_NAMES.iter().enumerate() {
        if b >= 3 && !has_lip {
            continue;
        }
        let est = column(&|o| o.cumulative[b][t_max - 1]);
        reports.push(BoundReport {
            name: name.to_string(),
            value: est.value,
            stderr: est.stderr,
            n_outer: ok.len(),
            n_inner: mc.n_inner,
            seed: mc.seed,
            gen_gap: gen_gap.value,
            gen_gap_stderr: gen_gap.stderr,
        });
    }

    let trace = (1..=t_max)
        .map(|t| {
            let sum = |s: usize| ok.iter().map(|o| o.summands[s][t - 1]).sum::<f64>();
            let count = sum(4);
            let avg = |s: usize| if count > 0.0 { sum(s) / count } else { 0.0 };
            let cumulative = std::array::from_fn(|b| {
                (b < 3 || has_lip).then(|| ok.iter().map(|o| o.cumulative[b][t - 1]).sum::<f64>() / ok.len() as f64)
            });
            let gap = column(&|o| o.gap_trace[t - 1]);
            TraceRow {
                t,
                eta: cfg.eta.at(t),
                sigma: cfg.sigma.at(t),
                mean_f: avg(0),
                mean_g: avg(1),
                mean_min: avg(2),
                mean_sq_pi_error: avg(3),
                cumulative,
                gen_gap: gap.value,
                gen_gap_stderr: gap.stderr,
            }
        })
        .collect();

    Ok(Experiment {
        reports,
        trace,
        gen_gap,
        emp_gen_gap,
        diverged_trajectories: diverged,
        total_trajectories: mc.n_outer * mc.n_inner,
    })
}

fn single(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings, name: &str) -> Result<BoundReport> {
    if (name == "lipschitz" || name == "negrea31") && problem.loss().lipschitz().is_none() {
        return Err(Error::Usage(format!("the {name} bound needs a Lipschitz loss")));
    }
    let exp = run_experiment(problem, cfg, mc)?;
    Ok(exp.report(name).cloned().expect("report present"))
}

/// `√2 (b − a) E[√(Σ_{t ∈ T_J} E[f_{J,t}])]`.
pub fn estimate_bound_f(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<BoundReport> {
    single(problem, cfg, mc, "f")
}

/// As [`estimate_bound_f`] with the mixture summands `g_{J,t}`.
pub fn estimate_bound_g(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<BoundReport> {
    single(problem, cfg, mc, "g")
}

/// As [`estimate_bound_f`] with `min(f_{J,t}, g_{J,t})`.
pub fn estimate_bound_min(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<BoundReport> {
    single(problem, cfg, mc, "min")
}

/// `(2L/K)(b − a) E[√(Σ_{t ∈ T_J} (η_t²/σ_t²) E[(U_J − π_{J,t})²])]`.
pub fn estimate_bound_lipschitz(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<BoundReport> {
    single(problem, cfg, mc, "lipschitz")
}

/// `(L(b − a)/(√2 K)) E[√(Σ_{t ∈ T_J} η_t²/σ_t²)]`.
pub fn estimate_bound_negrea31(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<BoundReport> {
    single(problem, cfg, mc, "negrea31")
}

/// `(E[gen], E[ĝen])` over the same draws as the bounds.
pub fn estimate_gen_gap(problem: &SgldProblem, cfg: &SgldConfig, mc: &McSettings) -> Result<(Estimate, Estimate)> {
    let exp = run_experiment(problem, cfg, mc)?;
    Ok((exp.gen_gap, exp.emp_gen_gap))
}
