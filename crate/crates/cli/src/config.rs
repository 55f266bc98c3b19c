//! TOML experiment configuration.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use genbound::bounds::{McSettings, SgldProblem};
use genbound::data::{FinitePmf, GaussianMixtureTask, LabeledPoint, MeanEstimationTask, Sampler};
use genbound::loss::{LossRange, LossTable, SigmoidLoss, SmoothLoss, WelschLoss};
use genbound::oracle::DiscreteProblem;
use genbound::rng::{fork, rng_from};
use genbound::sgld::{Schedule, SgldConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Master seed; `--seed` overrides it.
    pub seed: Option<u64>,
    pub problem: Option<ProblemSection>,
    pub task: Option<TaskSection>,
    pub sgld: Option<SgldSection>,
    pub mc: Option<McSection>,
    pub crossover: Option<CrossoverSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSection {
    /// `W = Z_1` on a fair coin with the 0-1 loss.
    Memorizing {},
    /// Gibbs algorithm with inverse temperature `beta`.
    Gibbs {
        z_pmf: Vec<f64>,
        n: usize,
        /// One row per hypothesis, one column per sample value.
        loss: Vec<Vec<f64>>,
        beta: f64,
        range: Option<[f64; 2]>,
    },
    /// Explicit kernel: one row per dataset (row-major order), one column
    /// per hypothesis.
    Kernel {
        z_pmf: Vec<f64>,
        n: usize,
        loss: Vec<Vec<f64>>,
        kernel: Vec<Vec<f64>>,
        range: Option<[f64; 2]>,
    },
    /// `count` random problems drawn from the master seed.
    Random { count: usize, max_z: usize, max_n: usize, max_w: usize },
}

fn default_held_out() -> usize {
    100_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSection {
    /// Two-class Gaussian mixture with the sigmoid loss.
    Classification {
        n: usize,
        dim: usize,
        separation: f64,
        noise: f64,
        clip_radius: f64,
        #[serde(default = "default_held_out")]
        held_out: usize,
        held_out_seed: Option<u64>,
    },
    /// One-dimensional location estimation with the Welsch loss.
    Mean {
        n: usize,
        mean: f64,
        spread: f64,
        welsch_scale: f64,
        #[serde(default = "default_held_out")]
        held_out: usize,
        held_out_seed: Option<u64>,
    },
}

fn default_init_scale() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgldSection {
    pub t_max: usize,
    pub batch_size: usize,
    /// `η_0`; divided by `⌈t / eta_decay_every⌉` when that is set.
    pub eta: f64,
    pub eta_decay_every: Option<usize>,
    pub sigma: f64,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
}

fn default_inner() -> usize {
    8
}

fn default_trace_holdout() -> usize {
    2000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub n_outer: usize,
    #[serde(default = "default_inner")]
    pub n_inner: usize,
    #[serde(default = "default_trace_holdout")]
    pub trace_holdout: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossoverSection {
    pub pi: f64,
    pub u: u8,
    pub c_min: f64,
    pub c_max: f64,
    pub steps: usize,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn seed(&self, overridden: Option<u64>) -> u64 {
        overridden.or(self.seed).unwrap_or(0)
    }

    fn section<'a, T>(v: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        v.as_ref().ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
    }

    pub fn oracle_problems(&self, seed: u64) -> Result<Vec<DiscreteProblem>, CliError> {
        let range = |r: &Option<[f64; 2]>| match r {
            Some([a, b]) => LossRange::new(*a, *b),
            None => Ok(LossRange::unit()),
        };
        let problems = match Self::section(&self.problem, "problem")? {
            ProblemSection::Memorizing {} => vec![DiscreteProblem::memorizing()],
            ProblemSection::Gibbs { z_pmf, n, loss, beta, range: r } => {
                let table = LossTable::new(loss.clone(), range(r)?)?;
                vec![DiscreteProblem::gibbs(FinitePmf::new(z_pmf.clone())?, *n, table, *beta)?]
            }
            ProblemSection::Kernel { z_pmf, n, loss, kernel, range: r } => {
                let table = LossTable::new(loss.clone(), range(r)?)?;
                vec![DiscreteProblem::new(FinitePmf::new(z_pmf.clone())?, *n, table, kernel.clone())?]
            }
            ProblemSection::Random { count, max_z, max_n, max_w } => {
                let mut rng = rng_from(fork(seed, 0));
                (0..*count).map(|_| DiscreteProblem::random(&mut rng, *max_z, *max_n, *max_w)).collect()
            }
        };
        Ok(problems)
    }

    pub fn sgld_problem(&self, seed: u64) -> Result<(SgldProblem, usize), CliError> {
        let (n, dim, loss, sampler): (usize, usize, Arc<dyn SmoothLoss<LabeledPoint>>, Sampler<LabeledPoint>) =
            match Self::section(&self.task, "task")? {
                TaskSection::Classification { n, dim, separation, noise, clip_radius, held_out, held_out_seed } => {
                    if *dim == 0 || !(*clip_radius > 0.0) || !(*noise >= 0.0) {
                        return Err(CliError::Config("classification needs dim >= 1, clip_radius > 0, noise >= 0".into()));
                    }
                    let task = GaussianMixtureTask {
                        dim: *dim,
                        separation: *separation,
                        noise: *noise,
                        clip_radius: *clip_radius,
                    };
                    let hs = held_out_seed.unwrap_or_else(|| fork(seed, 1));
                    (*n, *dim, Arc::new(SigmoidLoss::new(*clip_radius)), task.sampler(hs, *held_out))
                }
                TaskSection::Mean { n, mean, spread, welsch_scale, held_out, held_out_seed } => {
                    let task = MeanEstimationTask { mean: *mean, spread: *spread };
                    let hs = held_out_seed.unwrap_or_else(|| fork(seed, 1));
                    (*n, 1, Arc::new(WelschLoss::new(*welsch_scale)?), task.sampler(hs, *held_out))
                }
            };
        Ok((SgldProblem::new(n, loss, sampler)?, dim))
    }

    pub fn sgld_config(&self, dim: usize) -> Result<SgldConfig, CliError> {
        let s = Self::section(&self.sgld, "sgld")?;
        let eta = match s.eta_decay_every {
            Some(every) => Schedule::StepDecay { base: s.eta, every },
            None => Schedule::Constant(s.eta),
        };
        Ok(SgldConfig {
            t_max: s.t_max,
            batch_size: s.batch_size,
            dim,
            eta,
            sigma: Schedule::Constant(s.sigma),
            init_scale: s.init_scale,
            theta0_seed: 0,
            noise_seed: 0,
            batch_seed: 0,
        })
    }

    pub fn mc(&self, seed: u64) -> Result<McSettings, CliError> {
        let m = Self::section(&self.mc, "mc")?;
        Ok(McSettings { n_outer: m.n_outer, n_inner: m.n_inner, seed, trace_holdout: m.trace_holdout })
    }

    pub fn crossover(&self) -> Result<&CrossoverSection, CliError> {
        let c = Self::section(&self.crossover, "crossover")?;
        if c.u > 1 {
            return Err(CliError::Config(format!("crossover u must be 0 or 1, got {}", c.u)));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let c = Config::parse(
            r#"
seed = 5
[problem]
kind = "gibbs"
z_pmf = [0.5, 0.5]
n = 2
loss = [[0.0, 1.0], [1.0, 0.0]]
beta = 1.5
"#,
        )
        .unwrap();
        assert_eq!(c.seed(None), 5);
        assert_eq!(c.seed(Some(9)), 9);
        assert_eq!(c.oracle_problems(5).unwrap().len(), 1);
        assert!(c.sgld_config(2).is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Config::parse("sed = 1").is_err());
        assert!(Config::parse("[problem]\nkind = \"other\"").is_err());
        assert!(Config::parse("[mc]\nn_outer = 4\nextra = 1").is_err());
    }
}
