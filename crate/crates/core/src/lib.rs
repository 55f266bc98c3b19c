//! Information-theoretic expected generalization bounds, evaluated two ways:
//! exactly, by enumerating tiny discrete learning problems, and by Monte
//! Carlo over stochastic gradient Langevin dynamics (SGLD) runs.
//!
//! | module | contents |
//! |--------|----------|
//! | [`loss`], [`data`] | bounded losses, data distributions, risks |
//! | [`subsample`] | supersamples, selection bits, subsets, gen / ĝen |
//! | [`info`] | KL, MI, CMI on finite joints; Gaussian and mixture KL |
//! | [`oracle`] | exhaustive enumeration and exact bound values |
//! | [`sgld`] | SGLD trajectories, two-sample incoherence, `π` estimator |
//! | [`bounds`] | nested Monte Carlo estimates of the SGLD bounds |

pub mod bounds;
pub mod data;
pub mod error;
pub mod info;
pub mod loss;
pub mod oracle;
pub mod rng;
pub mod sgld;
pub mod subsample;

pub use error::{Error, Result};
