//! WebAssembly bindings for the browser demo in `www/`.
//!
//! All functions return flat `Vec<f64>` buffers so the page can draw them
//! without a serialization layer.

use wasm_bindgen::prelude::*;

use genbound::data::FinitePmf;
use genbound::info::{gaussian_vs_mixture_kl_mc, mixture_gaussian_kl_bound, IsotropicGaussian};
use genbound::loss::{LossRange, LossTable};
use genbound::oracle::{DiscreteProblem, Oracle};
use genbound::sgld::{crossover_root, crossover_scan};

fn js_err(e: genbound::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `f` and `g` summands on a grid of `c`, as rows `[c, f, g]`.
#[wasm_bindgen]
pub fn crossover_curve(pi: f64, u: bool, c_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    let points = crossover_scan(pi, u, 0.0, c_max, steps).map_err(js_err)?;
    Ok(points.iter().flat_map(|p| [p.c, p.f, p.g]).collect())
}

/// Value of `c` where `f = g`, or NaN if they do not cross on `[0, c_max]`.
#[wasm_bindgen]
pub fn crossover_point(pi: f64, u: bool, c_max: f64) -> f64 {
    crossover_root(pi, u, 1e-9, c_max).unwrap_or(f64::NAN)
}

/// Closed-form mixture bound against a Monte Carlo KL estimate:
/// `[bound, estimate, stderr]`.
#[wasm_bindgen]
pub fn mixture_check(c: f64, pi: f64, u: bool, samples: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    if !(c >= 0.0 && c.is_finite()) || !(0.0..=1.0).contains(&pi) {
        return Err(JsError::new("need c >= 0 and pi in [0, 1]"));
    }
    let gauss = |m: f64| IsotropicGaussian::new(vec![m], 1.0).map_err(js_err);
    let q0 = gauss(0.0)?;
    let q1 = gauss((2.0 * c).sqrt())?;
    let p = if u { q1.clone() } else { q0.clone() };
    let (kl, se) = gaussian_vs_mixture_kl_mc(&p, &q0, &q1, pi, samples, seed).map_err(js_err)?;
    Ok(vec![mixture_gaussian_kl_bound(c, pi, u), kl, se])
}

/// Sweeps the Gibbs inverse temperature on a two-hypothesis coin problem.
/// Rows are `[beta, E[gen], individual_mi, individual_cmi, disintegrated_cmi]`.
#[wasm_bindgen]
pub fn gibbs_sweep(n: usize, p_heads: f64, beta_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    if !(1..=8).contains(&n) || steps < 2 || !(beta_max > 0.0 && beta_max.is_finite()) {
        return Err(JsError::new("need 1 <= n <= 8, steps >= 2 and beta_max > 0"));
    }
    let pmf = FinitePmf::new(vec![1.0 - p_heads, p_heads]).map_err(js_err)?;
    let loss = LossTable::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], LossRange::unit()).map_err(js_err)?;
    let mut out = Vec::with_capacity(steps * 5);
    for i in 0..steps {
        let beta = beta_max * i as f64 / (steps - 1) as f64;
        let problem = DiscreteProblem::gibbs(pmf.clone(), n, loss.clone(), beta).map_err(js_err)?;
        let oracle = Oracle::new(problem).map_err(js_err)?;
        out.extend([
            beta,
            oracle.expected_gen().map_err(js_err)?.gen,
            oracle.bound_individual_mi().map_err(js_err)?,
            oracle.bound_individual_cmi().map_err(js_err)?,
            oracle.bound_disintegrated_cmi(1).map_err(js_err)?,
        ]);
    }
    Ok(out)
}
