//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::path::{Path, PathBuf};

use genbound::bounds::Experiment;
use genbound::info::{gaussian_kl_isotropic, gaussian_vs_mixture_kl_mc, mixture_gaussian_kl_bound, IsotropicGaussian};
use genbound::oracle::{DiscreteProblem, Oracle, OracleReport};
use genbound::rng::{fork, rng_from};
use genbound::sgld::crossover_root;
use genbound_cli::commands::{run_sgld_experiment, summary_csv, trace_csv};
use genbound_cli::config::Config;
use rand::Rng;

const MASTER_SEED: u64 = 20_240_611;

const N_PROBLEMS: usize = 20;
const MAX_N: usize = 3;
const MAX_Z: usize = 3;
const MAX_W: usize = 8;
const IDENTITY_TOL: f64 = 1e-12;
const CHAIN_SLACK: f64 = 1e-9;
const VALIDITY_SLACK: f64 = 1e-9;

const KL_CASES: usize = 50;
const QUADRATURE_TOL: f64 = 1e-6;

const MIXTURE_CASES: usize = 50;
const MIXTURE_SAMPLES: usize = 100_000;
const MIXTURE_STDERRS: f64 = 3.0;

const CROSSOVER_PI: f64 = 0.5;
const CROSSOVER_LO: f64 = 2.20;
const CROSSOVER_HI: f64 = 2.22;

const VALIDITY_STDERRS: f64 = 3.0;
const PI_ERROR_LIMIT: f64 = 1.0 / 8.0;

struct Criterion {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn oracle_problems() -> Vec<(DiscreteProblem, OracleReport)> {
    let mut rng = rng_from(fork(MASTER_SEED, 1));
    (0..N_PROBLEMS)
        .map(|_| {
            let p = DiscreteProblem::random(&mut rng, MAX_Z, MAX_N, MAX_W);
            let r = Oracle::new(p.clone()).and_then(|o| o.report()).expect("enumerable");
            (p, r)
        })
        .collect()
}

fn c1(reports: &[(DiscreteProblem, OracleReport)]) -> Criterion {
    let worst = reports.iter().map(|(_, r)| r.expected.identity_gap()).fold(0.0, f64::max);
    let shapes: Vec<String> =
        reports.iter().map(|(p, _)| format!("{}/{}/{}", p.n_samples(), p.n(), p.n_hypotheses())).collect();
    Criterion {
        id: 1,
        name: "exact identity E[emp_gen] = E[gen]",
        passed: worst <= IDENTITY_TOL,
        detail: format!("max |diff| = {worst:.3e} over {} problems (|Z|/N/|W|: {})", reports.len(), shapes.join(" ")),
    }
}

fn c2(reports: &[(DiscreteProblem, OracleReport)]) -> Criterion {
    let mut worst = f64::INFINITY;
    for (_, r) in reports {
        for w in r.chain_randomized.windows(2).chain(r.chain_standard.windows(2)) {
            worst = worst.min(w[1] - w[0]);
        }
    }
    Criterion {
        id: 2,
        name: "ordering chains (randomized and standard)",
        passed: worst >= -CHAIN_SLACK,
        detail: format!("smallest step = {worst:.3e}"),
    }
}

fn c3(reports: &[(DiscreteProblem, OracleReport)]) -> Criterion {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (_, r) in reports {
        let gap = r.expected.gen.abs();
        let values = [r.individual_mi, r.individual_cmi]
            .into_iter()
            .chain(r.random_subset.iter().copied())
            .chain(r.random_subset_cmi.iter().copied());
        for v in values {
            worst = worst.min(v - gap);
            count += 1;
        }
    }
    Criterion {
        id: 3,
        name: "exact bound validity",
        passed: worst >= -VALIDITY_SLACK,
        detail: format!("min(bound - |E[gen]|) = {worst:.3e} over {count} bound values"),
    }
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = rule(fa, flm, fm, a, m);
        let right = rule(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            go(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + go(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    go(f, a, b, fa, fm, fb, rule(fa, fm, fb, a, b), tol, 40)
}

fn c4() -> Criterion {
    let mut rng = rng_from(fork(MASTER_SEED, 4));
    let mut worst: f64 = 0.0;
    for _ in 0..KL_CASES {
        let mu: f64 = rng.random_range(-3.0..3.0);
        let nu: f64 = rng.random_range(-3.0..3.0);
        let sigma: f64 = rng.random_range(0.2..3.0);
        let closed = gaussian_kl_isotropic(
            &IsotropicGaussian::new(vec![mu], sigma).unwrap(),
            &IsotropicGaussian::new(vec![nu], sigma).unwrap(),
        )
        .unwrap();
        let density = |x: f64, m: f64| {
            (-(x - m) * (x - m) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        };
        let integrand = |x: f64| {
            let p = density(x, mu);
            if p == 0.0 {
                0.0
            } else {
                p * (p / density(x, nu)).ln()
            }
        };
        let quad = simpson(&integrand, mu - 10.0 * sigma, mu + 10.0 * sigma, 1e-9);
        worst = worst.max((closed - quad).abs());
    }
    Criterion {
        id: 4,
        name: "Gaussian KL closed form vs quadrature",
        passed: worst <= QUADRATURE_TOL,
        detail: format!("max |closed - quadrature| = {worst:.3e} over {KL_CASES} cases"),
    }
}

fn c5() -> Criterion {
    let mut rng = rng_from(fork(MASTER_SEED, 5));
    let mut worst = f64::INFINITY;
    for k in 0..MIXTURE_CASES {
        let c: f64 = rng.random_range(0.0..8.0);
        let pi: f64 = rng.random_range(0.0..1.0);
        let u: bool = rng.random();
        let sigma = 1.0;
        let q0 = IsotropicGaussian::new(vec![0.0], sigma).unwrap();
        let q1 = IsotropicGaussian::new(vec![(2.0 * c).sqrt() * sigma], sigma).unwrap();
        let p = if u { q1.clone() } else { q0.clone() };
        let (kl, se) = gaussian_vs_mixture_kl_mc(&p, &q0, &q1, pi, MIXTURE_SAMPLES, fork(MASTER_SEED, 500 + k as u64))
            .expect("valid mixture");
        let bound = mixture_gaussian_kl_bound(c, pi, u);
        worst = worst.min((bound - kl + MIXTURE_STDERRS * se) / se.max(f64::MIN_POSITIVE));
    }
    Criterion {
        id: 5,
        name: "mixture KL bound dominates Monte Carlo KL",
        passed: worst >= 0.0,
        detail: format!("min (bound - MC + 3 se)/se = {worst:.3}"),
    }
}

fn c6() -> Criterion {
    let c = crossover_root(CROSSOVER_PI, true, 1e-9, 50.0).unwrap_or(f64::NAN);
    let r = (2.0 * c).sqrt();
    Criterion {
        id: 6,
        name: "crossover constant at pi = 1/2",
        passed: (CROSSOVER_LO..=CROSSOVER_HI).contains(&r),
        detail: format!("c* = {c:.6}, r* = {r:.6}"),
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn experiment(name: &str) -> (Experiment, String) {
    let cfg = Config::load(&configs().join(name)).expect("shipped config loads");
    let seed = cfg.seed(None);
    let exp = run_sgld_experiment(&cfg, seed).expect("experiment runs");
    let bytes = trace_csv(&exp).unwrap() + &summary_csv(&exp).unwrap();
    (exp, bytes)
}

fn value(exp: &Experiment, name: &str) -> f64 {
    exp.report(name).map(|r| r.value).unwrap_or(f64::NAN)
}

fn c7(exp: &Experiment) -> Criterion {
    let gap = exp.gen_gap;
    let mut lines = Vec::new();
    let mut ok = exp.reports.len() == 5;
    for r in &exp.reports {
        let slack = VALIDITY_STDERRS * (r.stderr * r.stderr + gap.stderr * gap.stderr).sqrt();
        ok &= r.value >= gap.value - slack;
        lines.push(format!("{}={:.4}±{:.4}", r.name, r.value, r.stderr));
    }
    let (f, g, m) = (value(exp, "f"), value(exp, "g"), value(exp, "min"));
    let ordered = m <= f && m <= g && exp.trace.iter().all(|row| {
        let c = row.cumulative;
        c[2] <= c[0] && c[2] <= c[1]
    });
    Criterion {
        id: 7,
        name: "SGLD bounds dominate the generalization gap",
        passed: ok && ordered && exp.diverged_trajectories == 0,
        detail: format!(
            "gap={:.4}±{:.4}; {}; min<=f,g: {ordered}; diverged {}",
            gap.value,
            gap.stderr,
            lines.join(" "),
            exp.diverged_trajectories
        ),
    }
}

fn c8(exp: &Experiment) -> Criterion {
    let sq = exp.trace.iter().map(|r| r.mean_sq_pi_error).sum::<f64>() / exp.trace.len() as f64;
    let (lip, neg) = (value(exp, "lipschitz"), value(exp, "negrea31"));
    Criterion {
        id: 8,
        name: "Lipschitz bound beats the comparison bound when E[(U - pi)^2] <= 1/8",
        passed: sq <= PI_ERROR_LIMIT && lip <= neg,
        detail: format!("mean squared pi error = {sq:.4}; lipschitz = {lip:.4} vs comparison = {neg:.4}"),
    }
}

fn c9(exp: &Experiment) -> Criterion {
    let (f, lip) = (value(exp, "f"), value(exp, "lipschitz"));
    let per_row = exp.trace.iter().all(|row| row.cumulative[0] <= row.cumulative[3]);
    Criterion {
        id: 9,
        name: "f bound dominated by the Lipschitz bound",
        passed: f <= lip && per_row,
        detail: format!("f = {f:.4} <= lipschitz = {lip:.4}; every iteration: {per_row}"),
    }
}

fn c10(first: &[(&str, &String)]) -> Criterion {
    let mut same = true;
    let mut sizes = Vec::new();
    for (name, bytes) in first {
        let (_, again) = experiment(name);
        same &= again.as_bytes() == bytes.as_bytes();
        sizes.push(format!("{name}: {} bytes", bytes.len()));
    }
    Criterion {
        id: 10,
        name: "byte-identical reruns",
        passed: same,
        detail: sizes.join(", "),
    }
}

fn main() {
    let reports = oracle_problems();
    let mut results = vec![c1(&reports), c2(&reports), c3(&reports), c4(), c5(), c6()];
    let (reference, ref_bytes) = experiment("reference_sgld.toml");
    let (comparison, cmp_bytes) = experiment("comparison_sgld.toml");
    results.push(c7(&reference));
    results.push(c8(&comparison));
    results.push(c9(&reference));
    results.push(c10(&[("reference_sgld.toml", &ref_bytes), ("comparison_sgld.toml", &cmp_bytes)]));

    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        if !r.passed {
            failed += 1;
        }
        println!("{tag} criterion {:>2}: {} ({})", r.id, r.name, r.detail);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
