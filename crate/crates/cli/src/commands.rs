//! The three subcommands. Each returns the text to print on stdout and
//! writes its files.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use genbound::bounds::{run_experiment, Experiment, BOUND_NAMES};
use genbound::oracle::{Oracle, OracleReport};
use genbound::sgld::{crossover_root, crossover_scan};

use crate::config::Config;
use crate::output::{csv_document, num, opt_num, sibling, write};
use crate::CliError;

/// Fraction of divergent trajectories above which `sgld` fails.
pub const MAX_DIVERGENCE_RATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

fn describe(report: &OracleReport, o: &Oracle, idx: usize, out: &mut String) -> (usize, usize) {
    let p = o.problem();
    let _ = writeln!(out, "problem {}: |Z|={} N={} |W|={}", idx + 1, p.n_samples(), p.n(), p.n_hypotheses());
    let _ = writeln!(out, "  E[gen]     {}", num(report.expected.gen));
    let _ = writeln!(out, "  E[emp_gen] {}", num(report.expected.emp_gen));
    for (label, v) in report.bounds() {
        let _ = writeln!(out, "  bound {label} {}", num(v));
    }
    for (m, v) in report.disintegrated_mi.iter().enumerate().skip(1) {
        let _ = writeln!(out, "  comparison disintegrated_mi_m{} {}", m + 1, num(*v));
    }
    let chain = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "  chain_randomized {}", chain(&report.chain_randomized));
    let _ = writeln!(out, "  chain_standard {}", chain(&report.chain_standard));
    let (mut pass, mut fail) = (0, 0);
    for c in report.checks() {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.passed {
            pass += 1;
        } else {
            fail += 1;
        }
        let _ = writeln!(out, "  {tag} {}: {}", c.name, c.detail);
    }
    (pass, fail)
}

pub fn oracle(cfg: &Config, seed: u64, out: Option<&Path>) -> Result<Outcome, CliError> {
    let problems = cfg.oracle_problems(seed)?;
    let evaluated: Vec<_> = problems
        .into_par_iter()
        .map(|p| {
            let o = Oracle::new(p)?;
            let r = o.report()?;
            Ok((o, r))
        })
        .collect::<Result<Vec<_>, genbound::Error>>()?;
    let mut text = String::from("# genbound oracle report v1\n");
    let (mut pass, mut fail) = (0, 0);
    for (k, (o, r)) in evaluated.iter().enumerate() {
        let (p, f) = describe(r, o, k, &mut text);
        pass += p;
        fail += f;
    }
    let _ = writeln!(text, "summary: {pass} PASS, {fail} FAIL");
    let stdout = match out {
        Some(path) => {
            write(path, &text)?;
            format!("{} problems, {pass} PASS, {fail} FAIL; report written to {}\n", evaluated.len(), path.display())
        }
        None => text,
    };
    Ok(Outcome { stdout, passed: fail == 0 })
}

pub const TRACE_HEADER: [&str; 14] = [
    "t",
    "eta",
    "sigma",
    "mean_f",
    "mean_g",
    "mean_min",
    "mean_sq_pi_error",
    "bound_f",
    "bound_g",
    "bound_min",
    "bound_lipschitz",
    "bound_negrea31",
    "gen_gap_estimate",
    "gen_gap_stderr",
];

pub const SUMMARY_HEADER: [&str; 8] =
    ["name", "value", "stderr", "n_outer", "n_inner", "seed", "gen_gap_estimate", "gen_gap_stderr"];

pub fn trace_csv(exp: &Experiment) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = exp
        .trace
        .iter()
        .map(|r| {
            let mut row = vec![
                r.t.to_string(),
                num(r.eta),
                num(r.sigma),
                num(r.mean_f),
                num(r.mean_g),
                num(r.mean_min),
                num(r.mean_sq_pi_error),
            ];
            row.extend(r.cumulative.iter().map(|c| opt_num(*c)));
            row.push(num(r.gen_gap));
            row.push(num(r.gen_gap_stderr));
            row
        })
        .collect();
    csv_document("sgld-iterations", "", &TRACE_HEADER, &rows)
}

pub fn summary_csv(exp: &Experiment) -> Result<String, CliError> {
    let mut rows: Vec<Vec<String>> = exp
        .reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                num(r.value),
                num(r.stderr),
                r.n_outer.to_string(),
                r.n_inner.to_string(),
                r.seed.to_string(),
                num(r.gen_gap),
                num(r.gen_gap_stderr),
            ]
        })
        .collect();
    if let Some(first) = exp.reports.first() {
        rows.push(vec![
            "emp_gen_gap".into(),
            num(exp.emp_gen_gap.value),
            num(exp.emp_gen_gap.stderr),
            first.n_outer.to_string(),
            first.n_inner.to_string(),
            first.seed.to_string(),
            num(first.gen_gap),
            num(first.gen_gap_stderr),
        ]);
    }
    let note = format!("diverged={}/{}", exp.diverged_trajectories, exp.total_trajectories);
    csv_document("sgld-bounds", &note, &SUMMARY_HEADER, &rows)
}

pub fn run_sgld_experiment(cfg: &Config, seed: u64) -> Result<Experiment, CliError> {
    let (problem, dim) = cfg.sgld_problem(seed)?;
    let sgld = cfg.sgld_config(dim)?;
    let mc = cfg.mc(seed)?;
    Ok(run_experiment(&problem, &sgld, &mc)?)
}

pub fn sgld(cfg: &Config, seed: u64, out: Option<&Path>) -> Result<Outcome, CliError> {
    let exp = run_sgld_experiment(cfg, seed)?;
    let summary = summary_csv(&exp)?;
    let mut stdout = String::new();
    match out {
        Some(path) => {
            write(path, &trace_csv(&exp)?)?;
            let side = sibling(path, "bounds");
            write(&side, &summary)?;
            let _ = writeln!(stdout, "per-iteration CSV: {}\nbound summary: {}", path.display(), side.display());
        }
        None => stdout.push_str(&summary),
    }
    for name in BOUND_NAMES {
        if let Some(r) = exp.report(name) {
            let _ = writeln!(stdout, "{name:>10} {:.6} ± {:.6}", r.value, r.stderr);
        }
    }
    let _ = writeln!(stdout, "{:>10} {:.6} ± {:.6}", "gen_gap", exp.gen_gap.value, exp.gen_gap.stderr);
    if exp.divergence_rate() > MAX_DIVERGENCE_RATE {
        return Err(CliError::Divergence { diverged: exp.diverged_trajectories, total: exp.total_trajectories });
    }
    Ok(Outcome { stdout, passed: true })
}

pub fn crossover(cfg: &Config, out: Option<&Path>) -> Result<Outcome, CliError> {
    let c = cfg.crossover()?;
    let u = c.u == 1;
    let scan = crossover_scan(c.pi, u, c.c_min, c.c_max, c.steps)?;
    let root = crossover_root(c.pi, u, c.c_min.max(f64::MIN_POSITIVE), c.c_max);
    let root_note = match root {
        Some(cs) => format!("pi={} u={} root_c={} root_r={}", num(c.pi), c.u, num(cs), num((2.0 * cs).sqrt())),
        None => format!("pi={} u={} root_c=none", num(c.pi), c.u),
    };
    let rows: Vec<Vec<String>> =
        scan.iter().map(|p| vec![num(p.c), num(p.r), num(p.f), num(p.g), num(p.f - p.g)]).collect();
    let doc = csv_document("crossover", &root_note, &["c", "r", "f", "g", "f_minus_g"], &rows)?;
    let mut stdout = match root {
        Some(cs) => format!("f = g at c = {cs:.6}, r = eta*|zeta|/(sigma*K) = {:.6}\n", (2.0 * cs).sqrt()),
        None => "f - g does not change sign on the scanned range\n".to_string(),
    };
    match out {
        Some(path) => write(path, &doc)?,
        None => stdout.push_str(&doc),
    }
    Ok(Outcome { stdout, passed: true })
}
