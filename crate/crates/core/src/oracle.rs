//! Exhaustive enumeration of tiny discrete learning problems.
//!
//! A [`DiscreteProblem`] fixes a pmf over a finite sample space, a dataset
//! size `N`, a finite hypothesis set with a loss table, and the learning
//! algorithm as a kernel `P(W = w | S = s)`. [`Oracle`] materializes the
//! randomized-subsample joint over `(Z̃_1..Z̃_2N, U_1..U_N, W)` and the
//! standard joint over `(Z_1..Z_N, W)` and evaluates every bound on them
//! exactly. In all subset bounds the reference distribution `Q` is the exact
//! conditional marginal of `W` and the auxiliary randomness `R` is constant.

use rand::Rng as _;

use crate::data::{DataDistribution, FinitePmf};
use crate::error::{Error, Result};
use crate::info::{conditional_mutual_information, kl, mutual_information, FiniteJoint};
use crate::loss::{Loss, LossRange, LossTable};
use crate::rng::Rng;
use crate::subsample::{emp_gen_error, gen_error, SubsetIndex, SuperSample};

/// Largest joint the oracle will materialize.
pub const MAX_STATES: u128 = 10_000_000;

/// Tolerance on each kernel row summing to one.
pub const KERNEL_TOLERANCE: f64 = 1e-12;

/// Name of supersample variable `k` (0-based in, 1-based out).
pub fn ztilde_name(k: usize) -> String {
    format!("Zt{}", k + 1)
}

pub fn bit_name(i: usize) -> String {
    format!("U{}", i + 1)
}

pub fn sample_name(i: usize) -> String {
    format!("Z{}", i + 1)
}

pub const HYPOTHESIS: &str = "W";

/// A finite learning problem small enough to enumerate.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProblem {
    z_pmf: FinitePmf,
    n: usize,
    loss: LossTable,
    /// `|Z|^N x |W|`, row `s` is `P(W | S = s)`.
    kernel: Vec<f64>,
}

impl DiscreteProblem {
    /// `kernel_rows[s][w] = P(W = w | S = s)` with datasets indexed row-major
    /// (see [`DiscreteProblem::dataset_index`]).
    pub fn new(z_pmf: FinitePmf, n: usize, loss: LossTable, kernel_rows: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("dataset size N must be >= 1".into()));
        }
        if loss.n_samples() != z_pmf.len() {
            return Err(Error::Usage(format!(
                "loss table covers {} samples, pmf has {}",
                loss.n_samples(),
                z_pmf.len()
            )));
        }
        let n_sets = checked_pow(z_pmf.len(), n)?;
        if kernel_rows.len() != n_sets {
            return Err(Error::Usage(format!(
                "kernel has {} rows, there are {n_sets} datasets",
                kernel_rows.len()
            )));
        }
        let n_hyp = loss.n_hypotheses();
        for (s, row) in kernel_rows.iter().enumerate() {
            if row.len() != n_hyp {
                return Err(Error::Usage(format!("kernel row {s} has {} entries, need {n_hyp}", row.len())));
            }
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::Distribution(format!("kernel row {s} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > KERNEL_TOLERANCE {
                return Err(Error::Distribution(format!("kernel row {s} sums to {total}")));
            }
        }
        Ok(Self { z_pmf, n, loss, kernel: kernel_rows.into_iter().flatten().collect() })
    }

    /// Gibbs algorithm `P(w | s) ∝ exp(−β N L_s(w))`. `β = 0` ignores the data.
    pub fn gibbs(z_pmf: FinitePmf, n: usize, loss: LossTable, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Usage(format!("inverse temperature {beta} must be finite and >= 0")));
        }
        let n_sets = checked_pow(z_pmf.len(), n)?;
        let rows = (0..n_sets)
            .map(|s| {
                let data = dataset_of(s, z_pmf.len(), n);
                let energy: Vec<f64> = (0..loss.n_hypotheses())
                    .map(|w| -beta * data.iter().map(|&z| loss.get(w, z)).sum::<f64>())
                    .collect();
                let top = energy.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = energy.iter().map(|e| (e - top).exp()).collect();
                let total: f64 = weights.iter().sum();
                weights.iter().map(|x| x / total).collect()
            })
            .collect();
        Self::new(z_pmf, n, loss, rows)
    }

    /// An algorithm that outputs `choose(s)` with probability one.
    pub fn deterministic(
        z_pmf: FinitePmf,
        n: usize,
        loss: LossTable,
        choose: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let n_sets = checked_pow(z_pmf.len(), n)?;
        let n_hyp = loss.n_hypotheses();
        let mut rows = Vec::with_capacity(n_sets);
        for s in 0..n_sets {
            let w = choose(&dataset_of(s, z_pmf.len(), n));
            if w >= n_hyp {
                return Err(Error::Usage(format!("algorithm chose hypothesis {w} of {n_hyp}")));
            }
            let mut row = vec![0.0; n_hyp];
            row[w] = 1.0;
            rows.push(row);
        }
        Self::new(z_pmf, n, loss, rows)
    }

    /// `Z` uniform on `{0, 1}`, `N = 1`, the algorithm returns `W = Z_1` and
    /// the loss is `1{w ≠ z}`. Its expected generalization error is `1/2`.
    pub fn memorizing() -> Self {
        Self::deterministic(FinitePmf::uniform(2), 1, LossTable::zero_one(2), |s| s[0])
            .expect("memorizing problem is valid")
    }

    /// A random problem: pmf, loss table and either a Gibbs or a random
    /// kernel, with `|Z| ≤ max_z`, `N ≤ max_n` and `|W| ≤ max_w`.
    pub fn random(rng: &mut Rng, max_z: usize, max_n: usize, max_w: usize) -> Self {
        let kz = rng.random_range(2..=max_z.max(2));
        let n = rng.random_range(1..=max_n.max(1));
        let kw = rng.random_range(1..=max_w.max(1));
        let raw: Vec<f64> = (0..kz).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let head: f64 = probs[..kz - 1].iter().sum();
        probs[kz - 1] = 1.0 - head;
        let pmf = FinitePmf::new(probs).expect("normalized");
        let rows = (0..kw).map(|_| (0..kz).map(|_| rng.random::<f64>()).collect()).collect();
        let loss = LossTable::new(rows, LossRange::unit()).expect("values in [0, 1]");
        if rng.random::<bool>() {
            let beta = rng.random_range(0.0..8.0);
            Self::gibbs(pmf, n, loss, beta).expect("valid Gibbs problem")
        } else {
            let n_sets = kz.pow(n as u32);
            let rows = (0..n_sets)
                .map(|_| {
                    let raw: Vec<f64> = (0..kw).map(|_| rng.random::<f64>().powi(3)).collect();
                    let total: f64 = raw.iter().sum();
                    let mut row: Vec<f64> = raw.iter().map(|r| r / total).collect();
                    let head: f64 = row[..kw - 1].iter().sum();
                    row[kw - 1] = (1.0 - head).max(0.0);
                    row
                })
                .collect();
            Self::new(pmf, n, loss, rows).expect("valid random kernel")
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_samples(&self) -> usize {
        self.z_pmf.len()
    }

    pub fn n_hypotheses(&self) -> usize {
        self.loss.n_hypotheses()
    }

    pub fn n_datasets(&self) -> usize {
        self.kernel.len() / self.n_hypotheses()
    }

    pub fn z_pmf(&self) -> &FinitePmf {
        &self.z_pmf
    }

    pub fn loss(&self) -> &LossTable {
        &self.loss
    }

    pub fn range(&self) -> LossRange {
        self.loss.range()
    }

    pub fn distribution(&self) -> DataDistribution<usize> {
        DataDistribution::indexed(self.z_pmf.clone())
    }

    /// Row-major index of a dataset: `Σ s_i |Z|^{N-1-i}`.
    pub fn dataset_index(&self, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &z| acc * self.n_samples() + z)
    }

    pub fn kernel(&self, dataset: usize, w: usize) -> f64 {
        self.kernel[dataset * self.n_hypotheses() + w]
    }

    /// Number of states of the randomized-subsample joint.
    pub fn joint_states(&self) -> u128 {
        (self.n_samples() as u128).pow(2 * self.n as u32) * (1u128 << self.n) * self.n_hypotheses() as u128
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .filter(|&v| (v as u128) <= MAX_STATES)
        .ok_or(Error::StateSpaceOverflow { states: u128::MAX, limit: MAX_STATES })
}

fn dataset_of(mut idx: usize, k: usize, n: usize) -> Vec<usize> {
    let mut s = vec![0; n];
    for i in (0..n).rev() {
        s[i] = idx % k;
        idx /= k;
    }
    s
}

/// The joint `P_{Z̃, U, W}` of the randomized subsample setting.
#[derive(Debug, Clone)]
pub struct EnumeratedJoint {
    pub joint: FiniteJoint,
}

/// `P(z̃, u, w) = Π pmf(z̃_k) · 2^{−N} · P(w | compose(z̃, u))`.
pub fn enumerate_joint(p: &DiscreteProblem) -> Result<EnumeratedJoint> {
    let states = p.joint_states();
    if states > MAX_STATES {
        return Err(Error::StateSpaceOverflow { states, limit: MAX_STATES });
    }
    let n = p.n();
    let mut vars: Vec<(String, usize)> = (0..2 * n).map(|k| (ztilde_name(k), p.n_samples())).collect();
    vars.extend((0..n).map(|i| (bit_name(i), 2)));
    vars.push((HYPOTHESIS.to_string(), p.n_hypotheses()));
    let half = 0.5f64.powi(n as i32);
    let mut s = vec![0usize; n];
    let joint = FiniteJoint::from_fn(vars, |idx| {
        let (zt, rest) = idx.split_at(2 * n);
        let (u, w) = rest.split_at(n);
        for i in 0..n {
            s[i] = zt[i + u[i] * n];
        }
        let pz: f64 = zt.iter().map(|&z| p.z_pmf.prob(z)).product();
        pz * half * p.kernel(p.dataset_index(&s), w[0])
    })?;
    Ok(EnumeratedJoint { joint })
}

/// The joint `P_{S, W}` of the standard setting.
pub fn standard_joint(p: &DiscreteProblem) -> Result<FiniteJoint> {
    let n = p.n();
    let mut vars: Vec<(String, usize)> = (0..n).map(|i| (sample_name(i), p.n_samples())).collect();
    vars.push((HYPOTHESIS.to_string(), p.n_hypotheses()));
    FiniteJoint::from_fn(vars, |idx| {
        let (s, w) = idx.split_at(n);
        let ps: f64 = s.iter().map(|&z| p.z_pmf.prob(z)).product();
        ps * p.kernel(p.dataset_index(s), w[0])
    })
}

/// Expected generalization error computed both ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedGen {
    /// `E[gen(W, S)]`.
    pub gen: f64,
    /// `E[ĝen(W, S̃, U)]`.
    pub emp_gen: f64,
}

impl ExpectedGen {
    pub fn identity_gap(&self) -> f64 {
        (self.gen - self.emp_gen).abs()
    }
}

/// Everything the oracle computes about one problem.
#[derive(Debug, Clone)]
pub struct Oracle {
    problem: DiscreteProblem,
    randomized: FiniteJoint,
    standard: FiniteJoint,
}

fn names(f: impl Fn(usize) -> String, idx: impl IntoIterator<Item = usize>) -> Vec<String> {
    idx.into_iter().map(f).collect()
}

fn split(joint: &FiniteJoint, given: &[String]) -> Result<Vec<(f64, FiniteJoint)>> {
    if given.is_empty() {
        Ok(vec![(1.0, joint.clone())])
    } else {
        joint.condition_on(given)
    }
}

/// `Σ_c P(c) √(scale · KL(P_{A,B|c} ‖ P_{A|c} × R_B))` where the reference
/// `R_B` on `B` is `P_{B|c}` when `reference` is `None`.
fn expected_sqrt_kl(
    joint: &FiniteJoint,
    a: &[String],
    b: &[String],
    c: &[String],
    reference: Option<&FiniteJoint>,
    scale: f64,
) -> Result<f64> {
    let all: Vec<String> = a.iter().chain(b).chain(c).cloned().collect();
    let reduced = joint.marginal(&all)?;
    let mut acc = 0.0;
    for (pc, cond) in split(&reduced, c)? {
        let ab: Vec<&String> = a.iter().chain(b).collect();
        let pab = cond.marginal(&ab)?;
        let pa = cond.marginal(a)?;
        let q = match reference {
            Some(r) => pa.product(r)?,
            None => pa.product(&cond.marginal(b)?)?,
        };
        acc += pc * (scale * kl(&pab, &q)?).sqrt();
    }
    Ok(acc)
}

/// `Σ_{b,c} P(b, c) √(scale · KL(P_{A|b,c} ‖ P_{A|c}))`.
fn expected_sqrt_kl_posterior(
    joint: &FiniteJoint,
    a: &[String],
    b: &[String],
    c: &[String],
    scale: f64,
) -> Result<f64> {
    let all: Vec<String> = a.iter().chain(b).chain(c).cloned().collect();
    let reduced = joint.marginal(&all)?;
    let mut acc = 0.0;
    for (pc, cond) in split(&reduced, c)? {
        let prior = cond.marginal(a)?;
        for (pb, post) in cond.condition_on(b)? {
            let post = post.marginal(a)?;
            acc += pc * pb * (scale * kl(&post, &prior)?).sqrt();
        }
    }
    Ok(acc)
}

fn mean_over_subsets(n: usize, m: usize, mut f: impl FnMut(&SubsetIndex) -> Result<f64>) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::Usage(format!("subset size {m} not in 1..={n}")));
    }
    let subsets = SubsetIndex::all(n, m);
    let mut acc = 0.0;
    for j in &subsets {
        acc += f(j)?;
    }
    Ok(acc / subsets.len() as f64)
}

impl Oracle {
    pub fn new(problem: DiscreteProblem) -> Result<Self> {
        let randomized = enumerate_joint(&problem)?.joint;
        let standard = standard_joint(&problem)?;
        Ok(Self { problem, randomized, standard })
    }

    pub fn problem(&self) -> &DiscreteProblem {
        &self.problem
    }

    pub fn randomized_joint(&self) -> &FiniteJoint {
        &self.randomized
    }

    pub fn standard_joint(&self) -> &FiniteJoint {
        &self.standard
    }

    fn n(&self) -> usize {
        self.problem.n()
    }

    fn w(&self) -> Vec<String> {
        vec![HYPOTHESIS.to_string()]
    }

    fn all_ztilde(&self) -> Vec<String> {
        names(ztilde_name, 0..2 * self.n())
    }

    /// `E[gen]` and `E[ĝen]`, each summed over the randomized joint.
    pub fn expected_gen(&self) -> Result<ExpectedGen> {
        let p = &self.problem;
        let n = p.n();
        let dist = p.distribution();
        let nw = p.n_hypotheses();
        let (mut gen, mut emp) = (0.0, 0.0);
        let mut zt = vec![0usize; 2 * n];
        let mut u = vec![false; n];
        let block = (1usize << n) * nw;
        for (state, chunk) in self.randomized.probs().chunks(block).enumerate() {
            let mut rest = state;
            for k in (0..2 * n).rev() {
                zt[k] = rest % p.n_samples();
                rest /= p.n_samples();
            }
            for (pos, &pr) in chunk.iter().enumerate() {
                if pr == 0.0 {
                    continue;
                }
                let (bits, w) = (pos / nw, pos % nw);
                for i in 0..n {
                    u[i] = (bits >> (n - 1 - i)) & 1 == 1;
                }
                let ss = SuperSample::new(zt.clone(), u.clone())?;
                let s = ss.compose_dataset();
                gen += pr * gen_error(&w, &s, p.loss(), &dist)?;
                emp += pr * emp_gen_error(&w, &ss, p.loss());
            }
        }
        Ok(ExpectedGen { gen, emp_gen: emp })
    }

    /// `(1/N) Σ_i √(2σ² I(W; Z_i))` with `σ = (b − a)/2`.
    pub fn bound_individual_mi(&self) -> Result<f64> {
        let sigma = self.problem.range().subgaussian_sigma();
        let mut acc = 0.0;
        for i in 0..self.n() {
            let mi = mutual_information(&self.standard, &self.w(), &[sample_name(i)])?;
            acc += (2.0 * sigma * sigma * mi).sqrt();
        }
        Ok(acc / self.n() as f64)
    }

    /// Random-subset bound of the standard setting:
    /// `E_{J, S_Jc}[√((2σ²/M) KL(P_{W,S_J|S_Jc} ‖ P_{W|S_Jc} × P_{S_J}))]`.
    pub fn bound_random_subset(&self, m: usize) -> Result<f64> {
        let sigma = self.problem.range().subgaussian_sigma();
        let scale = 2.0 * sigma * sigma / m as f64;
        mean_over_subsets(self.n(), m, |j| {
            let sj = names(sample_name, j.indices().iter().copied());
            let sjc = names(sample_name, j.complement());
            let reference = self.standard.marginal(&sj)?;
            expected_sqrt_kl(&self.standard, &self.w(), &sj, &sjc, Some(&reference), scale)
        })
    }

    /// `(1/N) Σ_i √(2(b − a)² I(W; U_i | Z̃_i, Z̃_{i+N}))`.
    pub fn bound_individual_cmi(&self) -> Result<f64> {
        let width = self.problem.range().width();
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            let pair = [ztilde_name(i), ztilde_name(i + n)];
            let cmi = conditional_mutual_information(&self.randomized, &self.w(), &[bit_name(i)], &pair)?;
            acc += (2.0 * width * width * cmi).sqrt();
        }
        Ok(acc / n as f64)
    }

    /// Random-subset bound of the randomized subsample setting:
    /// `E_{J, U_Jc, S̃}[√((2(b−a)²/M) KL(P_{W,U_J|U_Jc,S̃} ‖ P_{W|U_Jc,S̃} × P_{U_J}))]`.
    pub fn bound_random_subset_cmi(&self, m: usize) -> Result<f64> {
        let width = self.problem.range().width();
        let scale = 2.0 * width * width / m as f64;
        mean_over_subsets(self.n(), m, |j| {
            let uj = names(bit_name, j.indices().iter().copied());
            let mut given = names(bit_name, j.complement());
            given.extend(self.all_ztilde());
            let reference = self.randomized.marginal(&uj)?;
            expected_sqrt_kl(&self.randomized, &self.w(), &uj, &given, Some(&reference), scale)
        })
    }

    /// Fully disintegrated subset bound of the randomized setting:
    /// `√2 (b − a) E_{J, S̃, U}[√KL(P_{W|U,S̃} ‖ P_{W|U_Jc,S̃})]`.
    pub fn bound_disintegrated_cmi(&self, m: usize) -> Result<f64> {
        let width = self.problem.range().width();
        let v = mean_over_subsets(self.n(), m, |j| {
            let uj = names(bit_name, j.indices().iter().copied());
            let mut given = names(bit_name, j.complement());
            given.extend(self.all_ztilde());
            expected_sqrt_kl_posterior(&self.randomized, &self.w(), &uj, &given, 1.0)
        })?;
        Ok(std::f64::consts::SQRT_2 * width * v)
    }

    /// Fully disintegrated subset bound of the standard setting:
    /// `((b − a)/√2) E_{J, S}[√KL(P_{W|S} ‖ P_{W|S_Jc})]`. Kept for comparison;
    /// its validity is only claimed for `M = 1`.
    pub fn bound_disintegrated_mi(&self, m: usize) -> Result<f64> {
        let width = self.problem.range().width();
        let v = mean_over_subsets(self.n(), m, |j| {
            let sj = names(sample_name, j.indices().iter().copied());
            let sjc = names(sample_name, j.complement());
            expected_sqrt_kl_posterior(&self.standard, &self.w(), &sj, &sjc, 1.0)
        })?;
        Ok(width / std::f64::consts::SQRT_2 * v)
    }

    /// `(1/N) Σ_i √(2(b − a)² I(W; U_i | S̃, U^{−i}))`: the `M = 1`
    /// random-subset CMI bound with the expectation moved inside the root.
    pub fn bound_leave_one_out_cmi(&self) -> Result<f64> {
        let width = self.problem.range().width();
        let terms = self.leave_one_out_cmi_terms()?;
        Ok(terms.iter().map(|c| (2.0 * width * width * c).sqrt()).sum::<f64>() / self.n() as f64)
    }

    /// `(1/N) Σ_i √(2σ² I(W; Z_i | S^{−i}))`: the `M = 1` standard random-subset
    /// bound with the expectation moved inside the root.
    pub fn bound_leave_one_out_mi(&self) -> Result<f64> {
        let sigma = self.problem.range().subgaussian_sigma();
        let terms = self.leave_one_out_mi_terms()?;
        Ok(terms.iter().map(|c| (2.0 * sigma * sigma * c).sqrt()).sum::<f64>() / self.n() as f64)
    }

    fn leave_one_out_cmi_terms(&self) -> Result<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut given = self.all_ztilde();
                given.extend(names(bit_name, (0..n).filter(|k| *k != i)));
                conditional_mutual_information(&self.randomized, &self.w(), &[bit_name(i)], &given)
            })
            .collect()
    }

    fn leave_one_out_mi_terms(&self) -> Result<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let given = names(sample_name, (0..n).filter(|k| *k != i));
                conditional_mutual_information(&self.standard, &self.w(), &[sample_name(i)], &given)
            })
            .collect()
    }

    /// `(Σ_i I(W;U_i|Z̃_i,Z̃_{i+N}), Σ_i I(W;U_i|S̃), I(W;U|S̃), Σ_i I(W;U_i|S̃,U^{−i}))`.
    pub fn ordering_chain_randomized(&self) -> Result<[f64; 4]> {
        let n = self.n();
        let zt = self.all_ztilde();
        let w = self.w();
        let mut pairwise = 0.0;
        let mut per_bit = 0.0;
        for i in 0..n {
            let pair = [ztilde_name(i), ztilde_name(i + n)];
            pairwise += conditional_mutual_information(&self.randomized, &w, &[bit_name(i)], &pair)?;
            per_bit += conditional_mutual_information(&self.randomized, &w, &[bit_name(i)], &zt)?;
        }
        let all_bits = names(bit_name, 0..n);
        let joint = conditional_mutual_information(&self.randomized, &w, &all_bits, &zt)?;
        let loo: f64 = self.leave_one_out_cmi_terms()?.iter().sum();
        Ok([pairwise, per_bit, joint, loo])
    }

    /// `(Σ_i I(W;Z_i), I(W;S), Σ_i I(W;Z_i|S^{−i}))`.
    pub fn ordering_chain_standard(&self) -> Result<[f64; 3]> {
        let n = self.n();
        let w = self.w();
        let mut individual = 0.0;
        for i in 0..n {
            individual += mutual_information(&self.standard, &w, &[sample_name(i)])?;
        }
        let whole = mutual_information(&self.standard, &w, &names(sample_name, 0..n))?;
        let loo: f64 = self.leave_one_out_mi_terms()?.iter().sum();
        Ok([individual, whole, loo])
    }

    /// Computes every quantity in one pass.
    pub fn report(&self) -> Result<OracleReport> {
        let n = self.n();
        let subset_sizes: Vec<usize> = (1..=n).collect();
        let collect = |f: &dyn Fn(usize) -> Result<f64>| subset_sizes.iter().map(|&m| f(m)).collect::<Result<Vec<_>>>();
        Ok(OracleReport {
            n,
            expected: self.expected_gen()?,
            individual_mi: self.bound_individual_mi()?,
            random_subset: collect(&|m| self.bound_random_subset(m))?,
            individual_cmi: self.bound_individual_cmi()?,
            random_subset_cmi: collect(&|m| self.bound_random_subset_cmi(m))?,
            disintegrated_cmi: collect(&|m| self.bound_disintegrated_cmi(m))?,
            disintegrated_mi: collect(&|m| self.bound_disintegrated_mi(m))?,
            leave_one_out_mi: self.bound_leave_one_out_mi()?,
            leave_one_out_cmi: self.bound_leave_one_out_cmi()?,
            chain_randomized: self.ordering_chain_randomized()?,
            chain_standard: self.ordering_chain_standard()?,
        })
    }
}

/// Exact `E[gen]`, checked against `E[ĝen]`.
pub fn exact_expected_gen(p: &DiscreteProblem) -> Result<ExpectedGen> {
    Oracle::new(p.clone())?.expected_gen()
}

/// Individual-sample mutual information bound.
pub fn exact_bound_prop1(p: &DiscreteProblem) -> Result<f64> {
    Oracle::new(p.clone())?.bound_individual_mi()
}

/// Random-subset bound of the standard setting.
pub fn exact_bound_prop2(p: &DiscreteProblem, m: usize) -> Result<f64> {
    Oracle::new(p.clone())?.bound_random_subset(m)
}

/// Individual conditional mutual information bound.
pub fn exact_bound_prop3(p: &DiscreteProblem) -> Result<f64> {
    Oracle::new(p.clone())?.bound_individual_cmi()
}

/// Random-subset bound of the randomized subsample setting.
pub fn exact_bound_prop4(p: &DiscreteProblem, m: usize) -> Result<f64> {
    Oracle::new(p.clone())?.bound_random_subset_cmi(m)
}

pub fn ordering_chain_randomized(p: &DiscreteProblem) -> Result<[f64; 4]> {
    Oracle::new(p.clone())?.ordering_chain_randomized()
}

pub fn ordering_chain_standard(p: &DiscreteProblem) -> Result<[f64; 3]> {
    Oracle::new(p.clone())?.ordering_chain_standard()
}

/// Tolerance of the `E[gen] = E[ĝen]` identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Slack allowed in ordering checks between information quantities.
pub const ORDER_SLACK: f64 = 1e-9;
/// Slack for comparisons between bounds, which take square roots of
/// quantities known only to rounding error.
pub const ROOT_SLACK: f64 = 1e-6;

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The exact quantities of one problem. Per-`M` vectors are indexed by
/// `M − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub n: usize,
    pub expected: ExpectedGen,
    pub individual_mi: f64,
    pub random_subset: Vec<f64>,
    pub individual_cmi: f64,
    pub random_subset_cmi: Vec<f64>,
    pub disintegrated_cmi: Vec<f64>,
    pub disintegrated_mi: Vec<f64>,
    pub leave_one_out_mi: f64,
    pub leave_one_out_cmi: f64,
    pub chain_randomized: [f64; 4],
    pub chain_standard: [f64; 3],
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] - w[0] >= -ORDER_SLACK)
}

impl OracleReport {
    /// Every valid bound, as `(label, value)`.
    pub fn bounds(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("individual_mi".to_string(), self.individual_mi),
            ("individual_cmi".to_string(), self.individual_cmi),
        ];
        for (k, v) in self.random_subset.iter().enumerate() {
            out.push((format!("random_subset_m{}", k + 1), *v));
        }
        for (k, v) in self.random_subset_cmi.iter().enumerate() {
            out.push((format!("random_subset_cmi_m{}", k + 1), *v));
        }
        for (k, v) in self.disintegrated_cmi.iter().enumerate() {
            out.push((format!("disintegrated_cmi_m{}", k + 1), *v));
        }
        out.push(("disintegrated_mi_m1".to_string(), self.disintegrated_mi[0]));
        out.push(("leave_one_out_mi".to_string(), self.leave_one_out_mi));
        out.push(("leave_one_out_cmi".to_string(), self.leave_one_out_cmi));
        out
    }

    pub fn checks(&self) -> Vec<Check> {
        let gap = self.expected.gen.abs();
        let mut checks = vec![Check {
            name: "identity E[gen] = E[emp_gen]".into(),
            passed: self.expected.identity_gap() <= IDENTITY_TOLERANCE,
            detail: format!("|difference| = {:e}", self.expected.identity_gap()),
        }];
        for (label, v) in self.bounds() {
            checks.push(Check {
                name: format!("bound {label} >= |E[gen]|"),
                passed: v >= gap - ORDER_SLACK,
                detail: format!("{v:.12} vs {gap:.12}"),
            });
        }
        checks.push(Check {
            name: "randomized ordering chain".into(),
            passed: nondecreasing(&self.chain_randomized),
            detail: format!("{:?}", self.chain_randomized),
        });
        checks.push(Check {
            name: "standard ordering chain".into(),
            passed: nondecreasing(&self.chain_standard),
            detail: format!("{:?}", self.chain_standard),
        });
        checks.push(Check {
            name: "individual CMI bound is the tightest MI-form bound".into(),
            passed: self.individual_cmi <= self.leave_one_out_cmi + ROOT_SLACK,
            detail: format!("{:.12} <= {:.12}", self.individual_cmi, self.leave_one_out_cmi),
        });
        checks.push(Check {
            name: "M=1 random-subset CMI bound below its MI form (Jensen)".into(),
            passed: self.random_subset_cmi[0] <= self.leave_one_out_cmi + ROOT_SLACK,
            detail: format!("{:.12} <= {:.12}", self.random_subset_cmi[0], self.leave_one_out_cmi),
        });
        checks
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::ConstantLoss;
    use crate::rng::rng_from;

    fn gibbs(beta: f64, seed: u64) -> DiscreteProblem {
        let mut rng = rng_from(seed);
        let rows = (0..3).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let loss = LossTable::new(rows, LossRange::unit()).unwrap();
        DiscreteProblem::gibbs(FinitePmf::new(vec![0.2, 0.5, 0.3]).unwrap(), 2, loss, beta).unwrap()
    }

    #[test]
    fn single_hypothesis_joint() {
        let loss = LossTable::new(vec![vec![0.3, 0.6]], LossRange::unit()).unwrap();
        let p = DiscreteProblem::gibbs(FinitePmf::uniform(2), 1, loss, 1.0).unwrap();
        let j = enumerate_joint(&p).unwrap().joint;
        assert_eq!(j.n_states(), 8);
        let o = Oracle::new(p).unwrap();
        let r = o.report().unwrap();
        assert!(r.checks().iter().all(|c| c.passed));
        assert!(r.expected.gen.abs() < 1e-15);
        for (_, v) in r.bounds() {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn deterministic_algorithm_has_no_residual_entropy() {
        let p = DiscreteProblem::memorizing();
        let j = enumerate_joint(&p).unwrap().joint;
        let given = j.marginal(&["Zt1", "Zt2", "U1"]).unwrap();
        // H(W | Z̃, U) = H(Z̃, U, W) − H(Z̃, U)
        assert!((j.entropy() - given.entropy()).abs() < 1e-15);
    }

    #[test]
    fn gibbs_joint_marginals_match_products() {
        let p = gibbs(3.0, 4);
        let j = enumerate_joint(&p).unwrap().joint;
        let zt = j.marginal(&["Zt1", "Zt2", "Zt3", "Zt4"]).unwrap();
        for (k, pr) in zt.probs().iter().enumerate() {
            let digits = dataset_of(k, 3, 4);
            let expect: f64 = digits.iter().map(|&z| p.z_pmf().prob(z)).product();
            assert!((pr - expect).abs() < 1e-12);
        }
        let u = j.marginal(&["U1", "U2"]).unwrap();
        assert!(u.probs().iter().all(|pr| (pr - 0.25).abs() < 1e-12));
        // P(S, W) through the randomized joint agrees with the standard joint
        let std = standard_joint(&p).unwrap();
        let mut via = vec![0.0; std.n_states()];
        let sizes = j.sizes().to_vec();
        let mut idx = vec![0usize; sizes.len()];
        for &pr in j.probs() {
            let s0 = idx[idx[4] * 2];
            let s1 = idx[1 + idx[5] * 2];
            via[(s0 * 3 + s1) * p.n_hypotheses() + idx[6]] += pr;
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        for (a, b) in via.iter().zip(std.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_loss_and_data_blind_algorithms_do_not_generalize_badly() {
        let loss = LossTable::new(vec![vec![0.4, 0.4], vec![0.4, 0.4]], LossRange::unit()).unwrap();
        let p = DiscreteProblem::gibbs(FinitePmf::uniform(2), 2, loss, 2.0).unwrap();
        assert!(exact_expected_gen(&p).unwrap().gen.abs() < 1e-15);
        let blind = gibbs(0.0, 9);
        let o = Oracle::new(blind).unwrap();
        let r = o.report().unwrap();
        assert!(r.expected.gen.abs() < 1e-15);
        for (_, v) in r.bounds() {
            assert!(v.abs() < 1e-7, "{v}");
        }
        assert!(r.chain_randomized.iter().chain(&r.chain_standard).all(|v| v.abs() < 1e-14));
        let _ = ConstantLoss::new(0.4, LossRange::unit()).unwrap();
    }

    #[test]
    fn memorizing_problem_values() {
        let o = Oracle::new(DiscreteProblem::memorizing()).unwrap();
        let e = o.expected_gen().unwrap();
        assert!((e.gen - 0.5).abs() < 1e-15 && e.identity_gap() < 1e-15);
        let mi = mutual_information(o.standard_joint(), &["W"], &["Z1"]).unwrap();
        assert!((mi - std::f64::consts::LN_2).abs() < 1e-15);
        let b1 = o.bound_individual_mi().unwrap();
        assert!((b1 - (0.5 * std::f64::consts::LN_2).sqrt()).abs() < 1e-15);
        assert!((b1 - 0.5887).abs() < 1e-4);
        let b3 = o.bound_individual_cmi().unwrap();
        assert!(b3 >= 0.5);
        let r = o.report().unwrap();
        assert!(r.checks().iter().all(|c| c.passed), "{:#?}", r.checks());
    }

    #[test]
    fn full_subset_reduces_to_dataset_mi() {
        let p = gibbs(4.0, 21);
        let o = Oracle::new(p).unwrap();
        let n = o.problem().n();
        let sigma = o.problem().range().subgaussian_sigma();
        let mi = mutual_information(o.standard_joint(), &["W"], &["Z1", "Z2"]).unwrap();
        let full = o.bound_random_subset(n).unwrap();
        assert!((full - (2.0 * sigma * sigma / n as f64 * mi).sqrt()).abs() < 1e-12);
        assert!(full >= o.expected_gen().unwrap().gen.abs());
    }

    #[test]
    fn random_problems_pass_every_check() {
        let mut rng = rng_from(2024);
        for _ in 0..20 {
            let p = DiscreteProblem::random(&mut rng, 3, 3, 8);
            let r = Oracle::new(p).unwrap().report().unwrap();
            for c in r.checks() {
                assert!(c.passed, "{}: {}", c.name, c.detail);
            }
        }
    }

    #[test]
    fn overflow_and_validation() {
        let loss = LossTable::zero_one(4);
        let p = DiscreteProblem::gibbs(FinitePmf::uniform(4), 6, loss, 1.0).unwrap();
        assert!(matches!(enumerate_joint(&p), Err(Error::StateSpaceOverflow { .. })));
        let bad = DiscreteProblem::new(
            FinitePmf::uniform(2),
            1,
            LossTable::zero_one(2),
            vec![vec![0.5, 0.6], vec![1.0, 0.0]],
        );
        assert!(bad.is_err());
    }
}
