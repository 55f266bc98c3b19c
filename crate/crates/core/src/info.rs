//! Information measures on finite joint distributions, and the Gaussian
//! relative entropies used by the SGLD bounds. All logarithms are natural,
//! so every quantity is in nats.

use std::fmt;

use rand_distr::{Distribution, StandardNormal};

use crate::data::PMF_TOLERANCE;
use crate::error::{Error, Result};
use crate::rng::rng_from;

/// An exact probability table over a tuple of named finite variables.
///
/// States are stored row-major: the last variable varies fastest.
#[derive(Clone, PartialEq)]
pub struct FiniteJoint {
    names: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl fmt::Debug for FiniteJoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteJoint")
            .field("names", &self.names)
            .field("sizes", &self.sizes)
            .field("states", &self.probs.len())
            .finish()
    }
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * sizes[k + 1];
    }
    s
}

impl FiniteJoint {
    pub fn new(vars: Vec<(String, usize)>, probs: Vec<f64>) -> Result<Self> {
        let (names, sizes): (Vec<String>, Vec<usize>) = vars.into_iter().unzip();
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::Distribution("variable with empty domain".into()));
        }
        for (k, n) in names.iter().enumerate() {
            if names[..k].contains(n) {
                return Err(Error::Distribution(format!("duplicate variable name {n}")));
            }
        }
        let states: usize = sizes.iter().product();
        if probs.len() != states {
            return Err(Error::Distribution(format!(
                "table has {} entries, domain has {states} states",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Distribution("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::Distribution(format!("joint sums to {total}, not 1")));
        }
        Ok(Self { names, sizes, probs })
    }

    /// Builds the table by evaluating `f` on every index tuple.
    pub fn from_fn(vars: Vec<(String, usize)>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let sizes: Vec<usize> = vars.iter().map(|v| v.1).collect();
        let states: usize = sizes.iter().product();
        let mut idx = vec![0usize; sizes.len()];
        let mut probs = Vec::with_capacity(states);
        for _ in 0..states {
            probs.push(f(&idx));
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(vars, probs)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Usage(format!("unknown variable {name}")))
    }

    fn indices_of<S: AsRef<str>>(&self, group: &[S]) -> Result<Vec<usize>> {
        let idx = group.iter().map(|n| self.var_index(n.as_ref())).collect::<Result<Vec<_>>>()?;
        for (k, i) in idx.iter().enumerate() {
            if idx[..k].contains(i) {
                return Err(Error::Usage(format!("variable {} listed twice", self.names[*i])));
            }
        }
        Ok(idx)
    }

    /// Marginal over `group`, with variables in the order given.
    pub fn marginal<S: AsRef<str>>(&self, group: &[S]) -> Result<FiniteJoint> {
        let keep = self.indices_of(group)?;
        let sizes: Vec<usize> = keep.iter().map(|&k| self.sizes[k]).collect();
        let out_strides = strides(&sizes);
        // contribution of each source variable to the target offset
        let mut weight = vec![0usize; self.sizes.len()];
        for (pos, &k) in keep.iter().enumerate() {
            weight[k] = out_strides[pos];
        }
        let mut out = vec![0.0; sizes.iter().product()];
        let mut idx = vec![0usize; self.sizes.len()];
        let mut offset = 0usize;
        for &p in &self.probs {
            out[offset] += p;
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                offset += weight[k];
                if idx[k] < self.sizes[k] {
                    break;
                }
                offset -= weight[k] * self.sizes[k];
                idx[k] = 0;
            }
        }
        let names = keep.iter().map(|&k| self.names[k].clone()).collect();
        Ok(FiniteJoint { names, sizes, probs: out })
    }

    /// The product distribution `self × other` over the concatenated variables.
    pub fn product(&self, other: &FiniteJoint) -> Result<FiniteJoint> {
        if self.names.iter().any(|n| other.names.contains(n)) {
            return Err(Error::Usage("product of joints sharing a variable".into()));
        }
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for p in &self.probs {
            probs.extend(other.probs.iter().map(|q| p * q));
        }
        let names = self.names.iter().chain(&other.names).cloned().collect();
        let sizes = self.sizes.iter().chain(&other.sizes).copied().collect();
        Ok(FiniteJoint { names, sizes, probs })
    }

    /// Splits the joint by the value of `group`: one `(P(c), P_{·|c})` entry
    /// for every state `c` of positive probability, in row-major order of
    /// `c`. The conditionals are over the remaining variables.
    pub fn condition_on<S: AsRef<str>>(&self, group: &[S]) -> Result<Vec<(f64, FiniteJoint)>> {
        let cond = self.indices_of(group)?;
        let rest: Vec<usize> = (0..self.names.len()).filter(|k| !cond.contains(k)).collect();
        if rest.is_empty() {
            return Err(Error::Usage("conditioning on every variable".into()));
        }
        let order: Vec<&str> = cond.iter().chain(&rest).map(|&k| self.names[k].as_str()).collect();
        let arranged = self.marginal(&order)?;
        let block: usize = rest.iter().map(|&k| self.sizes[k]).product();
        let names: Vec<String> = rest.iter().map(|&k| self.names[k].clone()).collect();
        let sizes: Vec<usize> = rest.iter().map(|&k| self.sizes[k]).collect();
        let mut out = Vec::new();
        for chunk in arranged.probs.chunks(block) {
            let pc: f64 = chunk.iter().sum();
            if pc > 0.0 {
                let probs = chunk.iter().map(|p| p / pc).collect();
                out.push((pc, FiniteJoint { names: names.clone(), sizes: sizes.clone(), probs }));
            }
        }
        Ok(out)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().filter(|p| **p > 0.0).map(|p| p * p.ln()).sum::<f64>()
    }
}

/// `KL(p ‖ q) = Σ p log(p/q)` with `0·log(0/q) = 0`.
///
/// Summed as `Σ q (x ln x − x + 1)` with `x = p/q`, which is the same value
/// for normalized `p` and `q` but has nonnegative terms, so nearly equal
/// distributions give a divergence near `0` rather than rounding noise.
///
/// Returns [`Error::NotAbsolutelyContinuous`] when some state has `q = 0 < p`;
/// callers that want the `+∞` convention can map that error to
/// [`f64::INFINITY`].
pub fn kl(p: &FiniteJoint, q: &FiniteJoint) -> Result<f64> {
    if p.names != q.names || p.sizes != q.sizes {
        return Err(Error::Usage("relative entropy between joints over different variables".into()));
    }
    let mut acc = 0.0;
    for (&pp, &qq) in p.probs.iter().zip(&q.probs) {
        if pp > 0.0 {
            if qq <= 0.0 {
                return Err(Error::NotAbsolutelyContinuous);
            }
            let d = pp / qq - 1.0;
            acc += qq * ((1.0 + d) * d.ln_1p() - d).max(0.0);
        } else {
            acc += qq;
        }
    }
    Ok(acc)
}

fn check_disjoint<S: AsRef<str>>(groups: &[&[S]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for g in groups {
        for n in g.iter() {
            if seen.contains(&n.as_ref()) {
                return Err(Error::Usage(format!("variable {} appears in two groups", n.as_ref())));
            }
            seen.push(n.as_ref());
        }
    }
    Ok(())
}

/// `I(A; B) = KL(P_{A,B} ‖ P_A × P_B)`.
pub fn mutual_information<S: AsRef<str>>(joint: &FiniteJoint, a: &[S], b: &[S]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let both: Vec<&str> = a.iter().chain(b).map(AsRef::as_ref).collect();
    let pab = joint.marginal(&both)?;
    let prod = joint.marginal(a)?.product(&joint.marginal(b)?)?;
    kl(&pab, &prod)
}

/// `I(A; B | C) = E_{P_C}[KL(P_{A,B|C} ‖ P_{A|C} × P_{B|C})]`; conditioning
/// states of zero probability contribute nothing.
pub fn conditional_mutual_information<S: AsRef<str>>(
    joint: &FiniteJoint,
    a: &[S],
    b: &[S],
    c: &[S],
) -> Result<f64> {
    check_disjoint(&[a, b, c])?;
    if c.is_empty() {
        return mutual_information(joint, a, b);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let used: Vec<&str> = a.iter().chain(b).chain(c).map(AsRef::as_ref).collect();
    let reduced = joint.marginal(&used)?;
    let mut acc = 0.0;
    for (pc, cond) in reduced.condition_on(c)? {
        acc += pc * mutual_information(&cond, a, b)?;
    }
    Ok(acc.max(0.0))
}

/// `N(mean, sigma² I_d)`; `sigma` is the per-coordinate standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicGaussian {
    mean: Vec<f64>,
    sigma: f64,
}

impl IsotropicGaussian {
    pub fn new(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Usage("Gaussian scale must be positive and finite".into()));
        }
        if mean.is_empty() || mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::Usage("Gaussian mean must be a non-empty finite vector".into()));
        }
        Ok(Self { mean, sigma })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d2: f64 = x.iter().zip(&self.mean).map(|(a, m)| (a - m) * (a - m)).sum();
        -0.5 * d2 / s2 - 0.5 * self.dim() as f64 * (2.0 * std::f64::consts::PI * s2).ln()
    }
}

/// `KL(N(μ, σ²I) ‖ N(μ', σ²I)) = ‖μ − μ'‖² / (2σ²)`. Only equal scales are
/// supported.
pub fn gaussian_kl_isotropic(p: &IsotropicGaussian, q: &IsotropicGaussian) -> Result<f64> {
    if p.sigma != q.sigma {
        return Err(Error::Unsupported("relative entropy between Gaussians of unequal scale".into()));
    }
    if p.dim() != q.dim() {
        return Err(Error::Usage("Gaussians of different dimension".into()));
    }
    let d2: f64 = p.mean.iter().zip(&q.mean).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(d2 / (2.0 * p.sigma * p.sigma))
}

/// Upper bound on `KL(N_u ‖ (1−π)N_0 + πN_1)` when all three Gaussians share
/// one scale, `N_u` is component `u` of the mixture and the two component
/// means are `c = ‖μ_0 − μ_1‖²/(2σ²)` apart in relative entropy:
///
/// `−log(|u − π|·e^{−c} + |(1 − π) − u|)`.
///
/// Returns `+∞` when the mixture puts no weight on component `u` and
/// `c = ∞` (the estimate is certain and wrong). Nondecreasing in `c`, and
/// tends to `−log|(1 − π) − u|` from below as `c → ∞`.
///
/// # Panics
/// If `c < 0`, `c` is NaN, or `π ∉ [0, 1]`.
pub fn mixture_gaussian_kl_bound(c: f64, pi: f64, u: bool) -> f64 {
    assert!(c >= 0.0, "c must be >= 0, got {c}");
    assert!((0.0..=1.0).contains(&pi), "pi must lie in [0, 1], got {pi}");
    let u = if u { 1.0 } else { 0.0 };
    let miss = (u - pi).abs();
    // |u − π| + |(1 − π) − u| = 1, so the argument is 1 − miss·(1 − e^{−c}).
    -(miss * (-c).exp_m1()).ln_1p()
}

/// Monte Carlo estimate of `KL(p ‖ (1−π)q0 + πq1)` with its standard error.
pub fn gaussian_vs_mixture_kl_mc(
    p: &IsotropicGaussian,
    q0: &IsotropicGaussian,
    q1: &IsotropicGaussian,
    pi: f64,
    nsamples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if nsamples < 1000 {
        return Err(Error::Usage("need at least 1000 Monte Carlo samples".into()));
    }
    if p.sigma != q0.sigma || p.sigma != q1.sigma {
        return Err(Error::Unsupported("mixture components of unequal scale".into()));
    }
    if p.dim() != q0.dim() || p.dim() != q1.dim() {
        return Err(Error::Usage("Gaussians of different dimension".into()));
    }
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::Usage(format!("mixture weight {pi} not in [0, 1]")));
    }
    let mut rng = rng_from(seed);
    let mut x = vec![0.0; p.dim()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..nsamples {
        for (xi, m) in x.iter_mut().zip(&p.mean) {
            let e: f64 = StandardNormal.sample(&mut rng);
            *xi = m + p.sigma * e;
        }
        let lp = p.log_density(&x);
        let l0 = q0.log_density(&x);
        let l1 = q1.log_density(&x);
        let top = l0.max(l1);
        let lmix = top + ((1.0 - pi) * (l0 - top).exp() + pi * (l1 - top).exp()).ln();
        let v = lp - lmix;
        sum += v;
        sum_sq += v * v;
    }
    let n = nsamples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    #[test]
    fn mixture_bound_half_prior_value() {
        let v = super::mixture_gaussian_kl_bound(2.0, 0.5, true);
        assert!((v - 0.566_219_7).abs() < 1e-6, "{v}");
        assert!((v + (0.5 * (-2.0f64).exp() + 0.5).ln()).abs() < 1e-15);
    }

    use super::*;
    use crate::rng::rng_from;
    use rand::Rng;

    fn v(name: &str, k: usize) -> (String, usize) {
        (name.to_string(), k)
    }

    fn random_joint(sizes: &[usize], seed: u64) -> FiniteJoint {
        let mut rng = rng_from(seed);
        let states: usize = sizes.iter().product();
        let raw: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 0.01).collect();
        let total: f64 = raw.iter().sum();
        let names = ["A", "B", "C", "D"];
        let vars = sizes.iter().enumerate().map(|(k, &s)| v(names[k], s)).collect();
        FiniteJoint::new(vars, raw.iter().map(|r| r / total).collect()).unwrap()
    }

    #[test]
    fn kl_examples() {
        let p = FiniteJoint::new(vec![v("X", 2)], vec![0.0, 1.0]).unwrap();
        let q = FiniteJoint::new(vec![v("X", 2)], vec![0.5, 0.5]).unwrap();
        assert_eq!(kl(&q, &q).unwrap(), 0.0);
        assert!((kl(&p, &q).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(kl(&q, &p), Err(Error::NotAbsolutelyContinuous));
    }

    #[test]
    fn kl_matches_independent_summation() {
        let p = random_joint(&[4], 1);
        let q = random_joint(&[4], 2);
        let mut direct = 0.0;
        for k in 0..4 {
            let (a, b) = (p.probs()[k], q.probs()[k]);
            direct += a * a.ln() - a * b.ln();
        }
        assert!((kl(&p, &q).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn kl_is_nonnegative_with_equality_only_at_equal_tables() {
        for s in 0..1000 {
            let p = random_joint(&[3, 2], 10 + s);
            let q = random_joint(&[3, 2], 5000 + s);
            assert!(kl(&p, &q).unwrap() > 0.0);
            assert_eq!(kl(&p, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn marginal_and_product() {
        let j = random_joint(&[2, 3, 2], 4);
        let m = j.marginal(&["C", "A"]).unwrap();
        assert_eq!(m.sizes(), &[2, 2]);
        let mut expect = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    expect[c][a] += j.probs()[a * 6 + b * 2 + c];
                }
            }
        }
        for c in 0..2 {
            for a in 0..2 {
                assert!((m.probs()[c * 2 + a] - expect[c][a]).abs() < 1e-15);
            }
        }
        assert!(j.marginal(&["A", "A"]).is_err());
        assert!(j.marginal(&["Q"]).is_err());
    }

    #[test]
    fn mi_examples() {
        let a = random_joint(&[3], 1);
        let b = random_joint(&[2], 2);
        let prod = FiniteJoint::new(
            vec![v("X", 3), v("Y", 2)],
            a.product(&FiniteJoint::new(vec![v("B2", 2)], b.probs().to_vec()).unwrap())
                .unwrap()
                .probs()
                .to_vec(),
        )
        .unwrap();
        assert!(mutual_information(&prod, &["X"], &["Y"]).unwrap() < 1e-15);
        let k = 5;
        let copy = FiniteJoint::from_fn(vec![v("X", k), v("Y", k)], |i| {
            if i[0] == i[1] {
                1.0 / k as f64
            } else {
                0.0
            }
        })
        .unwrap();
        let mi = mutual_information(&copy, &["X"], &["Y"]).unwrap();
        assert!((mi - (k as f64).ln()).abs() < 1e-14);
        assert!(mutual_information(&copy, &["X"], &["X"]).is_err());
    }

    #[test]
    fn mi_is_symmetric_and_monotone() {
        for s in 0..100 {
            let j = random_joint(&[2, 3, 2], 100 + s);
            let ab = mutual_information(&j, &["A"], &["B"]).unwrap();
            let ba = mutual_information(&j, &["B"], &["A"]).unwrap();
            let abc = mutual_information(&j, &["A"], &["B", "C"]).unwrap();
            assert!((ab - ba).abs() < 1e-14);
            assert!(ab <= abc + 1e-14);
        }
    }

    #[test]
    fn cmi_examples() {
        // A and B independent given C
        let pc = [0.3, 0.7];
        let pa = [[0.2, 0.8], [0.6, 0.4]];
        let pb = [[0.5, 0.1, 0.4], [0.3, 0.3, 0.4]];
        let j = FiniteJoint::from_fn(vec![v("A", 2), v("B", 3), v("C", 2)], |i| {
            pc[i[2]] * pa[i[2]][i[0]] * pb[i[2]][i[1]]
        })
        .unwrap();
        assert!(conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap() < 1e-14);
        assert!(mutual_information(&j, &["A"], &["B"]).unwrap() > 1e-4);

        let r = random_joint(&[2, 3, 1], 9);
        let cmi = conditional_mutual_information(&r, &["A"], &["B"], &["C"]).unwrap();
        let mi = mutual_information(&r, &["A"], &["B"]).unwrap();
        assert!((cmi - mi).abs() < 1e-15);
        assert!(conditional_mutual_information(&r, &["A"], &["B"], &["A"]).is_err());
    }

    #[test]
    fn chain_rule_holds() {
        for s in 0..200 {
            let j = random_joint(&[3, 2, 3], 700 + s);
            let lhs = mutual_information(&j, &["A"], &["B", "C"]).unwrap();
            let rhs = mutual_information(&j, &["A"], &["C"]).unwrap()
                + conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn condition_on_skips_null_states() {
        let j = FiniteJoint::new(vec![v("A", 2), v("C", 2)], vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let parts = j.condition_on(&["C"]).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, 1.0);
        assert_eq!(parts[0].1.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn gaussian_kl_examples() {
        let p = IsotropicGaussian::new(vec![1.0, 0.0], 1.0).unwrap();
        let q = IsotropicGaussian::new(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(gaussian_kl_isotropic(&p, &p).unwrap(), 0.0);
        assert_eq!(gaussian_kl_isotropic(&p, &q).unwrap(), 0.5);
        let r = IsotropicGaussian::new(vec![0.0, 0.0], 2.0).unwrap();
        assert!(matches!(gaussian_kl_isotropic(&p, &r), Err(Error::Unsupported(_))));
        assert!(IsotropicGaussian::new(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn mixture_bound_examples() {
        assert_eq!(mixture_gaussian_kl_bound(3.0, 1.0, true), 0.0);
        assert_eq!(mixture_gaussian_kl_bound(3.0, 0.0, false), 0.0);
        let limit = -(0.9f64).ln();
        let far = mixture_gaussian_kl_bound(1e6, 0.9, true);
        assert!((far - limit).abs() < 1e-15);
        assert!(mixture_gaussian_kl_bound(20.0, 0.9, true) < limit);
        let v = mixture_gaussian_kl_bound(2.0, 0.5, true);
        let direct = -(0.5 * (-2.0f64).exp() + 0.5).ln();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.566_219_0).abs() < 1e-6);
        assert_eq!(mixture_gaussian_kl_bound(f64::INFINITY, 0.0, true), f64::INFINITY);
        assert!(mixture_gaussian_kl_bound(f64::INFINITY, 0.3, true).is_finite());
        assert_eq!(mixture_gaussian_kl_bound(0.0, 0.3, true), 0.0);
    }

    #[test]
    fn mixture_bound_is_monotone_in_c() {
        let mut rng = rng_from(77);
        for _ in 0..200 {
            let pi: f64 = rng.random();
            let u: bool = rng.random();
            let mut prev = 0.0;
            for k in 0..200 {
                let c = k as f64 * 0.1;
                let g = mixture_gaussian_kl_bound(c, pi, u);
                assert!(g >= prev);
                prev = g;
            }
        }
    }

    #[test]
    fn mc_kl_degenerate_cases() {
        let p = IsotropicGaussian::new(vec![0.3, -1.0], 0.7).unwrap();
        let far = IsotropicGaussian::new(vec![2.0, 1.0], 0.7).unwrap();
        let (est, se) = gaussian_vs_mixture_kl_mc(&p, &far, &p, 1.0, 5000, 1).unwrap();
        assert!(est.abs() <= 3.0 * se + 1e-12);
        let (est, se) = gaussian_vs_mixture_kl_mc(&p, &p, &p, 0.5, 5000, 2).unwrap();
        assert_eq!((est, se), (0.0, 0.0));
        assert!(gaussian_vs_mixture_kl_mc(&p, &p, &p, 0.5, 10, 2).is_err());
    }
}
