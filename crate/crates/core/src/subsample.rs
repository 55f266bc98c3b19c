//! The randomized subsample setting: a supersample of `2N` points, selection
//! bits choosing the training set, random index subsets, and the
//! generalization-error functionals defined on them.
//!
//! Indices are 0-based in memory. Selection bit `i` picks supersample entry
//! `i` (bit 0) or `i + N` (bit 1).

use rand::seq::index;

use crate::data::{empirical_risk, mean_loss, population_risk, DataDistribution};
use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::rng::Rng;

/// `2N` candidate samples plus the `N` bits that pick the training set.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperSample<Z> {
    ztilde: Vec<Z>,
    bits: Vec<bool>,
}

impl<Z> SuperSample<Z> {
    pub fn new(ztilde: Vec<Z>, bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() || ztilde.len() != 2 * bits.len() {
            return Err(Error::Usage(format!(
                "supersample of {} points needs 2N entries for N = {} bits",
                ztilde.len(),
                bits.len()
            )));
        }
        Ok(Self { ztilde, bits })
    }

    /// Fair, independent selection bits.
    pub fn draw_bits(n: usize, rng: &mut Rng) -> Vec<bool> {
        (0..n).map(|_| rand::Rng::random::<bool>(rng)).collect()
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn ztilde(&self) -> &[Z] {
        &self.ztilde
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Supersample position of training point `i`.
    pub fn selected_index(&self, i: usize) -> usize {
        i + usize::from(self.bits[i]) * self.n()
    }

    /// Supersample position of the point paired with training point `i` but
    /// left out of the training set.
    pub fn unselected_index(&self, i: usize) -> usize {
        i + usize::from(!self.bits[i]) * self.n()
    }

    pub fn selected(&self, i: usize) -> &Z {
        &self.ztilde[self.selected_index(i)]
    }

    pub fn unselected(&self, i: usize) -> &Z {
        &self.ztilde[self.unselected_index(i)]
    }

    /// `(Z̃_i, Z̃_{i+N})`, the pair that bit `i` chooses between.
    pub fn pair(&self, i: usize) -> (&Z, &Z) {
        (&self.ztilde[i], &self.ztilde[i + self.n()])
    }

    /// The same supersample with every bit flipped.
    pub fn flipped(&self) -> Self
    where
        Z: Clone,
    {
        Self { ztilde: self.ztilde.clone(), bits: self.bits.iter().map(|b| !b).collect() }
    }
}

impl<Z: Clone> SuperSample<Z> {
    /// The training set `S` with `S_i = Z̃_{i + U_i N}`.
    pub fn compose_dataset(&self) -> Vec<Z> {
        (0..self.n()).map(|i| self.selected(i).clone()).collect()
    }
}

/// A subset `J ⊆ [N]` of training indices, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetIndex {
    indices: Vec<usize>,
    n: usize,
}

impl SubsetIndex {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.is_empty() || indices.len() > n {
            return Err(Error::Usage(format!("subset size {} not in 1..={n}", indices.len())));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Usage("subset indices must be distinct".into()));
        }
        if indices.last().is_some_and(|&i| i >= n) {
            return Err(Error::Usage(format!("subset index out of range for N = {n}")));
        }
        Ok(Self { indices, n })
    }

    pub fn full(n: usize) -> Self {
        Self { indices: (0..n).collect(), n }
    }

    pub fn single(i: usize, n: usize) -> Result<Self> {
        Self::new(vec![i], n)
    }

    /// Uniform over all size-`m` subsets of `[n]`.
    pub fn random(n: usize, m: usize, rng: &mut Rng) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::Usage(format!("subset size {m} not in 1..={n}")));
        }
        Self::new(index::sample(rng, n, m).into_vec(), n)
    }

    /// Every size-`m` subset of `[n]`, in lexicographic order.
    pub fn all(n: usize, m: usize) -> Vec<Self> {
        fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<SubsetIndex>) {
            if cur.len() == m {
                out.push(SubsetIndex { indices: cur.clone(), n });
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, m, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if (1..=n).contains(&m) {
            rec(0, n, m, &mut Vec::with_capacity(m), &mut out);
        }
        out
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `M = |J|`.
    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// `J^c`, sorted.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.contains(*i)).collect()
    }
}

/// `gen(w, S) = L_{P_Z}(w) − L_S(w)`.
pub fn gen_error<W, Z, L>(w: &W, s: &[Z], loss: &L, dist: &DataDistribution<Z>) -> Result<f64>
where
    W: ?Sized,
    L: Loss<W, Z> + ?Sized,
{
    Ok(population_risk(w, loss, dist)? - empirical_risk(w, loss, s)?)
}

/// Empirical generalization error: mean loss on the unused half of the
/// supersample minus mean loss on the training half.
pub fn emp_gen_error<W, Z, L>(w: &W, ss: &SuperSample<Z>, loss: &L) -> f64
where
    W: ?Sized,
    L: Loss<W, Z> + ?Sized,
{
    let n = ss.n();
    let total: f64 = (0..n)
        .map(|i| loss.eval(w, ss.unselected(i)) - loss.eval(w, ss.selected(i)))
        .sum();
    total / n as f64
}

/// `L_{P_Z}(w) − (1/M) Σ_{i∈J} ℓ(w, Z_i)`.
pub fn gen_subset<W, Z, L>(
    w: &W,
    s: &[Z],
    subset: &SubsetIndex,
    loss: &L,
    dist: &DataDistribution<Z>,
) -> Result<f64>
where
    W: ?Sized,
    L: Loss<W, Z> + ?Sized,
{
    if subset.n() != s.len() {
        return Err(Error::Usage(format!(
            "subset drawn from [{}] applied to a dataset of {}",
            subset.n(),
            s.len()
        )));
    }
    let emp = mean_loss(w, loss, subset.indices().iter().map(|&i| &s[i]));
    Ok(population_risk(w, loss, dist)? - emp)
}

/// `(1/M) Σ_{i∈J} [ℓ(w, Z̃_{i+(1−U_i)N}) − ℓ(w, Z̃_{i+U_iN})]`.
pub fn emp_gen_subset<W, Z, L>(w: &W, ss: &SuperSample<Z>, subset: &SubsetIndex, loss: &L) -> Result<f64>
where
    W: ?Sized,
    L: Loss<W, Z> + ?Sized,
{
    if subset.n() != ss.n() {
        return Err(Error::Usage(format!(
            "subset drawn from [{}] applied to a supersample with N = {}",
            subset.n(),
            ss.n()
        )));
    }
    let total: f64 = subset
        .indices()
        .iter()
        .map(|&i| loss.eval(w, ss.unselected(i)) - loss.eval(w, ss.selected(i)))
        .sum();
    Ok(total / subset.m() as f64)
}
