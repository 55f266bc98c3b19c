//! Bounded loss functions.
//!
//! Every loss declares the interval `[a, b]` it takes values in. The bounds
//! built on top of these losses only use that interval, so a loss that
//! leaves its declared range silently invalidates them; the test suites
//! sample each shipped loss to check the declaration.

use crate::data::LabeledPoint;
use crate::error::{Error, Result};

/// The interval `[a, b]` a loss takes values in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRange {
    a: f64,
    b: f64,
}

impl LossRange {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidRange { a, b });
        }
        Ok(Self { a, b })
    }

    /// `[0, 1]`.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    /// `b - a`.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Hoeffding's subgaussianity parameter of a variable supported on `[a, b]`.
    pub fn subgaussian_sigma(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.a && v <= self.b
    }
}

/// A loss `ℓ(w, z)` bounded in a declared range.
pub trait Loss<W: ?Sized, Z: ?Sized> {
    fn range(&self) -> LossRange;
    fn eval(&self, w: &W, z: &Z) -> f64;
}

/// A loss on real parameter vectors with an analytic gradient.
pub trait SmoothLoss<Z: ?Sized>: Loss<[f64], Z> + Send + Sync {
    /// Writes `∇_θ ℓ(θ, z)` into `out` (which has the length of `theta`).
    fn grad_into(&self, theta: &[f64], z: &Z, out: &mut [f64]);

    /// A bound on `‖∇_θ ℓ(θ, z)‖` over the whole domain, when one is known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn grad(&self, theta: &[f64], z: &Z) -> Vec<f64> {
        let mut out = vec![0.0; theta.len()];
        self.grad_into(theta, z, &mut out);
        out
    }
}

/// Checks that a parameter vector is a valid hypothesis.
pub fn check_params(theta: &[f64]) -> Result<()> {
    if theta.is_empty() {
        return Err(Error::Usage("parameter vector must have d >= 1".into()));
    }
    if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
        return Err(Error::Usage(format!("parameter coordinate {i} is not finite")));
    }
    Ok(())
}

/// Largest coordinate-wise gap between the analytic gradient and a central
/// finite difference with step `h`.
pub fn grad_check<Z: ?Sized, L: SmoothLoss<Z> + ?Sized>(
    loss: &L,
    theta: &[f64],
    z: &Z,
    h: f64,
) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let analytic = loss.grad(theta, z);
    let mut probe = theta.to_vec();
    let mut worst = 0.0f64;
    for k in 0..theta.len() {
        probe[k] = theta[k] + h;
        let up = loss.eval(&probe, z);
        probe[k] = theta[k] - h;
        let down = loss.eval(&probe, z);
        probe[k] = theta[k];
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - analytic[k]).abs());
    }
    worst
}

/// `ℓ ≡ value`, for any hypothesis and sample type.
#[derive(Debug, Clone, Copy)]
pub struct ConstantLoss {
    value: f64,
    range: LossRange,
}

impl ConstantLoss {
    pub fn new(value: f64, range: LossRange) -> Result<Self> {
        if !range.contains(value) {
            return Err(Error::Usage(format!("constant {value} outside its range")));
        }
        Ok(Self { value, range })
    }
}

impl<W: ?Sized, Z: ?Sized> Loss<W, Z> for ConstantLoss {
    fn range(&self) -> LossRange {
        self.range
    }

    fn eval(&self, _w: &W, _z: &Z) -> f64 {
        self.value
    }
}

impl<Z: ?Sized> SmoothLoss<Z> for ConstantLoss {
    fn grad_into(&self, _theta: &[f64], _z: &Z, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Loss over a finite hypothesis set and a finite sample space, stored as a
/// `|W| x |Z|` table.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTable {
    values: Vec<f64>,
    n_hyp: usize,
    n_z: usize,
    range: LossRange,
}

impl LossTable {
    /// `rows[w][z] = ℓ(w, z)`.
    pub fn new(rows: Vec<Vec<f64>>, range: LossRange) -> Result<Self> {
        let n_hyp = rows.len();
        let n_z = rows.first().map_or(0, Vec::len);
        if n_hyp == 0 || n_z == 0 {
            return Err(Error::Usage("loss table must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != n_z) {
            return Err(Error::Usage("loss table rows have different lengths".into()));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(v) = values.iter().find(|v| !range.contains(**v)) {
            return Err(Error::Usage(format!(
                "loss value {v} outside [{}, {}]",
                range.lower(),
                range.upper()
            )));
        }
        Ok(Self { values, n_hyp, n_z, range })
    }

    /// `ℓ(w, z) = 1{w ≠ z}` on a common index set of size `k`.
    pub fn zero_one(k: usize) -> Self {
        let rows = (0..k)
            .map(|w| (0..k).map(|z| if w == z { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(rows, LossRange::unit()).expect("0-1 table is valid")
    }

    pub fn n_hypotheses(&self) -> usize {
        self.n_hyp
    }

    pub fn n_samples(&self) -> usize {
        self.n_z
    }

    pub fn get(&self, w: usize, z: usize) -> f64 {
        self.values[w * self.n_z + z]
    }
}

impl Loss<usize, usize> for LossTable {
    fn range(&self) -> LossRange {
        self.range
    }

    fn eval(&self, w: &usize, z: &usize) -> f64 {
        self.get(*w, *z)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `ℓ(θ, (x, y)) = 1 / (1 + exp(y⟨θ, x⟩))` for labels `y ∈ {-1, +1}`.
///
/// Values lie in `[0, 1]` and `‖∇ℓ‖ ≤ ‖x‖/4`, so with features confined to a
/// ball of radius `R` the loss is `R/4`-Lipschitz.
#[derive(Debug, Clone, Copy)]
pub struct SigmoidLoss {
    feature_bound: f64,
}

impl SigmoidLoss {
    /// `feature_bound` is the largest feature norm the data can produce.
    pub fn new(feature_bound: f64) -> Self {
        Self { feature_bound }
    }
}

/// `1 / (1 + e^m)` without overflow.
fn logistic_tail(m: f64) -> f64 {
    if m >= 0.0 {
        let e = (-m).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + m.exp())
    }
}

impl Loss<[f64], LabeledPoint> for SigmoidLoss {
    fn range(&self) -> LossRange {
        LossRange::unit()
    }

    fn eval(&self, theta: &[f64], z: &LabeledPoint) -> f64 {
        logistic_tail(z.y * dot(theta, &z.x))
    }
}

impl SmoothLoss<LabeledPoint> for SigmoidLoss {
    fn grad_into(&self, theta: &[f64], z: &LabeledPoint, out: &mut [f64]) {
        let l = logistic_tail(z.y * dot(theta, &z.x));
        let scale = -l * (1.0 - l) * z.y;
        for (o, x) in out.iter_mut().zip(&z.x) {
            *o = scale * x;
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.feature_bound / 4.0)
    }
}

/// `ℓ(θ, x) = ½‖θ − x‖²`. Not bounded on all of `ℝ^d`; the caller declares the
/// range that holds on the region it works in.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticLoss {
    range: LossRange,
}

impl QuadraticLoss {
    pub fn new(range: LossRange) -> Self {
        Self { range }
    }
}

impl Loss<[f64], LabeledPoint> for QuadraticLoss {
    fn range(&self) -> LossRange {
        self.range
    }

    fn eval(&self, theta: &[f64], z: &LabeledPoint) -> f64 {
        0.5 * theta.iter().zip(&z.x).map(|(t, x)| (t - x) * (t - x)).sum::<f64>()
    }
}

impl SmoothLoss<LabeledPoint> for QuadraticLoss {
    fn grad_into(&self, theta: &[f64], z: &LabeledPoint, out: &mut [f64]) {
        for ((o, t), x) in out.iter_mut().zip(theta).zip(&z.x) {
            *o = t - x;
        }
    }
}

/// Welsch (Leclerc) loss `ℓ(θ, x) = 1 − exp(−‖θ − x‖² / (2s²))`: a bounded,
/// smooth surrogate of the squared error used for mean estimation.
///
/// `‖∇ℓ‖ = (r/s²)·exp(−r²/(2s²))` peaks at `r = s`, giving `L = 1/(s√e)`.
#[derive(Debug, Clone, Copy)]
pub struct WelschLoss {
    scale: f64,
}

impl WelschLoss {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Usage("Welsch scale must be positive".into()));
        }
        Ok(Self { scale })
    }

    fn sq_dist(theta: &[f64], x: &[f64]) -> f64 {
        theta.iter().zip(x).map(|(t, x)| (t - x) * (t - x)).sum()
    }
}

impl Loss<[f64], LabeledPoint> for WelschLoss {
    fn range(&self) -> LossRange {
        LossRange::unit()
    }

    fn eval(&self, theta: &[f64], z: &LabeledPoint) -> f64 {
        let s2 = self.scale * self.scale;
        -(-Self::sq_dist(theta, &z.x) / (2.0 * s2)).exp_m1()
    }
}

impl SmoothLoss<LabeledPoint> for WelschLoss {
    fn grad_into(&self, theta: &[f64], z: &LabeledPoint, out: &mut [f64]) {
        let s2 = self.scale * self.scale;
        let e = (-Self::sq_dist(theta, &z.x) / (2.0 * s2)).exp();
        for ((o, t), x) in out.iter_mut().zip(theta).zip(&z.x) {
            *o = e * (t - x) / s2;
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0 / (self.scale * std::f64::consts::E.sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;
    use rand::Rng;

    fn point(x: Vec<f64>, y: f64) -> LabeledPoint {
        LabeledPoint { x, y }
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn range_rejects_empty_interval() {
        assert!(LossRange::new(1.0, 1.0).is_err());
        assert!(LossRange::new(0.0, f64::NAN).is_err());
        let r = LossRange::new(-1.0, 3.0).unwrap();
        assert_eq!(r.width(), 4.0);
        assert_eq!(r.subgaussian_sigma(), 2.0);
    }

    #[test]
    fn quadratic_grad_check() {
        let loss = QuadraticLoss::new(LossRange::new(0.0, 100.0).unwrap());
        let z = point(vec![0.0, 0.0], 1.0);
        assert!(grad_check(&loss, &[1.0, 2.0], &z, 1e-5) < 1e-6);
        assert_eq!(loss.eval(&[1.0, 2.0][..], &z), 2.5);
    }

    #[test]
    fn constant_grad_check_is_exact() {
        let loss = ConstantLoss::new(0.3, LossRange::unit()).unwrap();
        let z = point(vec![1.0], 1.0);
        assert_eq!(grad_check(&loss, &[0.7, -2.0], &z, 1e-5), 0.0);
    }

    #[test]
    fn shipped_losses_pass_grad_check_and_stay_in_range() {
        let mut rng = rng_from(11);
        let sigmoid = SigmoidLoss::new(3.0);
        let welsch = WelschLoss::new(0.7).unwrap();
        for _ in 0..100 {
            let theta: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let n = norm(&x);
            if n > 3.0 {
                x.iter_mut().for_each(|v| *v *= 3.0 / n);
            }
            let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let z = point(x, y);
            assert!(grad_check(&sigmoid, &theta, &z, 1e-5) < 1e-6);
            assert!(grad_check(&welsch, &theta, &z, 1e-5) < 1e-6);
        }
        for _ in 0..10_000 {
            let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-50.0..50.0)).collect();
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
            let z = point(x, if rng.random::<bool>() { 1.0 } else { -1.0 });
            for (v, g, l) in [
                (sigmoid.eval(&theta, &z), sigmoid.grad(&theta, &z), sigmoid.lipschitz()),
                (welsch.eval(&theta, &z), welsch.grad(&theta, &z), welsch.lipschitz()),
            ] {
                assert!(LossRange::unit().contains(v), "{v}");
                assert!(norm(&g) <= l.unwrap() + 1e-15);
            }
        }
    }

    #[test]
    fn sigmoid_extremes_do_not_overflow() {
        let loss = SigmoidLoss::new(1.0);
        let z = point(vec![1.0], 1.0);
        assert_eq!(loss.eval(&[1e6][..], &z), 0.0);
        assert_eq!(loss.eval(&[-1e6][..], &z), 1.0);
        assert_eq!(loss.eval(&[0.0][..], &z), 0.5);
    }

    #[test]
    fn zero_one_table() {
        let t = LossTable::zero_one(3);
        assert_eq!(t.eval(&1, &1), 0.0);
        assert_eq!(t.eval(&1, &2), 1.0);
        assert!(LossTable::new(vec![vec![0.0, 2.0]], LossRange::unit()).is_err());
        assert!(LossTable::new(vec![vec![0.0], vec![0.0, 1.0]], LossRange::unit()).is_err());
    }

    #[test]
    fn params_must_be_finite_and_nonempty() {
        assert!(check_params(&[]).is_err());
        assert!(check_params(&[1.0, f64::INFINITY]).is_err());
        assert!(check_params(&[0.0]).is_ok());
    }
}
