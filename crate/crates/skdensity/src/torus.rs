//! One-dimensional periodic sk-splines on the circle.
//!
//! This module is the independently verifiable sandbox for the cardinal
//! machinery: everything here reduces to small trigonometric node sums and
//! an explicit fundamental-spline formula that can be cross-checked against
//! a dense solve of the periodic interpolation system.
//!
//! For a continuous 2 pi periodic kernel `K`, `m` uniform knots
//! `x_v = 2 pi v / m` and interpolation points `y_k = y + x_k` shifted by a
//! parameter `y`, the fundamental interpolant is
//!
//! ```text
//! sk~(x) = 1/m + (1/m) sum_{j=1}^{m-1}
//!          (rho_j(x) rho_j(y) + sigma_j(x) sigma_j(y)) / (rho_j(y)^2 + sigma_j(y)^2)
//! ```
//!
//! with the node sums
//!
//! ```text
//! rho_j(x)   = sum_{v=1}^{m} cos(2 pi v j / m) K(x - 2 pi v / m),
//! sigma_j(x) = sum_{v=1}^{m} sin(2 pi v j / m) K(x - 2 pi v / m).
//! ```
//!
//! It takes value 1 at `y_k` with `k = 0 (mod m)` and 0 at the remaining
//! interpolation points. Existence requires `rho_j(y)^2 + sigma_j(y)^2 > 0`
//! for every `j` in range. With the Bernoulli monospline kernels `D_r` the
//! span is the classical polynomial splines of order `r - 1`; the `r = 4`,
//! `y = 0` case is the historical cubic formula with the pure cosine ratio.

use crate::error::{Error, Result};

/// A continuous 2 pi periodic kernel.
pub trait PeriodicKernel {
    fn eval(&self, x: f64) -> f64;
}

/// Bernoulli monospline `D_r(x) = sum_{k>=1} k^{-r} cos(k x + r pi / 2)`,
/// evaluated by direct partial summation.
///
/// The omitted tail is bounded by `sum_{k>N} k^{-r} <= N^{1-r} / (r-1)`.
#[derive(Debug, Clone)]
pub struct BernoulliMonospline {
    order: u32,
    terms: usize,
}

impl BernoulliMonospline {
    pub fn new(order: u32, terms: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!(
                "bernoulli monospline order must be at least 2, got {order}"
            )));
        }
        if terms == 0 {
            return Err(Error::InvalidParameter(
                "bernoulli monospline needs at least one term".into(),
            ));
        }
        Ok(Self { order, terms })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Analytic bound on the truncated tail.
    pub fn tail_bound(&self) -> f64 {
        let r = self.order as f64;
        (self.terms as f64).powf(1.0 - r) / (r - 1.0)
    }
}

impl PeriodicKernel for BernoulliMonospline {
    fn eval(&self, x: f64) -> f64 {
        let phase = self.order as f64 * std::f64::consts::FRAC_PI_2;
        // summed smallest-first for accuracy
        let mut acc = 0.0;
        for k in (1..=self.terms).rev() {
            let kf = k as f64;
            acc += (kf * x + phase).cos() / kf.powi(self.order as i32);
        }
        acc
    }
}

/// Trigonometric node sums `(rho_j(x), sigma_j(x))` for `m` uniform knots.
pub fn rho_sigma<K: PeriodicKernel>(kernel: &K, node_count: usize, j: usize, x: f64) -> (f64, f64) {
    let values = node_values(kernel, node_count, x);
    rho_sigma_from_values(&values, node_count, j)
}

fn node_values<K: PeriodicKernel>(kernel: &K, m: usize, x: f64) -> Vec<f64> {
    let tau = 2.0 * std::f64::consts::PI;
    (1..=m)
        .map(|v| kernel.eval(x - tau * v as f64 / m as f64))
        .collect()
}

fn rho_sigma_from_values(values: &[f64], m: usize, j: usize) -> (f64, f64) {
    let tau = 2.0 * std::f64::consts::PI;
    let mut rho = 0.0;
    let mut sigma = 0.0;
    for (v, &kv) in values.iter().enumerate() {
        let angle = tau * (v + 1) as f64 * j as f64 / m as f64;
        rho += angle.cos() * kv;
        sigma += angle.sin() * kv;
    }
    (rho, sigma)
}

/// Fundamental periodic sk-spline on `m` uniform knots with interpolation
/// points shifted by `y`.
///
/// Construction caches the node sums at the shift and fails loudly when the
/// existence condition degenerates for some frequency.
#[derive(Debug, Clone)]
pub struct PeriodicFundamentalSpline<K: PeriodicKernel> {
    kernel: K,
    node_count: usize,
    shift: f64,
    rho_y: Vec<f64>,
    sigma_y: Vec<f64>,
}

impl<K: PeriodicKernel> PeriodicFundamentalSpline<K> {
    pub fn new(kernel: K, node_count: usize, shift: f64) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::InvalidParameter(
                "periodic fundamental spline needs at least two nodes".into(),
            ));
        }
        let m = node_count;
        let values = node_values(&kernel, m, shift);
        let mut rho_y = Vec::with_capacity(m - 1);
        let mut sigma_y = Vec::with_capacity(m - 1);
        for j in 1..m {
            let (r, s) = rho_sigma_from_values(&values, m, j);
            let norm = r * r + s * s;
            if norm <= 1e-24 {
                return Err(Error::InvalidParameter(format!(
                    "singular configuration: rho_{j}^2 + sigma_{j}^2 = {norm:.3e} at shift {shift}"
                )));
            }
            rho_y.push(r);
            sigma_y.push(s);
        }
        Ok(Self {
            kernel,
            node_count,
            shift,
            rho_y,
            sigma_y,
        })
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Knot `x_k = 2 pi k / m`.
    pub fn knot(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.node_count as f64
    }

    /// Interpolation point `y_k = y + x_k`.
    pub fn interpolation_point(&self, k: usize) -> f64 {
        self.shift + self.knot(k)
    }

    /// Evaluate the fundamental spline.
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.node_count;
        let values = node_values(&self.kernel, m, x);
        let mut acc = 1.0 / m as f64;
        for j in 1..m {
            let (rho_x, sigma_x) = rho_sigma_from_values(&values, m, j);
            let rho_y = self.rho_y[j - 1];
            let sigma_y = self.sigma_y[j - 1];
            acc += (rho_x * rho_y + sigma_x * sigma_y)
                / (rho_y * rho_y + sigma_y * sigma_y)
                / m as f64;
        }
        acc
    }

    /// Interpolant of samples `f(y_k)`, `k = 0..m-1`, as
    /// `sum_k f(y_k) sk~(x - x_k)`.
    pub fn interpolant<'a>(&'a self, samples: &'a [f64]) -> Result<PeriodicInterpolant<'a, K>> {
        if samples.len() != self.node_count {
            return Err(Error::DimensionMismatch {
                expected: self.node_count,
                got: samples.len(),
            });
        }
        Ok(PeriodicInterpolant {
            spline: self,
            samples,
        })
    }
}

/// Lazy evaluator for a periodic sk-spline interpolant.
pub struct PeriodicInterpolant<'a, K: PeriodicKernel> {
    spline: &'a PeriodicFundamentalSpline<K>,
    samples: &'a [f64],
}

impl<K: PeriodicKernel> PeriodicInterpolant<'_, K> {
    pub fn eval(&self, x: f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .map(|(k, &f)| f * self.spline.eval(x - self.spline.knot(k)))
            .sum()
    }
}

/// Cubic fundamental spline at zero shift: the pure cosine ratio
/// `1/m + (1/m) sum_j rho_j(x) / rho_j(0)` with the order-4 Bernoulli
/// monospline as kernel.
pub fn golomb_cubic(node_count: usize, x: f64) -> f64 {
    let kernel = BernoulliMonospline::new(4, 10_000).expect("valid hard-wired kernel");
    let m = node_count;
    let at_zero = node_values(&kernel, m, 0.0);
    let at_x = node_values(&kernel, m, x);
    let mut acc = 1.0 / m as f64;
    for j in 1..m {
        let (rho_0, _) = rho_sigma_from_values(&at_zero, m, j);
        let (rho_x, _) = rho_sigma_from_values(&at_x, m, j);
        assert!(
            rho_0.abs() > 1e-300,
            "cubic node sum rho_{j}(0) vanished; formula does not apply"
        );
        acc += rho_x / rho_0 / m as f64;
    }
    acc
}

/// Direct partial sum of the Bernoulli monospline with the analytic tail
/// bound on the remainder.
pub fn bernoulli_eval(order: u32, x: f64, terms: usize) -> Result<(f64, f64)> {
    let kernel = BernoulliMonospline::new(order, terms)?;
    Ok((kernel.eval(x), kernel.tail_bound()))
}
