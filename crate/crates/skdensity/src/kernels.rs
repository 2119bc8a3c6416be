//! Kernel catalog and the periodized spectrum ("symbol").
//!
//! A kernel is a continuous, square-integrable function `K` on `R^n` that is
//! evaluable both in space and in frequency. The frequency-side convention
//! used throughout the crate is
//!
//! ```text
//! F(K)(z) = integral over R^n of exp(-i<x, z>) K(x) dx,
//! F^{-1}(g)(x) = (2 pi)^{-n} F(g)(-x).
//! ```
//!
//! Readers used to the `exp(+i<x, z>)` convention can translate with
//!
//! | here                  | `exp(+i)` convention            |
//! |-----------------------|---------------------------------|
//! | `F(K)(z)`             | `F(K)(-z)`                      |
//! | `F^{-1}(g)(x)`        | `(2 pi)^{-n} F(g)(x)`           |
//! | Gaussian spectra      | identical (even functions)      |
//!
//! The symbol of a kernel on a mesh is the dual-lattice periodization
//!
//! ```text
//! S(z) = sum over m in Z^n of F(K)(z + 2 pi A^{-1} m),
//! ```
//!
//! a periodic function on the dual cell `[0, 2pi/a_1] x ... x [0, 2pi/a_n]`.
//! Everything downstream (cardinal spline coefficients, density
//! reconstruction) divides by `S`, so the symbol must stay away from zero.
//! That hypothesis is checked numerically here: the symbol is always computed
//! by direct truncated periodization of the kernel spectrum, never from a
//! closed form, and a dense sample of the dual cell provides the cached
//! minimum used by the nonvanishing check.

use crate::error::{Error, Result};
use crate::mesh::{IndexBox, UniformMesh};

/// A kernel with paired spatial and spectral evaluation.
///
/// Implementations must be continuous and square-integrable. `spectral_tail`
/// drives every truncation decision: it must bound `sup |F(K)(z)|` over the
/// region where at least one coordinate exceeds `r` in absolute value.
pub trait Kernel {
    /// Number of axes.
    fn dim(&self) -> usize;

    /// Spatial evaluation `K(x)`.
    fn spatial(&self, x: &[f64]) -> f64;

    /// Spectral evaluation `F(K)(z)`, real for the shipped symmetric kernels.
    fn spectrum(&self, z: &[f64]) -> f64;

    /// Upper bound for `sup { |F(K)(z)| : max_k |z_k| >= r }`.
    fn spectral_tail(&self, r: f64) -> f64;
}

/// The anisotropic Gaussian `K(x) = exp(-sum b_k x_k^2)` with shape
/// parameters `b_k > 0`.
///
/// Its spectrum is `pi^{n/2} (prod b_k)^{-1/2} exp(-sum z_k^2 / (4 b_k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    shape: Vec<f64>,
}

impl GaussianKernel {
    pub fn new(shape: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidParameter(
                "gaussian kernel needs at least one shape parameter".into(),
            ));
        }
        for (k, &b) in shape.iter().enumerate() {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "gaussian shape parameter on axis {k} must be positive and finite, got {b}"
                )));
            }
        }
        Ok(Self { shape })
    }

    /// Isotropic kernel in one dimension.
    pub fn isotropic_1d(b: f64) -> Result<Self> {
        Self::new(vec![b])
    }

    pub fn shape(&self) -> &[f64] {
        &self.shape
    }
}

impl Kernel for GaussianKernel {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn spatial(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.dim(),
            "gaussian spatial eval: dimension mismatch"
        );
        let q: f64 = x.iter().zip(&self.shape).map(|(&xk, &bk)| bk * xk * xk).sum();
        (-q).exp()
    }

    fn spectrum(&self, z: &[f64]) -> f64 {
        assert_eq!(
            z.len(),
            self.dim(),
            "gaussian spectral eval: dimension mismatch"
        );
        let n = self.dim() as f64;
        let det_b: f64 = self.shape.iter().product();
        let q: f64 = z
            .iter()
            .zip(&self.shape)
            .map(|(&zk, &bk)| zk * zk / (4.0 * bk))
            .sum();
        std::f64::consts::PI.powf(n / 2.0) * det_b.powf(-0.5) * (-q).exp()
    }

    fn spectral_tail(&self, r: f64) -> f64 {
        // The supremum over { max |z_k| >= r } puts the large coordinate on
        // the slowest-decaying axis and zeros elsewhere.
        let n = self.dim() as f64;
        let det_b: f64 = self.shape.iter().product();
        let b_max = self.shape.iter().cloned().fold(f64::MIN, f64::max);
        std::f64::consts::PI.powf(n / 2.0) * det_b.powf(-0.5) * (-r * r / (4.0 * b_max)).exp()
    }
}

/// Options controlling symbol construction.
#[derive(Debug, Clone)]
pub struct SymbolOptions {
    /// Bound on the omitted periodization tail, per the kernel's
    /// `spectral_tail` estimate.
    pub tail_tol: f64,
    /// Per-axis resolution of the dense dual-cell sample that caches the
    /// symbol minimum.
    pub min_samples_per_axis: usize,
    /// Hard cap on the periodization radius.
    pub max_radius: usize,
}

impl Default for SymbolOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-14,
            min_samples_per_axis: 64,
            max_radius: 64,
        }
    }
}

/// Outcome of the numerical nonvanishing check.
#[derive(Debug, Clone)]
pub struct NonvanishingReport {
    pub passed: bool,
    /// Smallest sampled `|S(z)|` over the dual cell.
    pub min_abs: f64,
    /// Sample point attaining the minimum.
    pub argmin: Vec<f64>,
}

/// The truncated periodization of a kernel spectrum over the dual lattice.
///
/// Construction selects the smallest index box whose omitted tail is below
/// `tail_tol` and caches the minimum of `|S|` over a dense tensor sample of
/// the dual cell. After construction every evaluation is pure and safe to
/// call concurrently.
#[derive(Debug, Clone)]
pub struct Symbol<K: Kernel> {
    mesh: UniformMesh,
    kernel: K,
    radius: IndexBox,
    tail_bound: f64,
    cell_min: f64,
    cell_min_arg: Vec<f64>,
}

impl<K: Kernel> Symbol<K> {
    pub fn new(mesh: UniformMesh, kernel: K, opts: &SymbolOptions) -> Result<Self> {
        if kernel.dim() != mesh.dim() {
            return Err(Error::DimensionMismatch {
                expected: mesh.dim(),
                got: kernel.dim(),
            });
        }
        let n = mesh.dim();
        let min_dual = (0..n)
            .map(|k| mesh.dual_period(k))
            .fold(f64::INFINITY, f64::min);

        // Smallest radius r such that all shells beyond r contribute less
        // than tail_tol. A term on shell rho has some coordinate at distance
        // at least (rho - 1) dual periods from the cell.
        let mut radius = 0usize;
        let mut tail = shell_tail_bound(&kernel, n, min_dual, radius, opts.max_radius);
        while tail > opts.tail_tol {
            radius += 1;
            if radius > opts.max_radius {
                return Err(Error::TruncationRadius {
                    tail,
                    tol: opts.tail_tol,
                    cap: opts.max_radius,
                });
            }
            tail = shell_tail_bound(&kernel, n, min_dual, radius, opts.max_radius);
        }

        let mut symbol = Self {
            mesh,
            kernel,
            radius: IndexBox::cubic(n, radius),
            tail_bound: tail,
            cell_min: f64::INFINITY,
            cell_min_arg: vec![0.0; n],
        };
        let (min_abs, argmin) = symbol.sample_min(opts.min_samples_per_axis);
        symbol.cell_min = min_abs;
        symbol.cell_min_arg = argmin;
        Ok(symbol)
    }

    pub fn mesh(&self) -> &UniformMesh {
        &self.mesh
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    /// Periodization box used by `eval`.
    pub fn radius(&self) -> &IndexBox {
        &self.radius
    }

    /// Bound on the omitted periodization tail.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Cached minimum of `|S|` over the dense dual-cell sample.
    pub fn cell_min(&self) -> f64 {
        self.cell_min
    }

    /// Truncated periodization `sum over |m| <= radius of F(K)(z + dual(m))`.
    ///
    /// The argument is first reduced into the fundamental dual cell, which
    /// keeps the truncation bound valid for arbitrary `z` and makes the
    /// result periodic by construction.
    pub fn eval(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.mesh.dim(), "symbol eval: dimension mismatch");
        let reduced: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(k, &zk)| {
                let period = self.mesh.dual_period(k);
                zk - period * (zk / period).floor()
            })
            .collect();
        let mut acc = 0.0;
        let mut shifted = vec![0.0; reduced.len()];
        for m in self.radius.iter() {
            let dual = self.mesh.dual_point(&m);
            for (s, (zr, d)) in shifted.iter_mut().zip(reduced.iter().zip(&dual)) {
                *s = zr + d;
            }
            acc += self.kernel.spectrum(&shifted);
        }
        acc
    }

    /// Evaluate `|S|` on a fresh uniform tensor sample of the dual cell and
    /// compare the minimum against `floor`.
    ///
    /// A `false` outcome is a valid answer, not an error. The sample
    /// resolution bounds how narrow a near-zero the check can see.
    pub fn nonvanishing_check(&self, samples_per_axis: usize, floor: f64) -> NonvanishingReport {
        assert!(samples_per_axis >= 2, "need at least two samples per axis");
        let (min_abs, argmin) = self.sample_min(samples_per_axis);
        NonvanishingReport {
            passed: min_abs > floor,
            min_abs,
            argmin,
        }
    }

    fn sample_min(&self, samples_per_axis: usize) -> (f64, Vec<f64>) {
        let n = self.mesh.dim();
        let mut min_abs = f64::INFINITY;
        let mut argmin = vec![0.0; n];
        let mut counter = vec![0usize; n];
        let mut z = vec![0.0; n];
        loop {
            for k in 0..n {
                z[k] = self.mesh.dual_period(k) * counter[k] as f64 / samples_per_axis as f64;
            }
            let v = self.eval(&z).abs();
            if v < min_abs {
                min_abs = v;
                argmin.copy_from_slice(&z);
            }
            // advance the odometer
            let mut axis = n;
            loop {
                if axis == 0 {
                    return (min_abs, argmin);
                }
                axis -= 1;
                counter[axis] += 1;
                if counter[axis] < samples_per_axis {
                    break;
                }
                counter[axis] = 0;
            }
        }
    }
}

/// Bound the total contribution of all shells with index beyond `radius`.
fn shell_tail_bound<K: Kernel>(
    kernel: &K,
    dim: usize,
    min_dual: f64,
    radius: usize,
    cap: usize,
) -> f64 {
    let mut total = 0.0;
    for rho in (radius + 1)..=(cap + 2) {
        let shell_count = shell_cardinality(dim, rho) as f64;
        let dist = min_dual * (rho - 1) as f64;
        let term = shell_count * kernel.spectral_tail(dist);
        total += term;
        if term < 1e-300 {
            break;
        }
    }
    total
}

fn shell_cardinality(dim: usize, rho: usize) -> usize {
    let outer = 2 * rho + 1;
    let inner = 2 * rho - 1;
    outer.pow(dim as u32) - inner.pow(dim as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT_PI: f64 = 1.7724538509055159;

    #[test]
    fn gaussian_spatial_values() {
        let k = GaussianKernel::isotropic_1d(1.0).unwrap();
        assert_eq!(k.spatial(&[0.0]), 1.0);
        assert_abs_diff_eq!(k.spatial(&[1.0]), (-1.0f64).exp(), epsilon = 1e-15);

        let k2 = GaussianKernel::new(vec![1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(k2.spatial(&[1.0, 1.0]), (-3.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn gaussian_spectrum_values() {
        let k = GaussianKernel::isotropic_1d(1.0).unwrap();
        assert_abs_diff_eq!(k.spectrum(&[0.0]), SQRT_PI, epsilon = 1e-12);
        assert_abs_diff_eq!(
            k.spectrum(&[2.0]),
            SQRT_PI * (-1.0f64).exp(),
            epsilon = 1e-12
        );

        let k2 = GaussianKernel::new(vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(
            k2.spectrum(&[0.0, 0.0]),
            std::f64::consts::PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gaussian_rejects_bad_shape() {
        assert!(GaussianKernel::new(vec![]).is_err());
        assert!(GaussianKernel::new(vec![0.0]).is_err());
        assert!(GaussianKernel::new(vec![1.0, -1.0]).is_err());
    }

    #[test]
    #[should_panic(expected = "dimension")]
    fn gaussian_dimension_mismatch_panics() {
        let k = GaussianKernel::isotropic_1d(1.0).unwrap();
        k.spatial(&[1.0, 2.0]);
    }

    #[test]
    fn symbol_at_origin_unit_mesh() {
        // Direct summation over |m| <= 10 of the unit-shape spectrum.
        let mesh = UniformMesh::uniform_1d(1.0).unwrap();
        let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
        let symbol = Symbol::new(mesh, kernel, &SymbolOptions::default()).unwrap();
        assert_abs_diff_eq!(symbol.eval(&[0.0]), 1.772637204826652, epsilon = 1e-12);
    }

    #[test]
    fn symbol_fine_mesh_single_term() {
        // At spacing 0.1 the dual period is 20 pi and neighbor terms are
        // below 1e-300, so the symbol equals the spectrum at the origin.
        let mesh = UniformMesh::uniform_1d(0.1).unwrap();
        let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
        let symbol = Symbol::new(mesh, kernel, &SymbolOptions::default()).unwrap();
        assert_abs_diff_eq!(symbol.eval(&[0.0]), SQRT_PI, epsilon = 1e-13);
    }

    #[test]
    fn nonvanishing_check_gaussian_unit_mesh() {
        let mesh = UniformMesh::uniform_1d(1.0).unwrap();
        let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
        let symbol = Symbol::new(mesh, kernel, &SymbolOptions::default()).unwrap();
        let report = symbol.nonvanishing_check(64, 1e-12);
        assert!(report.passed);
        // Minimum sits at the cell midpoint z = pi; value frozen from the
        // direct-summation oracle.
        assert_abs_diff_eq!(report.min_abs, 0.3006258008689844, epsilon = 1e-12);
        assert_abs_diff_eq!(report.argmin[0], std::f64::consts::PI, epsilon = 1e-12);
    }

    /// Synthetic kernel with spectrum `cos(z) * gaussian_spectrum(z)`. Its
    /// spatial form is the average of two unit shifts of the Gaussian. On the
    /// unit mesh every dual translate carries the same cosine factor, so the
    /// symbol vanishes at `z = pi/2`.
    struct CosineModulated(GaussianKernel);

    impl Kernel for CosineModulated {
        fn dim(&self) -> usize {
            1
        }
        fn spatial(&self, x: &[f64]) -> f64 {
            0.5 * (self.0.spatial(&[x[0] - 1.0]) + self.0.spatial(&[x[0] + 1.0]))
        }
        fn spectrum(&self, z: &[f64]) -> f64 {
            z[0].cos() * self.0.spectrum(z)
        }
        fn spectral_tail(&self, r: f64) -> f64 {
            self.0.spectral_tail(r)
        }
    }

    #[test]
    fn nonvanishing_check_detects_sign_change() {
        let mesh = UniformMesh::uniform_1d(1.0).unwrap();
        let kernel = CosineModulated(GaussianKernel::isotropic_1d(1.0).unwrap());
        let symbol = Symbol::new(mesh, kernel, &SymbolOptions::default()).unwrap();
        let report = symbol.nonvanishing_check(64, 1e-12);
        assert!(!report.passed);
        assert!(report.min_abs < 1e-2);
    }

    #[test]
    fn spectral_consistency_with_quadrature() {
        // The spectrum closed form must match a direct oscillatory
        // quadrature of the spatial kernel in the exp(-i x z) convention.
        let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
        for &z in &[0.0, 1.0, -1.0, 2.0, -2.0] {
            let q = crate::oracle::fourier_quadrature(|x| kernel.spatial(&[x]), -10.0, 10.0, 20000, z);
            assert_abs_diff_eq!(q.re, kernel.spectrum(&[z]), epsilon = 1e-8);
            assert!(q.im.abs() < 1e-12);
        }
    }

    #[test]
    fn plancherel_round_trip() {
        // F^{-1} g (x) = (2 pi)^{-1} F(g)(-x) applied to the spectrum must
        // recover the spatial kernel.
        let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
        for &x in &[0.0, 0.3, -0.7, 1.5] {
            let q = crate::oracle::fourier_quadrature(
                |z| kernel.spectrum(&[z]),
                -30.0,
                30.0,
                60000,
                -x,
            );
            let recovered = q.re / (2.0 * std::f64::consts::PI);
            assert_abs_diff_eq!(recovered, kernel.spatial(&[x]), epsilon = 1e-8);
        }
    }

    proptest! {
        /// Periodicity under dual-lattice shifts, up to the truncation tail.
        #[test]
        fn symbol_periodicity(
            z in -20.0f64..20.0,
            shift in -2i64..=2,
            a in prop::sample::select(vec![0.5f64, 1.0, 2.0]),
        ) {
            let mesh = UniformMesh::uniform_1d(a).unwrap();
            let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
            let symbol = Symbol::new(mesh.clone(), kernel, &SymbolOptions::default()).unwrap();
            let shifted = z + mesh.dual_point(&[shift])[0];
            prop_assert!((symbol.eval(&[z]) - symbol.eval(&[shifted])).abs() <= 1e-10);
        }

        /// The truncated symbol agrees with the brute-force periodization
        /// oracle once the oracle radius reaches the chosen one.
        #[test]
        fn symbol_matches_bruteforce(z in 0.0f64..6.28) {
            let mesh = UniformMesh::uniform_1d(1.0).unwrap();
            let kernel = GaussianKernel::isotropic_1d(1.0).unwrap();
            let symbol = Symbol::new(mesh.clone(), kernel, &SymbolOptions::default()).unwrap();
            let radius = symbol.radius().radius()[0].max(10);
            let oracle = crate::oracle::periodization_bruteforce(
                symbol.kernel(), &mesh, &[z], radius,
            );
            prop_assert!((symbol.eval(&[z]) - oracle).abs() <= 1e-12);
        }
    }
}
