//! The fundamental cardinal sk-spline on a uniform mesh.
//!
//! When the symbol `S(z) = sum_m F(K)(z + 2 pi A^{-1} m)` stays away from
//! zero, its reciprocal is periodic over the dual cell and expands into the
//! Fourier series
//!
//! ```text
//! 1 / S(z) = sum_s alpha_s exp(-i <A s, z>),
//! ```
//!
//! and the fundamental spline is the kernel series
//!
//! ```text
//! sk~(x) = det(A) sum_s alpha_s K(x - A s)
//!        = det(A) / (2 pi)^n  integral of  F(K)(z) / S(z) exp(i <z, x>) dz,
//! ```
//!
//! which takes value 1 at the origin node and 0 at every other mesh node.
//! Interpolation of grid data then needs no linear solve at all:
//! `sk(x) = sum_m f(x_m) sk~(x - x_m)`.
//!
//! The coefficients are obtained by sampling `1/S` on a uniform tensor grid
//! of the dual cell and applying the inverse DFT; sampling at `N` points per
//! axis leaves only the exponentially small aliasing contamination
//! `sum_r alpha_{s + rN}`. All series are truncated to explicit boxes and
//! every constructed spline carries its boundary-tail metadata.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::kernels::{Kernel, Symbol};
use crate::mesh::{IndexBox, UniformMesh};

/// Options for coefficient construction.
#[derive(Debug, Clone)]
pub struct AlphaOptions {
    /// Floor for the cached symbol minimum; construction refuses to divide
    /// by a symbol that came closer to zero than this. No regularization is
    /// applied.
    pub floor: f64,
    /// Bound on the summed coefficient magnitude over the boundary shell of
    /// the retained box.
    pub tail_tol: f64,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        Self {
            floor: 1e-12,
            tail_tol: 1e-12,
        }
    }
}

/// The fundamental cardinal sk-spline: reciprocal-symbol Fourier
/// coefficients on a truncated index box, plus the symbol it came from.
///
/// Immutable after construction; evaluation is pure and can be shared across
/// threads freely.
#[derive(Debug, Clone)]
pub struct CardinalSpline<K: Kernel> {
    symbol: Symbol<K>,
    coeff_box: IndexBox,
    coeffs: Vec<f64>,
    boundary_tail: f64,
    max_imag: f64,
}

impl<K: Kernel> CardinalSpline<K> {
    /// Fourier coefficients of `1/S` over the dual cell, computed by
    /// sampling on the given per-axis tensor grid and applying the fast
    /// inverse DFT, then truncating to `coeff_box`.
    ///
    /// Requires `samples[k] >= 2 * radius[k] + 1` so every retained
    /// coefficient is identified unambiguously.
    pub fn compute_alpha(
        symbol: Symbol<K>,
        samples_per_axis: &[usize],
        coeff_box: IndexBox,
        opts: &AlphaOptions,
    ) -> Result<Self> {
        let n = symbol.mesh().dim();
        if samples_per_axis.len() != n || coeff_box.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: samples_per_axis.len().min(coeff_box.dim()),
            });
        }
        for (k, (&nk, &mk)) in samples_per_axis.iter().zip(coeff_box.radius()).enumerate() {
            if nk < 2 * mk + 1 {
                return Err(Error::InvalidParameter(format!(
                    "axis {k}: {nk} samples cannot resolve coefficients up to radius {mk}"
                )));
            }
        }
        if symbol.cell_min() <= opts.floor {
            return Err(Error::SingularSymbol {
                min: symbol.cell_min(),
                argmin: vec![f64::NAN; n],
                floor: opts.floor,
            });
        }

        // Sample 1/S on the tensor grid of the dual cell.
        let total: usize = samples_per_axis.iter().product();
        let mut data = vec![Complex64::default(); total];
        let mut counter = vec![0usize; n];
        let mut z = vec![0.0; n];
        for slot in data.iter_mut() {
            for k in 0..n {
                z[k] = symbol.mesh().dual_period(k) * counter[k] as f64
                    / samples_per_axis[k] as f64;
            }
            *slot = Complex64::new(1.0 / symbol.eval(&z), 0.0);
            let mut axis = n;
            while axis > 0 {
                axis -= 1;
                counter[axis] += 1;
                if counter[axis] < samples_per_axis[axis] {
                    break;
                }
                counter[axis] = 0;
            }
        }

        // alpha_s = (1 / prod N_k) sum_j (1/S)(z_j) exp(+2 pi i <j, s / N>)
        fft_nd(&mut data, samples_per_axis, true);
        let scale = 1.0 / total as f64;

        let mut coeffs = Vec::with_capacity(coeff_box.len());
        let mut max_imag = 0.0f64;
        for s in coeff_box.iter() {
            let mut flat = 0usize;
            for (k, &sk) in s.iter().enumerate() {
                let nk = samples_per_axis[k];
                let idx = sk.rem_euclid(nk as i64) as usize;
                flat = flat * nk + idx;
            }
            let c = data[flat] * scale;
            max_imag = max_imag.max(c.im.abs());
            coeffs.push(c.re);
        }

        let spline = Self {
            symbol,
            coeff_box,
            coeffs,
            boundary_tail: 0.0,
            max_imag,
        };
        let boundary_tail = spline.boundary_shell_sum();
        if boundary_tail >= opts.tail_tol {
            return Err(Error::CoefficientTail {
                tail: boundary_tail,
                tol: opts.tail_tol,
            });
        }
        if max_imag > 1e-10 * (1.0 + spline.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()))) {
            return Err(Error::ImaginaryResidue {
                max_imag,
                tol: 1e-10,
            });
        }
        Ok(Self {
            boundary_tail,
            ..spline
        })
    }

    /// Grow the coefficient box until the boundary shell decays below the
    /// tail tolerance, with the sampling default of four points per retained
    /// coefficient rounded up to a power of two.
    pub fn build(symbol: Symbol<K>, opts: &AlphaOptions) -> Result<Self>
    where
        K: Clone,
    {
        const CANDIDATE_RADII: [usize; 8] = [8, 16, 24, 32, 48, 64, 96, 128];
        let n = symbol.mesh().dim();
        let mut last_err = None;
        for &radius in CANDIDATE_RADII.iter() {
            let samples = vec![(4 * (radius + 1)).next_power_of_two(); n];
            let coeff_box = IndexBox::cubic(n, radius);
            match Self::compute_alpha(symbol.clone(), &samples, coeff_box, opts) {
                Ok(spline) => return Ok(spline),
                Err(e @ Error::CoefficientTail { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("at least one candidate radius was tried"))
    }

    pub fn mesh(&self) -> &UniformMesh {
        self.symbol.mesh()
    }

    pub fn kernel(&self) -> &K {
        self.symbol.kernel()
    }

    pub fn symbol(&self) -> &Symbol<K> {
        &self.symbol
    }

    pub fn coeff_box(&self) -> &IndexBox {
        &self.coeff_box
    }

    /// Summed coefficient magnitude over the boundary shell, the truncation
    /// metadata every evaluation inherits.
    pub fn boundary_tail(&self) -> f64 {
        self.boundary_tail
    }

    /// Largest imaginary residue discarded when the coefficients were read
    /// off the inverse DFT.
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    /// Coefficient for index `s`, zero outside the retained box.
    pub fn alpha(&self, s: &[i64]) -> f64 {
        if self.coeff_box.contains(s) {
            self.coeffs[self.coeff_box.offset_of(s)]
        } else {
            0.0
        }
    }

    /// All retained coefficients in lexicographic box order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn boundary_shell_sum(&self) -> f64 {
        self.coeff_box
            .iter()
            .filter(|s| self.coeff_box.is_boundary(s))
            .map(|s| self.coeffs[self.coeff_box.offset_of(&s)].abs())
            .sum()
    }

    /// Spatial evaluation `det(A) sum_s alpha_s K(x - A s)`.
    pub fn eval_spatial(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.mesh().dim(), "spline eval: dimension mismatch");
        let det = self.mesh().cell_volume();
        let mut shifted = vec![0.0; x.len()];
        let mut acc = 0.0;
        for (s, &alpha) in self.coeff_box.iter().zip(&self.coeffs) {
            let node = self.mesh().grid_point(&s);
            for (d, (xk, nk)) in shifted.iter_mut().zip(x.iter().zip(&node)) {
                *d = xk - nk;
            }
            acc += alpha * self.kernel().spatial(&shifted);
        }
        det * acc
    }

    /// Transform of the fundamental spline, `det(A) F(K)(z) / S(z)`.
    pub fn spectral_transform(&self, z: &[f64]) -> f64 {
        self.mesh().cell_volume() * self.kernel().spectrum(z) / self.symbol.eval(z)
    }

    /// Spectral evaluation by composite trapezoid quadrature of
    /// `det(A) / (2 pi)^n  integral of F(K)(z)/S(z) exp(i <z, x>) dz`.
    ///
    /// The quadrature domain half-width is grown until the kernel tail over
    /// the omitted region, relative to the symbol floor, drops below an
    /// internal tolerance; because the integrand decays to nothing at the
    /// boundary, the trapezoid rule converges spectrally and the dominant
    /// error is the domain truncation itself.
    pub fn eval_spectral(&self, x: &[f64], quad_points_per_axis: &[usize]) -> Result<f64> {
        let n = self.mesh().dim();
        assert_eq!(x.len(), n, "spline eval: dimension mismatch");
        if quad_points_per_axis.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: quad_points_per_axis.len(),
            });
        }
        const TAIL_TOL: f64 = 1e-11;
        let floor = self.symbol.cell_min();
        let mut half_width = (0..n).map(|k| self.mesh().dual_period(k)).fold(0.0, f64::max);
        let mut tail = f64::INFINITY;
        for _ in 0..200 {
            let volume = (2.0 * half_width).powi(n as i32);
            tail = self.kernel().spectral_tail(half_width) / floor * volume;
            if tail <= TAIL_TOL {
                break;
            }
            half_width += 0.5;
        }
        if tail > TAIL_TOL {
            return Err(Error::QuadratureDomain {
                tail,
                tol: TAIL_TOL,
            });
        }

        let steps: Vec<f64> = quad_points_per_axis
            .iter()
            .map(|&q| 2.0 * half_width / (q.max(2) - 1) as f64)
            .collect();
        let mut counter = vec![0usize; n];
        let mut z = vec![0.0; n];
        let mut acc = Complex64::default();
        loop {
            let mut weight = 1.0;
            for k in 0..n {
                z[k] = -half_width + steps[k] * counter[k] as f64;
                if counter[k] == 0 || counter[k] + 1 == quad_points_per_axis[k] {
                    weight *= 0.5;
                }
            }
            let ratio = self.kernel().spectrum(&z) / self.symbol.eval(&z);
            let phase: f64 = z.iter().zip(x).map(|(zk, xk)| zk * xk).sum();
            acc += Complex64::from_polar(weight * ratio, phase);

            let mut axis = n;
            loop {
                if axis == 0 {
                    let cell: f64 = steps.iter().product();
                    let norm = self.mesh().cell_volume()
                        / (2.0 * std::f64::consts::PI).powi(n as i32);
                    return Ok((acc * cell * norm).re);
                }
                axis -= 1;
                counter[axis] += 1;
                if counter[axis] < quad_points_per_axis[axis] {
                    break;
                }
                counter[axis] = 0;
            }
        }
    }

    /// Max coefficient magnitude per max-norm shell, with a log-linear decay
    /// slope fitted over the populated shells.
    pub fn decay_report(&self) -> DecayProfile {
        let max_radius = *self.coeff_box.radius().iter().max().unwrap();
        let mut shell_max = vec![0.0f64; max_radius + 1];
        for (s, &alpha) in self.coeff_box.iter().zip(&self.coeffs) {
            let shell = s.iter().map(|&c| c.unsigned_abs()).max().unwrap() as usize;
            shell_max[shell] = shell_max[shell].max(alpha.abs());
        }
        // least-squares slope of ln(max) against shell index
        let pts: Vec<(f64, f64)> = shell_max
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, &v)| (i as f64, v.ln()))
            .collect();
        let slope = if pts.len() >= 2 {
            let count = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            (count * sxy - sx * sy) / (count * sxx - sx * sx)
        } else {
            0.0
        };
        DecayProfile { shell_max, slope }
    }

    /// Interpolant of grid samples, exact at interior nodes up to the
    /// boundary truncation of the sample box.
    pub fn interpolate<'a>(&'a self, samples: &'a GridSamples) -> Result<SkInterpolant<'a, K>> {
        if samples.mesh() != self.mesh() {
            return Err(Error::InvalidParameter(
                "samples were taken on a different mesh".into(),
            ));
        }
        Ok(SkInterpolant {
            spline: self,
            samples,
        })
    }

    /// Write coefficients as CSV rows `s_1,...,s_n,alpha` in lexicographic
    /// index order with 17 significant digits.
    pub fn write_alpha_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.coeff_box.dim();
        for k in 1..=n {
            write!(w, "s{k},")?;
        }
        writeln!(w, "alpha")?;
        for (s, &alpha) in self.coeff_box.iter().zip(&self.coeffs) {
            for sk in &s {
                write!(w, "{sk},")?;
            }
            writeln!(w, "{alpha:.16e}")?;
        }
        Ok(())
    }
}

/// Parse a coefficient CSV produced by [`CardinalSpline::write_alpha_csv`].
///
/// Returns the index box and the coefficients in lexicographic order.
pub fn read_alpha_csv<R: BufRead>(reader: R) -> Result<(IndexBox, Vec<f64>)> {
    let mut rows: Vec<(Vec<i64>, f64)> = Vec::new();
    let mut dim = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if lineno == 0 && trimmed.starts_with('s') {
            continue; // header
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::Config(format!(
                "alpha csv line {} has too few fields",
                lineno + 1
            )));
        }
        let n = fields.len() - 1;
        if *dim.get_or_insert(n) != n {
            return Err(Error::Config(format!(
                "alpha csv line {} changes dimension",
                lineno + 1
            )));
        }
        let mut index = Vec::with_capacity(n);
        for f in &fields[..n] {
            index.push(f.parse::<i64>().map_err(|e| {
                Error::Config(format!("alpha csv line {}: bad index: {e}", lineno + 1))
            })?);
        }
        let value = fields[n].parse::<f64>().map_err(|e| {
            Error::Config(format!("alpha csv line {}: bad value: {e}", lineno + 1))
        })?;
        rows.push((index, value));
    }
    let n = dim.ok_or_else(|| Error::Config("alpha csv is empty".into()))?;
    let mut radius = vec![0usize; n];
    for (index, _) in &rows {
        for (r, &c) in radius.iter_mut().zip(index) {
            *r = (*r).max(c.unsigned_abs() as usize);
        }
    }
    let box_ = IndexBox::new(radius);
    if rows.len() != box_.len() {
        return Err(Error::Config(format!(
            "alpha csv holds {} rows but the index box needs {}",
            rows.len(),
            box_.len()
        )));
    }
    let mut coeffs = vec![0.0; box_.len()];
    for (index, value) in rows {
        coeffs[box_.offset_of(&index)] = value;
    }
    Ok((box_, coeffs))
}

/// Decay profile of the coefficient shells.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    /// Max |alpha| per max-norm shell, indexed by shell.
    pub shell_max: Vec<f64>,
    /// Fitted slope of `ln(shell max)` per shell; negative for admissible
    /// configurations.
    pub slope: f64,
}

/// Complete function samples over an index box of mesh nodes.
#[derive(Debug, Clone)]
pub struct GridSamples {
    mesh: UniformMesh,
    box_: IndexBox,
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(mesh: UniformMesh, box_: IndexBox, values: Vec<f64>) -> Result<Self> {
        if box_.dim() != mesh.dim() {
            return Err(Error::DimensionMismatch {
                expected: mesh.dim(),
                got: box_.dim(),
            });
        }
        if values.len() != box_.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples for the box, got {}",
                box_.len(),
                values.len()
            )));
        }
        Ok(Self { mesh, box_, values })
    }

    /// Sample a function at every node of the box.
    pub fn from_fn(
        mesh: UniformMesh,
        box_: IndexBox,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        if box_.dim() != mesh.dim() {
            return Err(Error::DimensionMismatch {
                expected: mesh.dim(),
                got: box_.dim(),
            });
        }
        let values = box_.iter().map(|m| f(&mesh.grid_point(&m))).collect();
        Self::new(mesh, box_, values)
    }

    pub fn mesh(&self) -> &UniformMesh {
        &self.mesh
    }

    pub fn index_box(&self) -> &IndexBox {
        &self.box_
    }

    pub fn value(&self, m: &[i64]) -> f64 {
        self.values[self.box_.offset_of(m)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Evaluator for `sum_m f(x_m) sk~(x - x_m)` over the sample box.
pub struct SkInterpolant<'a, K: Kernel> {
    spline: &'a CardinalSpline<K>,
    samples: &'a GridSamples,
}

impl<K: Kernel> SkInterpolant<'_, K> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mesh = self.spline.mesh();
        let mut shifted = vec![0.0; x.len()];
        let mut acc = 0.0;
        for (m, &fm) in self.samples.index_box().iter().zip(self.samples.values()) {
            if fm == 0.0 {
                continue;
            }
            let node = mesh.grid_point(&m);
            for (d, (xk, nk)) in shifted.iter_mut().zip(x.iter().zip(&node)) {
                *d = xk - nk;
            }
            acc += fm * self.spline.eval_spatial(&shifted);
        }
        acc
    }
}
