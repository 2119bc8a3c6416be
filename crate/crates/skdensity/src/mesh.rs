//! Uniform lattice geometry.
//!
//! A mesh with positive spacings `a_1, ..., a_n` generates the lattice of
//! grid points `x_m = (a_1 m_1, ..., a_n m_n)` for integer multi-indices `m`.
//! Its dual lattice has points `2π m_k / a_k` and the fundamental dual cell
//! is `[0, 2π/a_1] × ... × [0, 2π/a_n]`, the domain on which periodized
//! spectra live. Infinite lattice sums are truncated to finite index boxes
//! with per-axis radii.

use crate::error::{Error, Result};

/// A uniform rectangular mesh in `R^n` with diagonal scaling.
///
/// Only diagonal scalings are supported: each axis has its own spacing and
/// the axes do not mix.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformMesh {
    spacings: Vec<f64>,
}

impl UniformMesh {
    /// Create a mesh from per-axis spacings, all of which must be positive
    /// and finite.
    pub fn new(spacings: Vec<f64>) -> Result<Self> {
        if spacings.is_empty() {
            return Err(Error::InvalidParameter(
                "mesh needs at least one axis".into(),
            ));
        }
        for (k, &a) in spacings.iter().enumerate() {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "mesh spacing on axis {k} must be positive and finite, got {a}"
                )));
            }
        }
        Ok(Self { spacings })
    }

    /// Uniform 1D mesh.
    pub fn uniform_1d(spacing: f64) -> Result<Self> {
        Self::new(vec![spacing])
    }

    /// Number of axes.
    pub fn dim(&self) -> usize {
        self.spacings.len()
    }

    /// Per-axis spacings.
    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    /// Volume of one mesh cell, the determinant of the diagonal scaling.
    pub fn cell_volume(&self) -> f64 {
        self.spacings.iter().product()
    }

    /// Period of the dual lattice along axis `k`, `2π / a_k`.
    pub fn dual_period(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.spacings[k]
    }

    /// Lattice point `(a_1 m_1, ..., a_n m_n)`.
    ///
    /// Panics on dimension mismatch.
    pub fn grid_point(&self, m: &[i64]) -> Vec<f64> {
        assert_eq!(
            m.len(),
            self.dim(),
            "grid_point: index dimension {} does not match mesh dimension {}",
            m.len(),
            self.dim()
        );
        m.iter()
            .zip(&self.spacings)
            .map(|(&mk, &ak)| ak * mk as f64)
            .collect()
    }

    /// Dual lattice point `(2π m_1 / a_1, ..., 2π m_n / a_n)`.
    ///
    /// Panics on dimension mismatch.
    pub fn dual_point(&self, m: &[i64]) -> Vec<f64> {
        assert_eq!(
            m.len(),
            self.dim(),
            "dual_point: index dimension {} does not match mesh dimension {}",
            m.len(),
            self.dim()
        );
        m.iter()
            .zip(&self.spacings)
            .map(|(&mk, &ak)| 2.0 * std::f64::consts::PI * mk as f64 / ak)
            .collect()
    }
}

/// A finite symmetric box of integer multi-indices: `|m_k| <= radius[k]`.
///
/// Iteration order is lexicographic with the first axis most significant and
/// each axis running from `-M_k` to `M_k`, so that coefficient files and CSV
/// outputs are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBox {
    radius: Vec<usize>,
}

impl IndexBox {
    pub fn new(radius: Vec<usize>) -> Self {
        assert!(!radius.is_empty(), "index box needs at least one axis");
        Self { radius }
    }

    /// Same radius on every axis.
    pub fn cubic(dim: usize, radius: usize) -> Self {
        Self::new(vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.radius.len()
    }

    pub fn radius(&self) -> &[usize] {
        &self.radius
    }

    /// Number of indices in the box, `prod(2 M_k + 1)`.
    pub fn len(&self) -> usize {
        self.radius
            .iter()
            .map(|&m| 2 * m + 1)
            .try_fold(1usize, |acc, s| acc.checked_mul(s))
            .expect("index box cardinality overflows usize")
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether `m` lies inside the box.
    pub fn contains(&self, m: &[i64]) -> bool {
        m.len() == self.dim()
            && m.iter()
                .zip(&self.radius)
                .all(|(&mk, &rk)| mk.unsigned_abs() <= rk as u64)
    }

    /// Whether `m` touches the box boundary on some axis.
    pub fn is_boundary(&self, m: &[i64]) -> bool {
        m.iter()
            .zip(&self.radius)
            .any(|(&mk, &rk)| mk.unsigned_abs() == rk as u64)
    }

    /// Linear offset of `m` in lexicographic iteration order.
    pub fn offset_of(&self, m: &[i64]) -> usize {
        debug_assert!(self.contains(m));
        let mut offset = 0usize;
        for (&mk, &rk) in m.iter().zip(&self.radius) {
            offset = offset * (2 * rk + 1) + (mk + rk as i64) as usize;
        }
        offset
    }

    /// Iterate all indices in lexicographic order.
    pub fn iter(&self) -> IndexIter<'_> {
        IndexIter {
            box_: self,
            current: self.radius.iter().map(|&r| -(r as i64)).collect(),
            done: false,
        }
    }
}

/// Lexicographic iterator over an [`IndexBox`].
pub struct IndexIter<'a> {
    box_: &'a IndexBox,
    current: Vec<i64>,
    done: bool,
}

impl Iterator for IndexIter<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        // advance the least significant (last) axis first
        let mut axis = self.box_.dim();
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            if self.current[axis] < self.box_.radius[axis] as i64 {
                self.current[axis] += 1;
                for c in &mut self.current[axis + 1..] {
                    *c = i64::MIN; // placeholder, fixed below
                }
                for (c, &r) in self.current[axis + 1..]
                    .iter_mut()
                    .zip(&self.box_.radius[axis + 1..])
                {
                    *c = -(r as i64);
                }
                break;
            }
        }
        Some(item)
    }
}
