//! Cardinal sk-spline interpolation on uniform meshes, with two
//! applications: reconstructing probability densities of Lévy processes from
//! their characteristic functions, and pricing European payoffs against the
//! reconstructed densities.
//!
//! The central object is the fundamental cardinal spline of a kernel `K` on
//! the lattice `{(a_1 m_1, ..., a_n m_n)}`: the unique kernel series taking
//! value 1 at the origin node and 0 at all others. On a uniform mesh its
//! coefficients come in closed form from the Fourier expansion of the
//! reciprocal periodized spectrum, so interpolation needs no linear solve,
//! and transforming the interpolant of a characteristic function gives a
//! density approximant in one spectral product. See the module docs of
//! [`cardinal`] and [`density`] for the formulas and [`torus`] for the
//! one-dimensional periodic counterpart used as correctness ballast.
//!
//! Modules:
//! - [`mesh`]: lattice geometry and truncated index boxes.
//! - [`kernels`]: kernel catalog and the periodized spectrum with its
//!   nonvanishing check.
//! - [`cardinal`]: fundamental spline coefficients, evaluation and
//!   grid-data interpolation.
//! - [`density`]: characteristic exponent families and the two density
//!   reconstruction paths.
//! - [`pricing`]: discounted-expectation pricing by trapezoid quadrature.
//! - [`torus`]: periodic sk-splines, Bernoulli monosplines and the explicit
//!   fundamental-spline formulas.
//! - [`oracle`]: brute-force reference implementations backing the tests.
//! - [`cli`]: the `skdensity` command-line pipeline.

pub mod cardinal;
pub mod cli;
pub mod density;
pub mod error;
mod fft;
pub mod kernels;
pub mod mesh;
mod numeric;
pub mod oracle;
pub mod pricing;
pub mod torus;

pub use cardinal::{AlphaOptions, CardinalSpline, GridSamples};
pub use density::{
    select_truncation, DensityApproximation, GridSpec, LevyModel, ModelFamily, ReconstructOptions,
};
pub use error::{Error, Result};
pub use kernels::{GaussianKernel, Kernel, Symbol, SymbolOptions};
pub use mesh::{IndexBox, UniformMesh};
pub use pricing::{expected_payoff, price, Payoff, PriceResult, PricingConfig};
