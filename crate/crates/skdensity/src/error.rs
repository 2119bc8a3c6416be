//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library and the CLI.
///
/// Configuration and I/O problems map to CLI exit code 1, every numerical
/// failure maps to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The periodized spectrum came too close to zero somewhere it must not.
    #[error(
        "symbol nonvanishing check failed: |S| = {min:.6e} at z = {argmin:?} is below floor {floor:.6e}"
    )]
    SingularSymbol {
        min: f64,
        argmin: Vec<f64>,
        floor: f64,
    },

    /// The requested periodization tail tolerance cannot be met within the
    /// radius cap.
    #[error("periodization tail {tail:.6e} exceeds tolerance {tol:.6e} within radius cap {cap}")]
    TruncationRadius { tail: f64, tol: f64, cap: usize },

    /// Retained coefficients do not decay enough at the box boundary.
    #[error(
        "coefficient boundary tail {tail:.6e} exceeds tolerance {tol:.6e}; \
         increase the sample grid or the coefficient box"
    )]
    CoefficientTail { tail: f64, tol: f64 },

    #[error("quadrature domain cap reached: integrand tail {tail:.6e} above tolerance {tol:.6e}")]
    QuadratureDomain { tail: f64, tol: f64 },

    #[error(
        "characteristic function does not decay below {tol:.6e} within the per-axis box cap {cap}"
    )]
    NonDecayingCharacteristic { tol: f64, cap: usize },

    #[error(
        "output grid step {step:.17e} on axis {axis} is not commensurate with the mesh; \
         nearest valid step is {nearest:.17e}"
    )]
    NonCommensurateGrid { axis: usize, step: f64, nearest: f64 },

    #[error("imaginary residue {max_imag:.6e} exceeds tolerance {tol:.6e}; model and mesh are inconsistent")]
    ImaginaryResidue { max_imag: f64, tol: f64 },

    #[error(
        "density grid does not cover the payoff support: boundary density {boundary:.6e} \
         exceeds {tol:.6e}; extend the output grid"
    )]
    InsufficientCoverage { boundary: f64, tol: f64 },

    #[error("linear solve failed: {reason} (condition estimate {condition:.3e})")]
    Solve { reason: String, condition: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI contract: 1 for configuration or I/O problems,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::InvalidParameter(_) => 1,
            _ => 2,
        }
    }
}
