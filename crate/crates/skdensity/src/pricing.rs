//! Discounted-expectation pricing against a reconstructed density.
//!
//! The value of a European payoff `phi` with maturity `T` under riskless
//! rate `r` is `V = exp(-r T) E[phi]`, with the expectation computed by
//! tensor trapezoid quadrature of `phi * p` over the density's own grid.
//! The state variable is the vector of log-returns; payoff families map it
//! to asset prices with caller-supplied spot levels. No drift adjustment
//! happens here: martingale corrections such as `r - sigma^2 / 2` for the
//! Gaussian family belong to the model configuration.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensityApproximation;
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// European payoff families over the log-return state vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Payoff {
    /// `(spot * exp(x) - strike)_+` on a single asset.
    Call { spot: f64, strike: f64 },
    /// `(strike - spot * exp(x))_+` on a single asset.
    Put { spot: f64, strike: f64 },
    /// `(S_1 exp(x_1) - sum_{j>=2} S_j exp(x_j) - strike)_+`; with a single
    /// spot this reduces to a call, with strike zero on two assets it is the
    /// exchange option.
    Spread { spots: Vec<f64>, strike: f64 },
}

impl Payoff {
    /// Number of state axes the payoff consumes.
    pub fn dim(&self) -> usize {
        match self {
            Payoff::Call { .. } | Payoff::Put { .. } => 1,
            Payoff::Spread { spots, .. } => spots.len(),
        }
    }

    /// Evaluate at a log-return state vector. Non-negative by construction.
    pub fn eval(&self, state: &[f64]) -> f64 {
        match self {
            Payoff::Call { spot, strike } => (spot * state[0].exp() - strike).max(0.0),
            Payoff::Put { spot, strike } => (strike - spot * state[0].exp()).max(0.0),
            Payoff::Spread { spots, strike } => {
                let mut value = spots[0] * state[0].exp() - strike;
                for (j, &s) in spots.iter().enumerate().skip(1) {
                    value -= s * state[j].exp();
                }
                value.max(0.0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Payoff::Call { spot, .. } | Payoff::Put { spot, .. } => *spot > 0.0,
            Payoff::Spread { spots, .. } => !spots.is_empty() && spots.iter().all(|&s| s > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "payoff spots must be positive".into(),
            ))
        }
    }
}

/// Rate, maturity and payoff for one pricing run.
#[derive(Debug, Clone)]
pub struct PricingConfig {
    /// Riskless rate per year, non-negative.
    pub rate: f64,
    /// Maturity in years, positive.
    pub maturity: f64,
    pub payoff: Payoff,
    /// Gate on the boundary density when checking grid coverage.
    pub coverage_tol: f64,
}

impl PricingConfig {
    pub fn new(rate: f64, maturity: f64, payoff: Payoff) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "riskless rate must be non-negative, got {rate}"
            )));
        }
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "maturity must be positive, got {maturity}"
            )));
        }
        payoff.validate()?;
        Ok(Self {
            rate,
            maturity,
            payoff,
            coverage_tol: 1e-6,
        })
    }
}

/// Result of one pricing run.
#[derive(Debug, Clone, Serialize)]
pub struct PriceResult {
    pub price: f64,
    pub expected_payoff: f64,
    /// Trapezoid mass of the density over its grid, a quick sanity check
    /// that the reconstruction is a probability density on this window.
    pub mass_check: f64,
}

/// Tensor trapezoid quadrature of `phi * p` over the density grid.
///
/// Fails when the density has not decayed below `coverage_tol` at the grid
/// boundary, since then the integral is missing tail mass the grid cannot
/// see. Per-point terms are evaluated in parallel and summed pairwise in a
/// fixed order, so the result is independent of the thread count.
pub fn expected_payoff(
    density: &DensityApproximation,
    payoff: impl Fn(&[f64]) -> f64 + Sync,
    coverage_tol: f64,
) -> Result<f64> {
    let grid = density.grid();
    let n = grid.dim();

    let mut boundary_max = 0.0f64;
    for (flat, &v) in density.values().iter().enumerate() {
        let j = grid.unflatten(flat);
        let on_boundary = j
            .iter()
            .enumerate()
            .any(|(k, &jk)| jk == 0 || jk + 1 == grid.count[k]);
        if on_boundary {
            boundary_max = boundary_max.max(v.abs());
        }
    }
    if boundary_max > coverage_tol {
        return Err(Error::InsufficientCoverage {
            boundary: boundary_max,
            tol: coverage_tol,
        });
    }

    let cell: f64 = grid.step.iter().product();
    let terms: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let j = grid.unflatten(flat);
            let mut weight = 1.0;
            for k in 0..n {
                if j[k] == 0 || j[k] + 1 == grid.count[k] {
                    weight *= 0.5;
                }
            }
            let state = grid.point(&j);
            weight * payoff(&state) * density.values()[flat]
        })
        .collect();
    Ok(pairwise_sum(&terms) * cell)
}

/// Discounted expectation `exp(-r T) E[phi]`.
pub fn price(config: &PricingConfig, density: &DensityApproximation) -> Result<PriceResult> {
    if config.payoff.dim() != density.grid().dim() {
        return Err(Error::DimensionMismatch {
            expected: density.grid().dim(),
            got: config.payoff.dim(),
        });
    }
    let expected = expected_payoff(density, |x| config.payoff.eval(x), config.coverage_tol)?;
    let mass = expected_payoff(density, |_| 1.0, config.coverage_tol)?;
    Ok(PriceResult {
        price: (-config.rate * config.maturity).exp() * expected,
        expected_payoff: expected,
        mass_check: mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{reconstruct, GridSpec, LevyModel, ModelFamily, ReconstructOptions};
    use crate::kernels::{GaussianKernel, Symbol, SymbolOptions};
    use crate::mesh::UniformMesh;
    use approx::assert_abs_diff_eq;

    fn standard_normal_density() -> DensityApproximation {
        let model = LevyModel::new(
            ModelFamily::Gaussian {
                drift: vec![0.0],
                covariance: vec![vec![1.0]],
            },
            1.0,
        )
        .unwrap();
        let symbol = Symbol::new(
            UniformMesh::uniform_1d(0.25).unwrap(),
            GaussianKernel::isotropic_1d(1.0).unwrap(),
            &SymbolOptions::default(),
        )
        .unwrap();
        let grid = GridSpec::new(vec![-8.0], vec![0.05], vec![321]).unwrap();
        reconstruct(&model, &symbol, &grid, &ReconstructOptions::default()).unwrap()
    }

    #[test]
    fn total_mass_of_standard_normal() {
        let density = standard_normal_density();
        let mass = expected_payoff(&density, |_| 1.0, 1e-6).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let density = standard_normal_density();
        let mean = expected_payoff(&density, |x| x[0], 1e-6).unwrap();
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn coverage_error_on_narrow_grid() {
        let model = LevyModel::new(
            ModelFamily::Gaussian {
                drift: vec![0.0],
                covariance: vec![vec![1.0]],
            },
            1.0,
        )
        .unwrap();
        let symbol = Symbol::new(
            UniformMesh::uniform_1d(0.25).unwrap(),
            GaussianKernel::isotropic_1d(1.0).unwrap(),
            &SymbolOptions::default(),
        )
        .unwrap();
        let grid = GridSpec::new(vec![-1.0], vec![0.05], vec![41]).unwrap();
        let density = reconstruct(&model, &symbol, &grid, &ReconstructOptions::default()).unwrap();
        let out = expected_payoff(&density, |_| 1.0, 1e-6);
        assert!(matches!(out, Err(Error::InsufficientCoverage { .. })));
    }

    #[test]
    fn zero_rate_price_equals_expectation() {
        let density = standard_normal_density();
        let config = PricingConfig::new(
            0.0,
            1.0,
            Payoff::Call {
                spot: 100.0,
                strike: 100.0,
            },
        )
        .unwrap();
        let result = price(&config, &density).unwrap();
        assert_eq!(result.price, result.expected_payoff);
    }

    #[test]
    fn discounting_is_monotone_in_rate() {
        let density = standard_normal_density();
        let payoff = Payoff::Call {
            spot: 100.0,
            strike: 100.0,
        };
        let mut last = f64::INFINITY;
        for &r in &[0.0, 0.02, 0.05, 0.1] {
            let config = PricingConfig::new(r, 1.0, payoff.clone()).unwrap();
            let result = price(&config, &density).unwrap();
            assert!(result.price < last);
            last = result.price;
        }
    }

    #[test]
    fn spread_price_non_increasing_in_strike() {
        let density = standard_normal_density();
        let mut last = f64::INFINITY;
        for &strike in &[0.0, 5.0, 10.0] {
            let config = PricingConfig::new(
                0.05,
                1.0,
                Payoff::Spread {
                    spots: vec![100.0],
                    strike,
                },
            )
            .unwrap();
            let result = price(&config, &density).unwrap();
            assert!(result.price <= last);
            last = result.price;
        }
    }

    #[test]
    fn spread_reduces_to_call_for_one_asset() {
        let call = Payoff::Call {
            spot: 100.0,
            strike: 40.0,
        };
        let spread = Payoff::Spread {
            spots: vec![100.0],
            strike: 40.0,
        };
        for &x in &[-1.0, -0.2, 0.0, 0.4, 1.3] {
            assert_eq!(call.eval(&[x]), spread.eval(&[x]));
        }
    }

    #[test]
    fn payoffs_are_non_negative() {
        let spread = Payoff::Spread {
            spots: vec![100.0, 120.0],
            strike: 10.0,
        };
        for &(x, y) in &[(-2.0, 2.0), (0.0, 0.0), (2.0, -2.0), (0.5, 0.4)] {
            assert!(spread.eval(&[x, y]) >= 0.0);
        }
    }

    #[test]
    fn config_validation() {
        let payoff = Payoff::Call {
            spot: 100.0,
            strike: 100.0,
        };
        assert!(PricingConfig::new(-0.01, 1.0, payoff.clone()).is_err());
        assert!(PricingConfig::new(0.05, 0.0, payoff).is_err());
        assert!(PricingConfig::new(
            0.05,
            1.0,
            Payoff::Spread {
                spots: vec![],
                strike: 0.0
            }
        )
        .is_err());
    }
}
