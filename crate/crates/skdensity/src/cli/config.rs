//! JSON run configuration: schema validation and conversion to domain types.
//!
//! Parsing is strict: unknown fields anywhere in the document are rejected
//! before any computation starts, and every error names the offending path.
//! The resolved configuration (defaults filled in) serializes back to the
//! same schema, so the copy embedded in the diagnostics file can be re-run
//! verbatim.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::density::{GridSpec, LevyModel, ModelFamily};
use crate::error::{Error, Result};
use crate::kernels::GaussianKernel;
use crate::mesh::UniformMesh;
use crate::pricing::{Payoff, PricingConfig};

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub mesh: MeshConfig,
    pub kernel: KernelConfig,
    pub model: ModelConfig,
    pub truncation: TruncationConfig,
    pub output_grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pricing: Option<PricingBlock>,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshConfig {
    pub spacings: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelConfig {
    Gaussian { b: Vec<f64> },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelConfig {
    Gaussian {
        t: f64,
        drift: Vec<f64>,
        covariance: Vec<Vec<f64>>,
    },
    VarianceGamma {
        t: f64,
        sigma: f64,
        nu: f64,
        theta: f64,
        drift: f64,
    },
    NormalInverseGaussian {
        t: f64,
        alpha: f64,
        beta: f64,
        delta: f64,
        mu: f64,
    },
    Merton {
        t: f64,
        sigma: f64,
        drift: f64,
        intensity: f64,
        jump_mean: f64,
        jump_std: f64,
    },
    Cauchy {
        t: f64,
        scale: f64,
        location: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationConfig {
    pub phi_tol: f64,
    pub symbol_tail_tol: f64,
    pub symbol_floor: f64,
    pub max_imag_tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            phi_tol: 1e-12,
            symbol_tail_tol: 1e-14,
            symbol_floor: 1e-12,
            max_imag_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PricingBlock {
    pub r: f64,
    #[serde(rename = "T")]
    pub maturity: f64,
    pub payoff: PayoffConfig,
    pub coverage_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PayoffConfig {
    Call { spot: f64, strike: f64 },
    Put { spot: f64, strike: f64 },
    Spread { spots: Vec<f64>, strike: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputConfig {
    pub density_csv: String,
    pub diagnostics_json: String,
    pub result_json: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            density_csv: "density.csv".into(),
            diagnostics_json: "diagnostics.json".into(),
            result_json: "result.json".into(),
        }
    }
}

impl RunConfig {
    /// Parse and validate a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let root = as_object(value, "config")?;
        check_keys(
            root,
            &[
                "mesh",
                "kernel",
                "model",
                "truncation",
                "output_grid",
                "pricing",
                "output",
            ],
            "config",
        )?;

        let mesh = parse_mesh(required(root, "mesh", "config")?)?;
        let kernel = parse_kernel(required(root, "kernel", "config")?)?;
        let model = parse_model(required(root, "model", "config")?)?;
        let truncation = match root.get("truncation") {
            Some(v) => parse_truncation(v)?,
            None => TruncationConfig::default(),
        };
        let output_grid = parse_grid(required(root, "output_grid", "config")?)?;
        let pricing = match root.get("pricing") {
            Some(v) => Some(parse_pricing(v)?),
            None => None,
        };
        let output = match root.get("output") {
            Some(v) => parse_output(v)?,
            None => OutputConfig::default(),
        };

        let config = Self {
            mesh,
            kernel,
            model,
            truncation,
            output_grid,
            pricing,
            output,
        };
        config.cross_validate()?;
        Ok(config)
    }

    /// Dimension consistency across blocks, checked before any numerics.
    fn cross_validate(&self) -> Result<()> {
        let n = self.mesh.spacings.len();
        let KernelConfig::Gaussian { b } = &self.kernel;
        if b.len() != n {
            return Err(Error::Config(format!(
                "kernel has {} axes but the mesh has {n}",
                b.len()
            )));
        }
        let model_dim = match &self.model {
            ModelConfig::Gaussian { drift, .. } => drift.len(),
            _ => 1,
        };
        if model_dim != n {
            return Err(Error::Config(format!(
                "model has {model_dim} axes but the mesh has {n}"
            )));
        }
        if self.output_grid.dim() != n {
            return Err(Error::Config(format!(
                "output grid has {} axes but the mesh has {n}",
                self.output_grid.dim()
            )));
        }
        if let Some(p) = &self.pricing {
            let payoff_dim = match &p.payoff {
                PayoffConfig::Call { .. } | PayoffConfig::Put { .. } => 1,
                PayoffConfig::Spread { spots, .. } => spots.len(),
            };
            if payoff_dim != n {
                return Err(Error::Config(format!(
                    "payoff has {payoff_dim} axes but the mesh has {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_mesh(&self) -> Result<UniformMesh> {
        UniformMesh::new(self.mesh.spacings.clone()).map_err(config_err)
    }

    pub fn to_kernel(&self) -> Result<GaussianKernel> {
        let KernelConfig::Gaussian { b } = &self.kernel;
        GaussianKernel::new(b.clone()).map_err(config_err)
    }

    pub fn to_model(&self) -> Result<LevyModel> {
        let (family, t) = match &self.model {
            ModelConfig::Gaussian {
                t,
                drift,
                covariance,
            } => (
                ModelFamily::Gaussian {
                    drift: drift.clone(),
                    covariance: covariance.clone(),
                },
                *t,
            ),
            ModelConfig::VarianceGamma {
                t,
                sigma,
                nu,
                theta,
                drift,
            } => (
                ModelFamily::VarianceGamma {
                    sigma: *sigma,
                    nu: *nu,
                    theta: *theta,
                    drift: *drift,
                },
                *t,
            ),
            ModelConfig::NormalInverseGaussian {
                t,
                alpha,
                beta,
                delta,
                mu,
            } => (
                ModelFamily::NormalInverseGaussian {
                    alpha: *alpha,
                    beta: *beta,
                    delta: *delta,
                    mu: *mu,
                },
                *t,
            ),
            ModelConfig::Merton {
                t,
                sigma,
                drift,
                intensity,
                jump_mean,
                jump_std,
            } => (
                ModelFamily::MertonJumpDiffusion {
                    sigma: *sigma,
                    drift: *drift,
                    intensity: *intensity,
                    jump_mean: *jump_mean,
                    jump_std: *jump_std,
                },
                *t,
            ),
            ModelConfig::Cauchy { t, scale, location } => (
                ModelFamily::Cauchy {
                    scale: *scale,
                    location: *location,
                },
                *t,
            ),
        };
        LevyModel::new(family, t).map_err(config_err)
    }

    pub fn to_pricing(&self) -> Result<Option<PricingConfig>> {
        let Some(block) = &self.pricing else {
            return Ok(None);
        };
        let payoff = match &block.payoff {
            PayoffConfig::Call { spot, strike } => Payoff::Call {
                spot: *spot,
                strike: *strike,
            },
            PayoffConfig::Put { spot, strike } => Payoff::Put {
                spot: *spot,
                strike: *strike,
            },
            PayoffConfig::Spread { spots, strike } => Payoff::Spread {
                spots: spots.clone(),
                strike: *strike,
            },
        };
        let mut config = PricingConfig::new(block.r, block.maturity, payoff).map_err(config_err)?;
        config.coverage_tol = block.coverage_tol;
        Ok(Some(config))
    }
}

/// Numerical validation failures at config-build time are configuration
/// errors for exit-code purposes.
fn config_err(e: Error) -> Error {
    Error::Config(e.to_string())
}

fn as_object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Config(format!("{ctx} must be a JSON object")))
}

fn check_keys(map: &Map<String, Value>, allowed: &[&str], ctx: &str) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "unknown field `{key}` in {ctx}; allowed: {}",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| Error::Config(format!("missing field `{key}` in {ctx}")))
}

fn get_f64(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<f64> {
    required(map, key, ctx)?
        .as_f64()
        .ok_or_else(|| Error::Config(format!("field `{key}` in {ctx} must be a number")))
}

fn opt_f64(map: &Map<String, Value>, key: &str, ctx: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("field `{key}` in {ctx} must be a number"))),
    }
}

fn get_f64_array(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<Vec<f64>> {
    let arr = required(map, key, ctx)?
        .as_array()
        .ok_or_else(|| Error::Config(format!("field `{key}` in {ctx} must be an array")))?;
    arr.iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::Config(format!("field `{key}` in {ctx} must hold numbers")))
        })
        .collect()
}

fn get_usize_array(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<Vec<usize>> {
    let arr = required(map, key, ctx)?
        .as_array()
        .ok_or_else(|| Error::Config(format!("field `{key}` in {ctx} must be an array")))?;
    arr.iter()
        .map(|v| {
            v.as_u64().map(|u| u as usize).ok_or_else(|| {
                Error::Config(format!("field `{key}` in {ctx} must hold non-negative integers"))
            })
        })
        .collect()
}

fn get_str<'a>(map: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a str> {
    required(map, key, ctx)?
        .as_str()
        .ok_or_else(|| Error::Config(format!("field `{key}` in {ctx} must be a string")))
}

fn parse_mesh(v: &Value) -> Result<MeshConfig> {
    let map = as_object(v, "mesh")?;
    check_keys(map, &["spacings"], "mesh")?;
    Ok(MeshConfig {
        spacings: get_f64_array(map, "spacings", "mesh")?,
    })
}

fn parse_kernel(v: &Value) -> Result<KernelConfig> {
    let map = as_object(v, "kernel")?;
    match get_str(map, "type", "kernel")? {
        "gaussian" => {
            check_keys(map, &["type", "b"], "kernel")?;
            Ok(KernelConfig::Gaussian {
                b: get_f64_array(map, "b", "kernel")?,
            })
        }
        other => Err(Error::Config(format!(
            "unknown kernel type `{other}`; available: gaussian"
        ))),
    }
}

fn parse_model(v: &Value) -> Result<ModelConfig> {
    let map = as_object(v, "model")?;
    let family = get_str(map, "family", "model")?;
    let ctx = format!("model ({family})");
    match family {
        "gaussian" => {
            check_keys(map, &["family", "t", "drift", "covariance"], &ctx)?;
            let drift = get_f64_array(map, "drift", &ctx)?;
            let cov_rows = required(map, "covariance", &ctx)?
                .as_array()
                .ok_or_else(|| Error::Config(format!("covariance in {ctx} must be an array")))?;
            let mut covariance = Vec::with_capacity(cov_rows.len());
            for row in cov_rows {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::Config(format!("covariance rows in {ctx} must be arrays")))?;
                covariance.push(
                    row.iter()
                        .map(|v| {
                            v.as_f64().ok_or_else(|| {
                                Error::Config(format!("covariance in {ctx} must hold numbers"))
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?,
                );
            }
            Ok(ModelConfig::Gaussian {
                t: get_f64(map, "t", &ctx)?,
                drift,
                covariance,
            })
        }
        "variance_gamma" => {
            check_keys(map, &["family", "t", "sigma", "nu", "theta", "drift"], &ctx)?;
            Ok(ModelConfig::VarianceGamma {
                t: get_f64(map, "t", &ctx)?,
                sigma: get_f64(map, "sigma", &ctx)?,
                nu: get_f64(map, "nu", &ctx)?,
                theta: get_f64(map, "theta", &ctx)?,
                drift: opt_f64(map, "drift", &ctx, 0.0)?,
            })
        }
        "normal_inverse_gaussian" => {
            check_keys(map, &["family", "t", "alpha", "beta", "delta", "mu"], &ctx)?;
            Ok(ModelConfig::NormalInverseGaussian {
                t: get_f64(map, "t", &ctx)?,
                alpha: get_f64(map, "alpha", &ctx)?,
                beta: get_f64(map, "beta", &ctx)?,
                delta: get_f64(map, "delta", &ctx)?,
                mu: opt_f64(map, "mu", &ctx, 0.0)?,
            })
        }
        "merton" => {
            check_keys(
                map,
                &["family", "t", "sigma", "drift", "intensity", "jump_mean", "jump_std"],
                &ctx,
            )?;
            Ok(ModelConfig::Merton {
                t: get_f64(map, "t", &ctx)?,
                sigma: get_f64(map, "sigma", &ctx)?,
                drift: opt_f64(map, "drift", &ctx, 0.0)?,
                intensity: get_f64(map, "intensity", &ctx)?,
                jump_mean: get_f64(map, "jump_mean", &ctx)?,
                jump_std: get_f64(map, "jump_std", &ctx)?,
            })
        }
        "cauchy" => {
            check_keys(map, &["family", "t", "scale", "location"], &ctx)?;
            Ok(ModelConfig::Cauchy {
                t: get_f64(map, "t", &ctx)?,
                scale: get_f64(map, "scale", &ctx)?,
                location: opt_f64(map, "location", &ctx, 0.0)?,
            })
        }
        other => Err(Error::Config(format!(
            "unknown model family `{other}`; available: gaussian, variance_gamma, \
             normal_inverse_gaussian, merton, cauchy"
        ))),
    }
}

fn parse_truncation(v: &Value) -> Result<TruncationConfig> {
    let map = as_object(v, "truncation")?;
    check_keys(
        map,
        &["phi_tol", "symbol_tail_tol", "symbol_floor", "max_imag_tol"],
        "truncation",
    )?;
    let defaults = TruncationConfig::default();
    Ok(TruncationConfig {
        phi_tol: opt_f64(map, "phi_tol", "truncation", defaults.phi_tol)?,
        symbol_tail_tol: opt_f64(map, "symbol_tail_tol", "truncation", defaults.symbol_tail_tol)?,
        symbol_floor: opt_f64(map, "symbol_floor", "truncation", defaults.symbol_floor)?,
        max_imag_tol: opt_f64(map, "max_imag_tol", "truncation", defaults.max_imag_tol)?,
    })
}

fn parse_grid(v: &Value) -> Result<GridSpec> {
    let map = as_object(v, "output_grid")?;
    check_keys(map, &["offset", "step", "count"], "output_grid")?;
    GridSpec::new(
        get_f64_array(map, "offset", "output_grid")?,
        get_f64_array(map, "step", "output_grid")?,
        get_usize_array(map, "count", "output_grid")?,
    )
    .map_err(config_err)
}

fn parse_pricing(v: &Value) -> Result<PricingBlock> {
    let map = as_object(v, "pricing")?;
    check_keys(map, &["r", "T", "payoff", "coverage_tol"], "pricing")?;
    let payoff = parse_payoff(required(map, "payoff", "pricing")?)?;
    Ok(PricingBlock {
        r: get_f64(map, "r", "pricing")?,
        maturity: get_f64(map, "T", "pricing")?,
        payoff,
        coverage_tol: opt_f64(map, "coverage_tol", "pricing", 1e-6)?,
    })
}

fn parse_output(v: &Value) -> Result<OutputConfig> {
    let map = as_object(v, "output")?;
    check_keys(
        map,
        &["density_csv", "diagnostics_json", "result_json"],
        "output",
    )?;
    let defaults = OutputConfig::default();
    let opt_str = |key: &str, default: String| -> Result<String> {
        match map.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Config(format!("field `{key}` in output must be a string"))),
        }
    };
    Ok(OutputConfig {
        density_csv: opt_str("density_csv", defaults.density_csv)?,
        diagnostics_json: opt_str("diagnostics_json", defaults.diagnostics_json)?,
        result_json: opt_str("result_json", defaults.result_json)?,
    })
}

fn parse_payoff(v: &Value) -> Result<PayoffConfig> {
    let map = as_object(v, "payoff")?;
    match get_str(map, "type", "payoff")? {
        "call" => {
            check_keys(map, &["type", "spot", "strike"], "payoff")?;
            Ok(PayoffConfig::Call {
                spot: get_f64(map, "spot", "payoff")?,
                strike: get_f64(map, "strike", "payoff")?,
            })
        }
        "put" => {
            check_keys(map, &["type", "spot", "strike"], "payoff")?;
            Ok(PayoffConfig::Put {
                spot: get_f64(map, "spot", "payoff")?,
                strike: get_f64(map, "strike", "payoff")?,
            })
        }
        "spread" => {
            check_keys(map, &["type", "spots", "strike"], "payoff")?;
            Ok(PayoffConfig::Spread {
                spots: get_f64_array(map, "spots", "payoff")?,
                strike: get_f64(map, "strike", "payoff")?,
            })
        }
        other => Err(Error::Config(format!(
            "unknown payoff type `{other}`; available: call, put, spread"
        ))),
    }
}
