//! Command-line entry points: density reconstruction, pricing and the
//! validation suites, driven by JSON configs.
//!
//! Exit codes are fixed for scripting: 0 on success, 1 on configuration or
//! I/O errors, 2 on numerical failures (singular symbol, imaginary residue,
//! failed validation checks). Outputs are written atomically via a temp file
//! and rename, and identical configs produce byte-identical CSV files.

pub mod config;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::density::{self, DensityApproximation, ReconstructOptions};
use crate::error::{Error, Result};
use crate::kernels::{Symbol, SymbolOptions};
use crate::pricing;

pub use config::RunConfig;

/// Flags shared by all subcommands.
#[derive(Debug, Clone)]
pub struct OutputOptions {
    pub out_dir: PathBuf,
    pub clamp_negative: bool,
}

/// Diagnostics document written next to every density CSV. Embeds the
/// resolved configuration so a run can be reproduced from its own output.
#[derive(Serialize)]
struct DiagnosticsDoc<'a> {
    max_imag: f64,
    min_value: f64,
    #[serde(rename = "box")]
    box_radius: Vec<usize>,
    mesh: Vec<f64>,
    runtime_ms: u128,
    clamped: bool,
    config: &'a RunConfig,
}

/// Write a file atomically: temp file in the same directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

/// Run the reconstruction pipeline for a config, returning the density and
/// the wall time spent on the numerics.
fn run_pipeline(config: &RunConfig) -> Result<(DensityApproximation, u128)> {
    let mesh = config.to_mesh()?;
    let kernel = config.to_kernel()?;
    let model = config.to_model()?;

    let start = Instant::now();
    let symbol_opts = SymbolOptions {
        tail_tol: config.truncation.symbol_tail_tol,
        ..Default::default()
    };
    let symbol = Symbol::new(mesh, kernel, &symbol_opts)?;
    let opts = ReconstructOptions {
        phi_tol: config.truncation.phi_tol,
        symbol_floor: config.truncation.symbol_floor,
        max_imag_tol: config.truncation.max_imag_tol,
        box_override: None,
    };
    // Prefer the FFT path; arbitrary grids fall back to direct evaluation.
    let density = match density::reconstruct_fft(&model, &symbol, &config.output_grid, &opts) {
        Ok(d) => d,
        Err(Error::NonCommensurateGrid { axis, nearest, .. }) => {
            eprintln!(
                "note: output grid step on axis {axis} is not commensurate with the mesh \
                 (nearest fast-path step {nearest:.17e}); using direct evaluation"
            );
            density::reconstruct(&model, &symbol, &config.output_grid, &opts)?
        }
        Err(e) => return Err(e),
    };
    Ok((density, start.elapsed().as_millis()))
}

fn write_density_outputs(
    config: &RunConfig,
    density: &DensityApproximation,
    runtime_ms: u128,
    opts: &OutputOptions,
) -> Result<()> {
    fs::create_dir_all(&opts.out_dir)?;
    let mut csv = Vec::new();
    density.write_csv(&mut csv)?;
    write_atomic(&opts.out_dir.join(&config.output.density_csv), &csv)?;

    let diag = DiagnosticsDoc {
        max_imag: density.diagnostics().max_imag,
        min_value: density.diagnostics().min_value,
        box_radius: density.diagnostics().box_radius.clone(),
        mesh: density.diagnostics().mesh.clone(),
        runtime_ms,
        clamped: density.diagnostics().clamped,
        config,
    };
    let json = serde_json::to_vec_pretty(&diag)
        .map_err(|e| Error::Config(format!("cannot serialize diagnostics: {e}")))?;
    write_atomic(&opts.out_dir.join(&config.output.diagnostics_json), &json)?;
    Ok(())
}

/// `reconstruct --config <path>`: density CSV plus diagnostics JSON.
pub fn cmd_reconstruct(config_path: &Path, opts: &OutputOptions) -> Result<()> {
    let config = load_config(config_path)?;
    let (mut density, runtime_ms) = run_pipeline(&config)?;
    if opts.clamp_negative {
        density.clamp_negative();
    }
    write_density_outputs(&config, &density, runtime_ms, opts)
}

/// `price --config <path>`: the reconstruct outputs plus the price JSON.
pub fn cmd_price(config_path: &Path, opts: &OutputOptions) -> Result<()> {
    let config = load_config(config_path)?;
    let pricing_config = config
        .to_pricing()?
        .ok_or_else(|| Error::Config("price command needs a `pricing` block".into()))?;
    let (mut density, runtime_ms) = run_pipeline(&config)?;
    if opts.clamp_negative {
        density.clamp_negative();
    }
    let result = pricing::price(&pricing_config, &density)?;
    write_density_outputs(&config, &density, runtime_ms, opts)?;
    let json = serde_json::to_vec_pretty(&result)
        .map_err(|e| Error::Config(format!("cannot serialize result: {e}")))?;
    write_atomic(&opts.out_dir.join(&config.output.result_json), &json)?;
    println!(
        "price {:.6} (expected payoff {:.6}, mass check {:.6})",
        result.price, result.expected_payoff, result.mass_check
    );
    Ok(())
}

/// `validate --suite <name>`: run the property suites and write the report.
/// Returns whether every check passed.
pub fn cmd_validate(suite: &str, opts: &OutputOptions) -> Result<bool> {
    let reports = validate::run(suite)?;
    fs::create_dir_all(&opts.out_dir)?;
    let json = serde_json::to_vec_pretty(&reports)
        .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    write_atomic(&opts.out_dir.join("validate_report.json"), &json)?;
    for report in &reports {
        for (name, bytes) in &report.artifacts {
            write_atomic(&opts.out_dir.join(name), bytes)?;
        }
    }
    let mut all_passed = true;
    for report in &reports {
        for check in &report.checks {
            println!(
                "{} {}::{} measured {:.3e} threshold {:.3e}",
                if check.passed { "PASS" } else { "FAIL" },
                report.suite,
                check.name,
                check.measured,
                check.threshold
            );
            all_passed &= check.passed;
        }
    }
    Ok(all_passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::KernelConfig;

    #[test]
    fn pipeline_runs_on_minimal_config() {
        let config = RunConfig::from_json(
            r#"{
                "mesh": {"spacings": [0.5]},
                "kernel": {"type": "gaussian", "b": [1.0]},
                "model": {"family": "gaussian", "t": 1.0, "drift": [0.0], "covariance": [[1.0]]},
                "output_grid": {"offset": [-3.0], "step": [0.25], "count": [25]}
            }"#,
        )
        .unwrap();
        let (density, _) = run_pipeline(&config).unwrap();
        assert_eq!(density.values().len(), 25);
        let KernelConfig::Gaussian { b } = &config.kernel;
        assert_eq!(b, &vec![1.0]);
    }
}
