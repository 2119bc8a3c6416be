//! Built-in validation suites for the `validate` subcommand.
//!
//! Each suite exercises a property family with measured errors against fixed
//! thresholds and reports one line per check. The oracle suite also settles
//! which closed form of the periodized Gaussian spectrum agrees with the
//! direct lattice sum; the direct sum is the ground truth and no closed form
//! is used anywhere in the library itself.

use serde::Serialize;

use crate::cardinal::{read_alpha_csv, AlphaOptions, CardinalSpline};
use crate::density::{reconstruct, GridSpec, LevyModel, ModelFamily, ReconstructOptions};
use crate::error::{Error, Result};
use crate::kernels::{GaussianKernel, Kernel, Symbol, SymbolOptions};
use crate::mesh::{IndexBox, UniformMesh};
use crate::oracle;
use crate::torus::{golomb_cubic, BernoulliMonospline, PeriodicFundamentalSpline, PeriodicKernel};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    /// Files the suite wants written next to the report, such as the
    /// coefficient CSV of the cardinal suite.
    #[serde(skip)]
    pub artifacts: Vec<(String, Vec<u8>)>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckResult>) -> Self {
        Self {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            artifacts: Vec::new(),
        }
    }
}

fn check(name: &str, measured: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: measured <= threshold,
        measured,
        threshold,
        detail: None,
    }
}

/// Deterministic xorshift generator for reproducible sample points.
struct Rng(u64);

impl Rng {
    fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Run the suites named by the selector.
pub fn run(selector: &str) -> Result<Vec<SuiteReport>> {
    match selector {
        "all" => Ok(vec![cardinal_suite()?, torus_suite()?, oracle_suite()?]),
        "cardinal" => Ok(vec![cardinal_suite()?]),
        "torus" => Ok(vec![torus_suite()?]),
        "oracle" => Ok(vec![oracle_suite()?]),
        other => Err(Error::Config(format!(
            "unknown validation suite `{other}`; available: all, cardinal, torus, oracle"
        ))),
    }
}

pub fn cardinal_suite() -> Result<SuiteReport> {
    let mesh = UniformMesh::uniform_1d(1.0)?;
    let kernel = GaussianKernel::isotropic_1d(1.0)?;
    let symbol = Symbol::new(mesh.clone(), kernel.clone(), &SymbolOptions::default())?;
    let spline = CardinalSpline::compute_alpha(
        symbol,
        &[256],
        IndexBox::cubic(1, 32),
        &AlphaOptions::default(),
    )?;
    let mut checks = Vec::new();

    // cardinality at the origin and the first ten shells
    checks.push(check(
        "cardinality_origin",
        (spline.eval_spatial(&[0.0]) - 1.0).abs(),
        1e-8,
    ));
    let off_node = (1..=10)
        .flat_map(|m| [m as f64, -(m as f64)])
        .map(|x| spline.eval_spatial(&[x]).abs())
        .fold(0.0, f64::max);
    checks.push(check("cardinality_off_node_max", off_node, 1e-8));

    // dense collocation solve against det(A) * alpha on interior indices
    let nodes: Vec<Vec<f64>> = (-30..=30).map(|s| vec![s as f64]).collect();
    let mut rhs = vec![0.0; nodes.len()];
    rhs[30] = 1.0;
    let solve = oracle::dense_interpolation_solve(|d| kernel.spatial(d), &nodes, &rhs)?;
    let mut rel = 0.0f64;
    for s in -10..=10i64 {
        let alpha = spline.alpha(&[s]);
        let dense = solve.coefficients[(s + 30) as usize];
        rel = rel.max((dense - alpha).abs() / alpha.abs());
    }
    checks.push(check("dense_solve_relative_agreement", rel, 1e-6));

    // spatial and spectral representations agree off the lattice
    let mut rng = Rng(0x5eed_1234_dead_beef);
    let mut repr = 0.0f64;
    for _ in 0..20 {
        let x = rng.next_f64();
        let diff = (spline.eval_spectral(&[x], &[701])? - spline.eval_spatial(&[x])).abs();
        repr = repr.max(diff);
    }
    checks.push(check("representation_agreement", repr, 1e-6));

    // partition identity of the spline transform over the dual lattice
    let radius = spline.symbol().radius().radius()[0] as i64;
    let mut partition = 0.0f64;
    for _ in 0..20 {
        let z = rng.next_f64() * mesh.dual_period(0);
        let total: f64 = (-radius..=radius)
            .map(|l| spline.spectral_transform(&[z + mesh.dual_point(&[l])[0]]))
            .sum();
        partition = partition.max((total - mesh.cell_volume()).abs());
    }
    checks.push(check("symbol_partition_identity", partition, 1e-8));

    // coefficient export and import round trip exactly
    let mut csv = Vec::new();
    spline
        .write_alpha_csv(&mut csv)
        .map_err(crate::error::Error::Io)?;
    let (box_, coeffs) = read_alpha_csv(&csv[..])?;
    let round_trip_exact = box_ == *spline.coeff_box()
        && coeffs
            .iter()
            .zip(spline.coeffs())
            .all(|(a, b)| a.to_bits() == b.to_bits());
    checks.push(check(
        "alpha_csv_round_trip",
        if round_trip_exact { 0.0 } else { 1.0 },
        0.5,
    ));

    // exponential decay of the coefficient shells
    let profile = spline.decay_report();
    checks.push(check("coefficient_decay_slope", profile.slope, -0.5));

    let mut report = SuiteReport::new("cardinal", checks);
    report.artifacts.push(("alpha.csv".into(), csv));
    Ok(report)
}

pub fn torus_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let tau = 2.0 * std::f64::consts::PI;

    // cubic fundamental spline cardinality on eight nodes
    let m = 8;
    let golomb_err = (0..m)
        .map(|k| {
            let x = tau * k as f64 / m as f64;
            let want = if k == 0 { 1.0 } else { 0.0 };
            (golomb_cubic(m, x) - want).abs()
        })
        .fold(0.0, f64::max);
    checks.push(check("golomb_cardinality_m8", golomb_err, 1e-8));

    // general formula against the bordered dense solve
    for &order in &[2u32, 4] {
        let terms = if order == 2 { 100_000 } else { 10_000 };
        for &m in &[4usize, 8, 16] {
            for &y in &[0.0, 0.3] {
                let kernel = BernoulliMonospline::new(order, terms)?;
                let spline = PeriodicFundamentalSpline::new(kernel.clone(), m, y)?;
                let dense = oracle::periodic_fundamental_solve(&kernel, m, y)?;
                let mut worst = 0.0f64;
                for i in 0..9 {
                    let x = tau * (i as f64 + 0.31) / 9.0;
                    worst = worst.max((spline.eval(x) - dense.eval(&kernel, x)).abs());
                }
                checks.push(check(
                    &format!("formula_vs_dense_D{order}_m{m}_y{y}"),
                    worst,
                    1e-8,
                ));
            }
        }
    }

    // reduction of the general formula to the cosine ratio at zero shift
    let kernel = BernoulliMonospline::new(4, 10_000)?;
    let spline = PeriodicFundamentalSpline::new(kernel, 8, 0.0)?;
    let reduction = [0.2, 1.1, 2.9, 5.5]
        .iter()
        .map(|&x| (golomb_cubic(8, x) - spline.eval(x)).abs())
        .fold(0.0, f64::max);
    checks.push(check("golomb_reduction", reduction, 1e-12));

    // interpolating the constant function returns the constant
    let kernel = BernoulliMonospline::new(4, 10_000)?;
    let spline = PeriodicFundamentalSpline::new(kernel, 8, 0.3)?;
    let ones = vec![1.0; 8];
    let interp = spline.interpolant(&ones)?;
    let const_err = [0.0, 0.7, 2.3, 4.1, 6.1]
        .iter()
        .map(|&x| (interp.eval(x) - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(check("constant_interpolation", const_err, 1e-8));

    // partial sums of the Bernoulli monospline against closed sums
    let kernel = BernoulliMonospline::new(2, 1_000_000)?;
    checks.push(check(
        "bernoulli_d2_at_zero",
        (kernel.eval(0.0) + std::f64::consts::PI.powi(2) / 6.0).abs(),
        1e-6,
    ));
    checks.push(check(
        "bernoulli_d2_at_pi",
        (kernel.eval(std::f64::consts::PI) - std::f64::consts::PI.powi(2) / 12.0).abs(),
        1e-6,
    ));

    Ok(SuiteReport::new("torus", checks))
}

pub fn oracle_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let kernel = GaussianKernel::isotropic_1d(1.0)?;
    let mesh = UniformMesh::uniform_1d(1.0)?;

    // oscillatory quadrature of the spatial kernel against the spectrum
    let mut quad_err = 0.0f64;
    for &z in &[0.0, 1.0, -1.0, 2.0, -2.0] {
        let q = oracle::fourier_quadrature(|x| kernel.spatial(&[x]), -10.0, 10.0, 20_000, z);
        quad_err = quad_err.max((q.re - kernel.spectrum(&[z])).abs());
    }
    checks.push(check("fourier_quadrature_vs_spectrum", quad_err, 1e-8));

    // inverse-transform round trip recovers the spatial kernel
    let mut round_err = 0.0f64;
    for &x in &[0.0, 0.4, -0.9, 1.6] {
        let q = oracle::fourier_quadrature(|z| kernel.spectrum(&[z]), -30.0, 30.0, 60_000, -x);
        round_err =
            round_err.max((q.re / (2.0 * std::f64::consts::PI) - kernel.spatial(&[x])).abs());
    }
    checks.push(check("plancherel_round_trip", round_err, 1e-8));

    // brute-force periodization is radius-stable
    let stability = (oracle::periodization_bruteforce(&kernel, &mesh, &[0.7], 11)
        - oracle::periodization_bruteforce(&kernel, &mesh, &[0.7], 10))
    .abs();
    checks.push(check("periodization_radius_stability", stability, 1e-15));

    // closed-form resolution for the periodized Gaussian spectrum: the
    // candidate with exponent -b a^2 m^2 must match the direct sum, the
    // candidate with exponent -b (a m / 2 pi)^2 must not
    let spacing = 1.0;
    let b = 1.0;
    let closed_direct = |z: f64| -> f64 {
        spacing
            * (1..=48)
                .map(|m| {
                    2.0 * (-b * spacing * spacing * (m * m) as f64).exp()
                        * (spacing * m as f64 * z).cos()
                })
                .sum::<f64>()
            + spacing
    };
    let closed_scaled = |z: f64| -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        spacing
            * (1..=400)
                .map(|m| {
                    2.0 * (-b * (spacing * m as f64 / tau).powi(2)).exp()
                        * (spacing * m as f64 * z).cos()
                })
                .sum::<f64>()
            + spacing
    };
    let mut direct_dev = 0.0f64;
    let mut scaled_dev = f64::INFINITY;
    for i in 0..=16 {
        let z = mesh.dual_period(0) * i as f64 / 16.0;
        let truth = oracle::periodization_bruteforce(&kernel, &mesh, &[z], 12);
        direct_dev = direct_dev.max((closed_direct(z) - truth).abs());
        scaled_dev = scaled_dev.min((closed_scaled(z) - truth).abs());
    }
    let mut resolution = check("closed_form_exponent_a2m2_matches_direct_sum", direct_dev, 1e-10);
    resolution.detail = Some(format!(
        "exponent -b a^2 m^2 deviates by {direct_dev:.3e}; \
         exponent -b (a m / 2 pi)^2 deviates by at least {scaled_dev:.3e}"
    ));
    checks.push(resolution);
    checks.push(CheckResult {
        name: "closed_form_exponent_2pi_scaling_rejected".into(),
        passed: scaled_dev > 1e-2,
        measured: scaled_dev,
        threshold: 1e-2,
        detail: Some("minimum deviation from the direct sum; must stay large".into()),
    });

    // density pipeline spot check against the standard normal closed form
    let model = LevyModel::new(
        ModelFamily::Gaussian {
            drift: vec![0.0],
            covariance: vec![vec![1.0]],
        },
        1.0,
    )?;
    let symbol = Symbol::new(
        UniformMesh::uniform_1d(0.25)?,
        GaussianKernel::isotropic_1d(1.0)?,
        &SymbolOptions::default(),
    )?;
    let grid = GridSpec::new(vec![-2.0], vec![0.5], vec![9])?;
    let density = reconstruct(&model, &symbol, &grid, &ReconstructOptions::default())?;
    let mut density_err = 0.0f64;
    for j in 0..9usize {
        let x = grid.point(&[j])[0];
        let target = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        density_err = density_err.max((density.value(&[j]) - target).abs());
    }
    checks.push(check("density_vs_normal_closed_form", density_err, 1e-3));

    Ok(SuiteReport::new("oracle", checks))
}
