//! Command line front end for the spectral laboratory.
//!
//! Reads operator and perturbation recipes from JSON files, runs the
//! verification routines, and writes plot-ready reports: JSON for
//! structured results, CSV for grids.  Every run also writes
//! `manifest.json` recording the exact command line, the SHA-256 of each
//! input file, the seed, the artifact version, and the files produced, so
//! a report can be reproduced byte for byte (wall time aside).
//!
//! Exit codes: 0 success, 2 malformed input, 3 numerical failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use bandgap_lab::determinant::{detg, DetSample};
use bandgap_lab::disk::{
    distance_ratio_stats, polar_grid, verify_disk_bound, DiskFunctionSpec, JoukowskiMap, RatioStats,
    RATIO_CUTOFF,
};
use bandgap_lab::jacobi::{FiniteBandOperator, OperatorSpec};
use bandgap_lab::perturbation::{PerturbationSpec, PerturbationVariant};
use bandgap_lab::report::{
    det_samples_csv, family_csv, joukowski_csv, spectrum_csv, FamilyRow,
};
use bandgap_lab::spectrum::{discrete_spectrum, lt_report};

#[derive(Parser)]
#[command(
    name = "bandgap-lab",
    version,
    about = "Spectral laboratory for band operators under non-selfadjoint perturbations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band structure of an operator recipe: edges, gaps, scales.
    Bands(BandsArgs),
    /// Filtered discrete spectrum of operator plus perturbation.
    Spectrum(SpectrumArgs),
    /// Distance-weighted eigenvalue sums over a scaled perturbation family.
    LtVerify(LtVerifyArgs),
    /// Regularized determinant samples over a rectangular grid off the bands.
    Det(DetArgs),
    /// Zero-sum versus growth-certificate checks for disk function specs.
    DiskVerify(DiskVerifyArgs),
    /// Distance-comparison ratios of the band map over a polar grid.
    Joukowski(JoukowskiArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Directory receiving the report files and the run manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker thread count; defaults to one per core.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct BandsArgs {
    /// Operator recipe (JSON).
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Operator recipe (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Perturbation recipe (JSON).
    #[arg(long)]
    pert: PathBuf,
    /// Smaller truncation size.
    #[arg(long, default_value_t = 500)]
    n1: usize,
    /// Larger truncation size.
    #[arg(long, default_value_t = 1000)]
    n2: usize,
    /// Band-distance cutoff; defaults to 0.05 x gap scale.
    #[arg(long)]
    eta: Option<f64>,
    /// Cross-size matching tolerance; defaults to 1e-4 x span.
    #[arg(long)]
    match_tol: Option<f64>,
    /// Replaces the seed of a random perturbation recipe.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct LtVerifyArgs {
    /// Operator recipe (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Perturbation recipe or family file (JSON); a family wraps a
    /// template with a coupling grid and an instance count.
    #[arg(long)]
    pert: PathBuf,
    /// Schatten exponent of the comparison norm.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Excess exponent in the eigenvalue sum.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Smaller truncation size.
    #[arg(long, default_value_t = 500)]
    n1: usize,
    /// Larger truncation size.
    #[arg(long, default_value_t = 1000)]
    n2: usize,
    /// Band-distance cutoff; defaults to 0.05 x gap scale.
    #[arg(long)]
    eta: Option<f64>,
    /// Replaces the base seed of a random template.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DetArgs {
    /// Operator recipe (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Perturbation recipe (JSON).
    #[arg(long)]
    pert: PathBuf,
    /// Schatten exponent selecting the regularization order.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Truncation size for the underlying operators.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Real part of the grid, lower edge.
    #[arg(long, allow_hyphen_values = true)]
    re_min: f64,
    /// Real part of the grid, upper edge.
    #[arg(long, allow_hyphen_values = true)]
    re_max: f64,
    /// Grid points along the real axis.
    #[arg(long, default_value_t = 20)]
    re_steps: usize,
    /// Imaginary part of the grid, lower edge.
    #[arg(long, allow_hyphen_values = true)]
    im_min: f64,
    /// Imaginary part of the grid, upper edge.
    #[arg(long, allow_hyphen_values = true)]
    im_max: f64,
    /// Grid points along the imaginary axis.
    #[arg(long, default_value_t = 20)]
    im_steps: usize,
    /// Points closer to the bands than this are skipped; defaults to
    /// 0.05 x gap scale.  Zero disables the skip entirely.
    #[arg(long)]
    eta: Option<f64>,
    /// Replaces the seed of a random perturbation recipe.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DiskVerifyArgs {
    /// Disk function spec or array of specs (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Excess exponent in the zero sum.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct JoukowskiArgs {
    /// Left band edge.
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Right band edge.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    beta: f64,
    /// Radial grid points.
    #[arg(long, default_value_t = 200)]
    nr: usize,
    /// Angular grid points.
    #[arg(long, default_value_t = 200)]
    ntheta: usize,
    /// Inner radius of the grid; must stay at or above the cutoff 0.05.
    #[arg(long, default_value_t = RATIO_CUTOFF)]
    r_min: f64,
    #[command(flatten)]
    common: CommonArgs,
}

enum AppError {
    Input(String),
    Numerical(String),
}

impl AppError {
    fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Numerical(m) => m,
        }
    }

    fn code(&self) -> i32 {
        match self {
            AppError::Input(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }
}

impl From<bandgap_lab::Error> for AppError {
    fn from(e: bandgap_lab::Error) -> Self {
        use bandgap_lab::Error as E;
        match e {
            E::NumericalFailure(_) | E::NearSingular(_) | E::WindingUnstable { .. } => {
                AppError::Numerical(e.to_string())
            }
            _ => AppError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Input(e.to_string())
    }
}

type AppResult<T> = std::result::Result<T, AppError>;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Bands(a) => cmd_bands(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::LtVerify(a) => cmd_lt_verify(a),
        Command::Det(a) => cmd_det(a),
        Command::DiskVerify(a) => cmd_disk_verify(a),
        Command::Joukowski(a) => cmd_joukowski(a),
    }
}

/// Everything needed to reproduce a run: the exact command line, hashes of
/// the files it read, and the files it wrote.  Two runs with equal
/// manifests produce byte-identical outputs; only `wall_time_ms` varies.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    version: String,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
    wall_time_ms: u128,
}

/// Shared per-command plumbing: input hashing, output collection, and the
/// final manifest write.
struct Runner {
    out_dir: PathBuf,
    manifest: RunManifest,
    start: Instant,
}

impl Runner {
    fn new(command: &str, common: &CommonArgs, seed: Option<u64>) -> AppResult<Runner> {
        if let Some(jobs) = common.jobs {
            if jobs == 0 {
                return Err(AppError::Input("--jobs must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .map_err(|e| AppError::Input(format!("thread pool setup failed: {e}")))?;
        }
        fs::create_dir_all(&common.out_dir).map_err(|e| {
            AppError::Input(format!("cannot create {}: {e}", common.out_dir.display()))
        })?;
        Ok(Runner {
            out_dir: common.out_dir.clone(),
            manifest: RunManifest {
                command: command.to_string(),
                argv: std::env::args().collect(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                inputs: BTreeMap::new(),
                outputs: Vec::new(),
                wall_time_ms: 0,
            },
            start: Instant::now(),
        })
    }

    /// Read an input file, remembering its fingerprint.
    fn read_input(&mut self, path: &Path) -> AppResult<Vec<u8>> {
        let bytes = fs::read(path)
            .map_err(|e| AppError::Input(format!("cannot read {}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        self.manifest.inputs.insert(path.display().to_string(), format!("{digest:x}"));
        Ok(bytes)
    }

    /// Parse an input file as JSON with the file name in diagnostics.
    fn read_json<T: for<'de> Deserialize<'de>>(&mut self, path: &Path) -> AppResult<T> {
        let bytes = self.read_input(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))
    }

    fn write_output(&mut self, name: &str, contents: &str) -> AppResult<()> {
        fs::write(self.out_dir.join(name), contents)
            .map_err(|e| AppError::Input(format!("cannot write {name}: {e}")))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn finish(mut self) -> AppResult<()> {
        self.manifest.wall_time_ms = self.start.elapsed().as_millis();
        let json = to_pretty(&self.manifest)?;
        fs::write(self.out_dir.join("manifest.json"), json)
            .map_err(|e| AppError::Input(format!("cannot write manifest.json: {e}")))?;
        Ok(())
    }
}

fn to_pretty<T: Serialize>(value: &T) -> AppResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Replace the seed of a random recipe in place; other variants have no
/// randomness and ignore the flag.
fn override_seed(pert: &mut PerturbationSpec, seed: Option<u64>) {
    if let (Some(s), PerturbationVariant::RandomBanded { seed: slot, .. }) =
        (seed, &mut pert.variant)
    {
        *slot = s;
    }
}

fn load_operator(runner: &mut Runner, path: &Path) -> AppResult<FiniteBandOperator> {
    let spec: OperatorSpec = runner.read_json(path)?;
    Ok(FiniteBandOperator::from_spec(spec)?)
}

fn load_perturbation(
    runner: &mut Runner,
    path: &Path,
    seed: Option<u64>,
) -> AppResult<PerturbationSpec> {
    let mut pert: PerturbationSpec = runner.read_json(path)?;
    override_seed(&mut pert, seed);
    pert.validate()?;
    Ok(pert)
}

#[derive(Serialize)]
struct BandsReport {
    bands: Vec<(f64, f64)>,
    edges: Vec<f64>,
    gap_widths: Vec<f64>,
    span: f64,
    gap_scale: f64,
}

fn cmd_bands(args: BandsArgs) -> AppResult<()> {
    let mut runner = Runner::new("bands", &args.common, None)?;
    let op = load_operator(&mut runner, &args.spec)?;
    let bands = op.bands();
    let intervals = bands.bands().to_vec();
    let gap_widths = intervals.windows(2).map(|w| w[1].0 - w[0].1).collect();
    let report = BandsReport {
        bands: intervals,
        edges: bands.edges(),
        gap_widths,
        span: bands.span(),
        gap_scale: bands.gap_scale(),
    };
    let json = to_pretty(&report)?;
    runner.write_output("bands.json", &json)?;
    runner.finish()?;
    print!("{json}");
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs) -> AppResult<()> {
    let mut runner = Runner::new("spectrum", &args.common, args.seed)?;
    let op = load_operator(&mut runner, &args.spec)?;
    let pert = load_perturbation(&mut runner, &args.pert, args.seed)?;
    let spectrum = discrete_spectrum(&op, &pert, args.n1, args.n2, args.eta, args.match_tol)?;
    let json = to_pretty(&spectrum)?;
    runner.write_output("spectrum.json", &json)?;
    runner.write_output("spectrum.csv", &spectrum_csv(&spectrum).to_csv())?;
    runner.finish()?;
    print!("{json}");
    Ok(())
}

/// A family file wraps a perturbation template with a coupling grid and an
/// instance count; a bare perturbation recipe reads as a family of one.
#[derive(Deserialize)]
struct FamilySpec {
    template: PerturbationSpec,
    #[serde(default = "default_t_grid")]
    t_grid: Vec<f64>,
    #[serde(default = "default_instances")]
    instances: usize,
}

fn default_t_grid() -> Vec<f64> {
    vec![1.0]
}

fn default_instances() -> usize {
    1
}

fn load_family(runner: &mut Runner, path: &Path) -> AppResult<FamilySpec> {
    let bytes = runner.read_input(path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
    let family = if value.get("template").is_some() {
        serde_json::from_value(value)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?
    } else {
        let template = serde_json::from_value(value)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
        FamilySpec { template, t_grid: default_t_grid(), instances: default_instances() }
    };
    if family.t_grid.is_empty() {
        return Err(AppError::Input(format!("{}: t_grid must be nonempty", path.display())));
    }
    if !family.t_grid.iter().all(|t| t.is_finite() && *t >= 0.0) {
        return Err(AppError::Input(format!(
            "{}: coupling values must be finite and nonnegative",
            path.display()
        )));
    }
    if family.instances == 0 {
        return Err(AppError::Input(format!("{}: instances must be positive", path.display())));
    }
    if family.instances > 1
        && !matches!(family.template.variant, PerturbationVariant::RandomBanded { .. })
    {
        return Err(AppError::Input(format!(
            "{}: multiple instances need the random-banded variant; others are deterministic",
            path.display()
        )));
    }
    family.template.validate()?;
    Ok(family)
}

#[derive(Serialize)]
struct FamilySummary {
    p: f64,
    eps: f64,
    n1: usize,
    n2: usize,
    rows: usize,
    total_terms: usize,
    max_value: f64,
    sup_ratio: Option<f64>,
}

fn cmd_lt_verify(args: LtVerifyArgs) -> AppResult<()> {
    let mut runner = Runner::new("lt-verify", &args.common, args.seed)?;
    let op = load_operator(&mut runner, &args.spec)?;
    let family = load_family(&mut runner, &args.pert)?;

    let mut rows = Vec::new();
    for instance in 0..family.instances {
        let mut member = family.template.clone();
        if let PerturbationVariant::RandomBanded { seed, .. } = &mut member.variant {
            let base = args.seed.unwrap_or(*seed);
            *seed = base.wrapping_add(instance as u64);
        }
        for &t in &family.t_grid {
            let mut scaled = member.clone();
            scaled.scale = family.template.scale * t;
            scaled.validate()?;
            let report = lt_report(&op, &scaled, args.p, args.eps, (args.n1, args.n2), args.eta)?;
            rows.push(FamilyRow { instance, t, report });
        }
    }

    let summary = FamilySummary {
        p: args.p,
        eps: args.eps,
        n1: args.n1,
        n2: args.n2,
        rows: rows.len(),
        total_terms: rows.iter().map(|r| r.report.terms).sum(),
        max_value: rows.iter().map(|r| r.report.value).fold(0.0, f64::max),
        sup_ratio: rows
            .iter()
            .filter_map(|r| r.report.ratio)
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x)))),
    };
    let json = to_pretty(&summary)?;
    runner.write_output("lt_family.csv", &family_csv(&rows).to_csv())?;
    runner.write_output("lt_summary.json", &json)?;
    runner.finish()?;
    print!("{json}");
    Ok(())
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

#[derive(Serialize)]
struct DetSummary {
    evaluated: usize,
    skipped: usize,
    log_modulus_min: Option<f64>,
    log_modulus_max: Option<f64>,
}

fn cmd_det(args: DetArgs) -> AppResult<()> {
    let mut runner = Runner::new("det", &args.common, args.seed)?;
    if args.re_steps == 0 || args.im_steps == 0 {
        return Err(AppError::Input("grid steps must be positive".into()));
    }
    if !(args.re_min <= args.re_max) || !(args.im_min <= args.im_max) {
        return Err(AppError::Input("grid edges must be ordered".into()));
    }
    let op = load_operator(&mut runner, &args.spec)?;
    let pert = load_perturbation(&mut runner, &args.pert, args.seed)?;
    let bands = op.bands().clone();
    let eta = match args.eta {
        Some(e) if e.is_finite() && e >= 0.0 => e,
        Some(e) => return Err(AppError::Input(format!("eta must be nonnegative, got {e}"))),
        None => 0.05 * bands.gap_scale(),
    };

    let a0 = op.truncate(args.n)?;
    let b = pert.build(args.n)?;
    let mut samples: Vec<DetSample> = Vec::new();
    let mut skipped = 0usize;
    for re in linspace(args.re_min, args.re_max, args.re_steps) {
        for im in linspace(args.im_min, args.im_max, args.im_steps) {
            let lambda = Complex64::new(re, im);
            if bands.dist_to_bands(lambda) < eta {
                skipped += 1;
                continue;
            }
            samples.push(detg(&a0, &b, &bands, lambda, args.p)?);
        }
    }

    let summary = DetSummary {
        evaluated: samples.len(),
        skipped,
        log_modulus_min: samples.iter().map(|s| s.log_modulus).reduce(f64::min),
        log_modulus_max: samples.iter().map(|s| s.log_modulus).reduce(f64::max),
    };
    let json = to_pretty(&summary)?;
    runner.write_output("det.csv", &det_samples_csv(&samples).to_csv())?;
    runner.write_output("det_summary.json", &json)?;
    runner.finish()?;
    print!("{json}");
    Ok(())
}

fn cmd_disk_verify(args: DiskVerifyArgs) -> AppResult<()> {
    let mut runner = Runner::new("disk-verify", &args.common, None)?;
    let bytes = runner.read_input(&args.spec)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| AppError::Input(format!("{}: {e}", args.spec.display())))?;
    let specs: Vec<DiskFunctionSpec> = if value.is_array() {
        serde_json::from_value(value)
            .map_err(|e| AppError::Input(format!("{}: {e}", args.spec.display())))?
    } else {
        vec![serde_json::from_value(value)
            .map_err(|e| AppError::Input(format!("{}: {e}", args.spec.display())))?]
    };

    let mut reports = Vec::with_capacity(specs.len());
    for spec in &specs {
        spec.validate()?;
        reports.push(verify_disk_bound(spec, args.eps)?);
    }
    let json = to_pretty(&reports)?;
    runner.write_output("disk_reports.json", &json)?;
    runner.finish()?;
    print!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct JoukowskiSummary {
    alpha: f64,
    beta: f64,
    capacity: f64,
    points: usize,
    edge_ratio: RatioStats,
    band_ratio: RatioStats,
}

fn cmd_joukowski(args: JoukowskiArgs) -> AppResult<()> {
    let mut runner = Runner::new("joukowski", &args.common, None)?;
    if args.nr == 0 || args.ntheta == 0 {
        return Err(AppError::Input("grid steps must be positive".into()));
    }
    if !(args.r_min >= RATIO_CUTOFF && args.r_min < 1.0) {
        return Err(AppError::Input(format!(
            "r_min must lie in [{RATIO_CUTOFF}, 1), got {}",
            args.r_min
        )));
    }
    let map = JoukowskiMap::new(args.alpha, args.beta)?;
    let grid = polar_grid(args.nr, args.ntheta, args.r_min);
    let table = joukowski_csv(&map, &grid);
    let (edge_ratio, band_ratio) = distance_ratio_stats(&map, &grid)?;
    let summary = JoukowskiSummary {
        alpha: args.alpha,
        beta: args.beta,
        capacity: map.capacity(),
        points: table.len(),
        edge_ratio,
        band_ratio,
    };
    let json = to_pretty(&summary)?;
    runner.write_output("ratios.csv", &table.to_csv())?;
    runner.write_output("ratio_stats.json", &json)?;
    runner.finish()?;
    print!("{json}");
    Ok(())
}
