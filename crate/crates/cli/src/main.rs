//! `klt` — compute spectral bounds for Schrödinger operators on the line
//! and on cylinders: closed-form constants, finite-difference ground
//! states, the symmetry-breaking threshold, parameter sweeps and the
//! verification suite.
//!
//! Exit codes: 0 success, 2 parameter validation, 3 file I/O or parsing,
//! 4 solver non-convergence, 5 verification failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use klt_core::cylinder;
use klt_core::error::KltError;
use klt_core::grid::Grid1D;
use klt_core::line;
use klt_core::manifold::{load_manifold_spec, sphere_spec, ManifoldSpec};
use klt_core::params::{
    self, lambda_r, make_params, mu_one, mu_star_bounds, InequalityParams, RigidityParams,
};
use klt_core::variational::{
    capital_lambda, threshold_search, OptMode, OptimizerConfig, SweepRecord,
    SCHEMA_VERSION,
};
use std::io::Write;
use std::path::PathBuf;

mod output;
use output::{csv_row, write_out, Row};

#[derive(Parser)]
#[command(name = "klt", version, about = "Spectral bounds for Schrödinger operators on lines and cylinders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants for given (d, q) and compact factor.
    Constants(ConstantsArgs),
    /// Ground-state eigensolves.
    #[command(subcommand)]
    Eigen(EigenCmd),
    /// Bracket the symmetry-breaking threshold norm.
    Threshold(ThresholdArgs),
    /// Sweep Λ(μ), Λ_R(μ) and the symmetry fraction over a μ range.
    Sweep(SweepArgs),
    /// Run the verification suite; exits 5 on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ManifoldArgs {
    /// Use the round sphere S^(d-1) as the compact factor.
    #[arg(long)]
    sphere: bool,
    /// Load the compact factor from a spectral data file.
    #[arg(long, conflicts_with = "sphere")]
    manifold: Option<PathBuf>,
    /// Highest sphere mode to tabulate.
    #[arg(long, default_value_t = 8)]
    l_max: u32,
}

impl ManifoldArgs {
    fn resolve(&self, d: u32) -> Result<Option<ManifoldSpec>, KltError> {
        if let Some(path) = &self.manifold {
            return Ok(Some(load_manifold_spec(path)?));
        }
        if self.sphere {
            return Ok(Some(sphere_spec(d, self.l_max)?));
        }
        Ok(None)
    }
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    q: f64,
    /// Effective-dimension parameter (default 2q).
    #[arg(long)]
    n: Option<f64>,
    #[command(flatten)]
    manifold: ManifoldArgs,
}

#[derive(Subcommand)]
enum EigenCmd {
    /// Bottom eigenvalue of -d²/ds² - V on the truncated line.
    Line(EigenLineArgs),
    /// Bottom eigenvalue on the cylinder R x M.
    Cylinder(EigenCylinderArgs),
}

#[derive(Args)]
struct EigenLineArgs {
    /// Two-column potential file (`s value`).
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Use the optimal potential of the given norm instead of a file.
    #[arg(long, conflicts_with = "potential")]
    optimal_mu: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Interior grid points for generated potentials.
    #[arg(long, default_value_t = 4001)]
    grid_n: usize,
    /// Half width of the truncation window (0 = automatic).
    #[arg(long, default_value_t = 0.0)]
    window: f64,
}

#[derive(Args)]
struct EigenCylinderArgs {
    /// Axial potential file (`s value`), solved by mode decomposition.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Dense 2D potential file (`n m s_min s_max` header), d = 2 only.
    #[arg(long, conflicts_with = "potential")]
    potential2d: Option<PathBuf>,
    /// Use the optimal axial potential of the given norm.
    #[arg(long, conflicts_with_all = ["potential", "potential2d"])]
    optimal_mu: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Sphere dimension d of the cylinder R x S^(d-1).
    #[arg(long, default_value_t = 2)]
    sphere_d: u32,
    #[arg(long)]
    manifold: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    l_max: u32,
    #[arg(long, default_value_t = 4001)]
    grid_n: usize,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    q: f64,
    /// Relative width of the returned bracket.
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    /// Optimizer configuration file (name=value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    manifold: ManifoldArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    q: f64,
    /// Range `start:end:count`.
    #[arg(long)]
    mu: String,
    #[arg(long, value_enum)]
    mode: Option<SweepMode>,
    /// Concurrent sweep points (default: KLT_JOBS or 1).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    manifold: ManifoldArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    Symmetric,
    General2d,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced-grid suite (fast, deterministic).
    #[arg(long)]
    quick: bool,
}

fn exit_code(e: &KltError) -> i32 {
    match e {
        KltError::InvalidParams(_) | KltError::Degenerate(_) | KltError::Domain(_)
        | KltError::MemoryGuard { .. } => 2,
        KltError::Io { .. } | KltError::Parse { .. } => 3,
        KltError::NonConvergence { .. }
        | KltError::OptimizerNonConvergence { .. }
        | KltError::Bracket { .. }
        | KltError::Inconclusive { .. } => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(CliFailure::Klt(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(CliFailure::Verification(failed)) => {
            eprintln!("verification failed: {failed} check(s) did not pass");
            5
        }
    };
    std::process::exit(code);
}

enum CliFailure {
    Klt(KltError),
    Verification(usize),
}

impl From<KltError> for CliFailure {
    fn from(e: KltError) -> Self {
        CliFailure::Klt(e)
    }
}

fn run(cli: &Cli) -> Result<(), CliFailure> {
    match &cli.command {
        Command::Constants(args) => cmd_constants(cli, args)?,
        Command::Eigen(EigenCmd::Line(args)) => cmd_eigen_line(cli, args)?,
        Command::Eigen(EigenCmd::Cylinder(args)) => cmd_eigen_cylinder(cli, args)?,
        Command::Threshold(args) => cmd_threshold(cli, args)?,
        Command::Sweep(args) => cmd_sweep(cli, args)?,
        Command::Verify(args) => cmd_verify(args)?,
    }
    Ok(())
}

fn cmd_constants(cli: &Cli, args: &ConstantsArgs) -> Result<(), KltError> {
    let pr = make_params(args.d, args.q)?;
    let m1 = mu_one(&pr);
    let mut row = Row::new();
    row.push("schema", SCHEMA_VERSION as f64);
    row.push("d", args.d as f64);
    row.push("q", pr.q);
    row.push("p", pr.p);
    row.push("beta", pr.beta);
    row.push("gamma", pr.gamma);
    row.push("mu1", m1);
    if let Some(spec) = args.manifold.resolve(args.d)? {
        let mut rp = RigidityParams::standard(&pr, spec.kappa, spec.lambda1());
        if let Some(n) = args.n {
            rp.n = n;
            rp.theta = params::theta_star(&rp, args.d)?;
        }
        let (lo, hi) = mu_star_bounds(&rp, &pr)?;
        row.push("lambda1_m", spec.lambda1());
        row.push("kappa", spec.kappa);
        row.push("n_effective", rp.n);
        row.push("delta", rp.delta(args.d));
        row.push("theta_star", params::theta_star(&rp, args.d)?);
        row.push("lambda_star", params::lambda_star(&rp, args.d)?);
        row.push("mu_star_lower", lo);
        row.push("mu_star_upper", hi);
    }
    emit_rows(cli, &[row])
}

fn line_potential(args: &EigenLineArgs) -> Result<(line::SampledPotential1D, InequalityParams), KltError> {
    let pr = make_params(args.d, args.q)?;
    if let Some(path) = &args.potential {
        return Ok((line::load_potential_1d(path)?, pr));
    }
    let mu = args.optimal_mu.ok_or_else(|| {
        KltError::invalid("one of --potential or --optimal-mu is required".to_string())
    })?;
    let vopt = params::optimal_potential(mu, &pr)?;
    let grid = if args.window > 0.0 {
        Grid1D::symmetric(args.window, args.grid_n)?
    } else {
        vopt.default_grid(args.grid_n)?
    };
    Ok((vopt.sample(grid), pr))
}

fn cmd_eigen_line(cli: &Cli, args: &EigenLineArgs) -> Result<(), KltError> {
    let (v, _pr) = line_potential(args)?;
    if v.boundary_defect() > 1e-6 {
        eprintln!(
            "warning: potential is {:.1e} of its maximum at the window edge; widen the grid",
            v.boundary_defect()
        );
    }
    let r = line::ground_state_1d(&v)?;
    let mut row = Row::new();
    row.push("schema", SCHEMA_VERSION as f64);
    row.push("eigenvalue", r.eigenvalue);
    row.push("eigenvalue_raw", r.eigenvalue_h);
    row.push("lambda1", r.lambda1);
    row.push("residual", r.residual);
    row.push("error_estimate", r.error_estimate);
    row.push("boundary_defect", r.boundary_defect);
    row.push("grid_n", v.grid.n() as f64);
    row.push("s_min", v.grid.s_min());
    row.push("s_max", v.grid.s_max());
    emit_rows(cli, &[row])
}

fn cmd_eigen_cylinder(cli: &Cli, args: &EigenCylinderArgs) -> Result<(), KltError> {
    let pr = make_params(args.sphere_d, args.q)?;
    let spec = if let Some(path) = &args.manifold {
        load_manifold_spec(path)?
    } else {
        sphere_spec(args.sphere_d, args.l_max)?
    };

    if let Some(path) = &args.potential2d {
        let v2 = cylinder::load_potential_2d(path)?;
        let r = cylinder::ground_state_2d_oracle(&v2, None)?;
        let mut row = Row::new();
        row.push("schema", SCHEMA_VERSION as f64);
        row.push("eigenvalue", r.eigenvalue);
        row.push("eigenvalue_raw", r.eigenvalue_h);
        row.push("lambda1", r.lambda1);
        row.push("residual", r.residual);
        row.push("error_estimate", r.error_estimate);
        return emit_rows(cli, &[row]);
    }

    let v = if let Some(path) = &args.potential {
        line::load_potential_1d(path)?
    } else {
        let mu = args.optimal_mu.ok_or_else(|| {
            KltError::invalid("one of --potential, --potential2d or --optimal-mu is required")
        })?;
        let vopt = params::optimal_potential(mu, &pr)?;
        vopt.sample(vopt.default_grid(args.grid_n)?)
    };
    let r = cylinder::ground_state_symmetric(&v, &spec, None)?;
    match cli.format {
        Format::Csv => write_out(cli.output.as_deref(), &r.to_csv()),
        Format::Json => {
            let modes: Vec<serde_json::Value> = r
                .modes
                .iter()
                .map(|m| {
                    serde_json::json!({
                        "ell": m.ell,
                        "lambda_ell": m.lambda_ell,
                        "multiplicity": m.multiplicity,
                        "e_ell": m.e_ell,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "schema": SCHEMA_VERSION,
                "eigenvalue": r.eigenvalue,
                "min_mode": r.min_mode,
                "residual": r.base.residual,
                "error_estimate": r.base.error_estimate,
                "grid_n": v.grid.n(),
                "modes": modes,
            });
            write_out(cli.output.as_deref(), &format!("{doc}\n"))
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<OptimizerConfig, KltError> {
    match path {
        Some(p) => OptimizerConfig::load(p),
        None => Ok(OptimizerConfig::default()),
    }
}

fn cmd_threshold(cli: &Cli, args: &ThresholdArgs) -> Result<(), KltError> {
    let pr = make_params(args.d, args.q)?;
    let spec = args
        .manifold
        .resolve(args.d)?
        .map_or_else(|| sphere_spec(args.d, args.manifold.l_max), Ok)?;
    let mut cfg = load_config(args.config.as_ref())?;
    cfg.threshold_tol = args.tol;
    let rp = RigidityParams::standard(&pr, spec.kappa, spec.lambda1());
    let (bound_lo, bound_hi) = mu_star_bounds(&rp, &pr)?;
    let (mu_lo, mu_hi) = threshold_search(&pr, &spec, &cfg)?;
    let mut row = Row::new();
    row.push("schema", SCHEMA_VERSION as f64);
    row.push("d", args.d as f64);
    row.push("q", pr.q);
    row.push("mu_star_lower_bound", bound_lo);
    row.push("mu_star_upper_bound", bound_hi);
    row.push("bracket_lo", mu_lo);
    row.push("bracket_hi", mu_hi);
    row.push("bracket_tol", cfg.threshold_tol);
    row.push("detector_grid_n", cfg.grid_n as f64);
    row.push("detector_grid_m", cfg.grid_m as f64);
    row.push("detector_tol", cfg.tol);
    emit_rows(cli, &[row])
}

fn parse_range(text: &str) -> Result<Vec<f64>, KltError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(KltError::invalid(format!("--mu expects start:end:count, got {text}")));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| KltError::invalid(format!("bad range start: {}", parts[0])))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| KltError::invalid(format!("bad range end: {}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| KltError::invalid(format!("bad range count: {}", parts[2])))?;
    if count == 0 || !(start > 0.0) || !(end >= start) {
        return Err(KltError::invalid("range must satisfy 0 < start <= end, count >= 1"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (count as f64 - 1.0);
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<(), KltError> {
    let pr = make_params(args.d, args.q)?;
    let spec = args
        .manifold
        .resolve(args.d)?
        .map_or_else(|| sphere_spec(args.d, args.manifold.l_max), Ok)?;
    let cfg = load_config(args.config.as_ref())?;
    let mode = match args.mode {
        Some(SweepMode::Symmetric) => OptMode::Symmetric,
        Some(SweepMode::General2d) => OptMode::General2d,
        None => {
            if args.d == 2 {
                OptMode::General2d
            } else {
                OptMode::Symmetric
            }
        }
    };
    let mus = parse_range(&args.mu)?;
    let jobs = args
        .jobs
        .or_else(|| std::env::var("KLT_JOBS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1)
        .max(1);

    let solve_one = |mu: &f64| -> Result<SweepRecord, KltError> {
        let out = capital_lambda(*mu, &pr, &spec, mode, &cfg)?;
        let lr = lambda_r(*mu, &pr)?;
        Ok(SweepRecord::from_state(*mu, out.lambda, lr, &out.state, cfg.tol))
    };

    // Rows are collected and sorted by μ so concurrency never changes the
    // output bytes.
    let mut records: Vec<SweepRecord> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| KltError::invalid(format!("thread pool: {e}")))?;
        use rayon::prelude::*;
        pool.install(|| mus.par_iter().map(solve_one).collect::<Result<Vec<_>, _>>())?
    } else {
        mus.iter().map(solve_one).collect::<Result<Vec<_>, _>>()?
    };
    records.sort_by(|a, b| a.mu.partial_cmp(&b.mu).unwrap());

    match cli.format {
        Format::Json => {
            let mut text = String::new();
            for r in &records {
                text.push_str(&r.to_json_line());
                text.push('\n');
            }
            write_out(cli.output.as_deref(), &text)
        }
        Format::Csv => {
            let mut text = String::from(
                "schema,mu,lambda,lambda_r,symmetry_fraction,iterations,residual,grid_n,grid_m,tol\n",
            );
            for r in &records {
                text.push_str(&csv_row(&[
                    r.schema.to_string(),
                    r.mu.to_string(),
                    r.lambda.to_string(),
                    r.lambda_r.to_string(),
                    r.symmetry_fraction.to_string(),
                    r.iterations.to_string(),
                    r.residual.to_string(),
                    r.grid_n.to_string(),
                    r.grid_m.to_string(),
                    r.tol.to_string(),
                ]));
            }
            write_out(cli.output.as_deref(), &text)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliFailure> {
    let results = klt_core::verify::run_all(args.quick);
    let mut failed = 0;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in &results {
        let _ = writeln!(out, "{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliFailure::Verification(failed));
    }
    Ok(())
}

fn emit_rows(cli: &Cli, rows: &[Row]) -> Result<(), KltError> {
    let text = match cli.format {
        Format::Json => rows.iter().map(|r| r.to_json_line()).collect::<String>(),
        Format::Csv => {
            let mut text = String::new();
            if let Some(first) = rows.first() {
                text.push_str(&csv_row(&first.keys()));
                for r in rows {
                    text.push_str(&csv_row(&r.values_as_strings()));
                }
            }
            text
        }
    };
    write_out(cli.output.as_deref(), &text)
}
