//! `catcmc` — command-line front end for the catenoidal-neck CMC solvers.
//!
//! Commands: `solve-neck`, `solve-disk`, `sweep-tau`, `derivative`,
//! `nondegeneracy`, `verify`. Every command reads an optional TOML config
//! (`--config`), with command-line flags taking precedence, and writes a
//! versioned `report.json` plus plot-ready CSV tables into `--out-dir`
//! (default `out`). Reports contain nothing time- or machine-dependent, so a
//! given config always produces byte-identical artifacts.
//!
//! Exit codes: 0 success; 1 internal/runtime failure (including failed
//! verification checks); 2 configuration error (bad flags, bad config file,
//! out-of-range parameters, disallowed boundary modes); 3 solver
//! non-convergence; 4 degenerate immersion; 5 near-singular neck length.
//! Failures print a single-line machine-readable JSON error record to
//! stderr.
//!
//! `CATCMC_THREADS` caps the number of worker threads used by the sweep
//! commands; results are independent of the thread count.

mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use catcmc::disk::{disk_params, solve_cmc_disk_with, CutoffBand, DiskBoundary, DiskSolveOptions};
use catcmc::experiments::{
    derivative_comparison_at, improved_decay_experiment, tau_continuity_experiment,
    DerivativeComparisonOptions, SweepGrid,
};
use catcmc::geometry::neck_params;
use catcmc::linear::{
    locate_singular_length, min_singular_value, singular_length_exact, BoundaryData,
};
use catcmc::modes::to_spectrum;
use catcmc::nonlinear::{solve_cmc_neck_with, SolveOptions};
use catcmc::{CylinderField, NeckParams};

use config::{
    merge_mode_map, modes_json, synthesize, validate_modes, ConfigError, FileConfig, ModeCoeff,
};
use output::{fmt, report_document, ring_mode_magnitudes, write_csv, write_report};

#[derive(Parser)]
#[command(
    name = "catcmc",
    version,
    about = "Constant-mean-curvature solves on catenoidal necks and the unit disk"
)]
struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for report.json and CSV tables (default: out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Permit lower modes (|k| <= 1) in boundary data; they are stripped
    /// with a warning instead of rejected.
    #[arg(long, global = true)]
    lower_modes_allowed: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the prescribed-curvature problem on one neck.
    SolveNeck {
        /// Neck scale in (0, 1).
        #[arg(long)]
        tau: Option<f64>,
        /// Prescribed mean-curvature offset.
        #[arg(long)]
        delta: Option<f64>,
        /// Decay weight exponent used for reported norms.
        #[arg(long)]
        gamma: Option<f64>,
        /// Angular nodes (power of two).
        #[arg(long)]
        n_x: Option<usize>,
        /// Latitude nodes (odd); default derives from a spacing target.
        #[arg(long)]
        n_s: Option<usize>,
        /// Convergence tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Boundary mode on the s = -l circle, as k:cos[:sin]; repeatable.
        /// When given, replaces the config file's [boundary.minus] table.
        #[arg(long = "minus-mode")]
        minus_mode: Vec<String>,
        /// Boundary mode on the s = +l circle, as k:cos[:sin]; repeatable.
        #[arg(long = "plus-mode")]
        plus_mode: Vec<String>,
    },
    /// Solve the limiting graph equation on the unit disk.
    SolveDisk {
        #[arg(long)]
        delta: Option<f64>,
        /// Radial rings.
        #[arg(long)]
        n_r: Option<usize>,
        /// Angular nodes (power of two).
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Boundary mode on the unit circle, as k:cos[:sin]; repeatable.
        #[arg(long = "disk-mode")]
        disk_mode: Vec<String>,
    },
    /// Sweep the neck scale: decay fits and distance to the disk limit.
    SweepTau {
        /// Comma-separated neck scales.
        #[arg(long, value_delimiter = ',')]
        tau_list: Option<Vec<f64>>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        n_x: Option<usize>,
        #[arg(long = "minus-mode")]
        minus_mode: Vec<String>,
        #[arg(long = "plus-mode")]
        plus_mode: Vec<String>,
    },
    /// Finite-difference tau-derivative vs the disk-limit derivative.
    Derivative {
        /// Comma-separated base scales tau0.
        #[arg(long, value_delimiter = ',')]
        tau_list: Option<Vec<f64>>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        n_x: Option<usize>,
        /// Step fraction: dtau = dtau_frac * tau0, in (0, 0.1].
        #[arg(long)]
        dtau_frac: Option<f64>,
        #[arg(long = "minus-mode")]
        minus_mode: Vec<String>,
        #[arg(long = "plus-mode")]
        plus_mode: Vec<String>,
    },
    /// Sweep the neck half-length and table the smallest singular value of
    /// the lower-mode boundary problems.
    Nondegeneracy {
        #[arg(long)]
        lmin: Option<f64>,
        #[arg(long)]
        lmax: Option<f64>,
        /// Number of sweep points.
        #[arg(long)]
        steps: Option<usize>,
        /// Latitude nodes for each probe.
        #[arg(long)]
        n_s: Option<usize>,
    },
    /// Run the acceptance checks and report pass/fail per check.
    Verify {
        /// Which suite to run; only "all" exists.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

/// Anything that can stop a run, with its exit code and record kind.
#[derive(Debug)]
enum CliError {
    Config(String),
    Solver(catcmc::Error),
    Io(std::io::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<catcmc::Error> for CliError {
    fn from(e: catcmc::Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(e) => match e {
                // bad user-supplied values caught by library validation
                catcmc::Error::Domain(_) | catcmc::Error::ModeContent { .. } => 2,
                catcmc::Error::NoConvergence { .. } => 3,
                catcmc::Error::DegenerateImmersion { .. } => 4,
                catcmc::Error::NearSingularLength { .. } => 5,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(e) => match e {
                catcmc::Error::Domain(_) | catcmc::Error::ModeContent { .. } => "config",
                catcmc::Error::NoConvergence { .. } => "no_convergence",
                catcmc::Error::DegenerateImmersion { .. } => "degenerate_immersion",
                catcmc::Error::NearSingularLength { .. } => "near_singular_length",
                _ => "solver",
            },
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Solver(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        fail(&e.into());
    }
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => fail(&e),
    }
}

/// Print the machine-readable error record and exit.
fn fail(e: &CliError) -> ! {
    let record = json!({
        "error": {
            "kind": e.kind(),
            "exit_code": e.exit_code(),
            "message": e.message(),
        }
    });
    eprintln!("{record}");
    std::process::exit(e.exit_code());
}

/// Honor CATCMC_THREADS as a cap on worker threads.
fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("CATCMC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        ConfigError(format!(
            "CATCMC_THREADS = '{raw}' must be a positive integer"
        ))
    })?;
    // a second initialization attempt is harmless: the first pool wins
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .ok();
    Ok(())
}

/// Resolved common context: config file, output directory, mode policy.
struct Ctx {
    file: FileConfig,
    out_dir: PathBuf,
    lower_allowed: bool,
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Map a parameter-construction failure to a config error (exit 2): grid
/// sizes and scales are user input.
fn cfg(e: catcmc::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let out_dir = cli
        .out_dir
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let lower_allowed = cli.lower_modes_allowed || file.lower_modes_allowed.unwrap_or(false);
    let ctx = Ctx {
        file,
        out_dir,
        lower_allowed,
    };
    match cli.command {
        Command::SolveNeck {
            tau,
            delta,
            gamma,
            n_x,
            n_s,
            tol,
            max_iter,
            minus_mode,
            plus_mode,
        } => cmd_solve_neck(
            &ctx,
            tau,
            delta,
            gamma,
            n_x,
            n_s,
            tol,
            max_iter,
            &minus_mode,
            &plus_mode,
        ),
        Command::SolveDisk {
            delta,
            n_r,
            n_theta,
            tol,
            max_iter,
            disk_mode,
        } => cmd_solve_disk(&ctx, delta, n_r, n_theta, tol, max_iter, &disk_mode),
        Command::SweepTau {
            tau_list,
            delta,
            gamma,
            n_x,
            minus_mode,
            plus_mode,
        } => cmd_sweep_tau(&ctx, tau_list, delta, gamma, n_x, &minus_mode, &plus_mode),
        Command::Derivative {
            tau_list,
            delta,
            gamma,
            n_x,
            dtau_frac,
            minus_mode,
            plus_mode,
        } => cmd_derivative(
            &ctx,
            tau_list,
            delta,
            gamma,
            n_x,
            dtau_frac,
            &minus_mode,
            &plus_mode,
        ),
        Command::Nondegeneracy {
            lmin,
            lmax,
            steps,
            n_s,
        } => cmd_nondegeneracy(&ctx, lmin, lmax, steps, n_s),
        Command::Verify { suite } => cmd_verify(&ctx, &suite),
    }
}

/// Resolve both neck boundary circles from config plus flags.
fn neck_boundary(
    ctx: &Ctx,
    n_x: usize,
    minus_flags: &[String],
    plus_flags: &[String],
    warnings: &mut Vec<String>,
) -> Result<(Vec<ModeCoeff>, Vec<ModeCoeff>), CliError> {
    let minus_map = merge_mode_map(&ctx.file.boundary.minus, minus_flags)?;
    let plus_map = merge_mode_map(&ctx.file.boundary.plus, plus_flags)?;
    let cm = validate_modes(&minus_map, n_x, ctx.lower_allowed, "minus", warnings)?;
    let cp = validate_modes(&plus_map, n_x, ctx.lower_allowed, "plus", warnings)?;
    for w in warnings.iter() {
        eprintln!("warning: {w}");
    }
    Ok((cm, cp))
}

fn tau_list_config(
    flag: Option<Vec<f64>>,
    file: Option<Vec<f64>>,
    default: &[f64],
) -> Result<Vec<f64>, ConfigError> {
    let list = flag.or(file).unwrap_or_else(|| default.to_vec());
    if list.is_empty() {
        return Err(ConfigError("tau_list must not be empty".into()));
    }
    for &t in &list {
        if !(0.0 < t && t < 1.0) {
            return Err(ConfigError(format!("tau = {t} must lie in (0, 1)")));
        }
    }
    for w in list.windows(2) {
        if w[1] >= w[0] {
            return Err(ConfigError(
                "tau_list must be strictly decreasing (the sweeps measure limits tau -> 0)".into(),
            ));
        }
    }
    Ok(list)
}

/// Per-latitude profile table of a neck field: latitude, radius, angular
/// sup, then the magnitude of each angular mode.
fn neck_profile_rows(
    u: &CylinderField,
    params: NeckParams,
) -> (Vec<&'static str>, Vec<Vec<String>>) {
    const MODE_NAMES: [&str; 9] = [
        "mode_0", "mode_1", "mode_2", "mode_3", "mode_4", "mode_5", "mode_6", "mode_7", "mode_8",
    ];
    let k_max = (params.n_x / 2).min(MODE_NAMES.len() - 1);
    let mut header = vec!["s", "omega", "sup_x", "physical_sup"];
    header.extend_from_slice(&MODE_NAMES[..=k_max]);
    let spec = to_spectrum(u);
    let mut rows = Vec::with_capacity(params.n_s);
    for j in 0..params.n_s {
        let s = params.s(j);
        let omega = params.omega(s);
        let sup = (0..params.n_x)
            .map(|i| u.values[[i, j]].abs())
            .fold(0.0f64, f64::max);
        let mut row = vec![fmt(s), fmt(omega), fmt(sup), fmt(sup * omega)];
        for k in 0..=k_max {
            row.push(fmt(spec.coeffs[[spec.index_of(k as i64), j]].norm()));
        }
        rows.push(row);
    }
    (header, rows)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve_neck(
    ctx: &Ctx,
    tau: Option<f64>,
    delta: Option<f64>,
    gamma: Option<f64>,
    n_x: Option<usize>,
    n_s: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    minus_flags: &[String],
    plus_flags: &[String],
) -> Result<i32, CliError> {
    let tau = pick(tau, ctx.file.tau, 0.1);
    let delta = pick(delta, ctx.file.delta, 1e-3);
    let gamma = pick(gamma, ctx.file.gamma, 0.5);
    let n_x = pick(n_x, ctx.file.n_x, 16);
    let params = match n_s.or(ctx.file.n_s) {
        Some(n_s) => neck_params(tau, gamma, n_x, n_s).map_err(cfg)?,
        None => SweepGrid {
            n_x,
            ..SweepGrid::default()
        }
        .neck(tau, gamma)
        .map_err(cfg)?,
    };
    let mut warnings = Vec::new();
    let (cm, cp) = neck_boundary(ctx, n_x, minus_flags, plus_flags, &mut warnings)?;
    let f = BoundaryData::from_fn(params, |x| synthesize(&cm, x), |x| synthesize(&cp, x));

    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        tol: tol.or(ctx.file.tol),
        max_iter: pick(max_iter, ctx.file.max_iter, defaults.max_iter),
        ..defaults
    };
    let (u, solve) = solve_cmc_neck_with(params, delta, &f, &opts)?;

    let (header, rows) = neck_profile_rows(&u, params);
    write_csv(&ctx.out_dir.join("profile.csv"), &header, &rows)?;

    let physical_sup = (0..params.n_x)
        .flat_map(|i| (0..params.n_s).map(move |j| (i, j)))
        .map(|(i, j)| (u.values[[i, j]] * params.omega(params.s(j))).abs())
        .fold(0.0f64, f64::max);
    let config_echo = json!({
        "tau": tau,
        "delta": delta,
        "gamma": gamma,
        "n_x": params.n_x,
        "n_s": params.n_s,
        "half_length": params.l,
        "tol": opts.tol,
        "max_iter": opts.max_iter,
        "boundary": { "minus": modes_json(&cm), "plus": modes_json(&cp) },
    });
    let results = json!({
        "solve": serde_json::to_value(&solve).expect("serializable"),
        "physical_sup": physical_sup,
        "tables": ["profile.csv"],
    });
    let report = report_document("solve-neck", config_echo, &warnings, results);
    write_report(&ctx.out_dir, &report)?;
    println!(
        "solve-neck: tau = {tau}, converged = {}, residual = {:e}, report in {}",
        solve.converged,
        solve.residual,
        ctx.out_dir.display()
    );
    Ok(0)
}

fn cmd_solve_disk(
    ctx: &Ctx,
    delta: Option<f64>,
    n_r: Option<usize>,
    n_theta: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    disk_flags: &[String],
) -> Result<i32, CliError> {
    let delta = pick(delta, ctx.file.delta, 1e-3);
    let n_r = pick(n_r, ctx.file.n_r, 200);
    let n_theta = pick(n_theta, ctx.file.n_theta, 16);
    let params = disk_params(n_r, n_theta).map_err(cfg)?;

    let disk_map = merge_mode_map(&ctx.file.boundary.disk, disk_flags)?;
    let mut warnings = Vec::new();
    let coeffs = validate_modes(&disk_map, n_theta, ctx.lower_allowed, "disk", &mut warnings)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let bc = DiskBoundary::from_fn(n_theta, |theta| synthesize(&coeffs, theta));

    let defaults = DiskSolveOptions::default();
    let opts = DiskSolveOptions {
        tol: tol.or(ctx.file.tol),
        max_iter: pick(max_iter, ctx.file.max_iter, defaults.max_iter),
        ..defaults
    };
    let (h, solve) = solve_cmc_disk_with(delta, &bc, params, &opts)?;

    let k_max = n_theta / 2;
    let mode_names: Vec<String> = (0..=k_max).map(|k| format!("mode_{k}")).collect();
    let mut header: Vec<&str> = vec!["r", "sup_theta"];
    header.extend(mode_names.iter().map(String::as_str));
    let mut rows = Vec::with_capacity(n_r + 1);
    let mut origin_row = vec![fmt(0.0), fmt(h.origin.abs()), fmt(h.origin.abs())];
    origin_row.extend(std::iter::repeat_n(fmt(0.0), k_max));
    rows.push(origin_row);
    for j in 0..n_r {
        let ring: Vec<f64> = (0..n_theta).map(|i| h.values[[i, j]]).collect();
        let sup = ring.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut row = vec![fmt(params.r(j)), fmt(sup)];
        for m in ring_mode_magnitudes(&ring, k_max) {
            row.push(fmt(m));
        }
        rows.push(row);
    }
    write_csv(&ctx.out_dir.join("profile.csv"), &header, &rows)?;

    let config_echo = json!({
        "delta": delta,
        "n_r": n_r,
        "n_theta": n_theta,
        "tol": opts.tol,
        "max_iter": opts.max_iter,
        "boundary": { "disk": modes_json(&coeffs) },
    });
    let results = json!({
        "solve": serde_json::to_value(&solve).expect("serializable"),
        "tables": ["profile.csv"],
    });
    let report = report_document("solve-disk", config_echo, &warnings, results);
    write_report(&ctx.out_dir, &report)?;
    println!(
        "solve-disk: converged = {}, residual = {:e}, origin value = {:e}, report in {}",
        solve.converged,
        solve.residual,
        solve.origin_value,
        ctx.out_dir.display()
    );
    Ok(0)
}

fn cmd_sweep_tau(
    ctx: &Ctx,
    tau_list: Option<Vec<f64>>,
    delta: Option<f64>,
    gamma: Option<f64>,
    n_x: Option<usize>,
    minus_flags: &[String],
    plus_flags: &[String],
) -> Result<i32, CliError> {
    let tau_list = tau_list_config(
        tau_list,
        ctx.file.tau_list.clone(),
        &[0.2, 0.1, 0.05, 0.025],
    )?;
    let delta = pick(delta, ctx.file.delta, 1e-3);
    let gamma = pick(gamma, ctx.file.gamma, 0.5);
    let n_x = pick(n_x, ctx.file.n_x, 16);
    let grid = SweepGrid {
        n_x,
        ..SweepGrid::default()
    };
    let mut warnings = Vec::new();
    let (cm, cp) = neck_boundary(ctx, n_x, minus_flags, plus_flags, &mut warnings)?;
    let fm = |x: f64| synthesize(&cm, x);
    let fp = |x: f64| synthesize(&cp, x);

    let band = CutoffBand::default();
    let dp = grid.disk().map_err(cfg)?;
    let decay = tau_list
        .par_iter()
        .map(|&tau| {
            let p = grid.neck(tau, gamma)?;
            let f = BoundaryData::from_fn(p, fm, fp);
            improved_decay_experiment(p, delta, &f, dp, &band)
        })
        .collect::<catcmc::Result<Vec<_>>>()?;
    let continuity = tau_continuity_experiment(delta, fm, fp, &tau_list, gamma, &grid, &band)?;

    let header = [
        "tau",
        "decay_exponent",
        "fit_r2",
        "fit_points",
        "norm_gamma_one",
        "lower_norm_over_tau",
        "continuity_distance",
        "sheet_distance_over_tau",
    ];
    let rows: Vec<Vec<String>> = decay
        .iter()
        .zip(&continuity.rows)
        .map(|(d, c)| {
            vec![
                fmt(d.tau),
                fmt(d.fit.exponent),
                fmt(d.fit.r_squared),
                format!("{}", d.fit.points),
                fmt(d.norm_gamma_one),
                fmt(d.lower_norm_over_tau),
                fmt(c.distance),
                fmt(c.sheet_distance_over_tau),
            ]
        })
        .collect();
    write_csv(&ctx.out_dir.join("sweep.csv"), &header, &rows)?;

    let config_echo = json!({
        "tau_list": tau_list,
        "delta": delta,
        "gamma": gamma,
        "n_x": n_x,
        "boundary": { "minus": modes_json(&cm), "plus": modes_json(&cp) },
    });
    let results = json!({
        "decay": serde_json::to_value(&decay).expect("serializable"),
        "continuity": serde_json::to_value(&continuity).expect("serializable"),
        "tables": ["sweep.csv"],
    });
    let report = report_document("sweep-tau", config_echo, &warnings, results);
    write_report(&ctx.out_dir, &report)?;
    println!(
        "sweep-tau: {} scales, continuity slope = {:.3}, report in {}",
        tau_list.len(),
        continuity.fit.exponent,
        ctx.out_dir.display()
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_derivative(
    ctx: &Ctx,
    tau_list: Option<Vec<f64>>,
    delta: Option<f64>,
    gamma: Option<f64>,
    n_x: Option<usize>,
    dtau_frac: Option<f64>,
    minus_flags: &[String],
    plus_flags: &[String],
) -> Result<i32, CliError> {
    let tau_list = tau_list_config(tau_list, ctx.file.tau_list.clone(), &[0.1, 0.05, 0.025])?;
    let delta = pick(delta, ctx.file.delta, 5e-3);
    let gamma = pick(gamma, ctx.file.gamma, 0.5);
    let n_x = pick(n_x, ctx.file.n_x, 16);
    let dtau_frac = pick(dtau_frac, ctx.file.dtau_frac, 0.05);
    if !(0.0 < dtau_frac && dtau_frac <= 0.1) {
        return Err(CliError::Config(format!(
            "dtau_frac = {dtau_frac} must lie in (0, 0.1]"
        )));
    }
    let grid = SweepGrid {
        n_x,
        ..SweepGrid::default()
    };
    let mut warnings = Vec::new();
    let (cm, cp) = neck_boundary(ctx, n_x, minus_flags, plus_flags, &mut warnings)?;
    let fm = |x: f64| synthesize(&cm, x);
    let fp = |x: f64| synthesize(&cp, x);
    let opts = DerivativeComparisonOptions {
        dtau_frac,
        ..DerivativeComparisonOptions::default()
    };

    let outcomes = tau_list
        .par_iter()
        .map(|&tau0| derivative_comparison_at(tau0, delta, fm, fp, gamma, &grid, &opts))
        .collect::<catcmc::Result<Vec<_>>>()?;
    let rows: Vec<_> = outcomes.iter().map(|(row, _)| row.clone()).collect();

    let header = ["tau", "annulus_sup", "richardson"];
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt(r.tau), fmt(r.annulus_sup), fmt(r.richardson)])
        .collect();
    write_csv(&ctx.out_dir.join("derivative.csv"), &header, &table)?;

    // profile of the finite-difference derivative at the smallest scale
    let (last_row, last_field) = outcomes.last().expect("tau_list is non-empty");
    let p = last_field.params;
    let profile: Vec<Vec<String>> = (0..p.n_s)
        .map(|j| {
            let s = p.s(j);
            let sup = (0..p.n_x)
                .map(|i| last_field.values[[i, j]].abs())
                .fold(0.0f64, f64::max);
            vec![fmt(s), fmt(p.omega(s)), fmt(sup)]
        })
        .collect();
    write_csv(
        &ctx.out_dir.join("derivative_profile.csv"),
        &["s", "omega", "sup_x"],
        &profile,
    )?;

    // sweep extrapolation: treat the last two sweep values like a
    // first-order Richardson pair
    let n = rows.len();
    let sweep_extrapolation = if n >= 2 {
        Some((rows[n - 2].annulus_sup - rows[n - 1].annulus_sup).abs() / 3.0)
    } else {
        None
    };
    let config_echo = json!({
        "tau_list": tau_list,
        "delta": delta,
        "gamma": gamma,
        "n_x": n_x,
        "dtau_frac": dtau_frac,
        "annulus": opts.annulus,
        "boundary": { "minus": modes_json(&cm), "plus": modes_json(&cp) },
    });
    let results = json!({
        "rows": serde_json::to_value(&rows).expect("serializable"),
        "sweep_extrapolation": sweep_extrapolation,
        "profile_tau": last_row.tau,
        "tables": ["derivative.csv", "derivative_profile.csv"],
    });
    let report = report_document("derivative", config_echo, &warnings, results);
    write_report(&ctx.out_dir, &report)?;
    println!(
        "derivative: {} scales, smallest-scale annulus sup = {:e}, report in {}",
        rows.len(),
        last_row.annulus_sup,
        ctx.out_dir.display()
    );
    Ok(0)
}

fn cmd_nondegeneracy(
    ctx: &Ctx,
    lmin: Option<f64>,
    lmax: Option<f64>,
    steps: Option<usize>,
    n_s: Option<usize>,
) -> Result<i32, CliError> {
    let lmin = pick(lmin, ctx.file.lmin, 0.5);
    let lmax = pick(lmax, ctx.file.lmax, 3.0);
    let steps = pick(steps, ctx.file.steps, 200);
    let n_s = pick(n_s, ctx.file.n_s, 401);
    if !(0.0 < lmin && lmin < lmax) {
        return Err(CliError::Config(format!(
            "need 0 < lmin < lmax, got lmin = {lmin}, lmax = {lmax}"
        )));
    }
    if steps < 2 {
        return Err(CliError::Config(format!(
            "steps = {steps} must be at least 2"
        )));
    }
    if n_s < 9 || n_s.is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "n_s = {n_s} must be odd and at least 9"
        )));
    }

    let table: Vec<(f64, f64, f64)> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let l = lmin + (lmax - lmin) * i as f64 / (steps - 1) as f64;
            (
                l,
                min_singular_value(l, 0, n_s),
                min_singular_value(l, 1, n_s),
            )
        })
        .collect();
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|&(l, s0, s1)| vec![fmt(l), fmt(s0), fmt(s1)])
        .collect();
    write_csv(
        &ctx.out_dir.join("nondegeneracy.csv"),
        &["l", "min_singular_k0", "min_singular_k1"],
        &rows,
    )?;

    let (argmin_l, min_value) =
        table
            .iter()
            .map(|&(l, s0, _)| (l, s0))
            .fold((f64::NAN, f64::INFINITY), |acc, cur| {
                if cur.1 < acc.1 {
                    cur
                } else {
                    acc
                }
            });
    let root = locate_singular_length(n_s);
    let exact = singular_length_exact();
    let config_echo = json!({
        "lmin": lmin,
        "lmax": lmax,
        "steps": steps,
        "n_s": n_s,
    });
    let results = json!({
        "argmin_l": argmin_l,
        "min_singular_value": min_value,
        "singular_length_bisection": root,
        "singular_length_exact": exact,
        "gap_to_sqrt2": (exact - std::f64::consts::SQRT_2).abs(),
        "tables": ["nondegeneracy.csv"],
    });
    let report = report_document("nondegeneracy", config_echo, &[], results);
    write_report(&ctx.out_dir, &report)?;
    println!(
        "nondegeneracy: min singular value {:e} at l = {:.5} (singular length {:.5}), report in {}",
        min_value,
        argmin_l,
        exact,
        ctx.out_dir.display()
    );
    Ok(0)
}

fn cmd_verify(ctx: &Ctx, suite: &str) -> Result<i32, CliError> {
    if suite != "all" {
        return Err(CliError::Config(format!(
            "unknown suite '{suite}'; only 'all' exists"
        )));
    }
    let checks = catcmc::verify::run_all();
    for c in &checks {
        println!(
            "check {:>2} {:<24} {} {}",
            c.index,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("verify: {passed}/{} checks passed", checks.len());

    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                format!("{}", c.index),
                c.name.to_string(),
                format!("{}", c.passed),
            ]
        })
        .collect();
    write_csv(
        &ctx.out_dir.join("verify.csv"),
        &["index", "name", "passed"],
        &rows,
    )?;
    let config_echo = json!({ "suite": suite });
    let results = serde_json::to_value(&checks).expect("serializable");
    let report = report_document("verify", config_echo, &[], results);
    write_report(&ctx.out_dir, &report)?;
    Ok(if passed == checks.len() { 0 } else { 1 })
}
