//! Command line front end: fiber snapshots, extremal curves, branch solves,
//! parameter-plane scans, and the randomized identity suite. All floats in
//! emitted artifacts carry 17 significant digits, so a repeated run with the
//! same config, flags, and seed reproduces every file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use nehari_core::artifacts::{self, float17};
use nehari_core::{
    extremal_curve, minimize_lambda_star, solve_branch1, solve_branch2, verify_lemma_suite,
    DescentOpts, Error, Exponents, Fiber, GridSpec, NormTuple, QuotientFamily, Result, RunConfig,
    Sign, VerifyOpts,
};
use rayon::prelude::*;

// Exit codes: 0 success, 2 bad invocation or inadmissible parameters, 3 the
// requested point violates a solvability precondition (lambda at or above the
// cap, mu outside the root band, branch 2 without gamma > 1 + alpha), 4 an
// iteration ran out of budget, 1 anything else. Clap's own usage errors also
// exit with 2.
const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_UNCONVERGED: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Invalid(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Precondition(_) | Error::UnsupportedRegime(_) => EXIT_PRECONDITION,
        Error::Numerical(_) => EXIT_UNCONVERGED,
        Error::Io(_) => 1,
    }
}

#[derive(Parser)]
#[command(
    name = "nehari",
    version,
    about = "Fiber analysis, extremal curves, and branch solves for a three-power Dirichlet problem"
)]
struct Cli {
    /// Print the effective TOML configuration (the subcommand's --config if
    /// given, the embedded defaults otherwise) and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar snapshot of one ray: peaks, caps, critical points, mu band.
    Fiber(FiberArgs),
    /// Tabulate the four mu extremal values over a lambda grid into CSV.
    Extremal(ExtremalArgs),
    /// Solve one branch at (lambda, mu) and write the report plus the field.
    Solve(SolveArgs),
    /// Classify both branches on every cell of a (lambda, mu) product grid.
    Scan(ScanArgs),
    /// Run the randomized identity suite; fails on any violated relation.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FiberArgs {
    /// Absorption exponent, 1 < q < alpha.
    #[arg(long)]
    q: f64,
    /// Sublinear source exponent, q < alpha < 2.
    #[arg(long)]
    alpha: f64,
    /// Superlinear source exponent, 2 < gamma < 2*.
    #[arg(long)]
    gamma: f64,
    /// Space dimension entering the Sobolev bound on gamma.
    #[arg(long, default_value_t = 1)]
    dim: u32,
    /// Gradient mass of the ray's base point.
    #[arg(long)]
    a: f64,
    /// q-norm mass.
    #[arg(long)]
    b: f64,
    /// alpha-norm mass.
    #[arg(long)]
    c: f64,
    /// gamma-norm mass.
    #[arg(long)]
    d: f64,
    /// Absorption weight, > 0.
    #[arg(long)]
    lambda: f64,
    /// Optional mu level; adds the stationarity roots to the snapshot.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct ExtremalArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Inclusive lambda grid as lo:hi:count.
    #[arg(long, value_parser = parse_lin_grid)]
    lambda_grid: LinGrid,
    /// Curve CSV path; the cap sidecar lands next to it as *.caps.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Absorption weight, > 0.
    #[arg(long)]
    lambda: f64,
    /// Source weight.
    #[arg(long)]
    mu: f64,
    /// 1 for the fiber-minimum branch, 2 for the fiber-maximum branch.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    branch: u8,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report path; the solution lands next to it as *.field.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Inclusive lambda grid as lo:hi:count.
    #[arg(long, value_parser = parse_lin_grid)]
    lambda_grid: LinGrid,
    /// Inclusive mu grid as lo:hi:count.
    #[arg(long, value_parser = parse_lin_grid)]
    mu_grid: LinGrid,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Scan CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of sampled rays.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Optional CSV listing the violated relations.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Inclusive linear grid from a lo:hi:count flag.
#[derive(Clone, Debug)]
struct LinGrid {
    lo: f64,
    hi: f64,
    count: usize,
}

impl LinGrid {
    fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.lo + step * i as f64).collect()
    }
}

fn parse_lin_grid(s: &str) -> std::result::Result<LinGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:count, got {s:?}"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid endpoint {:?}", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid endpoint {:?}", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad grid count {:?}", parts[2]))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(format!("grid endpoints must be finite, got {s:?}"));
    }
    if count == 0 {
        return Err("grid count must be at least 1".into());
    }
    if count == 1 && lo != hi {
        return Err(format!("a single-point grid needs lo = hi, got {s:?}"));
    }
    if count > 1 && !(lo < hi) {
        return Err(format!("need lo < hi for a multi-point grid, got {s:?}"));
    }
    Ok(LinGrid { lo, hi, count })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    if cli.print_config {
        return match effective_config(cli.command.as_ref()) {
            Ok(cfg) => {
                print!("{}", cfg.to_toml_string());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e))
            }
        };
    }
    let Some(cmd) = cli.command else {
        let _ = Cli::command().print_help();
        return ExitCode::from(EXIT_USAGE);
    };
    match run(&cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Cap the rayon pool from NEHARI_WORKERS; unset means rayon's default.
fn init_workers() -> Result<()> {
    match std::env::var("NEHARI_WORKERS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    Error::Invalid(format!("NEHARI_WORKERS must be a positive integer, got {v:?}"))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Invalid(format!("worker pool: {e}")))
        }
        Err(_) => Ok(()),
    }
}

fn effective_config(cmd: Option<&Command>) -> Result<RunConfig> {
    match cmd {
        Some(Command::Extremal(a)) => load_config(&a.config),
        Some(Command::Solve(a)) => load_config(&a.config),
        Some(Command::Scan(a)) => load_config(&a.config),
        _ => Ok(RunConfig::default()),
    }
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    RunConfig::from_toml_str(&text)
}

fn write_artifact(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Sidecar path `report.ext` -> `report.tag` (tag carries its own extension).
fn sidecar(path: &Path, tag: &str) -> PathBuf {
    path.with_extension(tag)
}

fn run(cmd: &Command) -> Result<u8> {
    match cmd {
        Command::Fiber(a) => run_fiber(a),
        Command::Extremal(a) => run_extremal(a),
        Command::Solve(a) => run_solve(a),
        Command::Scan(a) => run_scan(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn run_fiber(args: &FiberArgs) -> Result<u8> {
    let ex = Exponents::new(args.q, args.alpha, args.gamma, args.dim)?;
    let nt = NormTuple::new(args.a, args.b, args.c, args.d)?;
    let analysis = Fiber::new(nt, ex).analyze(args.lambda, args.mu)?;
    print!("{}", artifacts::fiber_text(&analysis));
    Ok(0)
}

fn run_extremal(args: &ExtremalArgs) -> Result<u8> {
    let cfg = load_config(&args.config)?;
    let ex = cfg.build_exponents()?;
    let grid = cfg.build_grid()?;
    let opts = cfg.descent_opts();
    let curve = extremal_curve(&args.lambda_grid.values(), grid, &ex, &opts)?;
    write_artifact(&args.out, &artifacts::curve_csv(&curve))?;
    let cap_e = minimize_lambda_star(QuotientFamily::E, grid, &ex, &opts)?;
    let cap_n = minimize_lambda_star(QuotientFamily::N, grid, &ex, &opts)?;
    let caps = artifacts::cap_estimates_text(
        cap_e.value,
        cap_e.converged,
        cap_n.value,
        cap_n.converged,
    );
    write_artifact(&sidecar(&args.out, "caps.txt"), &caps)?;
    Ok(0)
}

fn run_solve(args: &SolveArgs) -> Result<u8> {
    let cfg = load_config(&args.config)?;
    let ex = cfg.build_exponents()?;
    let grid = cfg.build_grid()?;
    let opts = cfg.descent_opts();
    let report = match args.branch {
        1 => solve_branch1(args.lambda, args.mu, grid, &ex, &opts)?,
        _ => solve_branch2(args.lambda, args.mu, grid, &ex, &opts)?,
    };
    write_artifact(&args.out, &artifacts::solve_text(&report, args.lambda, args.mu))?;
    write_artifact(&sidecar(&args.out, "field.csv"), &artifacts::field_csv(&report.solution))?;
    if !report.converged {
        eprintln!(
            "not converged after {} iterations (gradient norm {:e})",
            report.iterations, report.gradient_norm
        );
        return Ok(EXIT_UNCONVERGED);
    }
    Ok(0)
}

/// One scan cell per branch: status, energy, and its sign at tol_energy.
/// Statuses: converged, unconverged, outside-band (no usable stationarity
/// root along the descent), no-strict-regime (branch 2 without
/// gamma > 1 + alpha), failed.
fn scan_cell(
    branch: u8,
    lambda: f64,
    mu: f64,
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
    tol_energy: f64,
) -> (String, String, String) {
    let res = match branch {
        1 => solve_branch1(lambda, mu, grid, ex, opts),
        _ => solve_branch2(lambda, mu, grid, ex, opts),
    };
    match res {
        Ok(r) => {
            let status = if r.converged { "converged" } else { "unconverged" };
            let sign = match Sign::of(r.classification.phi_value, tol_energy) {
                Sign::Plus => "+",
                Sign::Zero => "0",
                Sign::Minus => "-",
            };
            (status.into(), float17(r.classification.phi_value), sign.into())
        }
        Err(Error::Precondition(_)) => ("outside-band".into(), String::new(), String::new()),
        Err(Error::UnsupportedRegime(_)) => {
            ("no-strict-regime".into(), String::new(), String::new())
        }
        Err(_) => ("failed".into(), String::new(), String::new()),
    }
}

fn run_scan(args: &ScanArgs) -> Result<u8> {
    let cfg = load_config(&args.config)?;
    let ex = cfg.build_exponents()?;
    let grid = cfg.build_grid()?;
    let opts = cfg.descent_opts();
    let tol_energy = cfg.tolerances.tol_energy;
    let lams = args.lambda_grid.values();
    if !(lams[0] > 0.0) {
        return Err(Error::Invalid(format!("lambda grid must be positive, starts at {}", lams[0])));
    }
    let cells: Vec<(f64, f64)> = lams
        .iter()
        .flat_map(|&l| args.mu_grid.values().into_iter().map(move |m| (l, m)))
        .collect();
    // Cells are independent cold starts; the indexed collect keeps row-major
    // order no matter how the pool schedules them.
    let rows: Vec<String> = cells
        .par_iter()
        .map(|&(l, m)| {
            let (s1, p1, g1) = scan_cell(1, l, m, grid, &ex, &opts, tol_energy);
            let (s2, p2, g2) = scan_cell(2, l, m, grid, &ex, &opts, tol_energy);
            format!(
                "{},{},{s1},{p1},{g1},{s2},{p2},{g2}\n",
                float17(l),
                float17(m)
            )
        })
        .collect();
    let mut out = String::from(
        "lambda,mu,branch1,phi_1,sign_1,branch2,phi_2,sign_2\n",
    );
    for r in rows {
        out.push_str(&r);
    }
    write_artifact(&args.out, &out)?;
    Ok(0)
}

fn run_verify(args: &VerifyArgs) -> Result<u8> {
    let opts = VerifyOpts { n_cases: args.cases, seed: args.seed, ..VerifyOpts::default() };
    let report = verify_lemma_suite(&opts);
    print!("{}", artifacts::verify_text(&report));
    if let Some(out) = &args.out {
        write_artifact(out, &artifacts::failures_csv(&report))?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}
