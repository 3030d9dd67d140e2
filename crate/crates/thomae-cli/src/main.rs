//! `thomae` command line: period data, theta values and batch verification
//! runs driven by a JSON plan.

mod plan;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thomae::theta::{theta_grad, Characteristic, RiemannMatrix};
use thomae::thomae::Tolerances;
use thomae::Complex64;

use plan::{read_curve, read_plan};

#[derive(Parser, Debug)]
#[command(name = "thomae", version, about = "Period matrices, theta functions and Thomae-type identity checks")]
struct Cli {
    /// Verification tolerance (ratio spread, root-of-unity residual).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Absolute truncation tolerance of theta series.
    #[arg(long, global = true)]
    theta_tol: Option<f64>,
    /// Starting Gauss order for period quadrature.
    #[arg(long, global = true)]
    quad_order: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute period data for a curve given as JSON {"n": .., "lambdas": [[re, im], ..]}.
    Periods { curve: PathBuf },
    /// Run every task of a plan and emit one JSON line per report.
    Verify { plan: PathBuf },
    /// Evaluate θ[ε;δ](ζ, τ) and its gradient.
    Theta {
        /// Characteristic as "ε₁ … ε_g; δ₁ … δ_g" (entries may be rationals).
        #[arg(long = "char", default_value = None)]
        characteristic: Option<String>,
        /// ζ as JSON [[re, im], ..]; zero when absent.
        #[arg(long)]
        zeta: Option<String>,
        /// τ as JSON [[[re, im], ..], ..].
        #[arg(long, conflicts_with = "tau_file")]
        tau: Option<String>,
        #[arg(long)]
        tau_file: Option<PathBuf>,
    },
}

/// Errors sorted by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable input, unknown task or malformed arguments (2).
    Parse(anyhow::Error),
    /// Invalid curve or Riemann matrix, failed period invariants (3).
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Settings {
    pub tolerances: Tolerances,
    pub quad_order: usize,
    pub seed: u64,
}

const DEFAULT_TOL: f64 = 1e-6;
const DEFAULT_THETA_TOL: f64 = 1e-12;
const DEFAULT_QUAD_ORDER: usize = 64;
const DEFAULT_SEED: u64 = 1;

fn settings(cli: &Cli, plan: Option<&plan::RunPlan>) -> Result<Settings, Failure> {
    let tol = cli.tol.or(plan.and_then(|p| p.tolerances.tol)).unwrap_or(DEFAULT_TOL);
    let theta_tol = cli.theta_tol.or(plan.and_then(|p| p.tolerances.theta_tol)).unwrap_or(DEFAULT_THETA_TOL);
    if !(tol > 0.0 && theta_tol > 0.0) {
        return Err(Failure::Parse(anyhow!("tolerances must be positive")));
    }
    let quad_order = cli.quad_order.or(plan.and_then(|p| p.quad_order)).unwrap_or(DEFAULT_QUAD_ORDER);
    if quad_order < 2 {
        return Err(Failure::Parse(anyhow!("quadrature order must be at least 2")));
    }
    Ok(Settings {
        tolerances: Tolerances { tol, theta_tol },
        quad_order,
        seed: cli.seed.or(plan.and_then(|p| p.seed)).unwrap_or(DEFAULT_SEED),
    })
}

fn emit(out: Option<&Path>, lines: &[String]) -> Result<(), Failure> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display())).map_err(Failure::Parse)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    for line in lines {
        writeln!(sink, "{line}").map_err(|e| Failure::Parse(e.into()))?;
    }
    sink.flush().map_err(|e| Failure::Parse(e.into()))
}

type CMat = Vec<Vec<Complex64>>;

fn rows(m: &DMatrix<Complex64>) -> CMat {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct PeriodsOutput {
    n: u32,
    genus: usize,
    lambdas: Vec<Complex64>,
    tau: CMat,
    a_periods: CMat,
    b_periods: CMat,
    branch_images: Vec<Vec<Complex64>>,
    riemann_constants: Vec<Complex64>,
    riemann_characteristic: String,
    quad_order: usize,
    quad_drift: f64,
    invariants: thomae::surface::Invariants,
    invariants_hold: bool,
}

fn cmd_periods(cli: &Cli, path: &Path) -> Result<bool, Failure> {
    let s = settings(cli, None)?;
    let curve = read_curve(path)?.build()?;
    let config = thomae::surface::BuildConfig {
        quad_order: s.quad_order,
        seed: s.seed,
        theta_tol: s.tolerances.theta_tol,
        ..Default::default()
    };
    let p = thomae::surface::build_periods(&curve, &config).map_err(|e| Failure::Invariant(e.to_string()))?;
    let invariants = p.invariants();
    let invariants_hold = invariants.holds();
    let output = PeriodsOutput {
        n: curve.n(),
        genus: p.genus(),
        lambdas: curve.lambdas().to_vec(),
        tau: rows(p.tau.tau()),
        a_periods: rows(&p.a_raw),
        b_periods: rows(&p.b_raw),
        branch_images: p.aj_branch.iter().map(|v| v.iter().copied().collect()).collect(),
        riemann_constants: p.k_vector.iter().copied().collect(),
        riemann_characteristic: p.k_char.to_string(),
        quad_order: p.quad_order,
        quad_drift: p.quad_drift,
        invariants,
        invariants_hold,
    };
    emit(cli.out.as_deref(), &[serde_json::to_string(&output).expect("periods serialize")])?;
    if !invariants_hold {
        return Err(Failure::Invariant("period invariants fail".into()));
    }
    Ok(true)
}

fn cmd_verify(cli: &Cli, path: &Path) -> Result<bool, Failure> {
    let start = Instant::now();
    let plan = read_plan(path)?;
    let s = settings(cli, Some(&plan))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let outcome = run::run_plan(&plan, base, &s)?;
    emit(cli.out.as_deref(), &outcome.lines)?;
    let mut err = io::stderr().lock();
    let _ = writeln!(err, "{:<24} {:>6} {:>6} {:>6}", "task", "pass", "fail", "exp");
    for (task, t) in &outcome.tally {
        let _ = writeln!(err, "{:<24} {:>6} {:>6} {:>6}", task, t.pass, t.fail, t.experimental_fail);
    }
    for (stage, secs) in &outcome.timings {
        let _ = writeln!(err, "time {stage}: {secs:.3}s");
    }
    let _ = writeln!(
        err,
        "settings: tol={:e} theta_tol={:e} quad_order={} seed={}; total {:.3}s; {}",
        s.tolerances.tol,
        s.tolerances.theta_tol,
        s.quad_order,
        s.seed,
        start.elapsed().as_secs_f64(),
        if outcome.all_pass() { "PASS" } else { "FAIL" }
    );
    Ok(outcome.all_pass())
}

fn parse_cvec(text: &str) -> Result<DVector<Complex64>, Failure> {
    let v: Vec<[f64; 2]> = serde_json::from_str(text).context("parsing ζ").map_err(Failure::Parse)?;
    Ok(DVector::from_iterator(v.len(), v.iter().map(|p| Complex64::new(p[0], p[1]))))
}

fn parse_cmat(text: &str) -> Result<DMatrix<Complex64>, Failure> {
    let m: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).context("parsing τ").map_err(Failure::Parse)?;
    let g = m.len();
    if g == 0 || m.iter().any(|r| r.len() != g) {
        return Err(Failure::Parse(anyhow!("τ must be a non-empty square matrix")));
    }
    Ok(DMatrix::from_fn(g, g, |i, j| Complex64::new(m[i][j][0], m[i][j][1])))
}

#[derive(Serialize)]
struct ThetaOutput {
    characteristic: String,
    value: Complex64,
    truncation_bound: f64,
    scale: f64,
    gradient: Vec<Complex64>,
    gradient_bound: f64,
}

fn cmd_theta(
    cli: &Cli,
    characteristic: Option<&str>,
    zeta: Option<&str>,
    tau: Option<&str>,
    tau_file: Option<&Path>,
) -> Result<bool, Failure> {
    let s = settings(cli, None)?;
    let tau_text = match (tau, tau_file) {
        (Some(t), _) => t.to_string(),
        (None, Some(f)) => std::fs::read_to_string(f)
            .with_context(|| format!("reading {}", f.display()))
            .map_err(Failure::Parse)?,
        (None, None) => return Err(Failure::Parse(anyhow!("one of --tau or --tau-file is required"))),
    };
    let tau = RiemannMatrix::new(parse_cmat(&tau_text)?).map_err(|e| Failure::Invariant(e.to_string()))?;
    let g = tau.genus();
    let ch = match characteristic {
        Some(c) => c.parse::<Characteristic>().map_err(|e| Failure::Parse(e.into()))?,
        None => Characteristic::zero(g),
    };
    let zeta = match zeta {
        Some(z) => parse_cvec(z)?,
        None => DVector::zeros(g),
    };
    if ch.genus() != g || zeta.len() != g {
        return Err(Failure::Parse(anyhow!("characteristic, ζ and τ disagree on the genus")));
    }
    let r = theta_grad(&ch, &zeta, &tau, s.tolerances.theta_tol).map_err(|e| Failure::Invariant(e.to_string()))?;
    let output = ThetaOutput {
        characteristic: ch.to_string(),
        value: r.value.value,
        truncation_bound: r.value.truncation_bound,
        scale: r.value.scale,
        gradient: r.gradient,
        gradient_bound: r.gradient_bound,
    };
    emit(cli.out.as_deref(), &[serde_json::to_string(&output).expect("theta serializes")])?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 || rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("error: invalid --jobs {jobs}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Periods { curve } => cmd_periods(&cli, curve),
        Command::Verify { plan } => cmd_verify(&cli, plan),
        Command::Theta { characteristic, zeta, tau, tau_file } => {
            cmd_theta(&cli, characteristic.as_deref(), zeta.as_deref(), tau.as_deref(), tau_file.as_deref())
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            match &f {
                Failure::Parse(e) => eprintln!("error: {e:#}"),
                Failure::Invariant(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
