//! Command-line surface: assemble, factor, predict, analyze, sweep, gcurve.
//!
//! All numeric work runs in double precision. Relative output paths are
//! placed under `$BANDCHOL_OUT_DIR` when that variable is set.

use crate::analyzer::{
    self, diagonal_profile, profile_csv, AnalysisReport, ReportFormat, RunEcho, SweepReport,
    SweepRun,
};
use crate::assembly::{assemble, BandedSymmetricMatrix, RightHandSide};
use crate::cholesky::{factor_into, FactorMode, FactorStats};
use crate::error::{Error, Result};
use crate::fill_model::{g_of_n, predict, FillPrediction};
use crate::matrix_market;
use crate::mesh::{shishkin_mesh, uniform_mesh, Mesh1D, MeshKind};
use crate::problem::{ProblemConfig, ProblemSpec};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Output-directory override for relative paths.
pub const OUT_DIR_ENV: &str = "BANDCHOL_OUT_DIR";

/// Band factors at large N are memory-hungry (about 1 GiB at N = 512);
/// refuse anything bigger without an explicit opt-in.
const LARGE_N: usize = 600;

#[derive(Parser, Debug)]
#[command(
    name = "bandchol",
    version,
    about = "Banded Cholesky factorization of reaction-diffusion stencils \
             with subnormal/underflow instrumentation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble the system matrix (and optionally the right-hand side)
    Assemble(AssembleArgs),
    /// Assemble and factor, reporting the entry census as JSON
    Factor(FactorArgs),
    /// Predict the factor census analytically, without factoring
    Predict(PredictArgs),
    /// Factor, profile, predict, and compare in one run
    Analyze(AnalyzeArgs),
    /// Factor once per epsilon and aggregate a census table
    Sweep(SweepArgs),
    /// Tabulate the subnormal boundary curve g(N)
    Gcurve(GcurveArgs),
}

#[derive(Args, Clone, Debug)]
struct ProblemArgs {
    /// Intervals per direction
    #[arg(long)]
    n: Option<usize>,
    /// Mesh kind: uniform or shishkin
    #[arg(long)]
    mesh: Option<MeshKind>,
    /// Shishkin transition-point factor
    #[arg(long)]
    sigma: Option<f64>,
    /// Lower bound beta with b >= beta^2
    #[arg(long)]
    beta: Option<f64>,
    /// Built-in problem name (b, f, g triple)
    #[arg(long)]
    problem: Option<String>,
    /// TOML config file; explicit flags win over config values
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Fully resolved run parameters.
#[derive(Clone, Debug)]
struct ResolvedRun {
    n: usize,
    eps: f64,
    mesh: MeshKind,
    sigma: f64,
    beta: f64,
    problem: String,
}

impl ProblemArgs {
    /// Merge flags over the config file; `eps` comes from the calling
    /// subcommand (single value or sweep list).
    fn resolve(&self, eps: Option<f64>) -> Result<ResolvedRun> {
        let cfg = match &self.config {
            Some(path) => ProblemConfig::from_path(path)?,
            None => ProblemConfig::default(),
        };
        let n = self
            .n
            .or(cfg.n)
            .ok_or_else(|| Error::InvalidArgument("--n is required".to_string()))?;
        let eps = eps
            .or(cfg.epsilon)
            .ok_or_else(|| Error::InvalidArgument("--eps is required".to_string()))?;
        Ok(ResolvedRun {
            n,
            eps,
            mesh: self.mesh.or(cfg.mesh).unwrap_or(MeshKind::Uniform),
            sigma: self.sigma.or(cfg.sigma).unwrap_or(2.0),
            beta: self.beta.or(cfg.beta).unwrap_or(1.0),
            problem: self
                .problem
                .clone()
                .or(cfg.problem)
                .unwrap_or_else(|| "ones".to_string()),
        })
    }
}

impl ResolvedRun {
    fn mesh_1d(&self) -> Result<Mesh1D<f64>> {
        match self.mesh {
            MeshKind::Uniform => uniform_mesh(self.n),
            MeshKind::Shishkin => shishkin_mesh(self.n, self.eps, self.beta, self.sigma),
        }
    }

    fn spec(&self) -> Result<ProblemSpec<f64>> {
        ProblemSpec::builtin(&self.problem, self.eps, self.beta)
    }

    fn assemble(&self) -> Result<(BandedSymmetricMatrix<f64>, RightHandSide<f64>)> {
        let mesh = self.mesh_1d()?;
        assemble(&mesh, &mesh, &self.spec()?)
    }

    fn echo(&self, mode: FactorMode) -> RunEcho {
        RunEcho {
            n_intervals: self.n as u64,
            epsilon: self.eps,
            mesh: self.mesh,
            mode,
        }
    }
}

#[derive(Args, Debug)]
struct AssembleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Perturbation parameter (scientific notation accepted)
    #[arg(long)]
    eps: Option<f64>,
    /// Matrix Market output path for the system matrix
    #[arg(long)]
    out: PathBuf,
    /// Optional Matrix Market output path for the right-hand side
    #[arg(long)]
    rhs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FactorArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Perturbation parameter (scientific notation accepted)
    #[arg(long)]
    eps: Option<f64>,
    /// Arithmetic mode: ieee or ftz
    #[arg(long, default_value = "ieee")]
    mode: FactorMode,
    /// Optional Matrix Market output path for the factor
    #[arg(long)]
    out: Option<PathBuf>,
    /// Census JSON output path (stdout when omitted)
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Permit N > 600 despite the memory cost
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Intervals per direction
    #[arg(long)]
    n: usize,
    /// Perturbation parameter
    #[arg(long)]
    eps: f64,
    /// Prediction JSON output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Perturbation parameter (scientific notation accepted)
    #[arg(long)]
    eps: Option<f64>,
    /// Arithmetic mode: ieee or ftz
    #[arg(long, default_value = "ieee")]
    mode: FactorMode,
    /// Report format: json, csv (diagonal profile), or table
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    /// Report output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV output path for the diagonal profile
    #[arg(long)]
    profile_out: Option<PathBuf>,
    /// Permit N > 600 despite the memory cost
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated epsilon list, e.g. 1e-1,1e-2,1e-3
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Arithmetic mode: ieee or ftz
    #[arg(long, default_value = "ieee")]
    mode: FactorMode,
    /// Report format: json, csv, or table
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Report output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent factorizations (each run stays single-threaded)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Permit N > 600 despite the memory cost
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct GcurveArgs {
    /// First N of the tabulated range
    #[arg(long)]
    from: usize,
    /// Last N of the tabulated range (inclusive)
    #[arg(long)]
    to: usize,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Assemble(args) => run_assemble(args),
        Command::Factor(args) => run_factor(args),
        Command::Predict(args) => run_predict(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Gcurve(args) => run_gcurve(args),
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn write_or_print(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(resolve_out(path), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn check_size(n: usize, allow_large: bool) -> Result<()> {
    if n > LARGE_N && !allow_large {
        return Err(Error::InvalidArgument(format!(
            "N = {n} needs more than a gigabyte of factor storage; \
             pass --allow-large to proceed"
        )));
    }
    Ok(())
}

fn run_assemble(args: AssembleArgs) -> Result<ExitCode> {
    let run = args.problem.resolve(args.eps)?;
    let (a, rhs) = run.assemble()?;
    let out = resolve_out(&args.out);
    matrix_market::export_matrix_market(&a, &out)?;
    if let Some(rhs_path) = &args.rhs_out {
        matrix_market::export_vector(&rhs, &resolve_out(rhs_path))?;
    }
    println!(
        "wrote {} (n = {}, bandwidth = {})",
        out.display(),
        a.n(),
        a.bandwidth()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_factor(args: FactorArgs) -> Result<ExitCode> {
    let run = args.problem.resolve(args.eps)?;
    check_size(run.n, args.allow_large)?;
    let (a, _) = run.assemble()?;
    let (l, stats) = factor_into(a, args.mode)?;
    if let Some(path) = &args.out {
        matrix_market::export_factor(&l, &resolve_out(path))?;
    }
    let json = serde_json::to_string_pretty(&stats).map_err(|e| Error::Format(e.to_string()))?;
    write_or_print(&format!("{json}\n"), args.stats_out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_predict(args: PredictArgs) -> Result<ExitCode> {
    let prediction = predict(args.n, args.eps)?;
    let json =
        serde_json::to_string_pretty(&prediction).map_err(|e| Error::Format(e.to_string()))?;
    write_or_print(&format!("{json}\n"), args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let run = args.problem.resolve(args.eps)?;
    check_size(run.n, args.allow_large)?;
    let (a, _) = run.assemble()?;
    let (l, stats) = factor_into(a, args.mode)?;
    let profile = diagonal_profile(&l);
    let report = build_report(&run, args.mode, &stats)?.with_profile(&profile);

    if let Some(path) = &args.profile_out {
        std::fs::write(resolve_out(path), profile_csv(&report.profile))?;
    }
    let text = analyzer::emit_report(&report, args.format)?;
    write_or_print(&text, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn build_report(
    run: &ResolvedRun,
    mode: FactorMode,
    stats: &FactorStats,
) -> Result<AnalysisReport> {
    match run.mesh {
        MeshKind::Uniform => {
            let prediction = uniform_prediction(run.n, run.eps)?;
            match prediction {
                Some(p) => analyzer::compare(stats, &p),
                None => Ok(analyzer::qualitative_report(run.echo(mode), stats, None)),
            }
        }
        MeshKind::Shishkin => Ok(analyzer::qualitative_report(
            run.echo(mode),
            stats,
            uniform_prediction(run.n, run.eps)?,
        )),
    }
}

/// The analytic model covers N >= 2 and any eps > 0; other parameters have
/// no prediction.
fn uniform_prediction(n: usize, eps: f64) -> Result<Option<FillPrediction>> {
    match predict(n, eps) {
        Ok(p) => Ok(Some(p)),
        Err(Error::InvalidArgument(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode> {
    let base = args.problem.resolve(args.eps.first().copied())?;
    check_size(base.n, args.allow_large)?;
    let eps_list: Vec<f64> = if args.eps.is_empty() {
        vec![base.eps]
    } else {
        args.eps.clone()
    };
    let jobs = args.jobs.max(1).min(eps_list.len());

    let results: Mutex<Vec<Option<SweepRun>>> = Mutex::new(vec![None; eps_list.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= eps_list.len() {
                    break;
                }
                let eps = eps_list[idx];
                let mut run = base.clone();
                run.eps = eps;
                let outcome = sweep_one(&run, args.mode);
                results.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });
    let runs: Vec<SweepRun> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every sweep slot is filled"))
        .collect();

    let report = SweepReport {
        echo: base.echo(args.mode),
        runs,
    };
    let ok = report.all_succeeded();
    let text = report.emit(args.format)?;
    write_or_print(&text, args.out.as_ref())?;
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn sweep_one(run: &ResolvedRun, mode: FactorMode) -> SweepRun {
    let outcome = run
        .assemble()
        .and_then(|(a, _)| factor_into(a, mode))
        .and_then(|(_, stats)| {
            let report = build_report(run, mode, &stats)?;
            Ok((stats, report))
        });
    match outcome {
        Ok((stats, report)) => SweepRun {
            epsilon: run.eps,
            observed: Some(stats),
            predicted: report.predicted,
            verdict: Some(report.verdict),
            error: None,
        },
        Err(err) => SweepRun {
            epsilon: run.eps,
            observed: None,
            predicted: None,
            verdict: None,
            error: Some(err.to_string()),
        },
    }
}

fn run_gcurve(args: GcurveArgs) -> Result<ExitCode> {
    if args.from < 1 || args.from > args.to {
        return Err(Error::InvalidArgument(format!(
            "gcurve range [{}, {}] is empty or starts below 1",
            args.from, args.to
        )));
    }
    let mut out = String::from("N,g\n");
    for n in args.from..=args.to {
        out.push_str(&format!("{n},{:e}\n", g_of_n(n)?));
    }
    write_or_print(&out, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}
