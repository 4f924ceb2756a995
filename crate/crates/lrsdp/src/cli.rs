//! Command-line driver.
//!
//! Exit codes: 0 when a solve converges or a check passes, 2 when a limit is
//! hit or a check fails, 1 on usage and IO errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lrsdp_core::generators::{
    gen_bqp_moment, gen_matrix_completion, gen_maxcut, gen_quartic_sphere, maxcut_edge, maxcut_triangle, random_bqp,
    random_graph, random_matrix_completion, random_quartic,
};
use lrsdp_core::spectral::EigOptions;
use lrsdp_core::{certify, solve_with_clock, ManifoldKind, SdpProblem, SolverOptions, Status};

use crate::clock::StdClock;
use crate::error::{Error, Result};
use crate::gset::read_gset;
use crate::output::{write_trace, ResultDocument};
use crate::sdpa::{format_sdpa, read_sdpa, write_sdpa};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lrsdp", version, about = "Low-rank SDP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem read from an SDPA file or generated from a family.
    Solve(SolveArgs),
    /// Write a generated problem in SDPA format.
    Generate(GenerateArgs),
    /// Recompute the KKT residues of a stored solution.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    MaxcutEdge,
    MaxcutTriangle,
    MaxcutRandom,
    Gset,
    Bqp,
    QuarticSphere,
    MatrixCompletion,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Gset graph file for the `gset` family.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of variables for `bqp` and `quartic-sphere`.
    #[arg(long, default_value_t = 10)]
    q: usize,
    /// Seed of the random instance.
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    #[arg(long, default_value_t = 50)]
    nodes: usize,
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(long, default_value_t = 20)]
    rows: usize,
    #[arg(long, default_value_t = 20)]
    cols: usize,
    /// Sampling rate for `matrix-completion`.
    #[arg(long, default_value_t = 0.8)]
    rate: f64,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// SDPA problem file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    input: Option<PathBuf>,
    /// Generate the problem from a benchmark family.
    #[arg(long, value_enum)]
    generate: Option<Family>,
    /// Structural constraint handled by the manifold.
    #[arg(long, value_parser = parse_manifold)]
    manifold: Option<ManifoldKind>,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 2)]
    p0: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma0: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 1e-3)]
    theta: f64,
    #[arg(long, default_value_t = 10)]
    delta_ne: usize,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    /// Wall-time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Per-iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Result document as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    family: Family,
    #[command(flatten)]
    params: FamilyArgs,
    /// Destination SDPA file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Result document written by `solve --output`.
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

fn parse_manifold(s: &str) -> std::result::Result<ManifoldKind, String> {
    s.parse().map_err(|e: lrsdp_core::Error| e.to_string())
}

/// Builds a benchmark instance.
pub fn generate_family(
    family: Family,
    graph: Option<&std::path::Path>,
    q: usize,
    seed: u64,
    nodes: usize,
    density: f64,
    (rows, cols, rate): (usize, usize, f64),
) -> Result<SdpProblem> {
    Ok(match family {
        Family::MaxcutEdge => gen_maxcut(&maxcut_edge())?,
        Family::MaxcutTriangle => gen_maxcut(&maxcut_triangle())?,
        Family::MaxcutRandom => gen_maxcut(&random_graph(nodes, density, seed))?,
        Family::Gset => {
            let path = graph.ok_or_else(|| Error::Invalid("the gset family needs --graph FILE".into()))?;
            gen_maxcut(&read_gset(path)?)?
        }
        Family::Bqp => {
            let (qm, c) = random_bqp(q, seed);
            gen_bqp_moment(&qm, &c)?
        }
        Family::QuarticSphere => gen_quartic_sphere(q, &random_quartic(q, seed))?,
        Family::MatrixCompletion => {
            let (_, samples) = random_matrix_completion(rows, cols, rate, seed);
            gen_matrix_completion(rows, cols, &samples)?
        }
    })
}

fn from_family(family: Family, a: &FamilyArgs) -> Result<SdpProblem> {
    generate_family(
        family,
        a.graph.as_deref(),
        a.q,
        a.instance_seed,
        a.nodes,
        a.density,
        (a.rows, a.cols, a.rate),
    )
}

fn load_problem(src: &SourceArgs) -> Result<SdpProblem> {
    let problem = match (&src.input, src.generate) {
        (Some(path), _) => read_sdpa(path).map_err(|e| match e {
            Error::Parse { line, message } => Error::Invalid(format!("{}: line {line}: {message}", path.display())),
            other => other,
        })?,
        (None, Some(family)) => from_family(family, &src.family)?,
        (None, None) => return Err(Error::Invalid("one of --input or --generate is required".into())),
    };
    Ok(match src.manifold {
        Some(m) => problem.with_manifold(m),
        None => problem,
    })
}

fn solve_cmd(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let problem = load_problem(&args.source)?;
    let opts = SolverOptions {
        tol: args.tol,
        p0: args.p0,
        sigma0: args.sigma0,
        sigma_min: SolverOptions::default().sigma_min.min(args.sigma0),
        tau: args.tau,
        theta: args.theta,
        delta_ne: args.delta_ne,
        gamma: args.gamma,
        seed: args.seed,
        max_iters: args.max_iters,
        max_time: args.time_limit,
        ..SolverOptions::default()
    };
    let clock = StdClock::start();
    let solution = solve_with_clock(&problem, &opts, &clock)?;
    let wall = lrsdp_core::Clock::elapsed_secs(&clock);
    let doc = ResultDocument::new(&problem, &solution, &opts, wall);
    if let Some(path) = &args.trace {
        write_trace(&doc.trace, path)?;
    }
    if let Some(path) = &args.output {
        doc.write(path)?;
    }
    let r = solution.residues;
    let w = |e: std::io::Error| Error::Io { path: "<stdout>".into(), source: e };
    writeln!(out, "status     {}", solution.status.name()).map_err(w)?;
    writeln!(out, "objective  {:?}", solution.objective).map_err(w)?;
    writeln!(out, "eta_p      {:e}\neta_d      {:e}\neta_g      {:e}\neta_max    {:e}", r.eta_p, r.eta_d, r.eta_g, r.eta_max)
        .map_err(w)?;
    writeln!(out, "rank       {}\niterations {}\ntime       {wall:.3}s", solution.factor.ncols(), solution.iterations())
        .map_err(w)?;
    Ok(if solution.status == Status::Converged { EXIT_OK } else { EXIT_LIMIT })
}

fn generate_cmd(args: &GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    let problem = from_family(args.family, &args.params)?;
    match &args.output {
        Some(path) => write_sdpa(&problem, path)?,
        None => out
            .write_all(format_sdpa(&problem).as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?,
    }
    Ok(EXIT_OK)
}

fn check_cmd(args: &CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let problem = load_problem(&args.source)?;
    let doc = ResultDocument::read(&args.solution)?;
    let y = doc.factor_matrix()?;
    if y.nrows() != problem.dim() {
        return Err(Error::Invalid(format!(
            "solution has {} rows but the problem has dimension {}",
            y.nrows(),
            problem.dim()
        )));
    }
    let cert = certify(&problem, &y, &doc.dual_y(), &doc.dual_z(), &EigOptions::default())?;
    let r = cert.residues;
    let pass = r.eta_max <= args.tol;
    let w = |e: std::io::Error| Error::Io { path: "<stdout>".into(), source: e };
    writeln!(out, "eta_p      {:e}\neta_d      {:e}\neta_g      {:e}\neta_max    {:e}", r.eta_p, r.eta_d, r.eta_g, r.eta_max)
        .map_err(w)?;
    writeln!(out, "lambda_min {:e}\nlambda_max {:e}", cert.lambda_min, cert.lambda_max).map_err(w)?;
    writeln!(out, "{}", if pass { "certified" } else { "not certified" }).map_err(w)?;
    Ok(if pass { EXIT_OK } else { EXIT_LIMIT })
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve_cmd(a, out),
        Command::Generate(a) => generate_cmd(a, out),
        Command::Check(a) => check_cmd(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
