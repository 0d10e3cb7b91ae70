//! Command-line front end: system files in, JSON documents out.

pub mod parse;
pub mod report;
pub mod system;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use realrad_core::annihilator::graded_basis;
use realrad_core::geometry::{Component, Ideal};
use realrad_core::moments::{extract_minimizers, generic_element_with, minimize_with, Ball, MOPProblem, MopOptions};
use realrad_core::polycore::{RationalPoly, RealPoly};
use realrad_core::radical::{real_radical, s_radical, s_radical_localizing, Provider, RadicalOptions};
use realrad_core::realness::{certify_hypersurface, RealnessOptions, Verdict};
use realrad_core::sdp::{SdpOptions, SdpStatus};

use crate::parse::{identifiers, parse_polynomial};
use crate::system::{parse_components, parse_system, BallSetting, InequalityMode, SystemFile};

pub const SEED_ENV: &str = "REALRAD_SEED";

/// Successful runs exit 0; infeasible relaxations and non-real verdicts exit 2; errors exit 1.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "realrad", version, about = "Real radicals of polynomial ideals through moment relaxations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real radical (or S-radical when inequalities are present) of a system.
    Realrad(RealradArgs),
    /// Graded basis of the annihilator of a generic positive functional.
    Annihilator(AnnihilatorArgs),
    /// Moment relaxation of a polynomial optimization problem.
    Mop(MopArgs),
    /// Sign-change test of a hypersurface.
    Signcheck(SigncheckArgs),
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative rank threshold of moment matrices.
    #[arg(long)]
    tau_rank: Option<f64>,
    /// Relative primal and dual residual accepted as feasible.
    #[arg(long)]
    feasibility_tol: Option<f64>,
    /// Relative duality gap accepted as optimal.
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Residual below which an infeasibility ray is accepted.
    #[arg(long)]
    infeasibility_tol: Option<f64>,
    /// Iteration cap of the interior-point solver.
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Args, Debug)]
struct RealradArgs {
    file: PathBuf,
    /// Largest annihilator degree tried.
    #[arg(long)]
    max_degree: Option<u32>,
    /// First annihilator degree tried.
    #[arg(long)]
    degree: Option<u32>,
    /// Relaxation order floor.
    #[arg(long)]
    order: Option<u32>,
    /// Offset ε of the sign-change test.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Radius of the sign-change search ball.
    #[arg(long)]
    radius: Option<f64>,
    /// Seed for projections and base points; falls back to REALRAD_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// whole, zerodim or file:<path>
    #[arg(long, default_value = "whole")]
    provider: String,
    /// Zero threshold of the orthogonalization.
    #[arg(long)]
    tau_zero: Option<f64>,
    /// Radius of the ball added when the system has no inequalities.
    #[arg(long, conflicts_with = "no_ball")]
    ball: Option<f64>,
    /// Do not add a ball to systems without inequalities.
    #[arg(long)]
    no_ball: bool,
    /// slack or localizing
    #[arg(long)]
    inequalities: Option<InequalityMode>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct AnnihilatorArgs {
    file: PathBuf,
    /// Degree of the annihilator basis.
    #[arg(long)]
    degree: Option<u32>,
    /// Relaxation order; defaults to degree + 1.
    #[arg(long)]
    order: Option<u32>,
    /// Zero threshold of the orthogonalization.
    #[arg(long)]
    tau_zero: Option<f64>,
    /// Ball radius added as a localizing constraint.
    #[arg(long)]
    ball: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct MopArgs {
    file: PathBuf,
    /// Polynomial to minimize.
    #[arg(long, allow_hyphen_values = true)]
    objective: String,
    /// Relaxation order; required unless the file sets `option order`.
    #[arg(long)]
    order: Option<u32>,
    /// Ball radius added as a localizing constraint.
    #[arg(long)]
    ball: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SigncheckArgs {
    /// Optional system file supplying variables and options.
    file: Option<PathBuf>,
    /// Hypersurface polynomial.
    #[arg(long, allow_hyphen_values = true)]
    h: String,
    /// Comma-separated variable names; defaults to the sorted identifiers of h.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Comma-separated base point; drawn at random when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<f64>>,
    /// Offset ε of the shifted hypersurface h ± ε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Radius of the ball around the base point.
    #[arg(long)]
    radius: Option<f64>,
    /// Seed for base points and projections; falls back to REALRAD_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of relaxation orders tried beyond the first.
    #[arg(long)]
    extra_orders: Option<u32>,
    /// Drop the ball around the base point.
    #[arg(long)]
    no_ball: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    command: String,
    message: String,
}

type Run = Result<(i32, String), Failure>;

fn fail(command: &str, message: impl ToString) -> Failure {
    Failure { command: command.to_string(), message: message.to_string() }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("serializable document")
}

/// Runs the command line `argv` (program name first); `env_seed` is the value of `REALRAD_SEED`.
pub fn run_with<I, S>(argv: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: EXIT_OK, stdout: text, stderr: String::new() },
                _ => {
                    let doc = report::ErrorDoc { command: String::new(), status: "error", error: text.trim_end().to_string() };
                    Outcome { code: EXIT_ERROR, stdout: to_json(&doc), stderr: text }
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Realrad(a) => run_realrad(a, env_seed),
        Command::Annihilator(a) => run_annihilator(a),
        Command::Mop(a) => run_mop(a),
        Command::Signcheck(a) => run_signcheck(a, env_seed),
    };
    match result {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(f) => {
            let doc = report::ErrorDoc { command: f.command, status: "error", error: f.message.clone() };
            Outcome { code: EXIT_ERROR, stdout: to_json(&doc), stderr: format!("error: {}\n", f.message) }
        }
    }
}

/// Runs `argv` with the seed fallback read from the environment.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    run_with(argv, env.as_deref())
}

fn load_system(cmd: &str, path: &Path) -> Result<SystemFile, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| fail(cmd, format!("{}: {}", path.display(), e)))?;
    parse_system(&src).map_err(|e| fail(cmd, format!("{}:{}", path.display(), e)))
}

fn floats(p: &[RationalPoly]) -> Vec<RealPoly> {
    p.iter().map(RationalPoly::to_f64).collect()
}

fn resolve_seed(cmd: &str, flag: Option<u64>, file: Option<u64>, env: Option<&str>) -> Result<u64, Failure> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| fail(cmd, format!("{} = '{}' is not an unsigned integer", SEED_ENV, v))),
        None => Ok(0),
    }
}

fn mop_options(a: &SolverArgs, file_tau_rank: Option<f64>) -> MopOptions {
    let d = SdpOptions::default();
    let sdp = SdpOptions {
        feasibility_tol: a.feasibility_tol.unwrap_or(d.feasibility_tol),
        gap_tol: a.gap_tol.unwrap_or(d.gap_tol),
        infeasibility_tol: a.infeasibility_tol.unwrap_or(d.infeasibility_tol),
        max_iterations: a.max_iterations.unwrap_or(d.max_iterations),
        ..d
    };
    MopOptions { sdp, tau_rank: a.tau_rank.or(file_tau_rank).unwrap_or(MopOptions::default().tau_rank) }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn parse_provider(cmd: &str, spec: &str, sys: &SystemFile) -> Result<Provider, Failure> {
    match spec {
        "whole" => Ok(Provider::Whole),
        "zerodim" => Ok(Provider::ZeroDimCluster),
        _ => {
            let path = spec
                .strip_prefix("file:")
                .ok_or_else(|| fail(cmd, format!("unknown provider '{}' (whole|zerodim|file:<path>)", spec)))?;
            let src = std::fs::read_to_string(path).map_err(|e| fail(cmd, format!("{}: {}", path, e)))?;
            let specs = parse_components(&src, &sys.variables).map_err(|e| fail(cmd, format!("{}:{}", path, e)))?;
            let n = sys.variables.len();
            let comps = specs
                .into_iter()
                .map(|c| Ideal::exact(n, c.generators).and_then(|i| Component::new(i, c.dimension)))
                .collect::<realrad_core::Result<Vec<_>>>()
                .map_err(|e| fail(cmd, e))?;
            Ok(Provider::UserSupplied(comps))
        }
    }
}

fn run_realrad(a: &RealradArgs, env_seed: Option<&str>) -> Run {
    const CMD: &str = "realrad";
    let t = Instant::now();
    let sys = load_system(CMD, &a.file)?;
    let o = &sys.options;
    let seed = resolve_seed(CMD, a.seed, o.seed, env_seed)?;
    let defaults = RadicalOptions::default();
    let d_start = a.degree.or(o.degree);
    let auto_ball = if a.no_ball {
        None
    } else if let Some(r) = a.ball {
        Some(r)
    } else {
        match o.ball {
            Some(BallSetting::Off) => None,
            Some(BallSetting::Radius(r)) => Some(r),
            None => defaults.auto_ball,
        }
    };
    let provider = parse_provider(CMD, &a.provider, &sys)?;
    let mode = a.inequalities.or(o.inequalities).unwrap_or(InequalityMode::Slack);
    if matches!(provider, Provider::UserSupplied(_)) && mode == InequalityMode::Slack && !sys.inequalities.is_empty() {
        return Err(fail(CMD, "component files live in the declared variables; use --inequalities localizing"));
    }
    let mop = mop_options(&a.solver, o.tau_rank);
    let opts = RadicalOptions {
        d_start,
        d_max: a.max_degree.or(o.max_degree).unwrap_or(defaults.d_max.max(d_start.unwrap_or(0))),
        order: a.order.or(o.order),
        tau_zero: a.tau_zero.or(o.tau_zero).unwrap_or(defaults.tau_zero),
        tau_rank: mop.tau_rank,
        auto_ball,
        provider,
        seed,
        epsilon: a.epsilon.or(o.epsilon).unwrap_or(defaults.epsilon),
        radius: a.radius.or(o.radius).unwrap_or(defaults.radius),
        mop,
    };
    let f = floats(&sys.equalities);
    let g = floats(&sys.inequalities);
    let (res, label) = if g.is_empty() {
        (real_radical(&f, &opts), "none")
    } else if mode == InequalityMode::Slack {
        (s_radical(&f, &g, &opts), "slack")
    } else {
        (s_radical_localizing(&f, &g, &opts), "localizing")
    };
    let res = res.map_err(|e| fail(CMD, e))?;
    let doc = report::realrad(&res, &sys.variables, seed, label.to_string(), elapsed_ms(t));
    let code = if doc.status == report::status_name(SdpStatus::Infeasible) { EXIT_NEGATIVE } else { EXIT_OK };
    Ok((code, to_json(&doc)))
}

fn file_ball(flag: Option<f64>, file: Option<BallSetting>, n: usize) -> Option<Ball> {
    let r = flag.or(match file {
        Some(BallSetting::Radius(r)) => Some(r),
        _ => None,
    })?;
    Some(Ball { center: vec![0.0; n], radius: r })
}

fn run_annihilator(a: &AnnihilatorArgs) -> Run {
    const CMD: &str = "annihilator";
    let t = Instant::now();
    let sys = load_system(CMD, &a.file)?;
    let o = &sys.options;
    let n = sys.variables.len();
    let d = a.degree.or(o.degree).ok_or_else(|| fail(CMD, "--degree is required"))?;
    let order = a.order.or(o.order).unwrap_or(d + 1);
    let mop = mop_options(&a.solver, o.tau_rank);
    let mut g = floats(&sys.inequalities);
    if let Some(b) = file_ball(a.ball, o.ball, n) {
        g.push(b.polynomial());
    }
    let sol = generic_element_with(n, &floats(&sys.equalities), &g, order, &mop).map_err(|e| fail(CMD, e))?;
    let names = sys.names();
    let mut doc = report::AnnihilatorDoc {
        command: CMD,
        status: report::status_name(sol.status),
        variables: sys.variables.clone(),
        degree: d,
        order,
        generators: Vec::new(),
        leading: Vec::new(),
        standard_monomials: Vec::new(),
        rank_profile: sol.rank_profile.clone(),
        flat_order: sol.flat_order,
        threshold: None,
        timings: report::Timings { total_ms: 0.0 },
    };
    let code = match sol.status {
        SdpStatus::Optimal => {
            let gb = graded_basis(&sol.sigma, d, a.tau_zero.or(o.tau_zero).unwrap_or(RadicalOptions::default().tau_zero))
                .map_err(|e| fail(CMD, e))?;
            doc.generators = gb.k.iter().map(|p| report::real_poly(p, &names)).collect();
            doc.leading = gb.l.iter().map(|m| report::monomial_text(m, &names)).collect();
            doc.standard_monomials = gb.b.iter().map(|m| report::monomial_text(m, &names)).collect();
            doc.threshold = Some(gb.threshold);
            EXIT_OK
        }
        SdpStatus::Infeasible => EXIT_NEGATIVE,
        s => return Err(fail(CMD, format!("solver stopped with status {:?} at order {}", s, order))),
    };
    doc.timings.total_ms = elapsed_ms(t);
    Ok((code, to_json(&doc)))
}

fn run_mop(a: &MopArgs) -> Run {
    const CMD: &str = "mop";
    let t = Instant::now();
    let sys = load_system(CMD, &a.file)?;
    let o = &sys.options;
    let n = sys.variables.len();
    let order = a.order.or(o.order).ok_or_else(|| fail(CMD, "--order is required"))?;
    let objective = parse_polynomial(&a.objective, &sys.variables).map_err(|e| fail(CMD, format!("--objective {}", e)))?;
    let mut p = MOPProblem::new(n, order);
    p.objective = Some(objective.to_f64());
    p.equalities = floats(&sys.equalities);
    p.inequalities = floats(&sys.inequalities);
    p.ball = file_ball(a.ball, o.ball, n);
    let mop = mop_options(&a.solver, o.tau_rank);
    let sol = minimize_with(&p, &mop).map_err(|e| fail(CMD, e))?;
    let mut warnings = Vec::new();
    let minimizers = if sol.is_flat() {
        match extract_minimizers(&sol.sigma, mop.tau_rank) {
            Ok(x) => Some(report::MinimizersJson { points: x.points, weights: x.weights, order: x.order, residual: x.residual }),
            Err(e) => {
                warnings.push(format!("minimizer extraction failed: {}", e));
                None
            }
        }
    } else {
        None
    };
    let code = match sol.status {
        SdpStatus::Optimal | SdpStatus::Unbounded => EXIT_OK,
        SdpStatus::Infeasible => EXIT_NEGATIVE,
        _ => EXIT_ERROR,
    };
    Ok((code, to_json(&report::mop(&sol, &sys.variables, order, minimizers, warnings, elapsed_ms(t)))))
}

fn run_signcheck(a: &SigncheckArgs, env_seed: Option<&str>) -> Run {
    const CMD: &str = "signcheck";
    let t = Instant::now();
    let sys = match &a.file {
        Some(p) => Some(load_system(CMD, p)?),
        None => None,
    };
    let variables: Vec<String> = match (&sys, &a.vars) {
        (_, Some(v)) => v.iter().map(|s| s.trim().to_string()).collect(),
        (Some(s), None) => s.variables.clone(),
        (None, None) => {
            let mut ids = identifiers(&a.h).map_err(|e| fail(CMD, format!("--h {}", e)))?;
            ids.sort();
            ids
        }
    };
    if variables.is_empty() {
        return Err(fail(CMD, "h has no variables; pass --vars"));
    }
    let h = parse_polynomial(&a.h, &variables).map_err(|e| fail(CMD, format!("--h {}", e)))?.to_f64();
    let o = sys.as_ref().map(|s| s.options.clone()).unwrap_or_default();
    let seed = resolve_seed(CMD, a.seed, o.seed, env_seed)?;
    let defaults = RealnessOptions::default();
    let opts = RealnessOptions {
        epsilon: a.epsilon.or(o.epsilon).unwrap_or(defaults.epsilon),
        radius: a.radius.or(o.radius).unwrap_or(defaults.radius),
        extra_orders: a.extra_orders.unwrap_or(defaults.extra_orders),
        ball: !a.no_ball,
        seed,
        mop: mop_options(&a.solver, o.tau_rank),
    };
    if let Some(x) = &a.xi {
        if x.len() != variables.len() {
            return Err(fail(CMD, format!("--xi has {} entries for {} variables", x.len(), variables.len())));
        }
    }
    let cert = certify_hypersurface(&h, a.xi.as_deref(), &opts).map_err(|e| fail(CMD, e))?;
    let names: Vec<&str> = variables.iter().map(String::as_str).collect();
    let certificate = report::certificate(&cert, &names);
    let doc = report::SigncheckDoc {
        command: CMD,
        verdict: certificate.verdict.clone(),
        status: certificate.status.clone(),
        seed,
        variables: variables.clone(),
        certificate,
        timings: report::Timings { total_ms: elapsed_ms(t) },
    };
    let code = if cert.verdict == Verdict::NotReal { EXIT_NEGATIVE } else { EXIT_OK };
    Ok((code, to_json(&doc)))
}
