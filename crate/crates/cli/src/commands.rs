//! Subcommand definitions and dispatch.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use fhj_core::oracles::{self, TransportKernel};
use fhj_core::solver::{refine_study, solve};
use fhj_core::specialfun::{erfc, gamma, mittag_leffler, wright};
use fhj_core::verify::{initial_lipschitz, run_suite, Suite, SuiteTolerances};
use fhj_core::FractionalOrder;

use crate::config::{parse_config, Command, RunConfig};
use crate::error::CliError;
use crate::output::{emit_result, Format};

#[derive(Debug, Parser)]
#[command(name = "fhj", version, about = "Time-fractional Hamilton-Jacobi solver and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Solve the configured problem and write the space-time solution.
    Solve(SolveArgs),
    /// Run a named check suite; one JSON report per line on stdout.
    Verify(VerifyArgs),
    /// Tabulate a reference solution as CSV.
    Oracle(OracleArgs),
    /// Refinement study against an exact solution; JSON table on stdout.
    Refine(RefineArgs),
    /// Tabulate a special function as `z,value` CSV.
    SpecialfunTable(TableArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_path` from the config.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also write one `x[,y],u` file per time slice.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(short, long)]
    pub config: PathBuf,
    #[arg(long, default_value = "canonical")]
    pub suite: String,
    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleVariant {
    /// `u₀ = sin 2πx` carried by constant speed.
    Transport,
    /// `c₀ E_α(-t^α)`.
    Relaxation,
    /// Lower and upper barriers `u₀ ∓ M t^α` of a configured problem.
    Barrier,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub variant: OracleVariant,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Final time.
    #[arg(long, default_value_t = 0.5)]
    pub time: f64,
    /// Rows are written at `k · time / steps`, `k = 0..=steps`.
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
    /// Transport speed.
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    /// Spatial nodes for the transport variant.
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    /// Initial value for the relaxation variant.
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    /// Problem config, required by the barrier variant.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[arg(short, long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFn {
    #[value(name = "mittag_leffler")]
    MittagLeffler,
    Wright,
    Gamma,
    Erfc,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TableArgs {
    #[arg(long = "fn", value_enum)]
    pub function: TableFn,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
}

const MAX_TABLE_ROWS: usize = 10_000_000;

fn load_config(path: &Path, expected: Command) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    match cfg.command {
        Some(c) if c != expected => Err(CliError::Config(format!(
            "{}: config is for command {c:?}, not {expected:?}",
            path.display()
        ))),
        _ => Ok(cfg),
    }
}

fn csv_sink(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let w: Box<dyn Write> = match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(w))
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io("<output>", io),
        other => CliError::Serialize(format!("{other:?}")),
    }
}

fn order(alpha: f64) -> Result<FractionalOrder, CliError> {
    FractionalOrder::new(alpha).map_err(|e| CliError::Config(format!("--alpha: {e}")))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Solve(a) => solve_cmd(a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Oracle(a) => oracle_cmd(a),
        Cmd::Refine(a) => refine_cmd(a),
        Cmd::SpecialfunTable(a) => table_cmd(a),
    }
}

fn solve_cmd(a: SolveArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.config, Command::Solve)?;
    let dir = a
        .output
        .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::Config("no output directory: pass -o or set output_path".into()))?;
    let problem = cfg.problem.build()?;
    let result = solve(&problem)?;
    let written = emit_result(&result, &cfg, &dir, a.format, a.plot_data)?;
    eprintln!("wrote {} file(s) to {}", written.len(), dir.display());
    Ok(())
}

fn verify_cmd(a: VerifyArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.config, Command::Verify)?;
    let suite: Suite = a.suite.parse().map_err(|e| CliError::Config(format!("--suite: {e}")))?;
    let problem = cfg.problem.build()?;
    let reports = run_suite(suite, &problem, &SuiteTolerances::default(), a.seed.unwrap_or(cfg.seed))?;
    let mut out = io::stdout().lock();
    let mut failed = Vec::new();
    for r in &reports {
        let line = serde_json::to_string(r).map_err(|e| CliError::Serialize(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| CliError::io("<stdout>", e))?;
        if !r.passed {
            failed.push(r.check_name.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    }
}

fn sample_times(horizon: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(horizon >= 0.0 && horizon.is_finite()) || steps == 0 {
        return Err(CliError::Config(format!(
            "need time >= 0 and steps >= 1, got {horizon} and {steps}"
        )));
    }
    Ok((0..=steps).map(|k| horizon * k as f64 / steps as f64).collect())
}

fn oracle_cmd(a: OracleArgs) -> Result<(), CliError> {
    let mut out = csv_sink(a.output.as_deref())?;
    match a.variant {
        OracleVariant::Transport => {
            let alpha = order(a.alpha)?;
            if a.nodes == 0 {
                return Err(CliError::Config("--nodes must be positive".into()));
            }
            let u0 = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
            out.write_record(["t", "x", "u"]).map_err(csv_error)?;
            for t in sample_times(a.time, a.steps)? {
                let kernel = TransportKernel::new(alpha, a.speed, t)?;
                for i in 0..a.nodes {
                    let x = i as f64 / a.nodes as f64;
                    out.write_record([t.to_string(), x.to_string(), kernel.eval(&u0, x).to_string()])
                        .map_err(csv_error)?;
                }
            }
        }
        OracleVariant::Relaxation => {
            let alpha = order(a.alpha)?;
            out.write_record(["t", "u"]).map_err(csv_error)?;
            for t in sample_times(a.time, a.steps)? {
                let u = oracles::relaxation_ode(a.c0, alpha, t)?;
                out.write_record([t.to_string(), u.to_string()]).map_err(csv_error)?;
            }
        }
        OracleVariant::Barrier => {
            let path = a
                .config
                .as_ref()
                .ok_or_else(|| CliError::Config("the barrier variant needs -c <config>".into()))?;
            let cfg = load_config(path, Command::Oracle)?;
            let problem = cfg.problem.build()?;
            let pair = oracles::barrier_pair(
                &problem.initial,
                problem.alpha,
                &problem.hamiltonian,
                initial_lipschitz(&problem),
                &problem.time,
            )?;
            eprintln!("M = {}", pair.m);
            let grid = problem.space;
            let dim = grid.dim();
            let mut header = vec!["t", "x"];
            if dim == 2 {
                header.push("y");
            }
            header.extend(["lower", "upper"]);
            out.write_record(&header).map_err(csv_error)?;
            for t in sample_times(problem.time.horizon(), a.steps)? {
                let (lo, hi) = (pair.lower(t), pair.upper(t));
                for i in 0..grid.len() {
                    let mut row = vec![t.to_string()];
                    row.extend(grid.point(i)[..dim].iter().map(f64::to_string));
                    row.push(lo.values()[i].to_string());
                    row.push(hi.values()[i].to_string());
                    out.write_record(&row).map_err(csv_error)?;
                }
            }
        }
    }
    out.flush().map_err(|e| CliError::io("<output>", e))
}

fn refine_cmd(a: RefineArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.config, Command::Refine)?;
    let problem = cfg.problem.build()?;
    let table = refine_study(&problem, a.levels)?;
    let text = serde_json::to_string_pretty(&table).map_err(|e| CliError::Serialize(e.to_string()))?;
    println!("{text}");
    if table.strictly_decreasing() {
        Ok(())
    } else {
        Err(CliError::CheckFailed("refinement errors do not decrease".into()))
    }
}

fn table_cmd(a: TableArgs) -> Result<(), CliError> {
    if !(a.step > 0.0 && a.step.is_finite() && a.from.is_finite() && a.to >= a.from && a.to.is_finite()) {
        return Err(CliError::Config(format!(
            "need finite --from <= --to and --step > 0, got {}, {}, {}",
            a.from, a.to, a.step
        )));
    }
    let rows = ((a.to - a.from) / a.step * (1.0 + 1e-12)).floor() as usize + 1;
    if rows > MAX_TABLE_ROWS {
        return Err(CliError::Config(format!(
            "{rows} rows exceeds the limit of {MAX_TABLE_ROWS}"
        )));
    }
    let alpha = match a.function {
        TableFn::MittagLeffler | TableFn::Wright => Some(order(a.alpha)?),
        TableFn::Gamma | TableFn::Erfc => None,
    };
    let mut out = csv_sink(None)?;
    out.write_record(["z", "value"]).map_err(csv_error)?;
    for k in 0..rows {
        let z = a.from + k as f64 * a.step;
        let v = match (a.function, alpha) {
            (TableFn::MittagLeffler, Some(al)) => mittag_leffler(al, z)?,
            (TableFn::Wright, Some(al)) => wright(al, z)?,
            (TableFn::Gamma, _) => gamma(z)?,
            (TableFn::Erfc, _) => erfc(z),
            _ => unreachable!("order is parsed for the two-argument functions"),
        };
        out.write_record([z.to_string(), v.to_string()]).map_err(csv_error)?;
    }
    out.flush().map_err(|e| CliError::io("<stdout>", e))
}
