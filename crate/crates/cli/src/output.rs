//! Result serialization. Floats are written with the shortest representation
//! that parses back to the same `f64`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fhj_core::solver::StepRecord;
use fhj_core::SolveResult;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

pub const SOLUTION_CSV: &str = "solution.csv";
pub const SOLUTION_JSON: &str = "solution.json";
pub const SLICE_DIR: &str = "slices";

fn space_header(dim: usize) -> &'static [&'static str] {
    if dim == 1 {
        &["x"]
    } else {
        &["x", "y"]
    }
}

/// Writes `t,x[,y],u`, time-major, then by flat node index.
pub fn write_csv<W: Write>(result: &SolveResult, w: W) -> csv::Result<()> {
    let grid = *result.grid();
    let dim = grid.dim();
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t"];
    header.extend_from_slice(space_header(dim));
    header.push("u");
    out.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(dim + 2);
    for (n, slice) in result.trajectory.iter().enumerate() {
        let t = result.time.node(n).to_string();
        for (i, u) in slice.values().iter().enumerate() {
            row.clear();
            row.push(t.clone());
            let x = grid.point(i);
            row.extend(x[..dim].iter().map(f64::to_string));
            row.push(u.to_string());
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One `x[,y],u` file per time slice.
fn write_slice<W: Write>(result: &SolveResult, n: usize, w: W) -> csv::Result<()> {
    let grid = *result.grid();
    let dim = grid.dim();
    let mut out = csv::Writer::from_writer(w);
    let mut header = space_header(dim).to_vec();
    header.push("u");
    out.write_record(&header)?;
    for (i, u) in result.trajectory[n].values().iter().enumerate() {
        let x = grid.point(i);
        let mut row: Vec<String> = x[..dim].iter().map(f64::to_string).collect();
        row.push(u.to_string());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Step diagnostics without wall-clock time, so that output is reproducible.
#[derive(Serialize)]
struct StepSummary {
    step: usize,
    time: f64,
    max: f64,
    min: f64,
    cfl_margin: f64,
    history_len: usize,
    iterations: usize,
    residual: f64,
}

impl From<&StepRecord> for StepSummary {
    fn from(r: &StepRecord) -> Self {
        Self {
            step: r.step,
            time: r.time,
            max: r.max,
            min: r.min,
            cfl_margin: r.cfl_margin,
            history_len: r.history_len,
            iterations: r.iterations,
            residual: r.residual,
        }
    }
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "fhj-core")]
    core: &'static str,
    #[serde(rename = "fhj-cli")]
    cli: &'static str,
}

#[derive(Serialize)]
struct Metadata<'a> {
    config: &'a RunConfig,
    versions: Versions,
    dim: usize,
    nodes_per_dim: usize,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    metadata: Metadata<'a>,
    times: Vec<f64>,
    /// Node coordinates, in the same order as each row of `values`.
    nodes: Vec<Vec<f64>>,
    values: Vec<&'a [f64]>,
    diagnostics: Vec<StepSummary>,
}

pub fn write_json<W: Write>(result: &SolveResult, config: &RunConfig, w: W) -> serde_json::Result<()> {
    let grid = *result.grid();
    let doc = JsonResult {
        metadata: Metadata {
            config,
            versions: Versions {
                core: fhj_core::VERSION,
                cli: env!("CARGO_PKG_VERSION"),
            },
            dim: grid.dim(),
            nodes_per_dim: grid.nodes_per_dim(),
        },
        times: result.time.nodes().collect(),
        nodes: (0..grid.len()).map(|i| grid.point(i)[..grid.dim()].to_vec()).collect(),
        values: result.trajectory.iter().map(|s| s.values()).collect(),
        diagnostics: result.diagnostics.iter().map(StepSummary::from).collect(),
    };
    serde_json::to_writer_pretty(w, &doc)
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Serialize(format!("{}: {other:?}", path.display())),
    }
}

/// Writes the requested files under `dir` (created if missing) and returns
/// their paths.
pub fn emit_result(
    result: &SolveResult,
    config: &RunConfig,
    dir: &Path,
    format: Format,
    plot_data: bool,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    if format.csv() {
        let path = dir.join(SOLUTION_CSV);
        write_csv(result, create(&path)?).map_err(|e| csv_err(&path, e))?;
        written.push(path);
    }
    if format.json() {
        let path = dir.join(SOLUTION_JSON);
        let mut w = create(&path)?;
        write_json(result, config, &mut w).map_err(|e| CliError::Serialize(format!("{}: {e}", path.display())))?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    if plot_data {
        let slices = dir.join(SLICE_DIR);
        fs::create_dir_all(&slices).map_err(|e| CliError::io(&slices, e))?;
        let width = result.trajectory.len().to_string().len().max(4);
        for n in 0..result.trajectory.len() {
            let path = slices.join(format!("slice_{n:0width$}.csv"));
            write_slice(result, n, create(&path)?).map_err(|e| csv_err(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
