//! Command-line experiment runner for `gkp-shadows`.
//!
//! Every subcommand takes flags, optionally seeded from a flat `key=value`
//! file given with `--config`, and writes JSON reports that embed the fully
//! resolved configuration. Exit codes: 0 on success, 2 on invalid input and 3
//! on numerical non-convergence.

mod commands;
mod svg;

use clap::{Args, Parser, Subcommand};
use gkp_shadows::GkpError;
use serde::Serialize;
use std::ffi::OsString;
use std::path::PathBuf;

/// Exit code for successful runs.
pub const EXIT_OK: i32 = 0;
/// Exit code for invalid input, usage errors and I/O failures.
pub const EXIT_INVALID: i32 = 2;
/// Exit code for numerical non-convergence.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gkp-lab", version, about = "Logical shadow experiments for GKP codes")]
struct Cli {
    /// Flat key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Depolarizing coefficients of a measurement channel.
    ChannelCoeffs(ChannelCoeffsArgs),
    /// Runs the heterodyne shadow protocol and writes JSON-lines records.
    ShadowRun(ShadowRunArgs),
    /// Median-of-means estimates of logical observables from a record file.
    ShadowEstimate(ShadowEstimateArgs),
    /// Random-lattice Wigner sampling protocol.
    CvShadow(CvShadowArgs),
    /// Monte Carlo check of the mean value theorem for Siegel transforms.
    LatticeMvt(LatticeMvtArgs),
    /// Compiles a symplectic matrix over Z_d into elementary generators.
    CompileSymplectic(CompileArgs),
    /// SVG heatmap of a twirl characteristic function.
    TwirlViz(TwirlVizArgs),
}

#[derive(Debug, Args, Serialize)]
struct ChannelCoeffsArgs {
    /// Code name: square or hexagonal.
    #[arg(long, default_value = "hexagonal")]
    code: String,
    /// Measurement: heterodyne, click or parity.
    #[arg(long, default_value = "heterodyne")]
    povm: String,
    /// Displacement noise width for the parity bound.
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    /// Monte Carlo samples for the heterodyne shell statistics.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Gauss-Legendre order for the click integrals.
    #[arg(long, default_value_t = 24)]
    quadrature_order: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ShadowRunArgs {
    /// State, e.g. `grid:hexagonal,delta=0.2,logical=0` or `coherent:0.1,0.2`.
    #[arg(long)]
    state: String,
    #[arg(long, default_value = "hexagonal")]
    code: String,
    /// Only heterodyne read-out produces pointer records.
    #[arg(long, default_value = "heterodyne")]
    povm: String,
    /// Displacement twirl: none, walk:m or gaussian:sigma.
    #[arg(long, default_value = "walk:3")]
    twirl: String,
    /// Number of rounds; defaults to the median-of-means budget for one
    /// Pauli observable at the given epsilon and delta.
    #[arg(long)]
    n_total: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct ShadowEstimateArgs {
    /// Record file written by `shadow-run`.
    #[arg(long)]
    records: PathBuf,
    /// Logical observable: a Pauli label or four coefficients `cI,cX,cY,cZ`.
    #[arg(long, required = true)]
    observable: Vec<String>,
    /// Code name; defaults to the one stored in the record header.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Optional CSV convergence table of running means against sample size.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CvShadowArgs {
    /// Single-mode state, e.g. `coherent:0.2,0.1`.
    #[arg(long)]
    state: String,
    /// Observable as a state name, e.g. `coherent:0,0.1` for a coherent projector.
    #[arg(long, required = true)]
    observable: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Wigner read-out: oracle or parity.
    #[arg(long, default_value = "oracle")]
    mode: String,
    /// Parity shots per sampled point.
    #[arg(long, default_value_t = 1)]
    parity_reps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct LatticeMvtArgs {
    /// Test function: `ball:R` or `gaussian:s` for `exp(-|x|^2 / (2 s^2))`.
    #[arg(long = "f", default_value = "ball:1")]
    function: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CompileArgs {
    /// Number of modes.
    #[arg(long)]
    n: usize,
    /// Prime qudit dimension.
    #[arg(long)]
    d: u64,
    /// Row-major `2n x 2n` integer entries separated by commas.
    #[arg(long)]
    matrix: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct TwirlVizArgs {
    #[arg(long, default_value = "square")]
    code: String,
    /// walk:m or gaussian:sigma.
    #[arg(long, default_value = "gaussian:0.25")]
    twirl: String,
    /// Half-width of the plotted square.
    #[arg(long, default_value_t = 2.0)]
    extent: f64,
    /// Cells per axis.
    #[arg(long, default_value_t = 120)]
    grid: usize,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
}

/// Errors surfaced by [`run`], mapped to exit codes.
#[derive(Debug)]
pub(crate) enum LabError {
    Lib(GkpError),
    Invalid(String),
}

impl From<GkpError> for LabError {
    fn from(e: GkpError) -> Self {
        LabError::Lib(e)
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Invalid(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Invalid(format!("json error: {e}"))
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Invalid(format!("csv error: {e}"))
    }
}

impl std::fmt::Display for LabError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabError::Lib(e) => write!(f, "{e}"),
            LabError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl LabError {
    fn exit_code(&self) -> i32 {
        match self {
            LabError::Lib(e) if e.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_INVALID,
        }
    }
}

pub(crate) type LabResult<T> = std::result::Result<T, LabError>;

/// Appends `--key value` for every entry of the config file whose flag is
/// not already present on the command line.
fn merge_config(argv: Vec<OsString>) -> LabResult<Vec<OsString>> {
    let pos = argv.iter().position(|a| a == "--config");
    let path = match pos.and_then(|p| argv.get(p + 1)) {
        Some(p) => PathBuf::from(p),
        None => return Ok(argv),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| LabError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = argv.clone();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            LabError::Invalid(format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if !given.iter().any(|g| *g == key) {
            out.push(format!("--{key}").into());
            out.push(v.trim().into());
        }
    }
    Ok(out)
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INVALID;
        }
    };
    match pool.install(|| commands::dispatch(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_errors_map_to_three() {
        assert_eq!(LabError::from(GkpError::NonConvergence("x".into())).exit_code(), EXIT_NUMERIC);
        assert_eq!(LabError::from(GkpError::Pathological("x".into())).exit_code(), EXIT_NUMERIC);
        assert_eq!(LabError::from(GkpError::Validation("x".into())).exit_code(), EXIT_INVALID);
        assert_eq!(LabError::Invalid("x".into()).exit_code(), EXIT_INVALID);
    }

    #[test]
    fn config_merge_keeps_explicit_flags() {
        let dir = std::env::temp_dir().join(format!("gkp-lab-cfg-{}", std::process::id()));
        std::fs::write(&dir, "seed=3\nn_total = 10\n").unwrap();
        let argv: Vec<OsString> =
            ["gkp-lab", "x", "--config", dir.to_str().unwrap(), "--seed=7"].iter().map(OsString::from).collect();
        let merged = merge_config(argv).unwrap();
        std::fs::remove_file(&dir).unwrap();
        let tail: Vec<_> = merged[5..].iter().map(|s| s.to_str().unwrap()).collect();
        assert_eq!(tail, ["--n-total", "10"]);
    }
}
