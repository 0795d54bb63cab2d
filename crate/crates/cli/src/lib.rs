//! Command-line front end: file ingestion, the build pipeline, verification
//! against the brute-force oracle, and stable JSON reports.
//!
//! Every subcommand is also exposed as a `cmd_*` function so it can be driven
//! from tests without spawning a process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use bpk_core::chain::EliminationTrace;
use bpk_core::deah::{analyze_substructures, PhaseTimings};
use bpk_core::network::{AlphaVector, BetaVector};
use bpk_core::oracle::{enumerate_all_paths, DEFAULT_PATH_CAP};
use bpk_core::select::SelectionResult;
use bpk_core::subroutine::subroutine_basis;
use bpk_core::{certify_basis, run_deah, validate_network, DeahOptions, NetworkSpec, Path, RawNetwork, RunStats, Verdict};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PATH_CAP_ENV: &str = "BPK_PATH_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },

    #[error("{var} must be a positive integer, got {value:?}")]
    BadEnv { var: &'static str, value: String },

    #[error(transparent)]
    Core(#[from] bpk_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bpk_core::Error as E;
        match self {
            CliError::Core(E::PathCountGuardExceeded(_)) => EXIT_GUARD,
            CliError::Core(E::RankShortfall { .. } | E::Inconsistent) => EXIT_VERIFY,
            _ => EXIT_INVALID,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// The path guard, from `BPK_PATH_CAP` when set.
pub fn path_cap() -> Result<usize> {
    match std::env::var(PATH_CAP_ENV) {
        Err(_) => Ok(DEFAULT_PATH_CAP),
        Ok(value) => match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::BadEnv { var: PATH_CAP_ENV, value }),
        },
    }
}

fn read(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &FsPath, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| CliError::Parse { path: path.to_owned(), source })
}

pub fn load_spec(path: &FsPath) -> Result<NetworkSpec> {
    let raw: RawNetwork = parse(path, &read(path)?)?;
    Ok(validate_network(&raw)?)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Basis file: paths in canonical order, run statistics, optional trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile<S, T = EliminationTrace> {
    pub paths: Vec<Path>,
    pub stats: S,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<T>,
}

impl<S: Serialize, T: Serialize> BasisFile<S, T> {
    /// One line of compact JSON; paths make pretty output needlessly tall.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("basis file serializes");
        s.push('\n');
        s
    }
}

/// Only the part of a basis file that verification needs.
#[derive(Debug, Deserialize)]
struct BasisPaths {
    paths: Vec<Path>,
}

pub fn cmd_validate(spec_file: &FsPath) -> Result<String> {
    Ok(pretty(&load_spec(spec_file)?.to_raw()))
}

#[derive(Debug, Serialize)]
pub struct SubstructureEntry {
    pub index: usize,
    pub layers: Vec<usize>,
    pub beta: BetaVector,
    pub alpha: AlphaVector,
    /// Substructure paths that subdivide this one.
    pub subdivided_by: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct SubstructureReport {
    pub substructures: Vec<SubstructureEntry>,
    pub selection: SelectionResult,
}

pub fn cmd_substructures(spec_file: &FsPath) -> Result<String> {
    let spec = load_spec(spec_file)?;
    let a = analyze_substructures(&spec, path_cap()?)?;
    let substructures = (0..a.paths.len())
        .map(|i| SubstructureEntry {
            index: i,
            layers: a.paths[i].layers.clone(),
            beta: a.betas[i].clone(),
            alpha: a.alphas[i].clone(),
            subdivided_by: a.u_sets[i].members.iter().copied().collect(),
        })
        .collect();
    Ok(pretty(&SubstructureReport { substructures, selection: a.selection }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubroutineStats {
    pub m: usize,
    pub hidden_nodes: usize,
    pub w_max: usize,
    pub basis_size: usize,
    pub direct_count: usize,
    pub cross_count: usize,
}

pub fn cmd_subroutine(spec_file: &FsPath) -> Result<String> {
    let spec = load_spec(spec_file)?;
    let b = subroutine_basis(&spec)?;
    let stats = SubroutineStats {
        m: spec.edge_count(),
        hidden_nodes: spec.hidden_node_count(),
        w_max: spec.max_width(),
        basis_size: b.len(),
        direct_count: b.direct_count,
        cross_count: b.cross_count,
    };
    Ok(BasisFile::<_, EliminationTrace> { paths: b.paths, stats, trace: None }.to_json())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BasisOptions {
    pub emit_trace: bool,
    pub threads: Option<usize>,
}

/// Output of `basis`. Timings are kept out of the file so it stays byte-stable.
#[derive(Debug, Clone)]
pub struct BasisRun {
    pub json: String,
    pub stats: RunStats,
    pub timings: PhaseTimings,
}

pub fn cmd_basis(spec_file: &FsPath, options: BasisOptions) -> Result<BasisRun> {
    let spec = load_spec(spec_file)?;
    let out = run_deah(&spec, &DeahOptions { path_cap: path_cap()?, threads: options.threads })?;
    let file = BasisFile {
        paths: out.basis,
        stats: out.stats.clone(),
        trace: options.emit_trace.then_some(out.trace),
    };
    Ok(BasisRun { json: file.to_json(), stats: out.stats, timings: out.timings })
}

pub fn cmd_verify(spec_file: &FsPath, basis_file: &FsPath) -> Result<Verdict> {
    let spec = load_spec(spec_file)?;
    let basis: BasisPaths = parse(basis_file, &read(basis_file)?)?;
    Ok(certify_basis(&basis.paths, &spec, path_cap()?)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub path_count: usize,
    pub m: usize,
    pub hidden_nodes: usize,
    pub rank: usize,
}

pub fn cmd_oracle_rank(spec_file: &FsPath) -> Result<RankReport> {
    let spec = load_spec(spec_file)?;
    let space = enumerate_all_paths(&spec, path_cap()?)?;
    Ok(RankReport {
        path_count: space.all_paths.len(),
        m: spec.edge_count(),
        hidden_nodes: spec.hidden_node_count(),
        rank: space.rank,
    })
}

#[derive(Debug, Parser)]
#[command(name = "bpk", version, about = "Basis path sets for layered networks with skip connections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a network file; print it normalized.
    Validate { spec: PathBuf },
    /// Report every substructure path, its encodings, and the selection.
    Substructures { spec: PathBuf },
    /// Basis of a network without skip connections.
    Subroutine {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a basis path set.
    Basis {
        spec: PathBuf,
        /// Include the elimination trace in the output.
        #[arg(long)]
        emit_trace: bool,
        /// Worker threads for the per-substructure bases.
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check a basis file against every path of the network.
    Verify { spec: PathBuf, basis: PathBuf },
    /// Rank of all input-to-output paths.
    OracleRank { spec: PathBuf },
}

fn emit(text: &str, out_file: Option<&FsPath>, stdout: &mut dyn Write) -> Result<()> {
    match out_file {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_owned(), source }),
        None => {
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Validate { spec } => emit(&cmd_validate(&spec)?, None, stdout)?,
        Command::Substructures { spec } => emit(&cmd_substructures(&spec)?, None, stdout)?,
        Command::Subroutine { spec, out } => emit(&cmd_subroutine(&spec)?, out.as_deref(), stdout)?,
        Command::Basis { spec, emit_trace, threads, out } => {
            let run = cmd_basis(&spec, BasisOptions { emit_trace, threads })?;
            emit(&run.json, out.as_deref(), stdout)?;
            let t = run.timings;
            let _ = writeln!(
                stderr,
                "{{\"wall_seconds\":{{\"select\":{:.6},\"bases\":{:.6},\"eliminate\":{:.6}}}}}",
                t.select.as_secs_f64(),
                t.bases.as_secs_f64(),
                t.eliminate.as_secs_f64()
            );
        }
        Command::Verify { spec, basis } => {
            let verdict = cmd_verify(&spec, &basis)?;
            emit(&pretty(&verdict), None, stdout)?;
            if !verdict.is_basis() {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::OracleRank { spec } => emit(&pretty(&cmd_oracle_rank(&spec)?), None, stdout)?,
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the subcommand; returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
