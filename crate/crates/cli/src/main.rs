//! `workbench` — configuration-driven runner for the numerical workbench.
//!
//! Usage: `workbench <kind> --config <path> [--out <dir>] [--seed <u64>]`
//! with kinds apply | power | transform | assemble | solve | audit | study,
//! plus `workbench list` to print the experiment catalog. Each run writes
//! `result.csv`, `report.json` and `manifest.json` into the output
//! directory. Exit codes: 0 pass, 1 usage/configuration error, 2 numerical
//! audit failure.

mod build;
mod config;
mod experiments;

use clap::{Args, Parser, Subcommand};
use config::ExperimentConfig;
use experiments::RunError;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "workbench", version, about = "numerical workbench experiment runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config; defaults to the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config; defaults to 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    Apply(RunArgs),
    Power(RunArgs),
    Transform(RunArgs),
    Assemble(RunArgs),
    Solve(RunArgs),
    Audit(RunArgs),
    Study(RunArgs),
    /// Print the experiment catalog as JSON.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (kind, args) = match &cli.cmd {
        Cmd::Apply(a) => ("apply", a),
        Cmd::Power(a) => ("power", a),
        Cmd::Transform(a) => ("transform", a),
        Cmd::Assemble(a) => ("assemble", a),
        Cmd::Solve(a) => ("solve", a),
        Cmd::Audit(a) => ("audit", a),
        Cmd::Study(a) => ("study", a),
        Cmd::List => {
            println!(
                "{}",
                serde_json::to_string_pretty(&experiments::catalog()).expect("catalog serializes")
            );
            return ExitCode::SUCCESS;
        }
    };
    match execute(kind, args) {
        Ok(pass) => ExitCode::from(if pass { 0 } else { 2 }),
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Numeric(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(kind: &str, args: &RunArgs) -> Result<bool, RunError> {
    let started = Instant::now();
    let raw = fs::read(&args.config)
        .map_err(|e| RunError::Usage(format!("{}: {e}", args.config.display())))?;
    let cfg: ExperimentConfig = serde_json::from_slice(&raw)
        .map_err(|e| RunError::Usage(format!("config parse error: {e}")))?;
    if cfg.kind() != kind {
        return Err(RunError::Usage(format!(
            "config kind '{}' does not match subcommand '{kind}'",
            cfg.kind()
        )));
    }
    let base = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    cfg.validate(&base).map_err(RunError::Usage)?;

    let out = args
        .out
        .clone()
        .or_else(|| cfg.out_dir().cloned())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).map_err(|e| RunError::Usage(format!("{}: {e}", out.display())))?;
    let seed = args.seed.or_else(|| cfg.seed()).unwrap_or(0);

    let outcome = experiments::run(&cfg, &out, seed);
    let (pass, report) = match outcome {
        Ok(v) => v,
        Err(RunError::Numeric(e)) => {
            // audit failures still leave a machine-readable report behind
            let report = json!({ "pass": false, "error": e.to_string() });
            let _ = fs::write(
                out.join("report.json"),
                serde_json::to_string_pretty(&report).expect("report serializes"),
            );
            write_manifest(&cfg, &raw, &out, seed, started)?;
            return Err(RunError::Numeric(e));
        }
        Err(e) => return Err(e),
    };
    fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(|e| RunError::Usage(format!("write report.json: {e}")))?;
    write_manifest(&cfg, &raw, &out, seed, started)?;
    Ok(pass)
}

fn write_manifest(
    cfg: &ExperimentConfig,
    raw_config: &[u8],
    out: &Path,
    seed: u64,
    started: Instant,
) -> Result<(), RunError> {
    let manifest = json!({
        "experiment": cfg.kind(),
        "anchor": experiments::anchor_for(cfg),
        "config_sha256": hex::encode(Sha256::digest(raw_config)),
        "seed": seed,
        "versions": {
            "workbench-cli": env!("CARGO_PKG_VERSION"),
            "workbench-core": workbench_core_version(),
        },
        "wall_ms": started.elapsed().as_millis() as u64,
        "outputs": ["result.csv", "report.json"],
    });
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )
    .map_err(|e| RunError::Usage(format!("write manifest.json: {e}")))
}

fn workbench_core_version() -> &'static str {
    // single-workspace build: the core crate shares the CLI version
    env!("CARGO_PKG_VERSION")
}
