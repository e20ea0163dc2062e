use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abstokes::scenario::{run, Report, RunOptions, Scenario};
use abstokes::Error;
use clap::Parser;

/// Run one abstokes scenario and write its report.
#[derive(Debug, Parser)]
#[command(name = "abstokes", version)]
struct Args {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Output directory for report.json and, for sweeps, sweep.csv.
    #[arg(long, default_value = "./out")]
    out: PathBuf,

    /// Also cross-check the adaptive integrals against a midpoint rule.
    #[arg(long)]
    oracle: bool,

    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

const CONFIG_ERROR: u8 = 1;
const NUMERIC_ERROR: u8 = 2;

fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(target)
}

fn write_outputs(dir: &Path, report: &Report) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![write_atomic(dir, "report.json", &report.to_json())?];
    if let Some(csv) = report.csv() {
        written.push(write_atomic(dir, "sweep.csv", &csv)?);
    }
    Ok(written)
}

fn main() -> ExitCode {
    let args = Args::parse();

    let bytes = match fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("abstokes: cannot read {}: {e}", args.config.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let scenario = match Scenario::from_json_slice(&bytes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("abstokes: {}: {e}", args.config.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let report = match run(&scenario, RunOptions { oracle: args.oracle }) {
        Ok(r) => r,
        Err(e @ Error::Config { .. }) => {
            eprintln!("abstokes: {}: {e}", args.config.display());
            return ExitCode::from(CONFIG_ERROR);
        }
        Err(e) => {
            eprintln!("abstokes: {}: {e}", scenario.name);
            return ExitCode::from(NUMERIC_ERROR);
        }
    };

    let written = match write_outputs(&args.out, &report) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("abstokes: cannot write to {}: {e}", args.out.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };

    let code = report.exit_code();
    if code != 0 {
        if !report.converged {
            eprintln!("abstokes: {}: some integrals did not converge", scenario.name);
        }
        if !report.oracle_passed() {
            eprintln!("abstokes: {}: oracle cross-check failed", scenario.name);
        }
    } else if !args.quiet {
        for path in &written {
            println!("{} {}: wrote {}", report.task, scenario.name, path.display());
        }
    }
    ExitCode::from(code as u8)
}
