//! `switch-verdict`: certify, classify and simulate switched linear systems
//! described in a JSON file.

mod config;
mod pipeline;
mod reproduce;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::ProblemConfig;
use crate::pipeline::{run, Command, RunReport};
use crate::reproduce::{render, reproduce, Case, Status};

#[derive(Parser)]
#[command(name = "switch-verdict", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build Lyapunov certificates and edge gains.
    Certify(RunArgs),
    /// Certify, then evaluate both margins and classify the signal.
    Classify(RunArgs),
    /// Certify, then simulate each initial state and check its envelopes.
    Simulate(RunArgs),
    /// Run a built-in reference case and compare against published numbers.
    Reproduce {
        #[arg(value_enum)]
        case: Case,
        /// Directory for report.json and trace files.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Problem description; read from stdin when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Directory for report.json and trace files.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn read_config(path: Option<&Path>) -> Result<ProblemConfig> {
    let text = match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    ProblemConfig::parse(&text)
}

fn prepare(out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn write_report(report: &RunReport, out: Option<&Path>) -> Result<String> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    if let Some(dir) = out {
        fs::write(dir.join("report.json"), &json).context("writing report.json")?;
    }
    Ok(json)
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Cmd::Reproduce { case, out } => {
            prepare(out.as_deref())?;
            let report = reproduce(case, out.as_deref())?;
            write_report(&report, out.as_deref())?;
            let checks = report.reproduction.as_deref().unwrap_or_default();
            print!("{}", render(checks));
            let failed = checks.iter().any(|c| c.status == Status::Fail);
            Ok(if failed { EXIT_MISMATCH } else { 0 })
        }
        Cmd::Certify(args) => run_command(Command::Certify, args),
        Cmd::Classify(args) => run_command(Command::Classify, args),
        Cmd::Simulate(args) => run_command(Command::Simulate, args),
    }
}

fn run_command(command: Command, args: RunArgs) -> Result<u8> {
    let config = read_config(args.config.as_deref())?;
    prepare(args.out.as_deref())?;
    let report = run(command, &config, args.out.as_deref())?;
    print!("{}", write_report(&report, args.out.as_deref())?);
    Ok(0)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
