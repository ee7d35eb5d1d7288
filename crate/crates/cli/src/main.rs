use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use majcert_cli::config::ExperimentConfig;
use majcert_cli::report::{write_csv, Report};

#[derive(Parser)]
#[command(name = "majcert", version, about = "Run and verify majority-certificate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suite described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; defaults to the config's output_path, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Rerun a report's config and check the report against the rerun.
    Verify {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>, jobs: usize) -> Result<ExitCode> {
    let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
    let (cfg, params) = match ExperimentConfig::parse(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(ExitCode::from(2));
        }
    };
    let output = majcert_cli::run(&cfg, &params, seed, jobs)?;
    let json = output.report.to_json();
    match out.or_else(|| cfg.output_path.clone()) {
        Some(path) => fs::write(&path, &json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    if let Some(path) = &cfg.csv_path {
        write_csv(&output.report, &output.timings, path)?;
    }
    let s = &output.report.summary;
    eprintln!("{}/{} instances verified", s.verified, s.instances);
    Ok(if output.report.all_verified() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(path: PathBuf, jobs: usize) -> Result<ExitCode> {
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let report: Report = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: invalid report: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let issues = majcert_cli::verify(&report, jobs)?;
    if issues.is_empty() {
        println!("report verified: {} records", report.records.len());
        Ok(ExitCode::SUCCESS)
    } else {
        for i in &issues {
            println!("{i}");
        }
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, seed, out, jobs } => run(config, seed, out, jobs),
        Command::Verify { report, jobs } => verify(report, jobs),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
