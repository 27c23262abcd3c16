mod commands;
mod options;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;

use commands::{Output, Usage};
use options::{Cli, Command, Settings};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ABORTED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(aborted) => {
            eprintln!("steane-mc: {aborted} trial(s) aborted by ancilla verification");
            ExitCode::from(EXIT_ABORTED)
        }
        Err(e) => {
            eprintln!("steane-mc: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}

/// Runs one command and returns the number of aborted trials.
fn run(command: &Command) -> Result<u64> {
    let opts = command.opts();
    let mut settings = opts.settings.clone();
    if let Some(path) = &opts.config {
        let file = Settings::load(path).map_err(Usage)?;
        settings = settings.or(file);
    }
    let threads = match settings.threads {
        Some(0) => return Err(Usage(anyhow::anyhow!("--threads must be at least 1")).into()),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("starting worker threads")?;

    let start = Instant::now();
    let output = pool.install(|| match command {
        Command::Timeseries(_) => commands::timeseries(&settings),
        Command::SweepEps(_) => commands::sweep_eps_cmd(&settings),
        Command::SweepDt(_) => commands::sweep_dt_cmd(&settings),
        Command::Threshold(_) => commands::threshold_cmd(&settings),
        Command::Baseline(_) => commands::baseline_cmd(&settings),
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    write_outputs(command.name(), opts.out.as_ref(), &output, threads, elapsed)?;
    Ok(output.aborted)
}

fn write_outputs(name: &str, out: Option<&PathBuf>, output: &Output, threads: usize, elapsed: f64) -> Result<()> {
    let manifest = json!({
        "tool": "steane-mc",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "config": output.config,
        "threads": threads,
        "wall_clock_seconds": elapsed,
        "aborted_trials": output.aborted,
        "results": output.results,
    });
    let manifest = serde_json::to_string_pretty(&manifest)? + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, &output.csv).with_context(|| format!("writing {}", path.display()))?;
            let mut m = path.clone().into_os_string();
            m.push(".manifest.json");
            let m = PathBuf::from(m);
            std::fs::write(&m, manifest).with_context(|| format!("writing {}", m.display()))?;
        }
        None => {
            std::io::stdout().write_all(output.csv.as_bytes())?;
            std::io::stderr().write_all(manifest.as_bytes())?;
        }
    }
    Ok(())
}
