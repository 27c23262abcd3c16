//! Command-line flags, the optional TOML config file, and their merge.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use steane_ft::{AncillaKind, Encoding, OnExhaust, VerificationPolicy};

#[derive(Debug, Parser)]
#[command(name = "steane-mc", version, about = "Monte Carlo of fault-tolerant [[7,1,3]] error correction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F0, F1 and P_NC at every recovery up to --t-max.
    Timeseries(Opts),
    /// P_NC against epsilon at fixed C, with quadratic and log-log fits.
    SweepEps(Opts),
    /// P_NC at the horizon against the recovery period.
    SweepDt(Opts),
    /// Fitted D(C) and memory thresholds for each C.
    Threshold(Opts),
    /// Unencoded error probability, closed form and optionally simulated.
    Baseline(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Timeseries(_) => "timeseries",
            Command::SweepEps(_) => "sweep-eps",
            Command::SweepDt(_) => "sweep-dt",
            Command::Threshold(_) => "threshold",
            Command::Baseline(_) => "baseline",
        }
    }

    pub fn opts(&self) -> &Opts {
        match self {
            Command::Timeseries(o)
            | Command::SweepEps(o)
            | Command::SweepDt(o)
            | Command::Threshold(o)
            | Command::Baseline(o) => o,
        }
    }
}

/// Every setting, optional so that a config file can fill the gaps.
/// Config-file keys are the flag names.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// Memory (wait) error probability.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Gate and measurement error probability.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// C = eps/gamma; sets gamma from eps.
    #[arg(long)]
    pub c_ratio: Option<f64>,
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    /// Comma-separated recovery periods.
    #[arg(long, value_delimiter = ',')]
    pub dt_grid: Option<Vec<u32>>,
    /// Comma-separated C values.
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    /// simple | shor | steane | steane-par | steane-par-v
    #[arg(long)]
    pub ancilla: Option<String>,
    /// noisy | perfect
    #[arg(long)]
    pub encoding: Option<String>,
    /// Wait steps between recoveries.
    #[arg(long)]
    pub dt: Option<u32>,
    /// Wait steps before the first recovery.
    #[arg(long)]
    pub t_pre: Option<u32>,
    /// Horizon in wait steps.
    #[arg(long)]
    pub t_max: Option<u32>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Verification attempts per ancilla.
    #[arg(long)]
    pub max_attempts: Option<u32>,
    /// proceed-unverified | abort-trial
    #[arg(long)]
    pub on_exhaust: Option<String>,
    /// Worker threads (never changes the output).
    #[arg(long, env = "STEANE_MC_THREADS")]
    pub threads: Option<usize>,
    /// Also simulate the baseline (baseline command only).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub mc: Option<bool>,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    #[command(flatten)]
    pub settings: Settings,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV; the manifest goes to `<out>.manifest.json`.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Fills every unset field from `file`.
    pub fn or(self, file: Settings) -> Settings {
        Settings {
            eps: self.eps.or(file.eps),
            gamma: self.gamma.or(file.gamma),
            c_ratio: self.c_ratio.or(file.c_ratio),
            eps_grid: self.eps_grid.or(file.eps_grid),
            dt_grid: self.dt_grid.or(file.dt_grid),
            c_grid: self.c_grid.or(file.c_grid),
            ancilla: self.ancilla.or(file.ancilla),
            encoding: self.encoding.or(file.encoding),
            dt: self.dt.or(file.dt),
            t_pre: self.t_pre.or(file.t_pre),
            t_max: self.t_max.or(file.t_max),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            max_attempts: self.max_attempts.or(file.max_attempts),
            on_exhaust: self.on_exhaust.or(file.on_exhaust),
            threads: self.threads.or(file.threads),
            mc: self.mc.or(file.mc),
        }
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn ancilla_or(&self, default: AncillaKind) -> Result<AncillaKind> {
        Ok(match &self.ancilla {
            Some(s) => s.parse()?,
            None => default,
        })
    }

    pub fn encoding_or(&self, default: Encoding) -> Result<Encoding> {
        Ok(match &self.encoding {
            Some(s) => s.parse()?,
            None => default,
        })
    }

    pub fn policy(&self) -> Result<VerificationPolicy> {
        let on_exhaust = match &self.on_exhaust {
            Some(s) => s.parse()?,
            None => OnExhaust::ProceedUnverified,
        };
        Ok(VerificationPolicy::new(self.max_attempts.unwrap_or(10), on_exhaust)?)
    }

    pub fn require_eps(&self) -> Result<f64> {
        match self.eps {
            Some(e) => Ok(e),
            None => bail!("--eps is required"),
        }
    }

    /// Gamma from either --gamma or --c-ratio (exactly one).
    pub fn gamma_for(&self, eps: f64) -> Result<f64> {
        match (self.gamma, self.c_ratio) {
            (Some(_), Some(_)) => bail!("give --gamma or --c-ratio, not both"),
            (Some(g), None) => Ok(g),
            (None, Some(c)) => {
                if !(c > 0.0 && c <= 1.0) {
                    bail!("--c-ratio must lie in (0, 1], got {c}");
                }
                Ok(eps / c)
            }
            (None, None) => bail!("one of --gamma or --c-ratio is required"),
        }
    }

    pub fn require_c(&self) -> Result<f64> {
        match (self.gamma, self.c_ratio) {
            (Some(_), _) => bail!("this command fixes C; use --c-ratio instead of --gamma"),
            (None, Some(c)) => Ok(c),
            (None, None) => bail!("--c-ratio is required"),
        }
    }
}
