//! Monte Carlo estimation of F0, F1 and P_NC.
//!
//! A trial encodes `|0_L>` (noisily or perfectly), lets the data wait
//! `t_pre` steps, recovers, and then alternates `delta_t` wait steps with a
//! recovery until `t_max`. The data block is classified after every
//! recovery. Only wait steps advance `t`.
//!
//! Trial `i` draws from its own generator seeded by
//! [`trial_seed`]`(master_seed, i)`, so results do not depend on how trials
//! are spread over threads.

use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ancilla::{AncillaKind, VerificationPolicy, DATA, REGISTER};
use crate::circuit::{Circuit, ErrorModel, Frame, Noise, Noiseless, SampledNoise};
use crate::code::{classify_bits, zero_logical_encoder, EncoderSchedule, ErrorClass, N};
use crate::error::Error;
use crate::pauli::{Pauli, PauliMask};
use crate::recovery::{Recovery, RecoveryConfig};

/// Trials handed to one rayon task.
const CHUNK: u64 = 256;

/// How the logical zero is prepared at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// The encoder circuit runs under the error model.
    Noisy,
    /// Start from an error-free `|0_L>`.
    Perfect,
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noisy" => Ok(Encoding::Noisy),
            "perfect" => Ok(Encoding::Perfect),
            other => Err(Error::Config(format!(
                "unknown encoding {other:?} (expected noisy or perfect)"
            ))),
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Encoding::Noisy => "noisy",
            Encoding::Perfect => "perfect",
        })
    }
}

/// Everything that defines a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub model: ErrorModel,
    pub ancilla: AncillaKind,
    pub encoding: Encoding,
    pub delta_t: u32,
    pub t_pre: u32,
    pub t_max: u32,
    pub policy: VerificationPolicy,
    /// Run every recovery gadget without faults (waits between recoveries
    /// stay noisy).
    pub ideal_recovery: bool,
}

impl TrialConfig {
    pub fn new(model: ErrorModel, ancilla: AncillaKind) -> Self {
        TrialConfig {
            model,
            ancilla,
            encoding: Encoding::Noisy,
            delta_t: 1,
            t_pre: 8,
            t_max: 8,
            policy: VerificationPolicy::default(),
            ideal_recovery: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.delta_t == 0 {
            return Err(Error::Config("delta_t must be at least 1".into()));
        }
        if self.t_max < self.t_pre {
            return Err(Error::Config(format!(
                "t_max ({}) is before the first recovery at t_pre ({})",
                self.t_max, self.t_pre
            )));
        }
        if let Some(c) = self.model.c_ratio() {
            if c > 1.0 {
                return Err(Error::Config(format!(
                    "C = epsilon/gamma = {c} exceeds 1"
                )));
            }
        }
        Ok(())
    }

    /// Times at which the data block is classified.
    pub fn checkpoints(&self) -> Vec<u32> {
        if self.delta_t == 0 || self.t_max < self.t_pre {
            return vec![];
        }
        (self.t_pre..=self.t_max).step_by(self.delta_t as usize).collect()
    }
}

/// Mixes a master seed and a trial index into a per-trial seed
/// (two rounds of SplitMix64 finalisation).
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for trial `trial_index`.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(trial_seed(master_seed, trial_index))
}

/// Counts of the three classes at one checkpoint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub f0: u64,
    pub f1: u64,
    pub nc: u64,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.f0 + self.f1 + self.nc
    }

    pub fn add(&mut self, class: ErrorClass) {
        match class {
            ErrorClass::CorrectIdentity => self.f0 += 1,
            ErrorClass::CorrectWeightOne => self.f1 += 1,
            ErrorClass::NonCorrectable => self.nc += 1,
        }
    }

    fn merge(&mut self, other: &ClassCounts) {
        self.f0 += other.f0;
        self.f1 += other.f1;
        self.nc += other.nc;
    }
}

/// Binomial estimate `(p, sqrt(p(1-p)/n))`.
pub fn binomial(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = k as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Estimated probabilities at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsPoint {
    pub x: f64,
    pub f0: f64,
    pub f0_err: f64,
    pub f1: f64,
    pub f1_err: f64,
    pub p_nc: f64,
    pub p_nc_err: f64,
    pub n: u64,
    pub counts: ClassCounts,
}

impl MetricsPoint {
    pub fn from_counts(x: f64, counts: ClassCounts) -> Self {
        let n = counts.total();
        let (f0, f0_err) = binomial(counts.f0, n);
        let (f1, f1_err) = binomial(counts.f1, n);
        let (p_nc, p_nc_err) = binomial(counts.nc, n);
        MetricsPoint {
            x,
            f0,
            f0_err,
            f1,
            f1_err,
            p_nc,
            p_nc_err,
            n,
            counts,
        }
    }
}

/// Result of [`Experiment::estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub points: Vec<MetricsPoint>,
    pub aborted: u64,
}

impl Estimate {
    pub fn last(&self) -> &MetricsPoint {
        self.points.last().expect("at least one checkpoint")
    }
}

/// A validated trial configuration with its circuits built.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: TrialConfig,
    encoder: Option<Circuit>,
    recovery: Recovery,
    checkpoints: Vec<u32>,
}

impl Experiment {
    pub fn new(config: TrialConfig) -> Result<Self, Error> {
        config.validate()?;
        let encoder = match config.encoding {
            Encoding::Noisy => Some(zero_logical_encoder(REGISTER, &DATA, EncoderSchedule::Parallel)?),
            Encoding::Perfect => None,
        };
        Ok(Experiment {
            config,
            encoder,
            recovery: Recovery::new(RecoveryConfig::new(config.ancilla, config.policy))?,
            checkpoints: config.checkpoints(),
        })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    pub fn checkpoints(&self) -> &[u32] {
        &self.checkpoints
    }

    /// Classification at every checkpoint of trial `trial_index`.
    pub fn run_trial(&self, master_seed: u64, trial_index: u64) -> Result<Vec<ErrorClass>, Error> {
        let mut rng = trial_rng(master_seed, trial_index);
        let mut out = Vec::with_capacity(self.checkpoints.len());
        self.run_with(&mut rng, |_, c| out.push(c))?;
        Ok(out)
    }

    fn run_with<R: RngCore>(
        &self,
        rng: &mut R,
        mut record: impl FnMut(usize, ErrorClass),
    ) -> Result<(), Error> {
        let cfg = &self.config;
        let mut frame = PauliMask::identity(REGISTER)?;
        let mut noise = SampledNoise::new(cfg.model, rng);
        if let Some(enc) = &self.encoder {
            enc.run(&mut frame, &mut noise);
        }
        for (i, &t) in self.checkpoints.iter().enumerate() {
            let waits = if i == 0 { t } else { cfg.delta_t };
            idle_data(&mut frame, waits, &mut noise);
            if cfg.ideal_recovery {
                self.recovery.recover(&mut frame, &mut Noiseless)?;
            } else {
                self.recovery.recover(&mut frame, &mut noise)?;
            }
            record(i, classify_bits(frame.x_bits(), frame.z_bits()));
        }
        Ok(())
    }

    /// Runs `trials` trials in parallel on the current rayon pool.
    pub fn estimate(&self, trials: u64, master_seed: u64) -> Estimate {
        let k = self.checkpoints.len();
        let chunks = trials.div_ceil(CHUNK);
        let (counts, aborted) = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut counts = vec![ClassCounts::default(); k];
                let mut aborted = 0u64;
                let mut row = vec![ErrorClass::CorrectIdentity; k];
                for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let mut rng = trial_rng(master_seed, i);
                    match self.run_with(&mut rng, |j, class| row[j] = class) {
                        Ok(()) => {
                            for (acc, &class) in counts.iter_mut().zip(&row) {
                                acc.add(class);
                            }
                        }
                        Err(Error::TrialAborted { .. }) => aborted += 1,
                        Err(e) => panic!("trial {i} failed: {e}"),
                    }
                }
                (counts, aborted)
            })
            .reduce(
                || (vec![ClassCounts::default(); k], 0),
                |(mut a, na), (b, nb)| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        x.merge(y);
                    }
                    (a, na + nb)
                },
            );
        Estimate {
            points: self
                .checkpoints
                .iter()
                .zip(counts)
                .map(|(&t, c)| MetricsPoint::from_counts(t as f64, c))
                .collect(),
            aborted,
        }
    }
}

/// `steps` wait steps on the data block.
fn idle_data<M: Noise>(frame: &mut Frame, steps: u32, noise: &mut M) {
    for _ in 0..steps {
        for q in 0..N {
            let code = noise.wait();
            if code != 0 {
                frame.apply(q, Pauli::from_code(code));
            }
        }
    }
}

/// Monte Carlo of one unencoded qubit under wait errors. Entry `t - 1` of
/// the result is the fraction of trials lost by step `t`; a trial is lost
/// at its first X or Y.
pub fn baseline_mc(epsilon: f64, t_max: u32, trials: u64, master_seed: u64) -> Result<Vec<MetricsPoint>, Error> {
    let model = ErrorModel::new(epsilon, 0.0)?;
    let first_loss = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u64; t_max as usize];
            for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut rng = trial_rng(master_seed, i);
                for slot in hist.iter_mut() {
                    if model.sample_wait(&mut rng).has_x() {
                        *slot += 1;
                        break;
                    }
                }
            }
            hist
        })
        .reduce(
            || vec![0u64; t_max as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    let mut lost = 0;
    Ok(first_loss
        .iter()
        .enumerate()
        .map(|(t, &h)| {
            lost += h;
            MetricsPoint::from_counts(
                (t + 1) as f64,
                ClassCounts {
                    f0: trials - lost,
                    f1: 0,
                    nc: lost,
                },
            )
        })
        .collect())
}
