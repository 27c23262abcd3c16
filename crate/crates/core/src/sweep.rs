//! Parameter sweeps built on [`Experiment`]. Every point of a sweep uses
//! the same master seed.

use serde::{Deserialize, Serialize};

use crate::circuit::ErrorModel;
use crate::error::Error;
use crate::experiment::{Experiment, MetricsPoint, TrialConfig};
use crate::fit::{fit_quadratic_origin, scaling_exponent, threshold_crossing, threshold_linearized};

/// The reported value of one sweep point: metrics at the last checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Swept parameter (ε or Δt).
    pub x: f64,
    /// Time of the checkpoint reported.
    pub t: u32,
    pub metrics: MetricsPoint,
    pub aborted: u64,
}

/// Model with `gamma = epsilon / c`.
pub fn model_at_ratio(epsilon: f64, c: f64) -> Result<ErrorModel, Error> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Config(format!("C = epsilon/gamma must lie in (0, 1], got {c}")));
    }
    ErrorModel::new(epsilon, epsilon / c)
}

fn last_point(cfg: TrialConfig, x: f64, trials: u64, seed: u64) -> Result<SweepPoint, Error> {
    let exp = Experiment::new(cfg)?;
    let est = exp.estimate(trials, seed);
    Ok(SweepPoint {
        x,
        t: *exp.checkpoints().last().expect("validated config has a checkpoint"),
        metrics: *est.last(),
        aborted: est.aborted,
    })
}

/// P_NC against ε at fixed C.
pub fn sweep_eps(
    base: &TrialConfig,
    c: f64,
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>, Error> {
    if grid.is_empty() {
        return Err(Error::Config("empty epsilon grid".into()));
    }
    grid.iter()
        .map(|&eps| {
            let cfg = TrialConfig {
                model: model_at_ratio(eps, c)?,
                ..*base
            };
            last_point(cfg, eps, trials, seed)
        })
        .collect()
}

/// P_NC against the recovery period Δt, with the first recovery at
/// `t = Δt`. Reports the last checkpoint at or before `base.t_max`.
pub fn sweep_dt(base: &TrialConfig, grid: &[u32], trials: u64, seed: u64) -> Result<Vec<SweepPoint>, Error> {
    if grid.is_empty() {
        return Err(Error::Config("empty delta_t grid".into()));
    }
    grid.iter()
        .map(|&dt| {
            let cfg = TrialConfig {
                delta_t: dt,
                t_pre: dt,
                ..*base
            };
            last_point(cfg, dt as f64, trials, seed)
        })
        .collect()
}

/// Divisors of `horizon` no larger than `max`, ascending.
pub fn divisors_up_to(horizon: u32, max: u32) -> Vec<u32> {
    (1..=max.min(horizon)).filter(|d| horizon.is_multiple_of(*d)).collect()
}

/// Quadratic fit and log-log slope of a P_NC(ε) sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsFit {
    pub d: f64,
    /// `None` when some point has P_NC = 0 or fewer than 3 points exist.
    pub exponent: Option<f64>,
}

pub fn fit_sweep(points: &[SweepPoint]) -> Result<EpsFit, Error> {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.metrics.p_nc)).collect();
    let d = fit_quadratic_origin(&xy)?;
    let exponent = if xy.len() >= 3 && xy.iter().all(|p| p.1 > 0.0) {
        Some(scaling_exponent(&xy)?)
    } else {
        None
    };
    Ok(EpsFit { d, exponent })
}

/// One row of the threshold curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub c: f64,
    pub d: f64,
    pub eps_th_lin: Option<f64>,
    pub eps_th_cross: Option<f64>,
    pub points: Vec<SweepPoint>,
}

/// For each C: sweep ε, fit `D ε²`, and convert D to thresholds against
/// the baseline at `t = base.t_pre`.
pub fn threshold_curve(
    base: &TrialConfig,
    c_grid: &[f64],
    eps_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<ThresholdRow>, Error> {
    if c_grid.is_empty() {
        return Err(Error::Config("empty C grid".into()));
    }
    c_grid
        .iter()
        .map(|&c| {
            let points = sweep_eps(base, c, eps_grid, trials, seed)?;
            let d = fit_sweep(&points)?.d;
            let (lin, cross) = if d > 0.0 {
                (Some(threshold_linearized(d)?), threshold_crossing(d, base.t_pre.max(1))?)
            } else {
                (None, None)
            };
            Ok(ThresholdRow {
                c,
                d,
                eps_th_lin: lin,
                eps_th_cross: cross,
                points,
            })
        })
        .collect()
}
