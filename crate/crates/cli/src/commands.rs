//! One function per subcommand. Each resolves its settings (errors here are
//! usage errors) and then runs the experiment.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde_json::{json, Value};
use steane_ft::experiment::baseline_mc;
use steane_ft::fit::{log_space, p_ne};
use steane_ft::sweep::{divisors_up_to, fit_sweep, sweep_dt, sweep_eps, threshold_curve, SweepPoint};
use steane_ft::{AncillaKind, Encoding, ErrorModel, Experiment, TrialConfig};

use crate::options::Settings;

pub const DEFAULT_C_GRID: [f64; 6] = [0.1, 0.3, 0.5, 0.6, 0.8, 1.0];

/// A resolution failure: bad or conflicting settings.
#[derive(Debug)]
pub struct Usage(pub anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| Usage(e).into())
}

/// What a command produced.
pub struct Output {
    pub csv: String,
    pub config: Value,
    pub results: Value,
    pub aborted: u64,
}

/// Shortest round-trip rendering; `1.0` rather than `1`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(x: Option<f64>) -> String {
    num(x.unwrap_or(f64::NAN))
}

fn base_config(s: &Settings, model: ErrorModel, ancilla: AncillaKind, encoding: Encoding) -> Result<TrialConfig> {
    let mut c = TrialConfig::new(model, ancilla);
    c.encoding = encoding;
    c.policy = s.policy()?;
    Ok(c)
}

fn trial_config_json(c: &TrialConfig) -> Value {
    json!({
        "eps": c.model.epsilon(),
        "gamma": c.model.gamma(),
        "ancilla": c.ancilla.name(),
        "encoding": c.encoding.to_string(),
        "dt": c.delta_t,
        "t-pre": c.t_pre,
        "t-max": c.t_max,
        "max-attempts": c.policy.max_attempts(),
        "on-exhaust": c.policy.on_exhaust(),
    })
}

fn positive_trials(s: &Settings, default: u64) -> Result<u64> {
    let n = s.trials.unwrap_or(default);
    if n == 0 {
        bail!("--trials must be at least 1");
    }
    Ok(n)
}

pub fn timeseries(s: &Settings) -> Result<Output> {
    let (exp, trials, seed) = usage((|| {
        let eps = s.require_eps()?;
        let model = ErrorModel::new(eps, s.gamma_for(eps)?)?;
        let mut cfg = base_config(
            s,
            model,
            s.ancilla_or(AncillaKind::SteanePar)?,
            s.encoding_or(Encoding::Noisy)?,
        )?;
        cfg.delta_t = s.dt.unwrap_or(1);
        cfg.t_pre = s.t_pre.unwrap_or(cfg.delta_t);
        cfg.t_max = s.t_max.unwrap_or(200);
        Ok((Experiment::new(cfg)?, positive_trials(s, 100_000)?, s.seed.unwrap_or(0)))
    })())?;
    let est = exp.estimate(trials, seed);
    let mut csv = String::from("t,f0,f0_err,f1,f1_err,pnc,pnc_err,n\n");
    for (p, t) in est.points.iter().zip(exp.checkpoints()) {
        writeln!(
            csv,
            "{t},{},{},{},{},{},{},{}",
            num(p.f0),
            num(p.f0_err),
            num(p.f1),
            num(p.f1_err),
            num(p.p_nc),
            num(p.p_nc_err),
            p.n
        )?;
    }
    Ok(Output {
        csv,
        config: json!({ "trial": trial_config_json(exp.config()), "trials": trials, "seed": seed }),
        results: json!({ "checkpoints": exp.checkpoints().len() }),
        aborted: est.aborted,
    })
}

fn sweep_csv(x_name: &str, pts: &[SweepPoint], int_x: bool) -> Result<String> {
    let mut csv = format!("{x_name},pnc,pnc_err,n\n");
    for p in pts {
        let x = if int_x { format!("{}", p.x as u64) } else { num(p.x) };
        writeln!(csv, "{x},{},{},{}", num(p.metrics.p_nc), num(p.metrics.p_nc_err), p.metrics.n)?;
    }
    Ok(csv)
}

fn eps_grid(s: &Settings) -> Result<Vec<f64>> {
    let grid = s.eps_grid.clone().unwrap_or_else(|| log_space(1e-4, 1e-3, 5));
    if grid.is_empty() {
        bail!("--eps-grid is empty");
    }
    Ok(grid)
}

fn single_recovery_base(s: &Settings, ancilla: AncillaKind) -> Result<TrialConfig> {
    let mut cfg = base_config(s, ErrorModel::noiseless(), s.ancilla_or(ancilla)?, s.encoding_or(Encoding::Perfect)?)?;
    cfg.delta_t = s.dt.unwrap_or(1);
    cfg.t_pre = s.t_pre.unwrap_or(8);
    cfg.t_max = s.t_max.unwrap_or(cfg.t_pre);
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep_eps_cmd(s: &Settings) -> Result<Output> {
    let (base, c, grid, trials, seed) = usage((|| {
        let c = s.require_c()?;
        let base = single_recovery_base(s, AncillaKind::SteanePar)?;
        Ok((base, c, eps_grid(s)?, positive_trials(s, 1_000_000)?, s.seed.unwrap_or(0)))
    })())?;
    let pts = usage(sweep_eps(&base, c, &grid, trials, seed).map_err(Into::into))?;
    let fit = fit_sweep(&pts)?;
    let mut cfg = trial_config_json(&base);
    cfg["c-ratio"] = json!(c);
    cfg["eps-grid"] = json!(grid);
    cfg.as_object_mut().unwrap().remove("eps");
    cfg.as_object_mut().unwrap().remove("gamma");
    Ok(Output {
        csv: sweep_csv("eps", &pts, false)?,
        config: json!({ "trial": cfg, "trials": trials, "seed": seed }),
        results: json!({ "d": fit.d, "exponent": fit.exponent, "checkpoint_t": pts[0].t }),
        aborted: pts.iter().map(|p| p.aborted).sum(),
    })
}

pub fn sweep_dt_cmd(s: &Settings) -> Result<Output> {
    let (base, grid, trials, seed) = usage((|| {
        let eps = s.require_eps()?;
        let model = ErrorModel::new(eps, s.gamma_for(eps)?)?;
        let mut base = base_config(s, model, s.ancilla_or(AncillaKind::Simple)?, s.encoding_or(Encoding::Noisy)?)?;
        base.t_max = s.t_max.unwrap_or(1200);
        let grid = s.dt_grid.clone().unwrap_or_else(|| divisors_up_to(base.t_max, 200));
        if grid.is_empty() {
            bail!("--dt-grid is empty");
        }
        for &dt in &grid {
            TrialConfig { delta_t: dt, t_pre: dt, ..base }.validate()?;
        }
        Ok((base, grid, positive_trials(s, 100_000)?, s.seed.unwrap_or(0)))
    })())?;
    let pts = sweep_dt(&base, &grid, trials, seed)?;
    let mut cfg = trial_config_json(&base);
    cfg["dt-grid"] = json!(grid);
    cfg.as_object_mut().unwrap().remove("dt");
    cfg.as_object_mut().unwrap().remove("t-pre");
    Ok(Output {
        csv: sweep_csv("dt", &pts, true)?,
        config: json!({ "trial": cfg, "trials": trials, "seed": seed }),
        results: json!({
            "checkpoint_t": pts.iter().map(|p| p.t).collect::<Vec<_>>(),
        }),
        aborted: pts.iter().map(|p| p.aborted).sum(),
    })
}

pub fn threshold_cmd(s: &Settings) -> Result<Output> {
    let (base, c_grid, grid, trials, seed) = usage((|| {
        if s.gamma.is_some() || s.c_ratio.is_some() {
            bail!("threshold sweeps C; use --c-grid");
        }
        let base = single_recovery_base(s, AncillaKind::SteanePar)?;
        let c_grid = s.c_grid.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
        if c_grid.is_empty() {
            bail!("--c-grid is empty");
        }
        if let Some(c) = c_grid.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
            bail!("C values must lie in (0, 1], got {c}");
        }
        Ok((base, c_grid, eps_grid(s)?, positive_trials(s, 1_000_000)?, s.seed.unwrap_or(0)))
    })())?;
    let rows = usage(threshold_curve(&base, &c_grid, &grid, trials, seed).map_err(Into::into))?;
    let mut csv = String::from("c,d,eps_th_lin,eps_th_cross\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{}",
            num(r.c),
            num(r.d),
            opt_num(r.eps_th_lin),
            opt_num(r.eps_th_cross)
        )?;
    }
    let mut cfg = trial_config_json(&base);
    cfg["c-grid"] = json!(c_grid);
    cfg["eps-grid"] = json!(grid);
    cfg.as_object_mut().unwrap().remove("eps");
    cfg.as_object_mut().unwrap().remove("gamma");
    let per_c: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "c": r.c,
                "d": r.d,
                "eps_th_lin": r.eps_th_lin,
                "eps_th_cross": r.eps_th_cross,
                "points": r.points.iter().map(|p| json!({
                    "eps": p.x,
                    "pnc": p.metrics.p_nc,
                    "pnc_err": p.metrics.p_nc_err,
                    "n": p.metrics.n,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Output {
        csv,
        config: json!({ "trial": cfg, "trials": trials, "seed": seed }),
        results: json!({ "rows": per_c }),
        aborted: rows.iter().flat_map(|r| &r.points).map(|p| p.aborted).sum(),
    })
}

pub fn baseline_cmd(s: &Settings) -> Result<Output> {
    let (eps, t_max, mc) = usage((|| {
        let eps = s.require_eps()?;
        if !(0.0..=1.0).contains(&eps) {
            bail!("--eps must lie in [0, 1], got {eps}");
        }
        let t_max = s.t_max.unwrap_or(100);
        let mc = match s.mc.unwrap_or(false) {
            true => Some((positive_trials(s, 1_000_000)?, s.seed.unwrap_or(0))),
            false => None,
        };
        Ok((eps, t_max, mc))
    })())?;
    let sim = match mc {
        Some((trials, seed)) => Some(baseline_mc(eps, t_max, trials, seed)?),
        None => None,
    };
    let mut csv = String::from(if sim.is_some() { "t,pne,pne_mc,pne_mc_err\n" } else { "t,pne\n" });
    for t in 1..=t_max {
        write!(csv, "{t},{}", num(p_ne(eps, t)?))?;
        if let Some(sim) = &sim {
            let p = &sim[t as usize - 1];
            write!(csv, ",{},{}", num(p.p_nc), num(p.p_nc_err))?;
        }
        csv.push('\n');
    }
    Ok(Output {
        csv,
        config: json!({
            "eps": eps,
            "t-max": t_max,
            "mc": mc.is_some(),
            "trials": mc.map(|m| m.0),
            "seed": mc.map(|m| m.1),
        }),
        results: json!({}),
        aborted: 0,
    })
}
