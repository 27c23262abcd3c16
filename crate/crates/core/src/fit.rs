//! Closed-form baseline, least-squares fits and threshold extraction.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Probability that an unencoded qubit is corrupted after `t` wait steps:
/// `1 - (1 - 2ε/3)^t`.
pub fn p_ne(epsilon: f64, t: u32) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside [0, 1]")));
    }
    Ok(p_ne_unchecked(epsilon, t as f64))
}

#[inline]
fn p_ne_unchecked(epsilon: f64, t: f64) -> f64 {
    -(t * (-2.0 * epsilon / 3.0).ln_1p()).exp_m1()
}

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope from the residual variance.
    pub slope_err: f64,
    pub n: usize,
}

impl LinearFit {
    /// Decay rate `A` of a fidelity fit `F = -A t + B`.
    pub fn decay_rate(&self) -> f64 {
        -self.slope
    }
}

pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit, Error> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Fit(format!("linear fit needs at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::Fit("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_err = (sse / (nf - 2.0) / sxx).sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        slope_err,
        n,
    })
}

/// Least-squares `p = D ε²` through the origin: `D = Σ p ε² / Σ ε⁴`.
pub fn fit_quadratic_origin(points: &[(f64, f64)]) -> Result<f64, Error> {
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "quadratic fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| p.0.is_nan() || p.0 <= 0.0) {
        return Err(Error::Fit(format!("epsilon must be positive, got {}", p.0)));
    }
    let num: f64 = points.iter().map(|&(e, p)| p * e * e).sum();
    let den: f64 = points.iter().map(|&(e, _)| e.powi(4)).sum();
    Ok(num / den)
}

/// Slope of `log p` against `log ε`.
pub fn scaling_exponent(points: &[(f64, f64)]) -> Result<f64, Error> {
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Fit(format!(
            "log-log fit needs positive data, got ({}, {})",
            p.0, p.1
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|p| (p.0.ln(), p.1.ln())).collect();
    Ok(fit_linear(&logs)?.slope)
}

/// `16 / (3 D)`: where `D ε²` meets the first-order baseline `8 · 2ε/3`.
pub fn threshold_linearized(d: f64) -> Result<f64, Error> {
    if d.is_nan() || d <= 0.0 {
        return Err(Error::Domain(format!("D must be positive, got {d}")));
    }
    Ok(16.0 / (3.0 * d))
}

/// Positive root of `D ε² = p_ne(ε, t_pre)` on (0, 1) by bisection, or
/// `None` if the curves do not cross there.
pub fn threshold_crossing(d: f64, t_pre: u32) -> Result<Option<f64>, Error> {
    if d.is_nan() || d <= 0.0 {
        return Err(Error::Domain(format!("D must be positive, got {d}")));
    }
    if t_pre == 0 {
        return Err(Error::Domain("t_pre must be at least 1".into()));
    }
    let t = t_pre as f64;
    // g is convex with g(0) = 0 and g'(0) < 0, so there is at most one
    // positive root and it is bracketed iff g(1) > 0.
    let g = |e: f64| d * e * e - p_ne_unchecked(e, t);
    if g(1.0) <= 0.0 {
        return Ok(None);
    }
    // Start the bracket below the root: g < 0 on (0, root).
    let mut lo = (2.0 * t / (3.0 * d)).min(0.5) * 1e-3;
    while g(lo) >= 0.0 {
        lo *= 0.5;
    }
    let mut hi = 1.0;
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
