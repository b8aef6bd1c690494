use crate::coupling::linear_fit;
use crate::error::{Error, Result};
use crate::niba::PolarizationTrace;

/// Fits never look past this fraction of the revival time.
pub const SHORT_TIME_FRACTION: f64 = 0.5;
/// Monotone traces are fitted down to this level of `P`.
pub const DIRECT_FLOOR: f64 = 0.2;
/// A trace that never leaves `[0.9, 1]` shows no measurable decay.
pub const MEASURABLE_BAND: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMethod {
    /// Exponential through `|P|` at the local extrema.
    Envelope,
    /// Exponential through `P` itself.
    Direct,
}

impl DecayMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DecayMethod::Envelope => "envelope",
            DecayMethod::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub gamma: f64,
    pub window: (f64, f64),
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub method: DecayMethod,
    /// False when `P` stays inside `[0.9, 1]` over the whole window.
    pub measurable: bool,
}

/// Initial decay rate of `P(t)` before finite-size recurrences set in.
///
/// Oscillating traces (two or more sign changes and three or more extrema in
/// the window) are fitted through their envelope. Everything else is fitted
/// directly on `ln P`, from `t = 0` down to `P = 0.2` or the window end.
pub fn extract_decay_rate(trace: &PolarizationTrace, tau_rev: f64) -> Result<DecayFit> {
    let h = trace.h;
    let t_cap = (SHORT_TIME_FRACTION * tau_rev).min(trace.t_max());
    let last = ((t_cap / h) + 1e-9).floor() as usize;
    let last = last.min(trace.len().saturating_sub(1));
    if last < 2 {
        return Err(Error::TraceTooShort(format!(
            "{} samples before {t_cap}",
            last + 1
        )));
    }
    let p = &trace.p[..=last];
    let measurable = p.iter().any(|&x| !(MEASURABLE_BAND..=1.0).contains(&x));

    let crossings = p.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    let extrema: Vec<(f64, f64)> = (1..last)
        .filter(|&i| (p[i] - p[i - 1]) * (p[i + 1] - p[i]) < 0.0)
        .map(|i| refine_extremum(trace.t(i), h, p[i - 1], p[i], p[i + 1]))
        .filter(|&(_, v)| v.abs() > 1e-12)
        .collect();

    if crossings >= 2 && extrema.len() >= 3 {
        let points: Vec<(f64, f64)> = extrema.iter().map(|&(t, v)| (t, v.abs().ln())).collect();
        let (slope, intercept) = linear_fit(&points).expect("three distinct extrema");
        return Ok(DecayFit {
            gamma: (-slope).max(0.0),
            window: (points[0].0, points[points.len() - 1].0),
            residual: rms_residual(&points, slope, intercept),
            method: DecayMethod::Envelope,
            measurable,
        });
    }

    let end = p.iter().position(|&x| x < DIRECT_FLOOR).unwrap_or(last);
    let points: Vec<(f64, f64)> = (0..=end)
        .filter(|&i| p[i] > 0.0)
        .map(|i| (trace.t(i), p[i].ln()))
        .collect();
    let (slope, intercept) = linear_fit(&points).ok_or_else(|| {
        Error::TraceTooShort("fewer than two positive samples before P = 0.2".into())
    })?;
    Ok(DecayFit {
        gamma: (-slope).max(0.0),
        window: (0.0, trace.t(end)),
        residual: rms_residual(&points, slope, intercept),
        method: DecayMethod::Direct,
        measurable,
    })
}

/// Vertex of the parabola through three equally spaced samples.
fn refine_extremum(t: f64, h: f64, left: f64, mid: f64, right: f64) -> (f64, f64) {
    let curvature = left - 2.0 * mid + right;
    if curvature == 0.0 {
        return (t, mid);
    }
    let offset = 0.5 * (left - right) / curvature;
    let value = mid - 0.25 * (left - right) * offset;
    (t + offset * h, value)
}

fn rms_residual(points: &[(f64, f64)], slope: f64, intercept: f64) -> f64 {
    let ss: f64 = points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (ss / points.len() as f64).sqrt()
}
