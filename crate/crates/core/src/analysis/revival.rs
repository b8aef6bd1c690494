use crate::error::{invalid, Error, Result};
use crate::niba::PolarizationTrace;

/// Detector conventions, all in units of the revival time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalConfig {
    pub search: (f64, f64),
    pub baseline: (f64, f64),
    /// Peak must exceed `threshold * baseline`.
    pub threshold: f64,
}

impl Default for RevivalConfig {
    fn default() -> Self {
        RevivalConfig {
            search: (0.7, 1.3),
            baseline: (0.4, 0.6),
            threshold: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalReport {
    pub detected: bool,
    pub t_peak: f64,
    pub amplitude: f64,
    pub baseline: f64,
}

pub fn detect_revival(trace: &PolarizationTrace, tau_rev: f64) -> Result<RevivalReport> {
    detect_revival_with(trace, tau_rev, &RevivalConfig::default())
}

pub fn detect_revival_with(
    trace: &PolarizationTrace,
    tau_rev: f64,
    cfg: &RevivalConfig,
) -> Result<RevivalReport> {
    if !(tau_rev > 0.0) {
        return Err(invalid("tau_rev", "must be positive"));
    }
    let need = cfg.search.1 * tau_rev;
    if trace.t_max() + 0.5 * trace.h < need {
        return Err(Error::TraceTooShort(format!(
            "trace ends at {} but the search window ends at {need}",
            trace.t_max()
        )));
    }
    let range = |lo: f64, hi: f64| {
        let a = (lo * tau_rev / trace.h).ceil() as usize;
        let b = ((hi * tau_rev / trace.h).floor() as usize).min(trace.len() - 1);
        a..=b
    };
    let baseline = range(cfg.baseline.0, cfg.baseline.1)
        .map(|i| trace.p[i].abs())
        .fold(0.0, f64::max);

    let search = range(cfg.search.0, cfg.search.1);
    let (first, last) = (*search.start(), *search.end());
    let (peak, amplitude) =
        search
            .map(|i| (i, trace.p[i].abs()))
            .fold((first, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    // a peak pinned to the window edge is a slope, not a revival
    let interior = peak > first && peak < last;
    Ok(RevivalReport {
        detected: interior && amplitude > cfg.threshold * baseline,
        t_peak: trace.t(peak),
        amplitude,
        baseline,
    })
}
