use rayon::prelude::*;

use super::decay::{extract_decay_rate, DecayMethod};
use super::regime::{classify_regime, classify_zero_temperature, RegimeLabel};
use crate::chain::ModeSpectrum;
use crate::error::{invalid, Error, Result};
use crate::niba::{evolve_with_spectrum, BathState, EvolveConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub temperature: f64,
    pub gamma: f64,
    pub regime: RegimeLabel,
    pub method: DecayMethod,
    pub residual: f64,
    pub measurable: bool,
}

/// Initial decay rate over an `alpha x T` grid.
///
/// Every grid point is an independent solve on the shared mode spectrum.
/// Unless `base.t_max` is set the march stops at half the revival time,
/// which is all the decay fit looks at. Rows come back sorted by `(T, alpha)`.
pub fn sweep_rate_vs_alpha(
    base: &EvolveConfig,
    alphas: &[f64],
    temperatures: &[f64],
) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(invalid("analysis.alpha_grid", "must not be empty"));
    }
    if temperatures.is_empty() {
        return Err(invalid("analysis.t_list", "must not be empty"));
    }
    let spectrum = ModeSpectrum::compute(&base.chain)?;
    let tau_rev = crate::chain::revival_time(&spectrum).ok().map(|r| r.tau);
    let t_max = match (base.t_max, tau_rev) {
        (Some(t), _) => t,
        (None, Some(tau)) => 0.5 * tau,
        (None, None) => return Err(Error::SingleIon),
    };
    let tau_rev = tau_rev.unwrap_or(2.0 * t_max);

    let mut points: Vec<(f64, f64)> = temperatures
        .iter()
        .flat_map(|&t| alphas.iter().map(move |&a| (t, a)))
        .collect();
    points.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    points
        .par_iter()
        .map(|&(temperature, alpha)| {
            let cfg = EvolveConfig {
                bath: BathState::new(temperature)?,
                alpha_target: Some(alpha),
                t_max: Some(t_max),
                ..base.clone()
            };
            let ev = evolve_with_spectrum(&cfg, &spectrum)?;
            let fit = extract_decay_rate(&ev.trace, tau_rev)?;
            let regime = if temperature > 0.0 {
                classify_regime(alpha, temperature, cfg.laser.delta)?.label
            } else {
                classify_zero_temperature(alpha)
            };
            Ok(SweepRow {
                alpha,
                temperature,
                gamma: fit.gamma,
                regime,
                method: fit.method,
                residual: fit.residual,
                measurable: fit.measurable,
            })
        })
        .collect()
}
