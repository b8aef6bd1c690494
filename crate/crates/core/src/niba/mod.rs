//! Non-interacting blip approximation for the travelling-wave (polaron) coupling.

mod kernel;
mod volterra;

use std::f64::consts::PI;

pub use kernel::{bath_exponents, kernel, BathModes, BathState, KernelTable};
pub use volterra::{
    grid_len, solve_volterra, solve_volterra_fn, PolarizationTrace, VolterraScheme, BLOW_UP,
};

use crate::chain::{revival_time, ChainSpec, ModeSpectrum, RevivalTime};
use crate::coupling::{calibrate_eta, reference_alpha, FitWindow, LaserConfig, LaserKind};
use crate::error::{invalid, Error, Result};

/// Grid points per shortest dynamical time scale.
pub const POINTS_PER_SCALE: f64 = 40.0;
/// Default horizon in units of the revival time.
pub const DEFAULT_HORIZON: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub chain: ChainSpec,
    pub laser: LaserConfig,
    pub bath: BathState,
    /// When set, `laser.eta` is replaced by the calibrated value.
    pub alpha_target: Option<f64>,
    pub fit_window: Option<FitWindow>,
    pub h: Option<f64>,
    pub t_max: Option<f64>,
    pub scheme: VolterraScheme,
}

impl EvolveConfig {
    pub fn new(chain: ChainSpec, laser: LaserConfig, bath: BathState) -> Self {
        EvolveConfig {
            chain,
            laser,
            bath,
            alpha_target: None,
            fit_window: None,
            h: None,
            t_max: None,
            scheme: VolterraScheme::Gregory,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_target = Some(alpha);
        self
    }
}

/// Result of an end-to-end run.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub eta: f64,
    /// Ohmic strength of the chain at `eta`, when the fit window holds enough bins.
    pub alpha: Option<f64>,
    pub revival: Option<RevivalTime>,
    pub h: f64,
    pub t_max: f64,
    pub kernel: KernelTable,
    pub trace: PolarizationTrace,
}

/// Memory time `1 / (2 pi alpha T)` of the high-temperature kernel.
pub fn memory_time(alpha: f64, temperature: f64) -> f64 {
    1.0 / (2.0 * PI * alpha * temperature)
}

/// `min(2 pi / Delta, tau_m, 1 / r, 2 pi / omega_max) / 40`, where `r` is the
/// kernel's initial curvature rate. Infinite scales drop out.
pub fn default_step(delta: f64, modes: &BathModes, alpha: Option<f64>, temperature: f64) -> f64 {
    let mut scales = vec![];
    if delta > 0.0 {
        scales.push(2.0 * PI / delta);
    }
    if let Some(a) = alpha.filter(|&a| a > 0.0) {
        if temperature > 0.0 {
            scales.push(memory_time(a, temperature));
        }
    }
    let rate = modes.curvature_rate();
    if rate > 0.0 {
        scales.push(1.0 / rate);
    }
    let w_max = modes.omega.iter().copied().fold(0.0, f64::max);
    if w_max > 0.0 {
        scales.push(2.0 * PI / w_max);
    }
    scales.into_iter().fold(f64::INFINITY, f64::min) / POINTS_PER_SCALE
}

pub fn evolve(cfg: &EvolveConfig) -> Result<Evolution> {
    let spectrum = ModeSpectrum::compute(&cfg.chain)?;
    evolve_with_spectrum(cfg, &spectrum)
}

/// [`evolve`] for a precomputed spectrum of `cfg.chain`.
pub fn evolve_with_spectrum(cfg: &EvolveConfig, spectrum: &ModeSpectrum) -> Result<Evolution> {
    if cfg.laser.kind != LaserKind::TravellingWave {
        return Err(invalid(
            "laser.kind",
            "dynamics are implemented for the travelling wave only",
        ));
    }
    let window = cfg
        .fit_window
        .unwrap_or_else(|| FitWindow::default_for(spectrum));
    let eta = match cfg.alpha_target {
        Some(target) => calibrate_eta(spectrum, target, window)?,
        None => cfg.laser.eta,
    };
    let laser = LaserConfig { eta, ..cfg.laser };
    laser.validate()?;

    let alpha = reference_alpha(spectrum, window)
        .ok()
        .map(|a| a * eta * eta);
    let revival = revival_time(spectrum).ok();
    let modes = BathModes::travelling_wave(spectrum, eta, cfg.bath);

    let h = match cfg.h {
        Some(h) => h,
        None => default_step(laser.delta, &modes, alpha, cfg.bath.temperature),
    };
    let t_max = match (cfg.t_max, revival) {
        (Some(t), _) => t,
        (None, Some(r)) => DEFAULT_HORIZON * r.tau,
        (None, None) => return Err(Error::SingleIon),
    };
    let len = grid_len(t_max, h)?;
    let table = KernelTable::tabulate(&modes, laser.delta, h, len)?;
    let mut trace = solve_volterra(&table.k_values, h, cfg.scheme)?;

    let mut meta = vec![
        ("chain.n_ions", cfg.chain.n_ions.to_string()),
        (
            "chain.addressed_index",
            cfg.chain.addressed_index.to_string(),
        ),
        ("chain.d0", cfg.chain.spacing.as_str().to_string()),
        ("laser.kind", laser.kind.as_str().to_string()),
        ("laser.eta", format!("{eta:.16e}")),
        ("laser.delta", format!("{:.16e}", laser.delta)),
        ("laser.epsilon", format!("{:.16e}", laser.epsilon)),
        ("bath.temperature", format!("{:.16e}", cfg.bath.temperature)),
        ("fit.window_lo", format!("{:.16e}", window.lo)),
        ("fit.window_hi", format!("{:.16e}", window.hi)),
        ("solver.scheme", cfg.scheme.as_str().to_string()),
        ("solver.h", format!("{h:.16e}")),
        ("solver.t_max", format!("{t_max:.16e}")),
    ];
    if let Some(a) = cfg.alpha_target {
        meta.push(("laser.alpha_target", format!("{a:.16e}")));
    }
    if let Some(a) = alpha {
        meta.push(("fit.alpha", format!("{a:.16e}")));
    }
    if let Some(r) = revival {
        meta.push(("tau_rev", format!("{:.16e}", r.tau)));
    }
    trace.metadata = meta.into_iter().map(|(k, v)| (k.to_string(), v)).collect();

    Ok(Evolution {
        eta,
        alpha,
        revival,
        h,
        t_max,
        kernel: table,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_tunneling_means_no_dynamics() {
        let cfg = EvolveConfig {
            t_max: Some(3.0),
            ..EvolveConfig::new(
                ChainSpec::new(10).unwrap(),
                LaserConfig::travelling(0.5, 0.0),
                BathState::new(2.0).unwrap(),
            )
        };
        let ev = evolve(&cfg).unwrap();
        assert!(ev.trace.p.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn initial_polarization_decreases() {
        let cfg = EvolveConfig {
            t_max: Some(1.0),
            ..EvolveConfig::new(
                ChainSpec::new(12).unwrap(),
                LaserConfig::travelling(0.3, 4.0),
                BathState::new(5.0).unwrap(),
            )
        };
        let ev = evolve(&cfg).unwrap();
        let p = &ev.trace.p;
        assert_eq!(p[0], 1.0);
        assert!(p[1] <= p[0]);
        // P(h) = 1 - Delta^2 h^2 / 2 + O(h^3), so dP/dt(0) = 0 up to O(h)
        assert!((p[0] - p[1]) / ev.h <= 16.0 * ev.h);
        assert!(p.iter().all(|x| x.abs() <= 1.0 + 1e-6));
    }

    #[test]
    fn single_ion_needs_an_explicit_horizon() {
        let base = EvolveConfig::new(
            ChainSpec::new(1).unwrap(),
            LaserConfig::travelling(0.3, 1.0),
            BathState::zero(),
        );
        assert_eq!(evolve(&base).unwrap_err(), Error::SingleIon);
        let ev = evolve(&EvolveConfig {
            t_max: Some(2.0),
            ..base
        })
        .unwrap();
        assert!(ev.alpha.is_none());
    }

    #[test]
    fn calibration_sets_eta() {
        let cfg = EvolveConfig {
            t_max: Some(0.5),
            ..EvolveConfig::new(
                ChainSpec::new(30).unwrap(),
                LaserConfig::travelling(1.0, 2.0),
                BathState::zero(),
            )
            .with_alpha(0.05)
        };
        let ev = evolve(&cfg).unwrap();
        assert!((ev.alpha.unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn standing_wave_is_rejected() {
        let cfg = EvolveConfig::new(
            ChainSpec::new(4).unwrap(),
            LaserConfig::standing(0.3, 1.0),
            BathState::zero(),
        );
        assert!(matches!(
            evolve(&cfg),
            Err(Error::InvalidParameter {
                name: "laser.kind",
                ..
            })
        ));
    }

    #[test]
    fn memory_time_value() {
        assert!((memory_time(2e-3, 250.0) - 1.0 / PI).abs() < 1e-15);
    }
}
