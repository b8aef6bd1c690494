//! Spin-phonon couplings, the smoothed spectral density and the Ohmic fit.

use std::f64::consts::PI;

use crate::chain::ModeSpectrum;
use crate::error::{invalid, Error, Result};

/// Standing-wave phase that keeps only the linear term of the dipole potential.
pub const STANDING_WAVE_PHASE: f64 = PI / 4.0;

/// Gaps narrower than this (in units of `omega_z`) are merged into one bin.
pub const DEGENERATE_GAP: f64 = 1e-12;

pub const MIN_FIT_BINS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaserKind {
    /// Polaron coupling from a single travelling wave.
    TravellingWave,
    /// State-dependent dipole force of an off-resonant standing wave at phase pi/4.
    StandingWaveLinear,
}

impl LaserKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LaserKind::TravellingWave => "travelling_wave",
            LaserKind::StandingWaveLinear => "standing_wave_linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "travelling_wave" => Some(LaserKind::TravellingWave),
            "standing_wave_linear" => Some(LaserKind::StandingWaveLinear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserConfig {
    pub kind: LaserKind,
    /// Lamb-Dicke parameter `k / sqrt(2 m omega_z)`.
    pub eta: f64,
    /// Dipole force `F z0 / omega_z` with `z0 = 1 / sqrt(2 m omega_z)`.
    pub f_dipole: f64,
    /// Tunneling amplitude, i.e. the Rabi frequency of the travelling wave.
    pub delta: f64,
    /// Bias `omega_0 - omega_L`. Carried along but unused by the dynamics.
    pub epsilon: f64,
}

impl LaserConfig {
    pub fn travelling(eta: f64, delta: f64) -> Self {
        LaserConfig {
            kind: LaserKind::TravellingWave,
            eta,
            f_dipole: 0.0,
            delta,
            epsilon: 0.0,
        }
    }

    pub fn standing(f_dipole: f64, delta: f64) -> Self {
        LaserConfig {
            kind: LaserKind::StandingWaveLinear,
            eta: 0.0,
            f_dipole,
            delta,
            epsilon: 0.0,
        }
    }

    pub fn strength(&self) -> f64 {
        match self.kind {
            LaserKind::TravellingWave => self.eta,
            LaserKind::StandingWaveLinear => self.f_dipole,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            LaserKind::TravellingWave if !(self.eta > 0.0) || !self.eta.is_finite() => {
                return Err(invalid("eta", "must be positive for a travelling wave"))
            }
            LaserKind::StandingWaveLinear
                if !(self.f_dipole > 0.0) || !self.f_dipole.is_finite() =>
            {
                return Err(invalid("f_dipole", "must be positive for a standing wave"))
            }
            _ => {}
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(invalid("delta", "must be finite and non-negative"));
        }
        if !self.epsilon.is_finite() {
            return Err(invalid("epsilon", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    pub kind: LaserKind,
    /// `lambda_n` in units of `omega_z`, one per mode.
    pub lambda: Vec<f64>,
}

/// `lambda_n` for each mode.
///
/// Travelling wave: `k zbar_n M_n omega_n = eta M_n sqrt(omega_n)`.
/// Standing wave: `F M_n zbar_n = f M_n / sqrt(omega_n)`,
/// with `zbar_n = 1 / sqrt(2 m omega_n)`.
pub fn couplings(spectrum: &ModeSpectrum, laser: &LaserConfig) -> CouplingSet {
    let strength = laser.strength();
    let lambda = spectrum
        .omega
        .iter()
        .zip(&spectrum.m_at_ion)
        .map(|(&w, &m)| match laser.kind {
            LaserKind::TravellingWave => strength * m * w.sqrt(),
            LaserKind::StandingWaveLinear => strength * m / w.sqrt(),
        })
        .collect();
    CouplingSet {
        kind: laser.kind,
        lambda,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBin {
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

impl SpectralBin {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn weight(&self) -> f64 {
        self.height * self.width()
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Piecewise-constant `J(omega)`: each delta `pi lambda_n^2` is spread over
/// `(omega_n, omega_{n+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub bins: Vec<SpectralBin>,
    /// `pi sum lambda_n^2` over the modes that own a bin.
    pub binned_weight: f64,
}

impl SpectralDensity {
    pub fn smoothed(omega: &[f64], lambda: &[f64]) -> Result<Self> {
        if omega.len() != lambda.len() {
            return Err(invalid("lambda", "length differs from the spectrum"));
        }
        // (frequency, weight) clusters of near-degenerate modes
        let mut clusters: Vec<(f64, f64)> = Vec::with_capacity(omega.len());
        let mut last = f64::NEG_INFINITY;
        for (&w, &l) in omega.iter().zip(lambda) {
            let weight = PI * l * l;
            match clusters.last_mut() {
                Some(c) if w - last < DEGENERATE_GAP => c.1 += weight,
                _ => clusters.push((w, weight)),
            }
            last = w;
        }
        if clusters.len() < 2 {
            return Err(Error::NoIntervals);
        }
        let bins: Vec<SpectralBin> = clusters
            .windows(2)
            .map(|pair| SpectralBin {
                lo: pair[0].0,
                hi: pair[1].0,
                height: pair[0].1 / (pair[1].0 - pair[0].0),
            })
            .collect();
        let binned_weight = clusters[..clusters.len() - 1].iter().map(|c| c.1).sum();
        Ok(SpectralDensity {
            bins,
            binned_weight,
        })
    }

    pub fn total_bin_weight(&self) -> f64 {
        self.bins.iter().map(SpectralBin::weight).sum()
    }

    /// `J(omega)`; zero outside the binned band.
    pub fn eval(&self, omega: f64) -> f64 {
        self.bins
            .iter()
            .find(|b| omega >= b.lo && omega < b.hi)
            .map_or(0.0, |b| b.height)
    }
}

pub fn smoothed_spectral_density(
    spectrum: &ModeSpectrum,
    couplings: &CouplingSet,
) -> Result<SpectralDensity> {
    SpectralDensity::smoothed(&spectrum.omega, &couplings.lambda)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    /// Lowest quarter of the band, starting at the center-of-mass mode.
    pub fn default_for(spectrum: &ModeSpectrum) -> Self {
        let lo = spectrum.omega[0];
        let hi = lo + 0.25 * (spectrum.max_frequency() - lo);
        FitWindow { lo, hi }
    }

    fn contains(&self, bin: &SpectralBin) -> bool {
        let slack = 1e-12 * self.hi.abs().max(1.0);
        bin.lo >= self.lo - slack && bin.hi <= self.hi + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicFit {
    /// Dissipation strength from `J = 2 pi alpha omega` through the origin.
    pub alpha: f64,
    /// Log-log slope of the bin heights; `None` with fewer than two positive bins.
    pub exponent: Option<f64>,
    pub window: FitWindow,
    pub bins_used: usize,
}

impl OhmicFit {
    /// One-line `key=value` report.
    pub fn report(&self) -> String {
        format!(
            "alpha={:.16e} exponent={} window_lo={:.16e} window_hi={:.16e} bins={}",
            self.alpha,
            self.exponent
                .map_or_else(|| "nan".to_string(), |s| format!("{s:.16e}")),
            self.window.lo,
            self.window.hi,
            self.bins_used
        )
    }
}

/// Least-squares Ohmic fit of the bins lying inside `window`, evaluated at
/// the bin midpoints.
pub fn fit_alpha(sd: &SpectralDensity, window: FitWindow) -> Result<OhmicFit> {
    let mut bins: Vec<SpectralBin> = sd
        .bins
        .iter()
        .copied()
        .filter(|b| window.contains(b))
        .collect();
    if bins.len() < MIN_FIT_BINS {
        return Err(Error::FitWindow {
            lo: window.lo,
            hi: window.hi,
            found: bins.len(),
            needed: MIN_FIT_BINS,
        });
    }
    bins.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));

    let (sxy, sxx) = bins.iter().fold((0.0, 0.0), |(sxy, sxx), b| {
        let x = 2.0 * PI * b.mid();
        (sxy + x * b.height, sxx + x * x)
    });
    let alpha = sxy / sxx;

    let logs: Vec<(f64, f64)> = bins
        .iter()
        .filter(|b| b.height > 0.0)
        .map(|b| (b.mid().ln(), b.height.ln()))
        .collect();
    let exponent = linear_fit(&logs).map(|(slope, _)| slope);

    Ok(OhmicFit {
        alpha,
        exponent,
        window,
        bins_used: bins.len(),
    })
}

/// Ordinary least squares `y = slope x + intercept`.
pub(crate) fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Thermodynamic-limit spectral densities keeping only the linear dispersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticDensity {
    pub kind: LaserKind,
    /// Sound-velocity factor `v`.
    pub velocity: f64,
    /// Squared mode function at the addressed ion.
    pub m_bar_sq: f64,
    /// `eta` for a travelling wave, `F z0` for a standing wave.
    pub strength: f64,
}

impl AnalyticDensity {
    pub fn new(kind: LaserKind, velocity: f64, m_bar_sq: f64, strength: f64) -> Result<Self> {
        if !(velocity > 0.0) {
            return Err(invalid("velocity", "must be positive"));
        }
        Ok(AnalyticDensity {
            kind,
            velocity,
            m_bar_sq,
            strength,
        })
    }

    /// `(1/v) Mbar^2 eta^2 omega` or `(1/v) Mbar^2 (F z0)^2 / omega`.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        let prefactor = self.m_bar_sq * self.strength * self.strength / self.velocity;
        match self.kind {
            LaserKind::TravellingWave => Ok(prefactor * omega),
            LaserKind::StandingWaveLinear => {
                if omega == 0.0 || !omega.is_finite() {
                    Err(Error::SpectralDomain(omega))
                } else {
                    Ok(prefactor / omega)
                }
            }
        }
    }

    /// Ohmic strength `Mbar^2 eta^2 / (2 pi v)`; `None` for the sub-Ohmic case.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            LaserKind::TravellingWave => {
                Some(self.m_bar_sq * self.strength * self.strength / (2.0 * PI * self.velocity))
            }
            LaserKind::StandingWaveLinear => None,
        }
    }
}

/// `N` times the mean of `M_n^2` over the `lowest` modes, i.e. the squared
/// amplitude of a mode function normalized to one per ion.
pub fn mode_function_sq(spectrum: &ModeSpectrum, lowest: usize) -> f64 {
    let k = lowest.min(spectrum.len()).max(1);
    let mean = spectrum.m_at_ion[..k].iter().map(|m| m * m).sum::<f64>() / k as f64;
    spectrum.n_ions as f64 * mean
}

/// Ohmic strength per unit `eta^2` for this chain and window.
pub fn reference_alpha(spectrum: &ModeSpectrum, window: FitWindow) -> Result<f64> {
    let unit = couplings(spectrum, &LaserConfig::travelling(1.0, 0.0));
    let sd = smoothed_spectral_density(spectrum, &unit)?;
    Ok(fit_alpha(&sd, window)?.alpha)
}

/// Lamb-Dicke parameter giving the requested fitted `alpha`. Since
/// `J ~ eta^2`, one reference fit at `eta = 1` fixes the answer.
pub fn calibrate_eta(spectrum: &ModeSpectrum, alpha_target: f64, window: FitWindow) -> Result<f64> {
    if !(alpha_target > 0.0) || !alpha_target.is_finite() {
        return Err(invalid("alpha_target", "must be positive"));
    }
    let reference = reference_alpha(spectrum, window)?;
    if !(reference > 0.0) {
        return Err(invalid(
            "alpha_target",
            "reference fit returned a non-positive alpha",
        ));
    }
    Ok((alpha_target / reference).sqrt())
}
