use rayon::prelude::*;

use crate::chain::ModeSpectrum;
use crate::coupling::{LaserConfig, LaserKind};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathState {
    /// Phonon temperature in units of `omega_z` (`k_B = 1`).
    pub temperature: f64,
}

impl BathState {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(invalid("temperature", "must be finite and non-negative"));
        }
        Ok(BathState { temperature })
    }

    pub fn zero() -> Self {
        BathState { temperature: 0.0 }
    }

    /// `coth(omega / 2T)`, exactly one at `T = 0`.
    pub fn coth(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            1.0
        } else {
            1.0 / (omega / (2.0 * self.temperature)).tanh()
        }
    }
}

/// Displacements `eta_n^2 = (k zbar_n M_n)^2` and thermal factors of the
/// polaron-coupled modes.
#[derive(Debug, Clone, PartialEq)]
pub struct BathModes {
    pub omega: Vec<f64>,
    pub eta_sq: Vec<f64>,
    pub coth: Vec<f64>,
}

impl BathModes {
    pub fn from_parts(omega: Vec<f64>, eta_sq: Vec<f64>, bath: BathState) -> Self {
        let coth = omega.iter().map(|&w| bath.coth(w)).collect();
        BathModes {
            omega,
            eta_sq,
            coth,
        }
    }

    /// Modes of a chain illuminated by a travelling wave with Lamb-Dicke parameter `eta`.
    pub fn travelling_wave(spectrum: &ModeSpectrum, eta: f64, bath: BathState) -> Self {
        let eta_sq = spectrum
            .omega
            .iter()
            .zip(&spectrum.m_at_ion)
            .map(|(&w, &m)| eta * eta * m * m / w)
            .collect();
        Self::from_parts(spectrum.omega.clone(), eta_sq, bath)
    }

    /// `Q1(tau) = sum eta_n^2 coth(omega_n / 2T) (1 - cos omega_n tau)` and
    /// `Q2(tau) = sum eta_n^2 sin omega_n tau`, so that
    /// `<e^{ikz(tau)} e^{-ikz(0)}> = exp(-Q1 - i Q2)`.
    pub fn exponents(&self, tau: f64) -> (f64, f64) {
        let mut q1 = 0.0;
        let mut q2 = 0.0;
        for ((&w, &e), &c) in self.omega.iter().zip(&self.eta_sq).zip(&self.coth) {
            let (s, cos) = (w * tau).sin_cos();
            q1 += e * c * (1.0 - cos);
            q2 += e * s;
        }
        (q1, q2)
    }

    /// `sqrt(Q1''(0) + Q2'(0)^2)`, the rate at which the kernel first varies.
    pub fn curvature_rate(&self) -> f64 {
        let mut q1pp = 0.0;
        let mut q2p = 0.0;
        for ((&w, &e), &c) in self.omega.iter().zip(&self.eta_sq).zip(&self.coth) {
            q1pp += e * c * w * w;
            q2p += e * w;
        }
        (q1pp + q2p * q2p).sqrt()
    }
}

/// Thermal exponents for a travelling-wave laser at delay `tau`.
pub fn bath_exponents(
    spectrum: &ModeSpectrum,
    laser: &LaserConfig,
    bath: BathState,
    tau: f64,
) -> Result<(f64, f64)> {
    if laser.kind != LaserKind::TravellingWave {
        return Err(invalid(
            "laser.kind",
            "the polaron kernel is defined for the travelling wave only",
        ));
    }
    Ok(BathModes::travelling_wave(spectrum, laser.eta, bath).exponents(tau))
}

/// `K(tau) = -Delta^2 e^{-Q1(tau)} cos Q2(tau)` on a uniform grid `tau_i = i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub h: f64,
    pub delta: f64,
    pub k_values: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

/// Envelope level the kernel must fall below before a recurrence counts.
const RECURRENCE_DROP: f64 = 0.5;
/// A recurrence is a return of the envelope to within 10% of one.
const RECURRENCE_RETURN: f64 = 0.9;

impl KernelTable {
    pub fn tabulate(modes: &BathModes, delta: f64, h: f64, len: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid("h", "kernel grid step must be positive"));
        }
        let (q1, q2): (Vec<f64>, Vec<f64>) = (0..len)
            .into_par_iter()
            .map(|i| modes.exponents(i as f64 * h))
            .unzip();
        let d2 = delta * delta;
        let k_values = q1
            .iter()
            .zip(&q2)
            .map(|(&a, &b)| -d2 * (-a).exp() * b.cos())
            .collect();
        Ok(KernelTable {
            h,
            delta,
            k_values,
            q1,
            q2,
        })
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    pub fn tau(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// First delay at which `e^{-Q1}` climbs back above 0.9 after having
    /// dropped below 0.5.
    pub fn first_recurrence(&self) -> Option<f64> {
        let mut dropped = false;
        for (i, &q) in self.q1.iter().enumerate().skip(1) {
            let env = (-q).exp();
            if env < RECURRENCE_DROP {
                dropped = true;
            } else if dropped && env >= RECURRENCE_RETURN {
                return Some(self.tau(i));
            }
        }
        None
    }
}

/// Tabulated kernel of a chain driven by a travelling wave.
pub fn kernel(
    spectrum: &ModeSpectrum,
    laser: &LaserConfig,
    bath: BathState,
    h: f64,
    len: usize,
) -> Result<KernelTable> {
    if laser.kind != LaserKind::TravellingWave {
        return Err(invalid(
            "laser.kind",
            "the polaron kernel is defined for the travelling wave only",
        ));
    }
    let modes = BathModes::travelling_wave(spectrum, laser.eta, bath);
    KernelTable::tabulate(&modes, laser.delta, h, len)
}
