use crate::chain::{ChainSpec, ModeSpectrum};
use crate::coupling::{reference_alpha, FitWindow};
use crate::error::{invalid, Result};

/// Mass of beryllium-9 in atomic mass units.
pub const BERYLLIUM9_AMU: f64 = 9.012_183_1;
/// Recoil frequency quoted for beryllium-9 at 300 nm, in kHz.
pub const PAPER_RECOIL_KHZ: f64 = 245.0;

const PLANCK: f64 = 6.626_070_15e-34;
const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// `C(N)`: fitted `alpha` at `eta = 1`, so that `alpha = C(N) E_R / omega_z`.
pub fn chain_constant(chain: &ChainSpec) -> Result<f64> {
    let spectrum = ModeSpectrum::compute(chain)?;
    reference_alpha(&spectrum, FitWindow::default_for(&spectrum))
}

/// Trap frequency in units of the recoil energy that yields `alpha_target`.
pub fn required_trap_frequency(c_n: f64, alpha_target: f64) -> Result<f64> {
    if !(alpha_target > 0.0) || !alpha_target.is_finite() {
        return Err(invalid("alpha_target", "must be positive"));
    }
    Ok(c_n / alpha_target)
}

/// Recoil energy `hbar^2 k^2 / 2m` expressed as a frequency `h / (2 m lambda^2)`, in kHz.
pub fn recoil_frequency_khz(mass_amu: f64, wavelength_nm: f64) -> f64 {
    let m = mass_amu * ATOMIC_MASS_UNIT;
    let lambda = wavelength_nm * 1e-9;
    PLANCK / (2.0 * m * lambda * lambda) / 1e3
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRow {
    pub alpha: f64,
    pub omega_z_over_er: f64,
    pub n_ions: usize,
    /// `omega_z / 2 pi` in kHz for the chosen recoil frequency.
    pub khz: f64,
}

/// Planning curve for every `(N, alpha)` pair, sorted by `N` then `alpha`.
pub fn plan(chains: &[ChainSpec], alphas: &[f64], recoil_khz: f64) -> Result<Vec<PlanRow>> {
    if chains.is_empty() {
        return Err(invalid("analysis.n_list", "must not be empty"));
    }
    if alphas.is_empty() {
        return Err(invalid("analysis.alpha_grid", "must not be empty"));
    }
    let mut chains = chains.to_vec();
    chains.sort_by_key(|c| c.n_ions);
    let mut alphas = alphas.to_vec();
    alphas.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(chains.len() * alphas.len());
    for chain in &chains {
        let c_n = chain_constant(chain)?;
        for &alpha in &alphas {
            let ratio = required_trap_frequency(c_n, alpha)?;
            rows.push(PlanRow {
                alpha,
                omega_z_over_er: ratio,
                n_ions: chain.n_ions,
                khz: ratio * recoil_khz,
            });
        }
    }
    Ok(rows)
}
