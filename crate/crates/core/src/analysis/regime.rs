use crate::error::{invalid, Result};
use crate::niba::memory_time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RegimeLabel {
    Coherent,
    Overdamped,
    Localized,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeLabel::Coherent => "coherent",
            RegimeLabel::Overdamped => "overdamped",
            RegimeLabel::Localized => "localized",
        }
    }
}

/// High-temperature classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub tau_m: f64,
    /// `tau_m * Delta`
    pub product: f64,
    pub label: RegimeLabel,
    /// Overdamped relaxation rate `Delta^2 tau_m`.
    pub gamma_predicted: f64,
}

/// Coherent iff `tau_m Delta > 1`; the boundary itself counts as overdamped.
pub fn classify_regime(alpha: f64, temperature: f64, delta: f64) -> Result<RegimeReport> {
    if !(temperature > 0.0) {
        return Err(invalid(
            "temperature",
            "high-temperature classification needs T > 0; use the alpha-based zero-temperature regimes",
        ));
    }
    if !(alpha > 0.0) {
        return Err(invalid("alpha", "must be positive"));
    }
    let tau_m = memory_time(alpha, temperature);
    let product = tau_m * delta;
    Ok(RegimeReport {
        tau_m,
        product,
        label: if product > 1.0 {
            RegimeLabel::Coherent
        } else {
            RegimeLabel::Overdamped
        },
        gamma_predicted: delta * delta * tau_m,
    })
}

/// Zero-temperature Ohmic regimes: coherent below 1/2, overdamped up to 1,
/// localized above.
pub fn classify_zero_temperature(alpha: f64) -> RegimeLabel {
    if alpha < 0.5 {
        RegimeLabel::Coherent
    } else if alpha <= 1.0 {
        RegimeLabel::Overdamped
    } else {
        RegimeLabel::Localized
    }
}
