//! Decay rates, regime labels, revival detection, parameter sweeps and the
//! trap-frequency planning curve.

mod decay;
mod planning;
mod regime;
mod revival;
mod sweep;

pub use decay::{
    extract_decay_rate, DecayFit, DecayMethod, DIRECT_FLOOR, MEASURABLE_BAND, SHORT_TIME_FRACTION,
};
pub use planning::{
    chain_constant, plan, recoil_frequency_khz, required_trap_frequency, PlanRow, BERYLLIUM9_AMU,
    PAPER_RECOIL_KHZ,
};
pub use regime::{classify_regime, classify_zero_temperature, RegimeLabel, RegimeReport};
pub use revival::{detect_revival, detect_revival_with, RevivalConfig, RevivalReport};
pub use sweep::{sweep_rate_vs_alpha, SweepRow};
