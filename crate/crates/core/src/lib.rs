//! Mesoscopic spin-boson model of a single laser-addressed ion in a linear
//! Coulomb chain.
//!
//! The pipeline runs bottom-up:
//!
//! * [`chain`]: equilibrium positions and axial normal modes,
//! * [`coupling`]: spin-phonon couplings, smoothed spectral density and the
//!   Ohmic dissipation strength,
//! * [`niba`]: the thermal memory kernel and the Volterra integro-differential
//!   solver for the polarization `P(t)`,
//! * [`analysis`]: decay rates, regime labels, revival detection, sweeps and
//!   trap-frequency planning,
//! * [`config`], [`output`] and [`commands`]: the run-configuration format,
//!   CSV writers and the subcommands behind the `spinboson` binary.
//!
//! All quantities use `hbar = k_B = m = omega_z = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chain;
pub mod commands;
pub mod config;
pub mod coupling;
mod error;
pub mod niba;
pub mod output;

pub use error::{Error, Result};
