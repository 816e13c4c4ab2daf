//! Simulation and synthesis of phase-controlled qubit gates driven by
//! optical standing and travelling waves.
//!
//! The crate models a single qubit driven by one or two counter-propagating
//! laser beams, with optional light-shift addressing, and provides:
//!
//! * [`dynamics`] — segment Hamiltonians, exact SU(2) propagation, gate
//!   fidelity.
//! * [`protocols`] — generators for the OTW-1, OSW-1, OSW-BB1, OSW-LS1, and
//!   OSW-LS2 pulse shapes, plus the time-reversal antisymmetry check.
//! * [`motion`] — classical thermal motion in a harmonic trap and ensemble
//!   infidelity statistics.
//! * [`robustness`] — local-phase, Rabi-noise, frequency-noise, and
//!   intensity-imbalance sweeps, error-scaling fits, and Magnus/geometric
//!   diagnostics.
//! * [`optimizer`] — Nelder-Mead synthesis of robust light-shift pulses over
//!   an antisymmetric sum-of-sines basis.
//!
//! All routines are pure functions of their inputs; Monte Carlo paths use
//! per-index random substreams, so every result is reproducible for a fixed
//! seed regardless of thread count.

pub mod dynamics;
pub mod motion;
pub mod optimizer;
pub mod protocols;
pub mod quadrature;
pub mod robustness;

mod error;

pub use error::{Error, Result};

/// Crate version recorded in CLI output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
