//! Thermal atomic motion in a harmonic trap and its effect on gate fidelity.
//!
//! An atom's classical trajectory x(t) = x0 cos(ωt) + (v0/ω) sin(ωt) turns
//! the local optical phase into a time-dependent kx(t).  Initial conditions
//! are drawn from the 1D thermal (Maxwell-Boltzmann) distribution, gates are
//! propagated along each trajectory, and infidelity statistics are collected
//! over the ensemble.
//!
//! This is the one module that works in SI units; the propagation itself is
//! done on nondimensionalized controls.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynamics::{
    infidelity_vs_target, propagate, DriveContext, GateTarget, PhaseProfile,
};
use crate::error::{Error, Result};
use crate::protocols::ProtocolId;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_KG: f64 = 1.66053906660e-27;
/// Boltzmann constant, J/K.
pub const BOLTZMANN_J_PER_K: f64 = 1.380649e-23;

/// Harmonic trap, atom, and drive-wavevector parameters defining the thermal
/// ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    /// Atomic mass, kg.
    pub mass: f64,
    /// Trap angular frequency, rad/s.
    pub omega_trap: f64,
    /// Ensemble temperature, K.
    pub temperature: f64,
    /// Drive wavevector, rad/m.
    pub wavevector: f64,
}

impl TrapSpec {
    /// ¹⁷¹Yb on its 578 nm clock transition in a 100 kHz trap at 5 µK.
    pub fn yb171() -> Self {
        Self {
            mass: 171.0 * ATOMIC_MASS_KG,
            omega_trap: std::f64::consts::TAU * 1.0e5,
            temperature: 5.0e-6,
            wavevector: std::f64::consts::TAU / 578.0e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::invalid("mass", "must be > 0"));
        }
        if !(self.omega_trap.is_finite() && self.omega_trap > 0.0) {
            return Err(Error::invalid("omega_trap", "must be > 0"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::invalid("temperature", "must be >= 0"));
        }
        if !(self.wavevector.is_finite() && self.wavevector > 0.0) {
            return Err(Error::invalid("wavevector", "must be > 0"));
        }
        Ok(())
    }

    /// Thermal position spread √(k_B T / m ω²), m.
    pub fn sigma_x(&self) -> f64 {
        (BOLTZMANN_J_PER_K * self.temperature / self.mass).sqrt() / self.omega_trap
    }

    /// Thermal velocity spread √(k_B T / m), m/s.
    pub fn sigma_v(&self) -> f64 {
        (BOLTZMANN_J_PER_K * self.temperature / self.mass).sqrt()
    }

    /// Trap period τ = 2π/ω, s.
    pub fn trap_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_trap
    }
}

/// Initial phase-space point of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    /// Position, m.
    pub x0: f64,
    /// Velocity, m/s.
    pub v0: f64,
}

/// Independent Gaussian draws x0 ~ N(0, σx²), v0 ~ N(0, σv²) — the
/// stationary thermal distribution of the harmonic oscillator.
pub fn sample_thermal<R: Rng + ?Sized>(trap: &TrapSpec, rng: &mut R) -> InitialCondition {
    let gx: f64 = rng.sample(StandardNormal);
    let gv: f64 = rng.sample(StandardNormal);
    InitialCondition {
        x0: trap.sigma_x() * gx,
        v0: trap.sigma_v() * gv,
    }
}

/// Local optical phase kx(t) along the closed-form harmonic trajectory
/// x(t) = x0 cos(ωt) + (v0/ω) sin(ωt) (restoring force F = -mω²x).
pub fn trajectory_phase(trap: &TrapSpec, ic: InitialCondition, times: &[f64]) -> Vec<f64> {
    let om = trap.omega_trap;
    times
        .iter()
        .map(|&t| trap.wavevector * (ic.x0 * (om * t).cos() + ic.v0 / om * (om * t).sin()))
        .collect()
}

/// Infidelity statistics of one ensemble run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Lower-interpolated median (sorted value at index ⌊(n-1)/2⌋).
    pub median: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n_trajectories: usize,
    pub seed: u64,
}

impl EnsembleStats {
    /// Standard error of the mean, std/√n.
    pub fn standard_error(&self) -> f64 {
        self.std / (self.n_trajectories as f64).sqrt()
    }
}

/// Mean, lower-interpolated median, and population standard deviation.
pub fn ensemble_stats(infidelities: &[f64], seed: u64) -> Result<EnsembleStats> {
    if infidelities.is_empty() {
        return Err(Error::EmptyInput("infidelities"));
    }
    let n = infidelities.len();
    let mean = infidelities.iter().sum::<f64>() / n as f64;
    let var = infidelities.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let mut sorted = infidelities.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite infidelities"));
    Ok(EnsembleStats {
        mean,
        median: sorted[(n - 1) / 2],
        std: var.sqrt(),
        n_trajectories: n,
        seed,
    })
}

/// Per-trajectory infidelities of `protocol` aimed at `g`, averaged over
/// `n_traj` thermal trajectories of duration `duration` seconds.
///
/// `rabi_rescale` multiplies both beam amplitudes; `None` selects the
/// protocol default (1.03 for standing-wave gates).  Each trajectory draws
/// from its own counter-based random stream, so results are bit-identical
/// for a fixed seed regardless of thread count.
#[allow(clippy::too_many_arguments)]
pub fn motional_infidelities(
    protocol: ProtocolId,
    g: GateTarget,
    duration: f64,
    trap: &TrapSpec,
    n_segments: usize,
    n_traj: usize,
    seed: u64,
    rabi_rescale: Option<f64>,
) -> Result<Vec<f64>> {
    trap.validate()?;
    if n_traj == 0 {
        return Err(Error::invalid("n_traj", "must be >= 1"));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid("duration", "must be > 0"));
    }
    let scale = rabi_rescale.unwrap_or_else(|| protocol.motion_rabi_rescale());
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid("rabi_rescale", "must be > 0"));
    }
    // Propagate in units of the gate time; only the phase samples carry SI.
    let controls = protocol.controls(g, 1.0, n_segments);
    let midtimes: Vec<f64> = (0..n_segments)
        .map(|j| (j as f64 + 0.5) * duration / n_segments as f64)
        .collect();
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let ic = sample_thermal(trap, &mut rng);
            let ctx = DriveContext {
                phase_kx: PhaseProfile::Sampled(trajectory_phase(trap, ic, &midtimes)),
                rabi_scale_1: scale,
                rabi_scale_2: scale,
                ..DriveContext::default()
            };
            propagate(&controls, &ctx).map(|u| infidelity_vs_target(&u, g))
        })
        .collect()
}

/// [`motional_infidelities`] reduced to [`EnsembleStats`].
#[allow(clippy::too_many_arguments)]
pub fn run_motional_ensemble(
    protocol: ProtocolId,
    g: GateTarget,
    duration: f64,
    trap: &TrapSpec,
    n_segments: usize,
    n_traj: usize,
    seed: u64,
    rabi_rescale: Option<f64>,
) -> Result<EnsembleStats> {
    let inf = motional_infidelities(
        protocol, g, duration, trap, n_segments, n_traj, seed, rabi_rescale,
    )?;
    ensemble_stats(&inf, seed)
}
