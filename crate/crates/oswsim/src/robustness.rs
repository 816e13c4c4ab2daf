//! Static-noise characterization and Magnus/geometric error diagnostics.
//!
//! Sweeps tabulate the gate infidelity against local optical phase, static
//! per-beam Rabi errors, static qubit-frequency offsets, and standing-wave
//! intensity imbalance.  [`magnus_diagnostics`] quantifies the residual
//! sensitivity of a drive to a small qubit-frequency perturbation through
//! the first two Magnus terms of the interaction-picture propagator and the
//! equivalent geometric picture (closure and projected areas of the Bloch
//! space curve traced by the rotated σz axis).

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynamics::{
    assemble_hamiltonian, fidelity, propagate, su2_step, DriveContext, Mat2, SampledControls,
    Unitary2,
};
use crate::error::{Error, Result};
use crate::quadrature::GaussHermite;

/// Which qubit a noise sweep describes: the addressed qubit (light shift on,
/// scored against the gate target) or a bystander (light shift off, scored
/// against the identity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitRole {
    Target,
    NonTarget,
}

impl QubitRole {
    pub fn name(self) -> &'static str {
        match self {
            QubitRole::Target => "target",
            QubitRole::NonTarget => "non_target",
        }
    }
}

/// Tabulated sweep output: one infidelity record per parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter_name: String,
    pub parameter_values: Vec<f64>,
    pub mean_infidelity: Vec<f64>,
    pub median_infidelity: Option<Vec<f64>>,
    pub std_infidelity: Option<Vec<f64>>,
    pub qubit_role: QubitRole,
}

/// Infidelity versus constant local phase for an atom at rest (γ = 0,
/// nominal amplitudes).
pub fn sweep_local_phase(
    controls: &SampledControls,
    target: &Unitary2,
    kx_values: &[f64],
) -> SweepResult {
    let infid: Vec<f64> = kx_values
        .iter()
        .map(|&kx| {
            let u = propagate(controls, &DriveContext::at_rest(kx)).expect("valid context");
            1.0 - fidelity(&u, target)
        })
        .collect();
    SweepResult {
        parameter_name: "kx".into(),
        parameter_values: kx_values.to_vec(),
        mean_infidelity: infid,
        median_infidelity: None,
        std_infidelity: None,
        qubit_role: QubitRole::Target,
    }
}

/// Least-squares slope of log ε versus log |parameter| over the window
/// `(lo, hi)`; the power-law exponent of the error scaling.
///
/// Points with ε ≤ 1e-14 are excluded as numerical floor; fewer than 4
/// usable points is an error.
pub fn fit_error_order(sweep: &SweepResult, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    let pts: Vec<(f64, f64)> = sweep
        .parameter_values
        .iter()
        .zip(&sweep.mean_infidelity)
        .filter(|(&x, &e)| {
            let a = x.abs();
            a >= lo && a <= hi && a > 0.0 && e > 1e-14
        })
        .map(|(&x, &e)| (x.abs().ln(), e.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::WindowTooSmall(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// Static error ensemble to average over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Independent per-beam amplitude multipliers (1 + δ₁), (1 + δ₂) with
    /// δᵢ ~ N(0, σ²).
    RabiPerBeam,
    /// Qubit frequency offset γ ~ N(0, (σ/T)²); σ is quoted in units of 1/T.
    QubitFrequency,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::RabiPerBeam => "rabi_per_beam",
            NoiseKind::QubitFrequency => "qubit_frequency",
        }
    }
}

/// How the ensemble average is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Seeded Monte Carlo sampling with per-sample deterministic substreams.
    MonteCarlo { n_samples: usize, seed: u64 },
    /// Deterministic Gauss-Hermite quadrature (tensor product for the
    /// two-beam case).
    GaussHermite { n_nodes: usize },
}

fn noise_infidelity(
    controls: &SampledControls,
    target: &Unitary2,
    kind: NoiseKind,
    role: QubitRole,
    draws: (f64, f64),
) -> f64 {
    let mut ctx = DriveContext {
        is_target: role == QubitRole::Target,
        ..DriveContext::default()
    };
    match kind {
        NoiseKind::RabiPerBeam => {
            ctx.rabi_scale_1 = 1.0 + draws.0;
            ctx.rabi_scale_2 = 1.0 + draws.1;
        }
        NoiseKind::QubitFrequency => {
            ctx.detuning = draws.0 / controls.duration();
        }
    }
    let u = propagate(controls, &ctx).expect("valid context");
    let reference = match role {
        QubitRole::Target => *target,
        QubitRole::NonTarget => Mat2::identity(),
    };
    1.0 - fidelity(&u, &reference)
}

/// Mean infidelity versus noise strength σ, averaged over the static
/// ensemble named by `kind`.
///
/// The target role includes the light shift and is scored against `target`;
/// the non-target role drops the shift and is scored against the identity.
pub fn sweep_static_noise(
    controls: &SampledControls,
    target: &Unitary2,
    kind: NoiseKind,
    sigmas: &[f64],
    role: QubitRole,
    averaging: Averaging,
) -> SweepResult {
    let mut mean = Vec::with_capacity(sigmas.len());
    let mut median: Option<Vec<f64>> = None;
    let mut std: Option<Vec<f64>> = None;
    match averaging {
        Averaging::MonteCarlo { n_samples, seed } => {
            let med = median.insert(Vec::with_capacity(sigmas.len()));
            let sd = std.insert(Vec::with_capacity(sigmas.len()));
            for (i, &sigma) in sigmas.iter().enumerate() {
                let mut samples: Vec<f64> = (0..n_samples)
                    .into_par_iter()
                    .map(|j| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(((i as u64) << 32) | j as u64);
                        let d1: f64 = rng.sample(StandardNormal);
                        let d2: f64 = rng.sample(StandardNormal);
                        noise_infidelity(controls, target, kind, role, (sigma * d1, sigma * d2))
                    })
                    .collect();
                let m = samples.iter().sum::<f64>() / samples.len() as f64;
                let var = samples.iter().map(|&x| (x - m) * (x - m)).sum::<f64>()
                    / samples.len() as f64;
                samples.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                mean.push(m);
                med.push(samples[(samples.len() - 1) / 2]);
                sd.push(var.sqrt());
            }
        }
        Averaging::GaussHermite { n_nodes } => {
            let q = GaussHermite::new(n_nodes);
            for &sigma in sigmas {
                let m = match kind {
                    NoiseKind::RabiPerBeam => q.expect_gaussian2(sigma, |a, b| {
                        noise_infidelity(controls, target, kind, role, (a, b))
                    }),
                    NoiseKind::QubitFrequency => q.expect_gaussian(sigma, |a| {
                        noise_infidelity(controls, target, kind, role, (a, 0.0))
                    }),
                };
                mean.push(m);
            }
        }
    }
    SweepResult {
        parameter_name: format!("sigma_{}", kind.name()),
        parameter_values: sigmas.to_vec(),
        mean_infidelity: mean,
        median_infidelity: median,
        std_infidelity: std,
        qubit_role: role,
    }
}

/// Infidelity versus local phase with unequal beam intensities
/// I(1 ± d/2): amplitude multipliers √(1 + d/2) and √(1 - d/2).
pub fn sweep_intensity_imbalance(
    controls: &SampledControls,
    target: &Unitary2,
    imbalance: f64,
    kx_values: &[f64],
) -> Result<SweepResult> {
    if !(0.0..1.0).contains(&imbalance) {
        return Err(Error::invalid("imbalance", "must lie in [0, 1)"));
    }
    let s1 = (1.0 + imbalance / 2.0).sqrt();
    let s2 = (1.0 - imbalance / 2.0).sqrt();
    let infid: Vec<f64> = kx_values
        .iter()
        .map(|&kx| {
            let ctx = DriveContext {
                rabi_scale_1: s1,
                rabi_scale_2: s2,
                ..DriveContext::at_rest(kx)
            };
            let u = propagate(controls, &ctx).expect("valid context");
            1.0 - fidelity(&u, target)
        })
        .collect();
    Ok(SweepResult {
        parameter_name: "kx".into(),
        parameter_values: kx_values.to_vec(),
        mean_infidelity: infid,
        median_infidelity: None,
        std_infidelity: None,
        qubit_role: QubitRole::Target,
    })
}

/// First- and second-order response of a drive to a small qubit-frequency
/// perturbation, per unit γ.
///
/// With U_d the zero-noise non-target propagator and
/// M(t) = U_d†(t) σz U_d(t), the stored quantities are
/// m1 = Σ_j M(t_j) Δt and m2 = ½ Σ_j Σ_{l<j} [M(t_j), M(t_l)] Δt²; norms use
/// ‖M‖ = |(Tr(M σx), Tr(M σy), Tr(M σz))|.  The Bloch curve r(t) = ∫ m dt
/// (m the unit Bloch vector of M) restates the same information
/// geometrically: first-order cancellation closes the curve, second-order
/// cancellation zeroes its three projected areas.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnusDiagnostics {
    /// Hermitian traceless first-order integral, units of time per unit γ.
    pub m1: Mat2,
    pub m1_norm: f64,
    pub m2_norm: f64,
    /// Distance between the ends of the Bloch curve; m1_norm / 2.
    pub bloch_closure: f64,
    /// Signed shoelace areas of the curve's xy, xz, and yz projections.
    pub projected_areas: [f64; 3],
}

fn pauli_norm(m: &Mat2) -> f64 {
    m.pauli_overlaps()
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn shoelace(points: &[[f64; 3]], a: usize, b: usize) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        acc += p[a] * q[b] - q[a] * p[b];
    }
    acc / 2.0
}

pub fn magnus_diagnostics(controls: &SampledControls) -> MagnusDiagnostics {
    let n = controls.n_segments();
    let dt = controls.dt();
    let ctx = DriveContext::non_target_at_rest(0.0);
    let sz = Mat2::from_pauli(C64::ZERO, C64::ZERO, C64::ZERO, C64::ONE);

    let mut u_prev = Mat2::identity();
    let mut m1 = Mat2::zero();
    let mut m2 = Mat2::zero();
    let mut m_sum = Mat2::zero();
    let mut curve = Vec::with_capacity(n + 1);
    let mut r = [0.0f64; 3];
    curve.push(r);
    for j in 0..n {
        let h = assemble_hamiltonian(j, controls, &ctx).expect("valid context");
        let u_mid = su2_step(&h, dt / 2.0) * u_prev;
        let m_j = u_mid.adjoint() * sz * u_mid;

        m1 = m1 + m_j.scale(C64::from(dt));
        // ½ [M_j, Σ_{l<j} M_l] Δt², accumulated before M_j joins the sum.
        let comm = m_j * m_sum - m_sum * m_j;
        m2 = m2 + comm.scale(C64::from(0.5 * dt * dt));
        m_sum = m_sum + m_j;

        let mv = m_j.bloch_vector();
        for (ri, mi) in r.iter_mut().zip(mv) {
            *ri += mi * dt;
        }
        curve.push(r);

        u_prev = su2_step(&h, dt) * u_prev;
    }

    let closure = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    MagnusDiagnostics {
        m1,
        m1_norm: pauli_norm(&m1),
        m2_norm: pauli_norm(&m2),
        bloch_closure: closure,
        projected_areas: [
            shoelace(&curve, 0, 1),
            shoelace(&curve, 0, 2),
            shoelace(&curve, 1, 2),
        ],
    }
}
