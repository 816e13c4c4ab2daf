//! Two-level dynamics under a pair of counter-propagating drive beams.
//!
//! The drive Hamiltonian in the rotating frame is
//!
//! ```text
//! H = (Ω_eff/2)|1⟩⟨0| + h.c. + V|1⟩⟨1| + γ σz,
//! Ω_eff = s1 Ω1 e^{i kx} + s2 Ω2 e^{-i kx},
//! ```
//!
//! with `kx` the local optical phase at the atom, `s1`, `s2` per-beam
//! amplitude scalings, `V` an intensity-proportional light shift applied to
//! targeted qubits only, and `γ` the qubit frequency offset
//! (`σz = |0⟩⟨0| - |1⟩⟨1|`).  Everything is expressed in the basis order
//! (`|0⟩`, `|1⟩`).
//!
//! Controls are piecewise constant: a gate of duration `T` is split into `n`
//! equal segments and every envelope is sampled at the segment midpoints
//! `t_j = (j + 1/2) T / n`.  Each segment is propagated with the exact SU(2)
//! exponential, so the only discretization error is the sampling itself.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// 2x2 complex matrix in basis order (|0⟩, |1⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub u00: C64,
    pub u01: C64,
    pub u10: C64,
    pub u11: C64,
}

/// Propagators and gate targets; unitarity is a property enforced by the
/// propagation routines (checked in tests to 1e-12), not by the type.
pub type Unitary2 = Mat2;

impl Mat2 {
    pub const fn new(u00: C64, u01: C64, u10: C64, u11: C64) -> Self {
        Self { u00, u01, u10, u11 }
    }

    pub fn identity() -> Self {
        Self::new(C64::ONE, C64::ZERO, C64::ZERO, C64::ONE)
    }

    pub fn zero() -> Self {
        Self::new(C64::ZERO, C64::ZERO, C64::ZERO, C64::ZERO)
    }

    /// c0·I + cx·σx + cy·σy + cz·σz.
    pub fn from_pauli(c0: C64, cx: C64, cy: C64, cz: C64) -> Self {
        let i = C64::i();
        Self::new(c0 + cz, cx - i * cy, cx + i * cy, c0 - cz)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.u00.conj(),
            self.u10.conj(),
            self.u01.conj(),
            self.u11.conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.u00 + self.u11
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(s * self.u00, s * self.u01, s * self.u10, s * self.u11)
    }

    /// Pauli overlaps (Tr(M σx), Tr(M σy), Tr(M σz)).
    pub fn pauli_overlaps(&self) -> [C64; 3] {
        let i = C64::i();
        [
            self.u01 + self.u10,
            i * (self.u01 - self.u10),
            self.u00 - self.u11,
        ]
    }

    /// Bloch components of a Hermitian matrix: Tr(M σa)/2.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let [x, y, z] = self.pauli_overlaps();
        [x.re / 2.0, y.re / 2.0, z.re / 2.0]
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.u00 - other.u00,
            self.u01 - other.u01,
            self.u10 - other.u10,
            self.u11 - other.u11,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }

    /// max_ij |(U†U - I)_ij|; zero for exactly unitary matrices.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_finite(&self) -> bool {
        [self.u00, self.u01, self.u10, self.u11]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.u00 * rhs.u00 + self.u01 * rhs.u10,
            self.u00 * rhs.u01 + self.u01 * rhs.u11,
            self.u10 * rhs.u00 + self.u11 * rhs.u10,
            self.u10 * rhs.u01 + self.u11 * rhs.u11,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.u00 + rhs.u00,
            self.u01 + rhs.u01,
            self.u10 + rhs.u10,
            self.u11 + rhs.u11,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.u00 - rhs.u00,
            self.u01 - rhs.u01,
            self.u10 - rhs.u10,
            self.u11 - rhs.u11,
        )
    }
}

/// Rotation gate description: angle `theta` about the Bloch-equator axis at
/// azimuth `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTarget {
    pub theta: f64,
    pub phi: f64,
}

impl GateTarget {
    /// Normalizes `theta` into [0, 2π) and `phi` into [-π, π].
    pub fn new(theta: f64, phi: f64) -> Self {
        let theta = theta.rem_euclid(std::f64::consts::TAU);
        let mut phi = phi.rem_euclid(std::f64::consts::TAU);
        if phi > std::f64::consts::PI {
            phi -= std::f64::consts::TAU;
        }
        Self { theta, phi }
    }
}

/// U(θ, φ) = cos(θ/2) I - i sin(θ/2) (cos φ σx + sin φ σy).
pub fn target_unitary(g: GateTarget) -> Unitary2 {
    let (c, s) = ((g.theta / 2.0).cos(), (g.theta / 2.0).sin());
    let i = C64::i();
    Mat2::new(
        C64::from(c),
        -i * s * C64::from_polar(1.0, -g.phi),
        -i * s * C64::from_polar(1.0, g.phi),
        C64::from(c),
    )
}

/// F = |Tr(U_target† U)|² / 4, clamped to [0, 1].
///
/// Invariant under a global phase on either argument and symmetric in its
/// arguments.
pub fn fidelity(u: &Unitary2, target: &Unitary2) -> f64 {
    let t = (target.adjoint() * *u).trace();
    (t.norm_sqr() / 4.0).clamp(0.0, 1.0)
}

/// Time-discretized drive envelopes for one gate.
///
/// `omega1`/`omega2` are the complex Rabi frequencies of the two beams and
/// `light_shift` the addressing shift `V(t) ≥ 0`, all sampled at segment
/// midpoints.  Frequencies are in rad/s when `duration` is in seconds, or in
/// units of 1/T for the nondimensional choice `duration = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledControls {
    duration: f64,
    omega1: Vec<C64>,
    omega2: Vec<C64>,
    light_shift: Vec<f64>,
}

impl SampledControls {
    pub fn new(
        duration: f64,
        omega1: Vec<C64>,
        omega2: Vec<C64>,
        light_shift: Vec<f64>,
    ) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::invalid("duration", format!("{duration} is not > 0")));
        }
        let n = omega1.len();
        if n < 2 {
            return Err(Error::invalid("n_segments", format!("{n} < 2")));
        }
        if omega2.len() != n || light_shift.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "omega1 has {n} samples, omega2 {}, light_shift {}",
                omega2.len(),
                light_shift.len()
            )));
        }
        let finite = omega1
            .iter()
            .chain(omega2.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::invalid("omega", "non-finite drive sample"));
        }
        if light_shift.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::invalid("light_shift", "negative or non-finite sample"));
        }
        Ok(Self {
            duration,
            omega1,
            omega2,
            light_shift,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn n_segments(&self) -> usize {
        self.omega1.len()
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.n_segments() as f64
    }

    pub fn omega1(&self) -> &[C64] {
        &self.omega1
    }

    pub fn omega2(&self) -> &[C64] {
        &self.omega2
    }

    pub fn light_shift(&self) -> &[f64] {
        &self.light_shift
    }

    /// Midpoint sample times t_j = (j + 1/2) T / n.
    pub fn midpoint_times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.n_segments())
            .map(|j| (j as f64 + 0.5) * dt)
            .collect()
    }
}

/// Local optical phase seen by the atom: fixed, or one sample per segment
/// midpoint (a moving atom).
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseProfile {
    Constant(f64),
    Sampled(Vec<f64>),
}

/// Static and per-qubit environment of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveContext {
    pub phase_kx: PhaseProfile,
    /// Dimensionless amplitude multiplier on beam 1.
    pub rabi_scale_1: f64,
    /// Dimensionless amplitude multiplier on beam 2.
    pub rabi_scale_2: f64,
    /// Qubit frequency offset γ (same frequency units as the controls).
    pub detuning: f64,
    /// Whether the addressing light shift applies to this qubit.
    pub is_target: bool,
}

impl Default for DriveContext {
    fn default() -> Self {
        Self {
            phase_kx: PhaseProfile::Constant(0.0),
            rabi_scale_1: 1.0,
            rabi_scale_2: 1.0,
            detuning: 0.0,
            is_target: true,
        }
    }
}

impl DriveContext {
    /// Atom at rest at local phase `kx`, nominal amplitudes, no detuning.
    pub fn at_rest(kx: f64) -> Self {
        Self {
            phase_kx: PhaseProfile::Constant(kx),
            ..Self::default()
        }
    }

    /// Same as [`DriveContext::at_rest`] but with the light shift ignored.
    pub fn non_target_at_rest(kx: f64) -> Self {
        Self {
            is_target: false,
            ..Self::at_rest(kx)
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let PhaseProfile::Sampled(kx) = &self.phase_kx {
            if kx.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "phase_kx has {} samples, controls have {n}",
                    kx.len()
                )));
            }
        }
        if !(self.rabi_scale_1 > 0.0 && self.rabi_scale_2 > 0.0) {
            return Err(Error::invalid("rabi_scale", "must be > 0"));
        }
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", "non-finite"));
        }
        Ok(())
    }

    fn kx_at(&self, idx: usize) -> f64 {
        match &self.phase_kx {
            PhaseProfile::Constant(v) => *v,
            PhaseProfile::Sampled(arr) => arr[idx],
        }
    }
}

/// Coefficients of H = c0·I + cx·σx + cy·σy + cz·σz (all real, so H is
/// Hermitian by construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianCoeffs {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl HamiltonianCoeffs {
    /// |Ω_eff| recovered from the drive quadratures.
    pub fn drive_magnitude(&self) -> f64 {
        2.0 * (self.cx * self.cx + self.cy * self.cy).sqrt()
    }
}

/// Pauli decomposition of the segment Hamiltonian at `sample_index`:
/// cx = Re(Ω_eff)/2, cy = Im(Ω_eff)/2, c0 = V/2, cz = γ - V/2.
pub fn assemble_hamiltonian(
    sample_index: usize,
    controls: &SampledControls,
    ctx: &DriveContext,
) -> Result<HamiltonianCoeffs> {
    let n = controls.n_segments();
    if sample_index >= n {
        return Err(Error::DimensionMismatch(format!(
            "sample index {sample_index} out of range for {n} segments"
        )));
    }
    ctx.validate(n)?;
    let kx = ctx.kx_at(sample_index);
    let om_eff = ctx.rabi_scale_1 * controls.omega1[sample_index] * C64::from_polar(1.0, kx)
        + ctx.rabi_scale_2 * controls.omega2[sample_index] * C64::from_polar(1.0, -kx);
    let v = if ctx.is_target {
        controls.light_shift[sample_index]
    } else {
        0.0
    };
    Ok(HamiltonianCoeffs {
        c0: v / 2.0,
        cx: om_eff.re / 2.0,
        cy: om_eff.im / 2.0,
        cz: ctx.detuning - v / 2.0,
    })
}

/// Exact segment propagator
/// e^{-iH dt} = e^{-i c0 dt} (cos(|c| dt) I - i sin(|c| dt) ĉ·σ).
///
/// The |c| = 0 case returns e^{-i c0 dt} I directly, with no 0/0.
pub fn su2_step(h: &HamiltonianCoeffs, dt: f64) -> Unitary2 {
    let phase = C64::from_polar(1.0, -h.c0 * dt);
    let norm = (h.cx * h.cx + h.cy * h.cy + h.cz * h.cz).sqrt();
    if norm == 0.0 {
        return Mat2::identity().scale(phase);
    }
    let angle = norm * dt;
    let c = C64::from(angle.cos());
    let s = -C64::i() * angle.sin() / norm;
    Mat2::from_pauli(c, s * h.cx, s * h.cy, s * h.cz).scale(phase)
}

/// Time-ordered product of the exact segment propagators,
/// U = U_{n-1} ··· U_1 U_0.
pub fn propagate(controls: &SampledControls, ctx: &DriveContext) -> Result<Unitary2> {
    ctx.validate(controls.n_segments())?;
    let dt = controls.dt();
    let mut u = Mat2::identity();
    for j in 0..controls.n_segments() {
        let h = assemble_hamiltonian(j, controls, ctx)?;
        u = su2_step(&h, dt) * u;
    }
    Ok(u)
}

/// 1 - F against the gate described by `g`.
pub fn infidelity_vs_target(u: &Unitary2, g: GateTarget) -> f64 {
    1.0 - fidelity(u, &target_unitary(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn uniform_controls(omega: C64, n: usize) -> SampledControls {
        SampledControls::new(1.0, vec![omega; n], vec![omega; n], vec![0.0; n]).unwrap()
    }

    #[test]
    fn assemble_constructive_interference_at_antinode() {
        let c = uniform_controls(C64::from(0.7), 8);
        let h = assemble_hamiltonian(0, &c, &DriveContext::at_rest(0.0)).unwrap();
        assert_abs_diff_eq!(h.cx, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(h.cy, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.cz, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.c0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn assemble_standing_wave_phase_uniform_between_nodes() {
        // Ω1 = Ω2 = Ω real: Ω_eff = 2 Ω cos(kx), phase flat until the node.
        let c = uniform_controls(C64::from(0.5), 8);
        for &kx in &[-1.2, -0.4, 0.0, 0.3, 1.0] {
            let h = assemble_hamiltonian(3, &c, &DriveContext::at_rest(kx)).unwrap();
            assert_abs_diff_eq!(2.0 * h.cx, 2.0 * 0.5 * kx.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(h.cy, 0.0, epsilon = 1e-14);
            if kx.abs() < FRAC_PI_2 {
                assert!(h.cx > 0.0, "phase must not flip before the node");
            }
        }
    }

    #[test]
    fn assemble_single_travelling_wave_picks_up_local_phase() {
        let n = 4;
        let c = SampledControls::new(
            1.0,
            vec![C64::from(1.0); n],
            vec![C64::ZERO; n],
            vec![0.0; n],
        )
        .unwrap();
        let h = assemble_hamiltonian(1, &c, &DriveContext::at_rest(0.3)).unwrap();
        let om_eff = C64::new(2.0 * h.cx, 2.0 * h.cy);
        assert_abs_diff_eq!(om_eff.re, 0.3f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(om_eff.im, 0.3f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn assemble_light_shift_only_on_target() {
        let n = 4;
        let c = SampledControls::new(
            1.0,
            vec![C64::ZERO; n],
            vec![C64::ZERO; n],
            vec![2.0; n],
        )
        .unwrap();
        let target = assemble_hamiltonian(0, &c, &DriveContext::at_rest(0.0)).unwrap();
        assert_abs_diff_eq!(target.c0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(target.cz, -1.0, epsilon = 1e-15);
        let other = assemble_hamiltonian(0, &c, &DriveContext::non_target_at_rest(0.0)).unwrap();
        assert_abs_diff_eq!(other.c0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(other.cz, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn assemble_rejects_bad_index_and_mismatched_phase_array() {
        let c = uniform_controls(C64::from(1.0), 4);
        assert!(assemble_hamiltonian(4, &c, &DriveContext::default()).is_err());
        let ctx = DriveContext {
            phase_kx: PhaseProfile::Sampled(vec![0.0; 3]),
            ..DriveContext::default()
        };
        assert!(assemble_hamiltonian(0, &c, &ctx).is_err());
    }

    #[test]
    fn su2_step_zero_hamiltonian_is_identity() {
        let h = HamiltonianCoeffs {
            c0: 0.0,
            cx: 0.0,
            cy: 0.0,
            cz: 0.0,
        };
        assert!(su2_step(&h, 0.37).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn su2_step_pi_pulse_about_x() {
        let dt = 0.01;
        let h = HamiltonianCoeffs {
            c0: 0.0,
            cx: FRAC_PI_2 / dt,
            cy: 0.0,
            cz: 0.0,
        };
        let u = su2_step(&h, dt);
        let minus_i_sx = Mat2::new(C64::ZERO, -C64::i(), -C64::i(), C64::ZERO);
        assert!(u.max_abs_diff(&minus_i_sx) < 1e-14);
    }

    #[test]
    fn su2_step_is_unitary_for_random_coefficients() {
        // Fixed small LCG so the test stays reproducible without deps.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for _ in 0..50 {
            let h = HamiltonianCoeffs {
                c0: next(),
                cx: next(),
                cy: next(),
                cz: next(),
            };
            assert!(su2_step(&h, 0.8).unitarity_defect() < 1e-14);
        }
    }

    #[test]
    fn propagate_zero_controls_is_identity() {
        let n = 16;
        let c =
            SampledControls::new(1.0, vec![C64::ZERO; n], vec![C64::ZERO; n], vec![0.0; n])
                .unwrap();
        let u = propagate(&c, &DriveContext::default()).unwrap();
        assert!(u.max_abs_diff(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn propagate_antisymmetric_envelope_returns_identity() {
        // Envelope odd about T/2 with a fixed complex phase: all segment
        // Hamiltonians share one axis and the midpoint samples cancel in
        // mirrored pairs, so the product collapses to the identity exactly.
        let n = 200;
        let phase = C64::from_polar(1.0, 0.7);
        let omega: Vec<C64> = (0..n)
            .map(|j| {
                let t = (j as f64 + 0.5) / n as f64;
                phase * 3.3 * (std::f64::consts::TAU * t).sin()
            })
            .collect();
        let c = SampledControls::new(1.0, omega.clone(), omega, vec![0.0; n]).unwrap();
        for &kx in &[0.0, 0.4, -1.1] {
            let u = propagate(&c, &DriveContext::non_target_at_rest(kx)).unwrap();
            assert!(
                1.0 - fidelity(&u, &Mat2::identity()) < 1e-12,
                "kx = {kx}"
            );
        }
    }

    #[test]
    fn fidelity_global_phase_invariance_and_symmetry() {
        let t = target_unitary(GateTarget::new(FRAC_PI_2, 0.0));
        assert_abs_diff_eq!(fidelity(&t, &t), 1.0, epsilon = 1e-15);
        let u = t.scale(C64::from_polar(1.0, 1.234));
        assert_abs_diff_eq!(fidelity(&u, &t), 1.0, epsilon = 1e-14);
        let v = target_unitary(GateTarget::new(1.0, 0.5));
        assert_abs_diff_eq!(fidelity(&v, &t), fidelity(&t, &v), epsilon = 1e-15);
    }

    #[test]
    fn fidelity_of_quarter_turn_z_rotation_is_half() {
        // Tr(e^{-i π σz/4}) = 2 cos(π/4) ⇒ F = cos²(π/4) = 1/2.
        let t = target_unitary(GateTarget::new(FRAC_PI_2, 0.0));
        let rz = Mat2::new(
            C64::from_polar(1.0, -PI / 4.0),
            C64::ZERO,
            C64::ZERO,
            C64::from_polar(1.0, PI / 4.0),
        );
        let u = t * rz;
        assert_abs_diff_eq!(fidelity(&u, &t), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn target_unitary_special_angles() {
        let id = target_unitary(GateTarget::new(0.0, 0.4));
        assert!(id.max_abs_diff(&Mat2::identity()) < 1e-15);

        let s = 1.0 / 2.0f64.sqrt();
        let expect = Mat2::new(
            C64::from(s),
            -C64::i() * s,
            -C64::i() * s,
            C64::from(s),
        );
        let u = target_unitary(GateTarget::new(FRAC_PI_2, 0.0));
        assert!(u.max_abs_diff(&expect) < 1e-15);

        // θ = π about the y axis: -i σy.
        let v = target_unitary(GateTarget::new(PI, FRAC_PI_2));
        let minus_i_sy = Mat2::new(C64::ZERO, -C64::from(1.0), C64::from(1.0), C64::ZERO);
        assert!(v.max_abs_diff(&minus_i_sy) < 1e-15);
    }

    #[test]
    fn controls_constructor_validates() {
        assert!(SampledControls::new(1.0, vec![C64::ZERO; 1], vec![C64::ZERO; 1], vec![0.0; 1])
            .is_err());
        assert!(SampledControls::new(0.0, vec![C64::ZERO; 4], vec![C64::ZERO; 4], vec![0.0; 4])
            .is_err());
        assert!(SampledControls::new(1.0, vec![C64::ZERO; 4], vec![C64::ZERO; 3], vec![0.0; 4])
            .is_err());
        assert!(SampledControls::new(1.0, vec![C64::ZERO; 4], vec![C64::ZERO; 4], vec![-1.0; 4])
            .is_err());
    }
}
