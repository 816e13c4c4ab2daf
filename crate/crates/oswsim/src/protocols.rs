//! Pulse-shape generators for the gate protocols studied by this crate.
//!
//! Five protocols are provided.  `OTW-1` drives with a single travelling
//! beam, all others use a balanced standing-wave pair (`Ω1 = Ω2`):
//!
//! * `OTW-1` / `OSW-1` — half-sine envelope, pulse area θ.
//! * `OSW-BB1` — four constant-amplitude blocks implementing the broadband
//!   BB1 composite sequence, which cancels amplitude errors to high order.
//! * `OSW-LS1` / `OSW-LS2` — light-shift addressed θ = π/2 gates whose drive
//!   envelope is antisymmetric about the gate midpoint, so undriven (non
//!   target) qubits return to their initial state exactly.  `OSW-LS2` is
//!   additionally built so the first two Magnus terms of a qubit-frequency
//!   perturbation vanish.
//!
//! Every generator emits midpoint samples over `n` equal segments.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::dynamics::{GateTarget, SampledControls};
use crate::error::Error;

/// OSW-LS1 drive and shift coefficients (units of 1/T).
const LS1_DRIVE: f64 = 3.1317;
const LS1_SHIFT: f64 = 3.5859;
/// OSW-LS2 drive and shift coefficients (units of 1/T).
const LS2_DRIVE: f64 = 7.5551;
const LS2_SHIFT_M2: f64 = 2.1366;
const LS2_SHIFT_M4: f64 = 0.8875;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    Otw1,
    Osw1,
    OswBb1,
    OswLs1,
    OswLs2,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 5] = [
        ProtocolId::Otw1,
        ProtocolId::Osw1,
        ProtocolId::OswBb1,
        ProtocolId::OswLs1,
        ProtocolId::OswLs2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::Otw1 => "otw-1",
            ProtocolId::Osw1 => "osw-1",
            ProtocolId::OswBb1 => "osw-bb1",
            ProtocolId::OswLs1 => "osw-ls1",
            ProtocolId::OswLs2 => "osw-ls2",
        }
    }

    pub fn is_standing_wave(self) -> bool {
        !matches!(self, ProtocolId::Otw1)
    }

    /// Amplitude rescale applied in thermal-motion ensembles to compensate
    /// the intensity a spatially spread ensemble actually sees: 1.03 for
    /// standing-wave gates, 1 for the travelling wave.
    pub fn motion_rabi_rescale(self) -> f64 {
        if self.is_standing_wave() {
            1.03
        } else {
            1.0
        }
    }

    /// Generates the protocol's controls.  The light-shift protocols realize
    /// a fixed θ = π/2 rotation and take only the phase from `g`.
    pub fn controls(self, g: GateTarget, duration: f64, n: usize) -> SampledControls {
        match self {
            ProtocolId::Otw1 => make_otw(g, duration, n),
            ProtocolId::Osw1 => make_osw(g, duration, n),
            ProtocolId::OswBb1 => make_osw_bb1(g, duration, n),
            ProtocolId::OswLs1 => make_osw_ls1(g.phi, duration, n),
            ProtocolId::OswLs2 => make_osw_ls2(g.phi, duration, n),
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        ProtocolId::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::UnknownProtocol(s.to_string()))
    }
}

fn midpoints(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (j as f64 + 0.5) / n as f64)
}

fn zero_shift(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

/// Travelling-wave half-sine pulse:
/// Ω1(t) = (θπ/2T) sin(πt/T) e^{iφ}, Ω2 = 0.
pub fn make_otw(g: GateTarget, duration: f64, n: usize) -> SampledControls {
    let amp = g.theta * PI / (2.0 * duration);
    let phase = C64::from_polar(1.0, g.phi);
    let omega1: Vec<C64> = midpoints(n).map(|x| phase * amp * (PI * x).sin()).collect();
    let omega2 = vec![C64::ZERO; n];
    SampledControls::new(duration, omega1, omega2, zero_shift(n)).expect("valid by construction")
}

/// Standing-wave half-sine pulse:
/// Ω1(t) = Ω2(t) = (θπ/4T) sin(πt/T) e^{iφ}.
///
/// The combined antinode amplitude matches [`make_otw`] at half the total
/// intensity.
pub fn make_osw(g: GateTarget, duration: f64, n: usize) -> SampledControls {
    let amp = g.theta * PI / (4.0 * duration);
    let phase = C64::from_polar(1.0, g.phi);
    let omega1: Vec<C64> = midpoints(n).map(|x| phase * amp * (PI * x).sin()).collect();
    let omega2 = omega1.clone();
    SampledControls::new(duration, omega1, omega2, zero_shift(n)).expect("valid by construction")
}

/// BB1 pulse length and correction phases for rotation angle `theta`:
/// p = θ/π + 4, φa = arccos(-θ/4π), φb = 3 φa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bb1Phases {
    pub p: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

pub fn bb1_phases(theta: f64) -> Bb1Phases {
    let phi_a = (-theta / (4.0 * PI)).acos();
    Bb1Phases {
        p: theta / PI + 4.0,
        phi_a,
        phi_b: 3.0 * phi_a,
    }
}

/// BB1 composite pulse: four constant-amplitude blocks with combined pulse
/// areas π, 2π, π, θ at phases φ+φa, φ+φb, φ+φa, φ and block boundaries at
/// t·(p/T) = 1, 3, 4.
///
/// Segments are allotted to blocks by rounding the block boundaries to the
/// segment grid, and each block's amplitude is normalized so its
/// midpoint-summed area is exact at any `n`.  Within a block all segment
/// Hamiltonians commute, so the propagated gate reproduces the ideal
/// four-rotation product to machine precision regardless of `n`.
pub fn make_osw_bb1(g: GateTarget, duration: f64, n: usize) -> SampledControls {
    let ph = bb1_phases(g.theta);
    let areas = [PI, 2.0 * PI, PI, g.theta];
    let phases = [
        g.phi + ph.phi_a,
        g.phi + ph.phi_b,
        g.phi + ph.phi_a,
        g.phi,
    ];
    let fractions = [1.0 / ph.p, 3.0 / ph.p, 4.0 / ph.p, 1.0];

    let mut counts = [0usize; 4];
    let mut prev = 0usize;
    for (k, &f) in fractions.iter().enumerate() {
        let edge = ((f * n as f64).round() as usize).min(n);
        counts[k] = edge.saturating_sub(prev);
        prev = prev.max(edge);
    }
    // A block with area must own at least one segment; borrow from the widest.
    for k in 0..4 {
        if counts[k] == 0 && areas[k] > 0.0 {
            let widest = (0..4).max_by_key(|&i| counts[i]).unwrap();
            if counts[widest] > 1 {
                counts[widest] -= 1;
                counts[k] += 1;
            }
        }
    }

    let dt = duration / n as f64;
    let mut omega1 = Vec::with_capacity(n);
    for k in 0..4 {
        if counts[k] == 0 {
            continue;
        }
        // Combined (two-beam) area per block is exact; each beam carries half.
        let per_beam = areas[k] / (2.0 * counts[k] as f64 * dt);
        let sample = C64::from_polar(per_beam, phases[k]);
        omega1.extend(std::iter::repeat_n(sample, counts[k]));
    }
    debug_assert_eq!(omega1.len(), n);
    let omega2 = omega1.clone();
    SampledControls::new(duration, omega1, omega2, zero_shift(n)).expect("valid by construction")
}

// The quarter-turn produced by the light-shift gates is driven entirely by
// the interplay of V(t) with the sign reversal of the sine envelope, and its
// axis sits 90° from the drive phase.  With this crate's sign conventions
// (σz = |0⟩⟨0| - |1⟩⟨1|, U = e^{-iHt}) the +π/2 offset lands the rotation
// axis on φ itself.
fn ls_drive(coeff: f64, phi: f64, duration: f64, n: usize) -> Vec<C64> {
    let phase = C64::from_polar(1.0, phi + FRAC_PI_2);
    midpoints(n)
        .map(|x| phase * (coeff / duration) * (TAU * x).sin())
        .collect()
}

/// Light-shift addressed θ = π/2 gate, uncorrected variant:
/// Ω1 = Ω2 = (3.1317/T) sin(2πt/T) e^{i(φ+π/2)},
/// V(t) = (3.5859/T) sin²(πt/T).
pub fn make_osw_ls1(phi: f64, duration: f64, n: usize) -> SampledControls {
    let omega1 = ls_drive(LS1_DRIVE, phi, duration, n);
    let omega2 = omega1.clone();
    let shift: Vec<f64> = midpoints(n)
        .map(|x| (LS1_SHIFT / duration) * (PI * x).sin().powi(2))
        .collect();
    SampledControls::new(duration, omega1, omega2, shift).expect("valid by construction")
}

/// Light-shift addressed θ = π/2 gate with first- and second-order
/// cancellation of qubit-frequency errors:
/// Ω1 = Ω2 = (7.5551/T) sin(2πt/T) e^{i(φ+π/2)},
/// V(t) = (1/T)(2.1366 sin(2πt/T) + 0.8875 sin(4πt/T))².
pub fn make_osw_ls2(phi: f64, duration: f64, n: usize) -> SampledControls {
    let omega1 = ls_drive(LS2_DRIVE, phi, duration, n);
    let omega2 = omega1.clone();
    let shift: Vec<f64> = midpoints(n)
        .map(|x| {
            let s = LS2_SHIFT_M2 * (TAU * x).sin() + LS2_SHIFT_M4 * (2.0 * TAU * x).sin();
            s * s / duration
        })
        .collect();
    SampledControls::new(duration, omega1, omega2, shift).expect("valid by construction")
}

/// Residual of the time-reversal antisymmetry condition Ω(t) = -Ω(T - t),
/// evaluated on mirrored midpoint pairs of both beams:
/// max_j |Ω(t_j) + Ω(t_{n-1-j})| / max_j |Ω(t_j)|.
///
/// Returns 0 for all-zero controls by convention; exact antisymmetry gives 0
/// and a symmetric envelope gives 2.
pub fn check_antisymmetry(controls: &SampledControls) -> f64 {
    let n = controls.n_segments();
    let amp_max = controls
        .omega1()
        .iter()
        .chain(controls.omega2().iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if amp_max == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for beam in [controls.omega1(), controls.omega2()] {
        for j in 0..n {
            worst = worst.max((beam[j] + beam[n - 1 - j]).norm());
        }
    }
    worst / amp_max
}
