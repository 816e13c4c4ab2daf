//! JSON run-configuration schema.
//!
//! All physical quantities are SI with unit-suffixed key names
//! (`duration_s`, `temperature_K`, ...).  Unknown keys are rejected, and
//! validation failures name the offending key.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use oswsim::motion::TrapSpec;
use oswsim::optimizer::PulseBasisParams;
use oswsim::protocols::ProtocolId;
use oswsim::robustness::{Averaging, NoiseKind, QubitRole};

use crate::CliError;

/// One batch job: a command plus its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    ProtocolDump(DumpConfig),
    SweepPhase(SweepPhaseConfig),
    SweepNoise(SweepNoiseConfig),
    SweepImbalance(SweepImbalanceConfig),
    SweepMotion(SweepMotionConfig),
    Magnus(MagnusConfig),
    Optimize(OptimizeConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpConfig {
    #[serde(flatten)]
    pub pulse: PulseSource,
    #[serde(flatten)]
    pub gate: GateAngles,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPhaseConfig {
    #[serde(flatten)]
    pub pulse: PulseSource,
    #[serde(flatten)]
    pub gate: GateAngles,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    pub kx_grid_rad: Grid,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepNoiseConfig {
    #[serde(flatten)]
    pub pulse: PulseSource,
    #[serde(flatten)]
    pub gate: GateAngles,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    pub noise_kind: NoiseKindKey,
    pub qubit_role: QubitRoleKey,
    pub sigma_grid: Grid,
    #[serde(default = "default_averaging")]
    pub averaging: AveragingKey,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default = "default_nodes")]
    pub n_nodes: usize,
    #[serde(default)]
    pub seed: u64,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepImbalanceConfig {
    #[serde(flatten)]
    pub pulse: PulseSource,
    #[serde(flatten)]
    pub gate: GateAngles,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    pub imbalance: f64,
    pub kx_grid_rad: Grid,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepMotionConfig {
    pub protocol: ProtocolKey,
    #[serde(flatten)]
    pub gate: GateAngles,
    pub trap: TrapConfig,
    pub gate_times_s: Grid,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    #[serde(default = "default_trajectories")]
    pub n_trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    /// Amplitude rescale applied to both beams; defaults to the protocol's
    /// standard motional compensation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_rescale: Option<f64>,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnusConfig {
    #[serde(flatten)]
    pub pulse: PulseSource,
    #[serde(flatten)]
    pub gate: GateAngles,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(flatten)]
    pub gate: GateAngles,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub n_segments: usize,
    pub n_drive: usize,
    pub n_shift: usize,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    pub cost_tolerance: f64,
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    pub output_path: String,
}

/// Either a named protocol or explicit sum-of-sines basis coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub drive_coeffs: Vec<f64>,
    pub shift_coeffs: Vec<f64>,
    #[serde(default)]
    pub drive_phase_rad: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateAngles {
    #[serde(default = "default_theta")]
    pub theta_rad: f64,
    #[serde(default)]
    pub phi_rad: f64,
}

/// Preset name or explicit SI trap parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrapConfig {
    Preset(String),
    Explicit {
        mass_kg: f64,
        trap_frequency_rad_per_s: f64,
        #[serde(rename = "temperature_K")]
        temperature_k: f64,
        wavevector_rad_per_m: f64,
    },
}

/// Either an explicit value list or a start/stop/step range (inclusive of
/// the endpoint up to rounding).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range { start: f64, stop: f64, step: f64 },
    Values { values: Vec<f64> },
}

/// Protocol name in its serialized form, e.g. "osw-1".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProtocolKey(pub String);

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKindKey {
    RabiPerBeam,
    QubitFrequency,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRoleKey {
    Target,
    NonTarget,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingKey {
    MonteCarlo,
    GaussHermite,
}

fn default_segments() -> usize {
    400
}
fn default_samples() -> usize {
    2000
}
fn default_nodes() -> usize {
    21
}
fn default_trajectories() -> usize {
    2000
}
fn default_iterations() -> usize {
    2000
}
fn default_theta() -> f64 {
    FRAC_PI_2
}
fn default_averaging() -> AveragingKey {
    AveragingKey::MonteCarlo
}

impl Grid {
    pub fn resolve(&self, key: &'static str) -> Result<Vec<f64>, CliError> {
        match self {
            Grid::Values { values } => {
                if values.is_empty() {
                    return Err(CliError::config(key, "empty value list"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::config(key, "non-finite entry"));
                }
                Ok(values.clone())
            }
            Grid::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0) {
                    return Err(CliError::config(key, "step must be > 0"));
                }
                if stop < start {
                    return Err(CliError::config(key, "stop must be >= start"));
                }
                let count = ((stop - start) / step).round() as usize + 1;
                if count > 1_000_000 {
                    return Err(CliError::config(key, "grid has more than 1e6 points"));
                }
                Ok((0..count).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

impl TrapConfig {
    pub fn resolve(&self) -> Result<TrapSpec, CliError> {
        let trap = match self {
            TrapConfig::Preset(name) => match name.as_str() {
                "yb171" => TrapSpec::yb171(),
                other => {
                    return Err(CliError::config(
                        "trap",
                        format!("unknown preset {other:?} (expected \"yb171\" or explicit parameters)"),
                    ))
                }
            },
            TrapConfig::Explicit {
                mass_kg,
                trap_frequency_rad_per_s,
                temperature_k,
                wavevector_rad_per_m,
            } => TrapSpec {
                mass: *mass_kg,
                omega_trap: *trap_frequency_rad_per_s,
                temperature: *temperature_k,
                wavevector: *wavevector_rad_per_m,
            },
        };
        if !(trap.mass.is_finite() && trap.mass > 0.0) {
            return Err(CliError::config("mass_kg", "must be > 0"));
        }
        if !(trap.omega_trap.is_finite() && trap.omega_trap > 0.0) {
            return Err(CliError::config("trap_frequency_rad_per_s", "must be > 0"));
        }
        if !(trap.temperature.is_finite() && trap.temperature >= 0.0) {
            return Err(CliError::config("temperature_K", "must be >= 0"));
        }
        if !(trap.wavevector.is_finite() && trap.wavevector > 0.0) {
            return Err(CliError::config("wavevector_rad_per_m", "must be > 0"));
        }
        Ok(trap)
    }
}

impl PulseSource {
    pub fn resolve(
        &self,
        gate: GateAngles,
        duration: f64,
        n: usize,
    ) -> Result<oswsim::dynamics::SampledControls, CliError> {
        match (&self.protocol, &self.basis) {
            (Some(p), None) => {
                let g = oswsim::dynamics::GateTarget::new(gate.theta_rad, gate.phi_rad);
                Ok(p.resolve()?.controls(g, duration, n))
            }
            (None, Some(b)) => {
                let params = PulseBasisParams {
                    drive_coeffs: b.drive_coeffs.clone(),
                    shift_coeffs: b.shift_coeffs.clone(),
                    drive_phase: b.drive_phase_rad,
                };
                Ok(oswsim::optimizer::realize_controls(&params, duration, n))
            }
            (Some(_), Some(_)) => Err(CliError::config(
                "protocol",
                "give either \"protocol\" or \"basis\", not both",
            )),
            (None, None) => Err(CliError::config(
                "protocol",
                "one of \"protocol\" or \"basis\" is required",
            )),
        }
    }
}

impl ProtocolKey {
    pub fn resolve(&self) -> Result<ProtocolId, CliError> {
        self.0
            .parse()
            .map_err(|e| CliError::config("protocol", format!("{e}")))
    }
}

impl NoiseKindKey {
    pub fn resolve(self) -> NoiseKind {
        match self {
            NoiseKindKey::RabiPerBeam => NoiseKind::RabiPerBeam,
            NoiseKindKey::QubitFrequency => NoiseKind::QubitFrequency,
        }
    }
}

impl QubitRoleKey {
    pub fn resolve(self) -> QubitRole {
        match self {
            QubitRoleKey::Target => QubitRole::Target,
            QubitRoleKey::NonTarget => QubitRole::NonTarget,
        }
    }
}

impl AveragingKey {
    pub fn resolve(self, n_samples: usize, n_nodes: usize, seed: u64) -> Averaging {
        match self {
            AveragingKey::MonteCarlo => Averaging::MonteCarlo { n_samples, seed },
            AveragingKey::GaussHermite => Averaging::GaussHermite { n_nodes },
        }
    }
}

pub fn validate_common(
    duration_s: f64,
    n_segments: usize,
    gate: GateAngles,
) -> Result<(), CliError> {
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(CliError::config("duration_s", "must be > 0"));
    }
    if n_segments < 2 {
        return Err(CliError::config("n_segments", "must be >= 2"));
    }
    if !gate.theta_rad.is_finite() || !gate.phi_rad.is_finite() {
        return Err(CliError::config("theta_rad", "angles must be finite"));
    }
    Ok(())
}

impl RunConfig {
    /// Applies command-line overrides, returning the resolved config that
    /// gets embedded in the output metadata.
    pub fn with_overrides(mut self, output: Option<String>, seed: Option<u64>) -> Self {
        {
            let out = match &mut self {
                RunConfig::ProtocolDump(c) => &mut c.output_path,
                RunConfig::SweepPhase(c) => &mut c.output_path,
                RunConfig::SweepNoise(c) => &mut c.output_path,
                RunConfig::SweepImbalance(c) => &mut c.output_path,
                RunConfig::SweepMotion(c) => &mut c.output_path,
                RunConfig::Magnus(c) => &mut c.output_path,
                RunConfig::Optimize(c) => &mut c.output_path,
            };
            if let Some(o) = output {
                *out = o;
            }
        }
        if let Some(s) = seed {
            match &mut self {
                RunConfig::SweepNoise(c) => c.seed = s,
                RunConfig::SweepMotion(c) => c.seed = s,
                RunConfig::Optimize(c) => c.seed = s,
                _ => {}
            }
        }
        self
    }

    pub fn output_path(&self) -> &str {
        match self {
            RunConfig::ProtocolDump(c) => &c.output_path,
            RunConfig::SweepPhase(c) => &c.output_path,
            RunConfig::SweepNoise(c) => &c.output_path,
            RunConfig::SweepImbalance(c) => &c.output_path,
            RunConfig::SweepMotion(c) => &c.output_path,
            RunConfig::Magnus(c) => &c.output_path,
            RunConfig::Optimize(c) => &c.output_path,
        }
    }
}
