//! Executes one resolved run configuration and produces its output table.

use serde_json::json;

use oswsim::dynamics::{fidelity, propagate, target_unitary, DriveContext, GateTarget};
use oswsim::motion::run_motional_ensemble;
use oswsim::optimizer::{optimize, realize_controls, OptimizerConfig};
use oswsim::robustness::{
    magnus_diagnostics, sweep_intensity_imbalance, sweep_local_phase, sweep_static_noise,
};

use crate::config::{validate_common, RunConfig};
use crate::table::Table;
use crate::CliError;

fn metadata(config: &RunConfig) -> serde_json::Value {
    json!({
        "config": config,
        "version": oswsim::VERSION,
    })
}

pub fn execute(config: &RunConfig) -> Result<Table, CliError> {
    match config {
        RunConfig::ProtocolDump(c) => {
            validate_common(c.duration_s, c.n_segments, c.gate)?;
            let controls = c.pulse.resolve(c.gate, c.duration_s, c.n_segments)?;
            let mut table = Table::new(
                metadata(config),
                &[
                    "t_s",
                    "abs_omega1_rad_per_s",
                    "arg_omega1_rad",
                    "abs_omega2_rad_per_s",
                    "arg_omega2_rad",
                    "light_shift_rad_per_s",
                ],
            );
            let times = controls.midpoint_times();
            for (j, &t) in times.iter().enumerate() {
                let o1 = controls.omega1()[j];
                let o2 = controls.omega2()[j];
                table.push(vec![t, o1.norm(), o1.arg(), o2.norm(), o2.arg(), controls.light_shift()[j]]);
            }
            Ok(table)
        }

        RunConfig::SweepPhase(c) => {
            validate_common(c.duration_s, c.n_segments, c.gate)?;
            let controls = c.pulse.resolve(c.gate, c.duration_s, c.n_segments)?;
            let kx = c.kx_grid_rad.resolve("kx_grid_rad")?;
            let target = target_unitary(GateTarget::new(c.gate.theta_rad, c.gate.phi_rad));
            let sweep = sweep_local_phase(&controls, &target, &kx);
            let mut table = Table::new(metadata(config), &["kx_rad", "infidelity"]);
            for (x, e) in sweep.parameter_values.iter().zip(&sweep.mean_infidelity) {
                table.push(vec![*x, *e]);
            }
            Ok(table)
        }

        RunConfig::SweepNoise(c) => {
            validate_common(c.duration_s, c.n_segments, c.gate)?;
            if c.n_samples == 0 {
                return Err(CliError::config("n_samples", "must be >= 1"));
            }
            if c.n_nodes == 0 {
                return Err(CliError::config("n_nodes", "must be >= 1"));
            }
            let controls = c.pulse.resolve(c.gate, c.duration_s, c.n_segments)?;
            let sigmas = c.sigma_grid.resolve("sigma_grid")?;
            if sigmas.iter().any(|&s| s < 0.0) {
                return Err(CliError::config("sigma_grid", "sigma must be >= 0"));
            }
            let target = target_unitary(GateTarget::new(c.gate.theta_rad, c.gate.phi_rad));
            let averaging = c.averaging.resolve(c.n_samples, c.n_nodes, c.seed);
            let sweep = sweep_static_noise(
                &controls,
                &target,
                c.noise_kind.resolve(),
                &sigmas,
                c.qubit_role.resolve(),
                averaging,
            );
            let mut table = Table::new(
                metadata(config),
                &["sigma", "mean_infidelity", "median_infidelity", "std_infidelity"],
            );
            for (i, (&s, &m)) in sweep
                .parameter_values
                .iter()
                .zip(&sweep.mean_infidelity)
                .enumerate()
            {
                let med = sweep.median_infidelity.as_ref().map_or(f64::NAN, |v| v[i]);
                let sd = sweep.std_infidelity.as_ref().map_or(f64::NAN, |v| v[i]);
                table.push(vec![s, m, med, sd]);
            }
            Ok(table)
        }

        RunConfig::SweepImbalance(c) => {
            validate_common(c.duration_s, c.n_segments, c.gate)?;
            let controls = c.pulse.resolve(c.gate, c.duration_s, c.n_segments)?;
            let kx = c.kx_grid_rad.resolve("kx_grid_rad")?;
            let target = target_unitary(GateTarget::new(c.gate.theta_rad, c.gate.phi_rad));
            let sweep = sweep_intensity_imbalance(&controls, &target, c.imbalance, &kx)
                .map_err(|e| CliError::config("imbalance", e.to_string()))?;
            let mut table = Table::new(metadata(config), &["kx_rad", "infidelity"]);
            for (x, e) in sweep.parameter_values.iter().zip(&sweep.mean_infidelity) {
                table.push(vec![*x, *e]);
            }
            Ok(table)
        }

        RunConfig::SweepMotion(c) => {
            validate_common(1.0, c.n_segments, c.gate)?;
            if c.n_trajectories == 0 {
                return Err(CliError::config("n_trajectories", "must be >= 1"));
            }
            if let Some(r) = c.rabi_rescale {
                if !(r.is_finite() && r > 0.0) {
                    return Err(CliError::config("rabi_rescale", "must be > 0"));
                }
            }
            let protocol = c.protocol.resolve()?;
            let trap = c.trap.resolve()?;
            let times = c.gate_times_s.resolve("gate_times_s")?;
            if times.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
                return Err(CliError::config("gate_times_s", "gate times must be > 0"));
            }
            let g = GateTarget::new(c.gate.theta_rad, c.gate.phi_rad);
            let mut table = Table::new(
                metadata(config),
                &[
                    "gate_time_s",
                    "mean_infidelity",
                    "median_infidelity",
                    "std_infidelity",
                    "standard_error",
                ],
            );
            for &t in &times {
                let stats = run_motional_ensemble(
                    protocol,
                    g,
                    t,
                    &trap,
                    c.n_segments,
                    c.n_trajectories,
                    c.seed,
                    c.rabi_rescale,
                )
                .map_err(|e| CliError::config("gate_times_s", e.to_string()))?;
                table.push(vec![t, stats.mean, stats.median, stats.std, stats.standard_error()]);
            }
            Ok(table)
        }

        RunConfig::Magnus(c) => {
            validate_common(c.duration_s, c.n_segments, c.gate)?;
            let controls = c.pulse.resolve(c.gate, c.duration_s, c.n_segments)?;
            let d = magnus_diagnostics(&controls);
            let mut table = Table::new(
                metadata(config),
                &[
                    "m1_norm_s",
                    "m2_norm_s2",
                    "bloch_closure_s",
                    "area_xy_s2",
                    "area_xz_s2",
                    "area_yz_s2",
                ],
            );
            table.push(vec![
                d.m1_norm,
                d.m2_norm,
                d.bloch_closure,
                d.projected_areas[0],
                d.projected_areas[1],
                d.projected_areas[2],
            ]);
            Ok(table)
        }

        RunConfig::Optimize(c) => {
            validate_common(c.duration_s, c.n_segments, c.gate)?;
            if c.n_drive == 0 {
                return Err(CliError::config("n_drive", "must be >= 1"));
            }
            if c.n_shift == 0 {
                return Err(CliError::config("n_shift", "must be >= 1"));
            }
            if c.restarts == 0 {
                return Err(CliError::config("restarts", "must be >= 1"));
            }
            if !(c.cost_tolerance.is_finite() && c.cost_tolerance > 0.0) {
                return Err(CliError::config("cost_tolerance", "must be > 0"));
            }
            let opt = OptimizerConfig {
                n_drive: c.n_drive,
                n_shift: c.n_shift,
                max_iterations: c.max_iterations,
                cost_tolerance: c.cost_tolerance,
                restarts: c.restarts,
                seed: c.seed,
                n_segments: c.n_segments,
            };
            let g = GateTarget::new(c.gate.theta_rad, c.gate.phi_rad);
            let pulse = optimize(&opt, g, c.duration_s);
            let diag = magnus_diagnostics(&realize_controls(&pulse.params, c.duration_s, c.n_segments));
            let audit = {
                let controls = realize_controls(&pulse.params, c.duration_s, c.n_segments);
                let u = propagate(&controls, &DriveContext::at_rest(0.0)).expect("valid context");
                fidelity(&u, &target_unitary(g))
            };

            let mut columns: Vec<String> = [
                "converged",
                "final_cost",
                "fidelity",
                "audited_fidelity",
                "m1_norm_s",
                "max_projected_area_s2",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            for i in 1..=c.n_drive {
                columns.push(format!("drive_a{i}"));
            }
            for i in 1..=c.n_shift {
                columns.push(format!("shift_c{i}"));
            }
            let mut table = Table {
                metadata: metadata(config),
                columns,
                rows: Vec::new(),
            };
            let mut row = vec![
                if pulse.converged { 1.0 } else { 0.0 },
                pulse.final_cost,
                pulse.fidelity,
                audit,
                pulse.m1_norm,
                diag.projected_areas
                    .iter()
                    .fold(0.0f64, |a, &x| a.max(x.abs())),
            ];
            row.extend(&pulse.params.drive_coeffs);
            row.extend(&pulse.params.shift_coeffs);
            table.push(row);
            Ok(table)
        }
    }
}
