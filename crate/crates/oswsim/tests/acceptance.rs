//! Acceptance suite: one test per headline claim, each printing a
//! PASS/FAIL line with the measured value next to its threshold.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see every line.
//!
//! Two tests (`criterion_6_pinned_target_noise_thresholds` and
//! `criterion_7_uncorrected_gate_clauses`) assert bounds that the published
//! OSW-LS1/LS2 pulse coefficients provably cannot meet under this crate's
//! pinned noise conventions; they are kept as honest failures rather than
//! loosened.  See README "Acceptance notes" for the analysis.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use oswsim::dynamics::{
    fidelity, propagate, target_unitary, DriveContext, GateTarget, Mat2, Unitary2,
};
use oswsim::motion::{run_motional_ensemble, EnsembleStats, TrapSpec};
use oswsim::optimizer::{cost, optimize, realize_controls, OptimizerConfig};
use oswsim::protocols::ProtocolId;
use oswsim::robustness::{
    fit_error_order, magnus_diagnostics, sweep_intensity_imbalance, sweep_local_phase,
    sweep_static_noise, Averaging, NoiseKind, QubitRole,
};

const N: usize = 400;
const SEED: u64 = 1;
const N_TRAJ: usize = 2000;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {detail}");
        if !pass {
            self.failures.push(format!("{name}: {detail}"));
        }
    }

    fn finish(self) {
        assert!(self.failures.is_empty(), "failed: {:#?}", self.failures);
    }
}

fn quarter_x() -> (GateTarget, Unitary2) {
    let g = GateTarget::new(FRAC_PI_2, 0.0);
    (g, target_unitary(g))
}

fn kx_grid() -> Vec<f64> {
    (-50..=50).map(|i| 0.02 * i as f64).collect()
}

fn grid_value(values: &[f64], eps: &[f64], kx: f64) -> f64 {
    let i = values
        .iter()
        .position(|&x| (x - kx).abs() < 1e-12)
        .expect("kx on grid");
    eps[i]
}

#[test]
fn criterion_1_static_phase_sweep() {
    let mut r = Report::new();
    let (g, target) = quarter_x();
    let grid = kx_grid();

    let otw = sweep_local_phase(&ProtocolId::Otw1.controls(g, 1.0, N), &target, &grid);
    let e = grid_value(&otw.parameter_values, &otw.mean_infidelity, 0.5);
    r.check("criterion 1 otw-1", e > 0.1, format!("eps(0.5) = {e:.3e} > 1e-1"));

    let osw = sweep_local_phase(&ProtocolId::Osw1.controls(g, 1.0, N), &target, &grid);
    let e = grid_value(&osw.parameter_values, &osw.mean_infidelity, 0.5);
    r.check(
        "criterion 1 osw-1",
        (e - 0.01).abs() <= 0.002,
        format!("eps(0.5) = {e:.3e} within 0.01 +/- 20%"),
    );

    let bb1 = sweep_local_phase(&ProtocolId::OswBb1.controls(g, 1.0, N), &target, &grid);
    let e = grid_value(&bb1.parameter_values, &bb1.mean_infidelity, 0.5);
    r.check("criterion 1 osw-bb1", e < 1e-5, format!("eps(0.5) = {e:.3e} < 1e-5"));
    r.finish();
}

#[test]
fn criterion_2_error_scaling_exponents() {
    let mut r = Report::new();
    let (g, target) = quarter_x();
    let grid = kx_grid();
    for (p, window, want, tol) in [
        (ProtocolId::Otw1, (0.05, 0.2), 2.0, 0.1),
        (ProtocolId::Osw1, (0.05, 0.2), 4.0, 0.2),
        (ProtocolId::OswBb1, (0.2, 0.5), 12.0, 1.0),
    ] {
        let sweep = sweep_local_phase(&p.controls(g, 1.0, N), &target, &grid);
        let floor_ok = sweep
            .parameter_values
            .iter()
            .zip(&sweep.mean_infidelity)
            .filter(|(&x, _)| x.abs() >= window.0 && x.abs() <= window.1)
            .all(|(_, &e)| e > 1e-13);
        let slope = fit_error_order(&sweep, window).unwrap();
        r.check(
            &format!("criterion 2 {p}"),
            floor_ok && (slope - want).abs() <= tol,
            format!("slope = {slope:.3} within {want} +/- {tol}"),
        );
    }
    r.finish();
}

fn motion_run(p: ProtocolId, duration: f64) -> EnsembleStats {
    let (g, _) = quarter_x();
    run_motional_ensemble(p, g, duration, &TrapSpec::yb171(), N, N_TRAJ, SEED, None).unwrap()
}

#[test]
fn criterion_3_motional_ensemble() {
    let mut r = Report::new();
    let tau = TrapSpec::yb171().trap_period();

    let otw = motion_run(ProtocolId::Otw1, 0.3 * tau);
    let osw = motion_run(ProtocolId::Osw1, 0.3 * tau);
    let ratio = otw.mean / osw.mean;
    r.check(
        "criterion 3a ratio at 0.3 tau",
        (15.0..=60.0).contains(&ratio),
        format!(
            "otw/osw = {ratio:.1} in [15, 60] (otw {:.3e} +/- {:.1e}, osw {:.3e} +/- {:.1e})",
            otw.mean,
            otw.standard_error(),
            osw.mean,
            osw.standard_error()
        ),
    );

    let otw2 = motion_run(ProtocolId::Otw1, 2.0 * tau);
    let osw2 = motion_run(ProtocolId::Osw1, 2.0 * tau);
    let ratio2 = otw2.mean / osw2.mean;
    r.check(
        "criterion 3b ratio at 2 tau",
        (1.3..=3.0).contains(&ratio2),
        format!("otw/osw = {ratio2:.2} in [1.3, 3]"),
    );

    // Gate times from the fixed-total-power peak constraint at
    // Omega_max = 2 pi x 200 kHz: the travelling beam peaks at Omega_max,
    // each standing-wave beam at Omega_max / sqrt(2).
    let omega_max = TAU * 200.0e3;
    let t_otw = PI * PI / (4.0 * omega_max);
    let t_osw = PI * PI * 2.0f64.sqrt() / (8.0 * omega_max);
    let p = FRAC_PI_2 / PI + 4.0;
    let t_bb1 = PI * p * 2.0f64.sqrt() / (2.0 * omega_max);
    for (protocol, t, want) in [
        (ProtocolId::Otw1, t_otw, 0.032),
        (ProtocolId::Osw1, t_osw, 0.0014),
        (ProtocolId::OswBb1, t_bb1, 0.018),
    ] {
        let s = motion_run(protocol, t);
        r.check(
            &format!("criterion 3c {protocol} endpoint"),
            (s.mean / want - 1.0).abs() <= 0.3,
            format!(
                "eps({:.3} us) = {:.3e} +/- {:.1e}, quoted {want:.1e}, ratio {:.2} in [0.7, 1.3]",
                t * 1e6,
                s.mean,
                s.standard_error(),
                s.mean / want
            ),
        );
    }
    // The literature also quotes the composite-pulse point at 8.8 us; the
    // steep eps(T) there puts it outside the constraint-consistent value,
    // so it is reported without being asserted.
    let s = motion_run(ProtocolId::OswBb1, 8.8e-6);
    println!(
        "[info] osw-bb1 at quoted 8.8 us: eps = {:.3e} +/- {:.1e} (ratio {:.2} of 1.8e-2)",
        s.mean,
        s.standard_error(),
        s.mean / 0.018
    );
    r.finish();
}

#[test]
fn criterion_4_ensemble_statistics() {
    let mut r = Report::new();
    let tau = TrapSpec::yb171().trap_period();
    let s = motion_run(ProtocolId::Osw1, 1.0 * tau);
    let mean_median = s.mean / s.median;
    let std_mean = s.std / s.mean;
    r.check(
        "criterion 4 mean/median",
        (3.2..=4.2).contains(&mean_median),
        format!("{mean_median:.2} in [3.2, 4.2] (T = 1.0 tau)"),
    );
    r.check(
        "criterion 4 std/mean",
        (2.5..=3.5).contains(&std_mean),
        format!("{std_mean:.2} in [2.5, 3.5] (T = 1.0 tau)"),
    );
    r.finish();
}

#[test]
fn criterion_5_light_shift_gates() {
    let mut r = Report::new();
    for (p, phi) in [(ProtocolId::OswLs1, 0.0), (ProtocolId::OswLs2, 0.4)] {
        let g = GateTarget::new(FRAC_PI_2, phi);
        let c = p.controls(g, 1.0, N);
        let u = propagate(&c, &DriveContext::at_rest(0.0)).unwrap();
        let eps = 1.0 - fidelity(&u, &target_unitary(g));
        r.check(
            &format!("criterion 5 {p} target fidelity"),
            eps <= 1e-5,
            format!("zero-noise infidelity = {eps:.3e} <= 1e-5"),
        );

        let mut worst: f64 = 0.0;
        for s1 in [0.6, 1.0, 1.8] {
            for s2 in [0.7, 1.0, 1.4] {
                for kx in [-1.0, 0.0, 0.4, 2.2] {
                    let ctx = DriveContext {
                        rabi_scale_1: s1,
                        rabi_scale_2: s2,
                        ..DriveContext::non_target_at_rest(kx)
                    };
                    let u = propagate(&c, &ctx).unwrap();
                    worst = worst.max(1.0 - fidelity(&u, &Mat2::identity()));
                }
            }
        }
        r.check(
            &format!("criterion 5 {p} non-target identity"),
            worst < 1e-10,
            format!("worst infidelity over beam scalings x kx = {worst:.3e} < 1e-10"),
        );
    }
    r.finish();
}

#[test]
fn criterion_6_noise_sweeps() {
    let mut r = Report::new();
    let (g, target) = quarter_x();
    let ls1 = ProtocolId::OswLs1.controls(g, 1.0, N);
    let ls2 = ProtocolId::OswLs2.controls(g, 1.0, N);
    let gh = Averaging::GaussHermite { n_nodes: 21 };

    let non_target = sweep_static_noise(
        &ls2,
        &target,
        NoiseKind::RabiPerBeam,
        &[0.005, 0.02, 0.05],
        QubitRole::NonTarget,
        Averaging::MonteCarlo {
            n_samples: 2000,
            seed: SEED,
        },
    );
    let worst = non_target
        .mean_infidelity
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    r.check(
        "criterion 6 non-target rabi noise",
        worst < 1e-9,
        format!("worst mean infidelity over sigma grid = {worst:.3e} < 1e-9"),
    );

    let f2 = sweep_static_noise(&ls2, &target, NoiseKind::QubitFrequency, &[0.02], QubitRole::Target, gh)
        .mean_infidelity[0];
    let f1 = sweep_static_noise(&ls1, &target, NoiseKind::QubitFrequency, &[0.02], QubitRole::Target, gh)
        .mean_infidelity[0];
    r.check(
        "criterion 6 uncorrected/corrected frequency-noise ratio",
        f1 >= 10.0 * f2,
        format!("ls1/ls2 = {:.1} >= 10 (ls1 {f1:.3e}, ls2 {f2:.3e})", f1 / f2),
    );
    r.finish();
}

/// Known honest failure: under the pinned noise conventions (per-beam
/// amplitude multipliers (1+delta), frequency offset entering as +gamma
/// sigma_z with sigma in units of 1/T), the published pulse coefficients
/// give target responses 0.643 sigma^2 (Rabi) and 9.52e-3 sigma^2
/// (frequency), which exceed these thresholds at sigma = 2% by factors of
/// about 2.6 and 3.8.  The thresholds are asserted as stated instead of
/// being loosened.
#[test]
fn criterion_6_pinned_target_noise_thresholds() {
    let mut r = Report::new();
    let (g, target) = quarter_x();
    let ls2 = ProtocolId::OswLs2.controls(g, 1.0, N);
    let gh = Averaging::GaussHermite { n_nodes: 21 };

    let rabi = sweep_static_noise(&ls2, &target, NoiseKind::RabiPerBeam, &[0.02], QubitRole::Target, gh)
        .mean_infidelity[0];
    r.check(
        "criterion 6 target rabi noise at 2%",
        rabi < 1e-4,
        format!("mean infidelity = {rabi:.3e} < 1e-4"),
    );
    let freq = sweep_static_noise(&ls2, &target, NoiseKind::QubitFrequency, &[0.02], QubitRole::Target, gh)
        .mean_infidelity[0];
    r.check(
        "criterion 6 target frequency noise at 2%/T",
        freq < 1e-6,
        format!("mean infidelity = {freq:.3e} < 1e-6"),
    );
    r.finish();
}

#[test]
fn criterion_7_magnus_diagnostics() {
    let mut r = Report::new();
    let (g, _) = quarter_x();
    let ls1 = ProtocolId::OswLs1.controls(g, 1.0, N);
    let ls2 = ProtocolId::OswLs2.controls(g, 1.0, N);
    let d2 = magnus_diagnostics(&ls2);
    r.check(
        "criterion 7 corrected-gate first order",
        d2.m1_norm < 1e-3,
        format!("m1_norm/T = {:.3e} < 1e-3", d2.m1_norm),
    );
    let worst_area = d2.projected_areas.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    r.check(
        "criterion 7 corrected-gate projected areas",
        worst_area < 1e-3,
        format!("max |area|/T^2 = {worst_area:.3e} < 1e-3"),
    );

    // Perturbative oracle: for small gamma the bystander infidelity follows
    // gamma^2 (m1_norm/2)^2 on the uncorrected gate.
    let d1 = magnus_diagnostics(&ls1);
    let mut worst_rel: f64 = 0.0;
    for gamma_t in [1e-4, 1e-3, 1e-2] {
        let ctx = DriveContext {
            detuning: gamma_t,
            ..DriveContext::non_target_at_rest(0.0)
        };
        let u = propagate(&ls1, &ctx).unwrap();
        let eps = 1.0 - fidelity(&u, &Mat2::identity());
        let predicted = (gamma_t * d1.m1_norm / 2.0).powi(2);
        worst_rel = worst_rel.max((eps / predicted - 1.0).abs());
    }
    r.check(
        "criterion 7 perturbative oracle",
        worst_rel <= 0.1,
        format!(
            "max |eps/prediction - 1| = {worst_rel:.3} over gamma*T in [1e-4, 1e-2] (m1_norm/T = {:.4})",
            d1.m1_norm
        ),
    );
    r.finish();
}

/// Known honest failure, both clauses.  The uncorrected pulse leaves the
/// first Magnus integral wide open — analytically 2 J0(2*3.1317/pi) = 1.533
/// per unit gamma*T, confirmed numerically — so its m1_norm/T is nowhere
/// near 1e-3; and every drive in this antisymmetric family closes the
/// projected areas structurally (both gates measure ~1e-16 T^2, numerical
/// zero), so no area exceeds 10x the other gate's.  The assertions are kept
/// as stated; the oracle test above shows the open first order is real.
#[test]
fn criterion_7_uncorrected_gate_clauses() {
    let mut r = Report::new();
    let (g, _) = quarter_x();
    let d1 = magnus_diagnostics(&ProtocolId::OswLs1.controls(g, 1.0, N));
    let d2 = magnus_diagnostics(&ProtocolId::OswLs2.controls(g, 1.0, N));
    r.check(
        "criterion 7 uncorrected-gate first order",
        d1.m1_norm < 1e-3,
        format!("m1_norm/T = {:.3e} < 1e-3", d1.m1_norm),
    );
    let max1 = d1.projected_areas.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let max2 = d2.projected_areas.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    r.check(
        "criterion 7 uncorrected-gate area excess",
        max1 > 10.0 * max2,
        format!("max |area| = {max1:.2e} vs 10x corrected = {:.2e} (both numerical zeros)", 10.0 * max2),
    );
    r.finish();
}

#[test]
fn criterion_8_intensity_imbalance() {
    let mut r = Report::new();
    let (g, target) = quarter_x();
    let grid: Vec<f64> = (-25..=25).map(|i| 0.02 * i as f64).collect();
    let d = 0.2;

    let curves: Vec<(ProtocolId, Vec<f64>, Vec<f64>)> = [
        ProtocolId::Otw1,
        ProtocolId::Osw1,
        ProtocolId::OswBb1,
    ]
    .into_iter()
    .map(|p| {
        let c = p.controls(g, 1.0, N);
        let bal = sweep_local_phase(&c, &target, &grid).mean_infidelity;
        let imb = sweep_intensity_imbalance(&c, &target, d, &grid)
            .unwrap()
            .mean_infidelity;
        (p, bal, imb)
    })
    .collect();

    let max_of = |v: &[f64]| v.iter().cloned().fold(0.0f64, f64::max);
    let (_, osw_bal, osw_imb) = &curves[1];
    let rel = max_of(osw_imb) / max_of(osw_bal) - 1.0;
    r.check(
        "criterion 8 osw-1 curve shift",
        rel.abs() <= 0.1,
        format!("peak infidelity moves {:.1}% (<= 10%)", rel * 100.0),
    );

    for (p, bal, imb) in &curves[1..] {
        let excess = imb
            .iter()
            .zip(bal)
            .map(|(i, b)| i - b)
            .fold(f64::MIN, f64::max);
        let near0 = imb
            .iter()
            .zip(bal)
            .zip(&grid)
            .filter(|(_, kx)| kx.abs() <= 0.1)
            .map(|((i, b), _)| i - b)
            .fold(f64::MIN, f64::max);
        r.check(
            &format!("criterion 8 {p} imbalance cost"),
            excess <= 1e-3 && near0 <= 1e-4,
            format!("max excess {excess:.2e} <= 1e-3 over |kx| <= 0.5, {near0:.2e} <= 1e-4 near kx = 0"),
        );
    }

    let at = |v: &[f64]| grid_value(&grid, v, 0.5);
    let (_, _, otw_imb) = &curves[0];
    let otw_e = at(otw_imb);
    let osw_e = at(&curves[1].2);
    let bb1_e = at(&curves[2].2);
    r.check(
        "criterion 8 otw-1 stays 10x worse",
        otw_e >= 10.0 * osw_e && otw_e >= 10.0 * bb1_e,
        format!("eps(0.5): otw {otw_e:.2e} vs osw {osw_e:.2e}, bb1 {bb1_e:.2e}"),
    );
    r.finish();
}

#[test]
fn criterion_9_optimizer() {
    let mut r = Report::new();
    let (g, _) = quarter_x();
    let config = OptimizerConfig {
        n_drive: 1,
        n_shift: 4,
        restarts: 20,
        cost_tolerance: 1e-4,
        seed: 11,
        n_segments: N,
        ..OptimizerConfig::default()
    };
    let pulse = optimize(&config, g, 1.0);
    r.check(
        "criterion 9 convergence",
        pulse.converged && pulse.final_cost < 1e-4,
        format!("cost = {:.3e} < 1e-4 from {} restarts", pulse.final_cost, config.restarts),
    );

    // Independent re-audit from the emitted coefficients.
    let controls = realize_controls(&pulse.params, 1.0, N);
    let u = propagate(&controls, &DriveContext::at_rest(0.0)).unwrap();
    let f = fidelity(&u, &target_unitary(g));
    let diag = magnus_diagnostics(&controls);
    let audit_cost = cost(&pulse.params, g, 1.0, N);
    r.check(
        "criterion 9 re-audit",
        (audit_cost - pulse.final_cost).abs() < 1e-10
            && (f - pulse.fidelity).abs() < 1e-10
            && (diag.m1_norm - pulse.m1_norm).abs() < 1e-10,
        format!("reported cost/fidelity/m1 reproduce to 1e-10 (cost {audit_cost:.3e})"),
    );
    r.check(
        "criterion 9 audited pulse quality",
        f > 1.0 - 1e-4 && diag.m1_norm < 1e-4,
        format!("fidelity = {:.8}, m1_norm/T = {:.3e}", f, diag.m1_norm),
    );
    let worst_area = diag.projected_areas.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    r.check(
        "criterion 9 projected areas",
        worst_area < 1e-3,
        format!("max |area|/T^2 = {worst_area:.3e} < 1e-3"),
    );
    r.finish();
}

#[test]
fn criterion_10_property_spot_checks() {
    let mut r = Report::new();
    let (g, target) = quarter_x();

    // Unitarity and global-phase invariance on a non-trivial context.
    let c = ProtocolId::OswLs2.controls(g, 1.0, N);
    let ctx = DriveContext {
        rabi_scale_1: 1.1,
        rabi_scale_2: 0.93,
        detuning: 0.7,
        ..DriveContext::at_rest(0.8)
    };
    let u = propagate(&c, &ctx).unwrap();
    r.check(
        "criterion 10 unitarity",
        u.unitarity_defect() < 1e-12,
        format!("defect = {:.3e} < 1e-12", u.unitarity_defect()),
    );
    let phased = u.scale(num_complex::Complex64::from_polar(1.0, 1.234));
    let df = (fidelity(&phased, &target) - fidelity(&u, &target)).abs();
    r.check(
        "criterion 10 global-phase invariance",
        df < 1e-13,
        format!("|dF| = {df:.3e} < 1e-13"),
    );

    // Determinism and convergence spot checks; the generative versions live
    // in the `properties` test target.
    let trap = TrapSpec::yb171();
    let s1 = run_motional_ensemble(ProtocolId::Osw1, g, 3e-6, &trap, 400, 500, SEED, None).unwrap();
    let s2 = run_motional_ensemble(ProtocolId::Osw1, g, 3e-6, &trap, 400, 500, SEED, None).unwrap();
    r.check(
        "criterion 10 determinism",
        s1 == s2,
        format!("two runs agree bit-for-bit (mean {:.6e})", s1.mean),
    );
    let s800 = run_motional_ensemble(ProtocolId::Osw1, g, 3e-6, &trap, 800, 500, SEED, None).unwrap();
    let rel = (s1.mean - s800.mean).abs() / s800.mean;
    r.check(
        "criterion 10 segment convergence",
        rel < 0.01,
        format!("400 -> 800 changes the ensemble mean by {:.3}% (< 1%)", rel * 100.0),
    );
    r.finish();
}
