//! Evaluates the headline robustness claims against completed preset runs.
//!
//! Reads the CSV tables the preset configurations produce from a results
//! directory and prints one PASS/FAIL line per check, with "not run" for
//! any check whose inputs are missing.  Missing runs are non-fatal.

use std::fmt::Write as _;
use std::path::Path;

use oswsim::robustness::{fit_error_order, QubitRole, SweepResult};

use crate::table::Table;
use crate::CliError;

const QUOTED_OTW_ENDPOINT: (f64, f64) = (1.9634954084936207e-6, 0.032);
const QUOTED_OSW_ENDPOINT: (f64, f64) = (1.3884009181744895e-6, 0.0014);
const QUOTED_BB1_ENDPOINT: (f64, f64) = (7.954951288348659e-6, 0.018);

enum Outcome {
    Pass(String),
    Fail(String),
    NotRun(String),
}

struct Report {
    lines: Vec<(String, Outcome)>,
}

impl Report {
    fn new() -> Self {
        Report { lines: Vec::new() }
    }

    fn add(&mut self, name: &str, outcome: Outcome) {
        self.lines.push((name.to_string(), outcome));
    }

    fn check(&mut self, name: &str, data: Option<(bool, String)>, missing: &str) {
        match data {
            Some((true, detail)) => self.add(name, Outcome::Pass(detail)),
            Some((false, detail)) => self.add(name, Outcome::Fail(detail)),
            None => self.add(name, Outcome::NotRun(format!("missing {missing}"))),
        }
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let mut passed = 0;
        let mut failed = 0;
        let mut skipped = 0;
        for (name, outcome) in &self.lines {
            let (tag, detail) = match outcome {
                Outcome::Pass(d) => {
                    passed += 1;
                    ("PASS   ", d)
                }
                Outcome::Fail(d) => {
                    failed += 1;
                    ("FAIL   ", d)
                }
                Outcome::NotRun(d) => {
                    skipped += 1;
                    ("not run", d)
                }
            };
            writeln!(out, "[{tag}] {name}: {detail}").unwrap();
        }
        writeln!(out, "---").unwrap();
        writeln!(out, "{passed} passed, {failed} failed, {skipped} not run").unwrap();
        out
    }
}

fn load(dir: &Path, name: &str) -> Option<Table> {
    let path = dir.join(name);
    path.exists().then(|| Table::read(&path).ok()).flatten()
}

/// Value of `value_col` at the row where `param_col` is closest to `x`,
/// required to match within 0.1% relative.
fn value_at(table: &Table, param_col: &str, value_col: &str, x: f64) -> Option<f64> {
    let params = table.column(param_col)?;
    let values = table.column(value_col)?;
    let (i, &best) = params
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).unwrap())?;
    ((best - x).abs() <= 1e-3 * x.abs().max(1e-300)).then(|| values[i])
}

fn as_sweep(table: &Table) -> Option<SweepResult> {
    Some(SweepResult {
        parameter_name: table.columns.first()?.clone(),
        parameter_values: table.column(&table.columns[0])?,
        mean_infidelity: table.column("infidelity")?,
        median_infidelity: None,
        std_infidelity: None,
        qubit_role: QubitRole::Target,
    })
}

pub fn compare_figures(results_dir: &Path) -> Result<String, CliError> {
    if !results_dir.is_dir() {
        return Err(CliError::Io {
            path: results_dir.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "results directory not found"),
        });
    }
    let mut r = Report::new();

    let phase_otw = load(results_dir, "phase_otw1.csv");
    let phase_osw = load(results_dir, "phase_osw1.csv");
    let phase_bb1 = load(results_dir, "phase_osw_bb1.csv");

    // 1. Static phase sweep at |kx| = 0.5.
    let eps_at_half = |t: &Option<Table>| {
        t.as_ref()
            .and_then(|t| value_at(t, "kx_rad", "infidelity", 0.5))
    };
    r.check(
        "criterion 1 otw-1 eps(0.5) > 1e-1",
        eps_at_half(&phase_otw).map(|e| (e > 0.1, format!("measured {e:.3e}"))),
        "phase_otw1.csv",
    );
    r.check(
        "criterion 1 osw-1 eps(0.5) = 0.01 +/- 20%",
        eps_at_half(&phase_osw).map(|e| ((e - 0.01).abs() <= 0.002, format!("measured {e:.3e}"))),
        "phase_osw1.csv",
    );
    r.check(
        "criterion 1 osw-bb1 eps(0.5) < 1e-5",
        eps_at_half(&phase_bb1).map(|e| (e < 1e-5, format!("measured {e:.3e}"))),
        "phase_osw_bb1.csv",
    );

    // 2. Error-scaling exponents.
    let slope = |t: &Option<Table>, window: (f64, f64)| {
        t.as_ref()
            .and_then(as_sweep)
            .and_then(|s| fit_error_order(&s, window).ok())
    };
    for (name, table, window, want, tol, file) in [
        ("criterion 2 otw-1 exponent 2.0 +/- 0.1", &phase_otw, (0.05, 0.2), 2.0, 0.1, "phase_otw1.csv"),
        ("criterion 2 osw-1 exponent 4.0 +/- 0.2", &phase_osw, (0.05, 0.2), 4.0, 0.2, "phase_osw1.csv"),
        ("criterion 2 osw-bb1 exponent 12 +/- 1", &phase_bb1, (0.2, 0.5), 12.0, 1.0, "phase_osw_bb1.csv"),
    ] {
        r.check(
            name,
            slope(table, window).map(|s| ((s - want).abs() <= tol, format!("measured {s:.3}"))),
            file,
        );
    }

    // 3. Motional ensemble ratios and endpoints.
    let motion_otw = load(results_dir, "motion_otw1.csv");
    let motion_osw = load(results_dir, "motion_osw1.csv");
    let motion_bb1 = load(results_dir, "motion_osw_bb1.csv");
    let mean_at = |t: &Option<Table>, time: f64| {
        t.as_ref()
            .and_then(|t| value_at(t, "gate_time_s", "mean_infidelity", time))
    };
    let ratio_at = |time: f64| -> Option<f64> {
        Some(mean_at(&motion_otw, time)? / mean_at(&motion_osw, time)?)
    };
    r.check(
        "criterion 3a otw/osw mean ratio at 0.3 tau in [15, 60]",
        ratio_at(3.0e-6).map(|x| ((15.0..=60.0).contains(&x), format!("measured {x:.1}"))),
        "motion_otw1.csv + motion_osw1.csv",
    );
    r.check(
        "criterion 3b otw/osw mean ratio at 2 tau in [1.3, 3]",
        ratio_at(2.0e-5).map(|x| ((1.3..=3.0).contains(&x), format!("measured {x:.2}"))),
        "motion_otw1.csv + motion_osw1.csv",
    );
    for (name, table, (time, want), file) in [
        ("criterion 3c otw-1 endpoint within 30%", &motion_otw, QUOTED_OTW_ENDPOINT, "motion_otw1.csv"),
        ("criterion 3c osw-1 endpoint within 30%", &motion_osw, QUOTED_OSW_ENDPOINT, "motion_osw1.csv"),
        ("criterion 3c osw-bb1 endpoint within 30%", &motion_bb1, QUOTED_BB1_ENDPOINT, "motion_osw_bb1.csv"),
    ] {
        r.check(
            name,
            mean_at(table, time).map(|e| {
                (
                    (e / want - 1.0).abs() <= 0.3,
                    format!("measured {e:.3e} vs quoted {want:.1e} (ratio {:.2})", e / want),
                )
            }),
            file,
        );
    }

    // 4. Ensemble statistics at the mid-range gate time T = tau.
    let stats = motion_osw.as_ref().and_then(|t| {
        let mean = value_at(t, "gate_time_s", "mean_infidelity", 1.0e-5)?;
        let median = value_at(t, "gate_time_s", "median_infidelity", 1.0e-5)?;
        let std = value_at(t, "gate_time_s", "std_infidelity", 1.0e-5)?;
        Some((mean / median, std / mean))
    });
    r.check(
        "criterion 4 osw-1 mean/median in [3.2, 4.2] at T = tau",
        stats.map(|(mm, _)| ((3.2..=4.2).contains(&mm), format!("measured {mm:.2}"))),
        "motion_osw1.csv",
    );
    r.check(
        "criterion 4 osw-1 std/mean in [2.5, 3.5] at T = tau",
        stats.map(|(_, sm)| ((2.5..=3.5).contains(&sm), format!("measured {sm:.2}"))),
        "motion_osw1.csv",
    );

    // 6. Light-shift noise sweeps at sigma = 2%.
    let noise_rabi_target = load(results_dir, "noise_rabi_ls2_target.csv");
    let noise_freq_ls2 = load(results_dir, "noise_freq_ls2_target.csv");
    let noise_freq_ls1 = load(results_dir, "noise_freq_ls1_target.csv");
    let noise_nontarget = load(results_dir, "noise_rabi_ls2_nontarget.csv");
    let noise_at = |t: &Option<Table>, sigma: f64| {
        t.as_ref()
            .and_then(|t| value_at(t, "sigma", "mean_infidelity", sigma))
    };
    r.check(
        "criterion 6 osw-ls2 target rabi at 2% < 1e-4",
        noise_at(&noise_rabi_target, 0.02).map(|e| (e < 1e-4, format!("measured {e:.3e}"))),
        "noise_rabi_ls2_target.csv",
    );
    r.check(
        "criterion 6 osw-ls2 target frequency at 2%/T < 1e-6",
        noise_at(&noise_freq_ls2, 0.02).map(|e| (e < 1e-6, format!("measured {e:.3e}"))),
        "noise_freq_ls2_target.csv",
    );
    r.check(
        "criterion 6 osw-ls2 non-target rabi < 1e-9 at all sigma",
        noise_nontarget.as_ref().and_then(|t| {
            let v = t.column("mean_infidelity")?;
            let worst = v.into_iter().fold(0.0f64, f64::max);
            Some((worst < 1e-9, format!("worst {worst:.3e}")))
        }),
        "noise_rabi_ls2_nontarget.csv",
    );
    let freq_ratio = (|| Some(noise_at(&noise_freq_ls1, 0.02)? / noise_at(&noise_freq_ls2, 0.02)?))();
    r.check(
        "criterion 6 osw-ls1/osw-ls2 frequency sensitivity >= 10x",
        freq_ratio.map(|x| (x >= 10.0, format!("measured {x:.1}"))),
        "noise_freq_ls1_target.csv + noise_freq_ls2_target.csv",
    );

    // 8. Intensity imbalance at d = 0.2 over |kx| <= 0.5.
    let imb_otw = load(results_dir, "imbalance_otw1.csv");
    let imb_osw = load(results_dir, "imbalance_osw1.csv");
    let imb_bb1 = load(results_dir, "imbalance_osw_bb1.csv");
    // Balanced/imbalanced curves joined on the kx grid inside the window.
    let joined = |bal: &Option<Table>, imb: &Option<Table>| -> Option<Vec<(f64, f64, f64)>> {
        let bal = bal.as_ref()?;
        let imb = imb.as_ref()?;
        let kx = imb.column("kx_rad")?;
        let ei = imb.column("infidelity")?;
        let mut rows = Vec::new();
        for (x, e_imb) in kx.into_iter().zip(ei) {
            if x.abs() <= 0.5 + 1e-12 {
                let e_bal = value_at(bal, "kx_rad", "infidelity", x)?;
                rows.push((x, e_bal, e_imb));
            }
        }
        (!rows.is_empty()).then_some(rows)
    };
    let osw_join = joined(&phase_osw, &imb_osw);
    r.check(
        "criterion 8 osw-1 peak infidelity within 10% of balanced",
        osw_join.as_ref().map(|rows| {
            let max_bal = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
            let max_imb = rows.iter().map(|r| r.2).fold(0.0f64, f64::max);
            let rel = max_imb / max_bal - 1.0;
            (rel.abs() <= 0.1, format!("peak moves {:.1}%", rel * 100.0))
        }),
        "phase_osw1.csv + imbalance_osw1.csv",
    );
    for (name, join, files) in [
        (
            "criterion 8 osw-1 imbalance cost <= 1e-3 (1e-4 near kx = 0)",
            &osw_join,
            "phase_osw1.csv + imbalance_osw1.csv",
        ),
        (
            "criterion 8 osw-bb1 imbalance cost <= 1e-3 (1e-4 near kx = 0)",
            &joined(&phase_bb1, &imb_bb1),
            "phase_osw_bb1.csv + imbalance_osw_bb1.csv",
        ),
    ] {
        r.check(
            name,
            join.as_ref().map(|rows| {
                let excess = rows.iter().map(|r| r.2 - r.1).fold(f64::MIN, f64::max);
                let near0 = rows
                    .iter()
                    .filter(|r| r.0.abs() <= 0.1)
                    .map(|r| r.2 - r.1)
                    .fold(f64::MIN, f64::max);
                (
                    excess <= 1e-3 && near0 <= 1e-4,
                    format!("max excess {excess:.2e}, near kx=0 {near0:.2e}"),
                )
            }),
            files,
        );
    }
    let imb_at_half = |t: &Option<Table>| {
        t.as_ref()
            .and_then(|t| value_at(t, "kx_rad", "infidelity", 0.5))
    };
    let otw_margin = (|| {
        let otw = imb_at_half(&imb_otw)?;
        let osw = imb_at_half(&imb_osw)?;
        let bb1 = imb_at_half(&imb_bb1)?;
        Some((otw >= 10.0 * osw && otw >= 10.0 * bb1, format!("otw {otw:.2e} vs osw {osw:.2e}, bb1 {bb1:.2e}")))
    })();
    r.check(
        "criterion 8 otw-1 stays >= 10x worse at |kx| = 0.5",
        otw_margin,
        "imbalance_*.csv",
    );

    Ok(r.render())
}
