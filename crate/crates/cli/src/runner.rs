//! Executes validated scenarios and renders their output files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dho_core::dynamics::{integrate, Method, Trajectory};
use dho_core::entropy::{rate_fd_audit, RateAudit};
use dho_core::models::{lindblad_constraint_check, Model, ModelVariant};
use dho_core::purity::{
    hamiltonian_expectation_check, purity_preserving_initial_state, purity_report, PurityReport, PurityVerdict,
};
use dho_core::{GaussianState, PhysConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{FalsificationDoc, OutputKind, Scenario};
use crate::error::CliError;

pub const CSV_HEADER: [&str; 14] = [
    "t",
    "mean_q",
    "mean_p",
    "var_qq",
    "var_pp",
    "cov_pq",
    "sigma_det",
    "nu",
    "S_l",
    "S",
    "purity_residual",
    "entropy_rate",
    "E_fluct",
    "E_total",
];

/// `ν` above this counts as lost purity in the falsification runs.
pub const FALSIFICATION_NU_MARGIN: f64 = 1e-6;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rendered output files of one scenario, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioOutputs {
    pub name: String,
    pub files: Vec<(String, String)>,
}

impl ScenarioOutputs {
    pub fn write_to(&self, root: &Path) -> Result<(), CliError> {
        let dir = root.join(&self.name);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display(), e))?;
        for (file, body) in &self.files {
            let path = dir.join(file);
            fs::write(&path, body).map_err(|e| CliError::io(path.display(), e))?;
        }
        Ok(())
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(f, _)| f == name).map(|(_, b)| b.as_str())
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::io("csv buffer", e))?;
    String::from_utf8(bytes).map_err(|e| CliError::io("csv buffer", e))
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<String, CliError> {
    let mut w = csv_writer();
    w.write_record(CSV_HEADER).map_err(|e| CliError::io("csv", e))?;
    for ((t, s), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        let row = [
            *t,
            s.mean_q,
            s.mean_p,
            s.var_qq,
            s.var_pp,
            s.cov_pq,
            d.sigma_det,
            d.nu,
            d.linear_entropy,
            d.von_neumann_entropy,
            d.purity_residual,
            d.entropy_rate,
            d.fluctuation_energy,
            d.total_energy,
        ];
        w.write_record(row.iter().map(|v| fmt_f64(*v))).map_err(|e| CliError::io("csv", e))?;
    }
    finish_csv(w)
}

fn audit_csv(audit: &RateAudit) -> Result<String, CliError> {
    let mut w = csv_writer();
    w.write_record(["t", "rate_formula", "rate_fd", "rate_richardson", "gap"]).map_err(|e| CliError::io("csv", e))?;
    for r in &audit.records {
        let rich = r.rate_richardson.map(fmt_f64).unwrap_or_default();
        w.write_record([fmt_f64(r.t), fmt_f64(r.rate_formula), fmt_f64(r.rate_fd), rich, fmt_f64(r.gap)])
            .map_err(|e| CliError::io("csv", e))?;
    }
    finish_csv(w)
}

fn verdict_text(v: Option<PurityVerdict>) -> &'static str {
    match v {
        Some(PurityVerdict::PreservesPurity) => "PreservesPurity",
        Some(PurityVerdict::LosesPurity) => "LosesPurity",
        None => "not classified (time-dependent coefficients)",
    }
}

fn purity_text(r: &PurityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# model: {}", r.kind.name());
    let _ = writeln!(s, "# verdict: {}", verdict_text(r.verdict));
    let _ = writeln!(s, "# initially_pure: {}", r.initially_pure);
    let _ = writeln!(s, "# max_abs_residual: {}", fmt_f64(r.max_abs_residual));
    let _ = writeln!(s, "# tolerance: {}", fmt_f64(r.tolerance));
    let _ = writeln!(s, "t,residual,variant_residual");
    for ((t, a), b) in r.times.iter().zip(&r.residuals).zip(&r.variant_residuals) {
        let _ = writeln!(s, "{},{},{}", fmt_f64(*t), fmt_f64(*a), fmt_f64(*b));
    }
    s
}

/// Outcome of the randomized perturbation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Falsification {
    pub trials: usize,
    pub lost_purity: usize,
    pub min_peak_nu: f64,
}

/// Perturbs the purity-preserving initial state (or the configured one) as a
/// correlated coherent state, keeping it pure, and counts the runs whose `ν`
/// exceeds `1 + FALSIFICATION_NU_MARGIN`.
pub fn falsify(sc: &Scenario, model: &Model, f: &FalsificationDoc, seed: u64) -> Result<Falsification, CliError> {
    let c = &sc.constants;
    let base = purity_preserving_initial_state(&sc.variant, c).ok().flatten().unwrap_or(sc.initial);
    let eta = base.var_qq.sqrt();
    let r = base.correlation_coefficient()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lost = 0;
    let mut min_peak = f64::INFINITY;
    for _ in 0..f.trials {
        let delta = rng.random_range(f.rel_min..=f.rel_max) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let (r2, eta2) = if rng.random_bool(0.5) {
            (r, eta * (1.0 + delta))
        } else if r.abs() > 0.05 {
            (r * (1.0 + delta), eta)
        } else {
            (r + delta, eta)
        };
        let start = GaussianState::correlated_coherent(r2.clamp(-0.999, 0.999), eta2, base.mean_q, base.mean_p, c)?;
        let traj = integrate(model, &start, &sc.times, &sc.integrator, c)?;
        let peak = traj.diagnostics.iter().fold(1.0f64, |m, d| m.max(d.nu));
        min_peak = min_peak.min(peak);
        if peak > 1.0 + FALSIFICATION_NU_MARGIN {
            lost += 1;
        }
    }
    Ok(Falsification { trials: f.trials, lost_purity: lost, min_peak_nu: min_peak })
}

fn integrator_text(m: Method) -> String {
    match m {
        Method::Rk4 { dt: Some(dt) } => format!("rk4 dt={}", fmt_f64(dt)),
        Method::Rk4 { dt: None } => "rk4 dt=auto".into(),
        Method::Rk45 { rel_tol, abs_tol } => format!("rk45 rel_tol={} abs_tol={}", fmt_f64(rel_tol), fmt_f64(abs_tol)),
    }
}

fn hamiltonian_line(s: &GaussianState, v: &ModelVariant, t: f64, c: &PhysConstants) -> String {
    match hamiltonian_expectation_check(s, v, t, c) {
        Ok(h) => format!("<H> = {}  <H'> = {} {:+.16e}i", fmt_f64(h.h), fmt_f64(h.h_prime.re), h.h_prime.im),
        Err(_) => "n/a (state is mixed)".into(),
    }
}

struct Summary<'a> {
    sc: &'a Scenario,
    traj: &'a Trajectory,
    report: &'a PurityReport,
    audit: Option<&'a RateAudit>,
    falsification: Option<Falsification>,
}

fn summary_text(x: &Summary) -> String {
    let sc = x.sc;
    let c = &sc.constants;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", sc.name);
    let _ = writeln!(s, "model: {}", sc.variant.kind().name());
    for w in sc.variant.warnings() {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s, "hbar: {}  k_b: {}", fmt_f64(c.hbar), fmt_f64(c.k_b));
    let _ = writeln!(s, "integrator: {}", integrator_text(sc.integrator.method));
    let _ = writeln!(s, "samples: {}  t_end: {}", sc.times.len(), fmt_f64(*sc.times.last().unwrap_or(&0.0)));
    if let Ok(Model::Lindblad(p)) = sc.variant.model(c) {
        let chk = lindblad_constraint_check(&p, c);
        let _ = writeln!(
            s,
            "constraint residual: {} ({})",
            fmt_f64(chk.residual),
            if chk.passed { "ok" } else { "violated" }
        );
    }
    let n = x.traj.len() - 1;
    let _ = writeln!(s, "{:<8} {:>24} {:>24}", "", "initial", "final");
    let d0 = &x.traj.diagnostics[0];
    let d1 = &x.traj.diagnostics[n];
    let rows = [
        ("nu", d0.nu, d1.nu),
        ("S", d0.von_neumann_entropy, d1.von_neumann_entropy),
        ("S_l", d0.linear_entropy, d1.linear_entropy),
        ("E_fluct", d0.fluctuation_energy, d1.fluctuation_energy),
        ("E_total", d0.total_energy, d1.total_energy),
    ];
    for (label, a, b) in rows {
        let _ = writeln!(s, "{label:<8} {:>24} {:>24}", fmt_f64(a), fmt_f64(b));
    }
    let _ = writeln!(s, "initial: {}", hamiltonian_line(&x.traj.states[0], &sc.variant, x.traj.times[0], c));
    let _ = writeln!(s, "final:   {}", hamiltonian_line(&x.traj.states[n], &sc.variant, x.traj.times[n], c));
    let _ = writeln!(s, "purity verdict: {}", verdict_text(x.report.verdict));
    let _ = writeln!(
        s,
        "max |purity residual|: {}  tolerance: {}",
        fmt_f64(x.report.max_abs_residual),
        fmt_f64(x.report.tolerance)
    );
    match x.audit {
        Some(a) => {
            let rich = a.max_richardson_gap.map(fmt_f64).unwrap_or_else(|| "n/a".into());
            let _ = writeln!(s, "entropy-rate audit: max gap {}  richardson gap {}", fmt_f64(a.max_gap), rich);
        }
        None => {
            let _ = writeln!(s, "entropy-rate audit: n/a (fewer than 3 samples)");
        }
    }
    if let Some(f) = x.falsification {
        let _ = writeln!(
            s,
            "falsification: {}/{} perturbed pure states lost purity (smallest peak nu {})",
            f.lost_purity,
            f.trials,
            fmt_f64(f.min_peak_nu)
        );
    }
    s
}

/// Runs one scenario and renders the requested outputs in memory.
pub fn execute(sc: &Scenario, seed: u64) -> Result<ScenarioOutputs, CliError> {
    let c = &sc.constants;
    let model = sc.variant.model(c)?;
    let traj = integrate(&model, &sc.initial, &sc.times, &sc.integrator, c)?;
    let report = purity_report(&sc.variant, &traj, c)?;
    let audit = if traj.len() >= 3 { Some(rate_fd_audit(&traj, &sc.variant, c)?) } else { None };
    let falsification = sc.falsification.as_ref().map(|f| falsify(sc, &model, f, seed)).transpose()?;

    let mut files = Vec::new();
    for kind in &sc.outputs {
        match kind {
            OutputKind::TrajectoryCsv => files.push(("trajectory.csv".to_string(), trajectory_csv(&traj)?)),
            OutputKind::PurityReport => files.push(("purity_report.txt".to_string(), purity_text(&report))),
            OutputKind::EntropyAudit => {
                let a = audit.as_ref().ok_or(CliError::Runtime(dho_core::Error::InsufficientSamples(traj.len())))?;
                files.push(("entropy_audit.csv".to_string(), audit_csv(a)?));
            }
            OutputKind::Summary => files.push((
                "summary.txt".to_string(),
                summary_text(&Summary { sc, traj: &traj, report: &report, audit: audit.as_ref(), falsification }),
            )),
        }
    }
    Ok(ScenarioOutputs { name: sc.name.clone(), files })
}
