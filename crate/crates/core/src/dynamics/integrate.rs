//! Numerical integration of the moment equations.

use std::f64::consts::TAU;

use crate::dynamics::energy::{fluctuation_energy, total_energy};
use crate::dynamics::moments::moment_derivatives;
use crate::entropy::entropy_rate;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::purity::purity_residual;
use crate::state::{GaussianState, PhysConstants, PURITY_REL_TOL};

/// Steps per characteristic time for the default RK4 step.
pub const DEFAULT_STEPS_PER_SCALE: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classic fixed-step fourth-order Runge–Kutta. `None` picks
    /// `min(2π/Ω, 1/γ)/200` from the model's time scales.
    Rk4 { dt: Option<f64> },
    /// Dormand–Prince 5(4) with error control.
    Rk45 { rel_tol: f64, abs_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    pub check_admissibility: bool,
    pub admissibility_tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { method: Method::Rk4 { dt: None }, check_admissibility: true, admissibility_tol: PURITY_REL_TOL }
    }
}

impl IntegratorOptions {
    pub fn rk4(dt: f64) -> Self {
        Self { method: Method::Rk4 { dt: Some(dt) }, ..Self::default() }
    }

    pub fn rk45(rel_tol: f64) -> Self {
        Self { method: Method::Rk45 { rel_tol, abs_tol: rel_tol * 1e-3 }, ..Self::default() }
    }
}

/// Per-sample derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub sigma_det: f64,
    pub nu: f64,
    pub linear_entropy: f64,
    pub von_neumann_entropy: f64,
    pub purity_residual: f64,
    pub entropy_rate: f64,
    pub fluctuation_energy: f64,
    pub total_energy: f64,
}

impl Diagnostics {
    pub fn evaluate(model: &Model, s: &GaussianState, t: f64, c: &PhysConstants) -> Result<Self> {
        let nu = s.purity_nu(c)?;
        Ok(Self {
            sigma_det: s.sigma_det(),
            nu,
            linear_entropy: 1.0 - 1.0 / nu,
            von_neumann_entropy: crate::state::entropy_from_nu(nu),
            purity_residual: purity_residual(model, s, t, c)?,
            entropy_rate: entropy_rate(model, s, t, c)?,
            fluctuation_energy: fluctuation_energy(s, model),
            total_energy: total_energy(s, model),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GaussianState>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &GaussianState, &Diagnostics)> {
        let i = self.times.len().checked_sub(1)?;
        Some((self.times[i], &self.states[i], &self.diagnostics[i]))
    }
}

/// `n` equally spaced times on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(),
    }
}

type Vec5 = [f64; 5];

fn to_vec(s: &GaussianState) -> Vec5 {
    [s.mean_q, s.mean_p, s.var_qq, s.var_pp, s.cov_pq]
}

fn from_vec(y: &Vec5) -> GaussianState {
    GaussianState::new(y[0], y[1], y[2], y[3], y[4])
}

fn axpy(y: &Vec5, h: f64, k: &Vec5) -> Vec5 {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rhs(model: &Model, t: f64, y: &Vec5) -> Result<Vec5> {
    Ok(moment_derivatives(model, &from_vec(y), t)?.to_array())
}

fn rk4_step(model: &Model, t: f64, y: &Vec5, h: f64) -> Result<Vec5> {
    let k1 = rhs(model, t, y)?;
    let k2 = rhs(model, t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = rhs(model, t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = rhs(model, t + h, &axpy(y, h, &k3))?;
    Ok(std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One Dormand–Prince step: fifth-order solution and scaled error norm.
fn dp_step(model: &Model, t: f64, y: &Vec5, h: f64, rel_tol: f64, abs_tol: f64) -> Result<(Vec5, f64)> {
    let mut k = [[0.0; 5]; 7];
    for stage in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = DP_A[stage][j];
            if a != 0.0 {
                for i in 0..5 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[stage] = rhs(model, t + DP_C[stage] * h, &ys)?;
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..5 {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for s in 0..7 {
            hi += DP_B5[s] * k[s][i];
            lo += DP_B4[s] * k[s][i];
        }
        y5[i] += h * hi;
        let scale = abs_tol + rel_tol * y[i].abs().max(y5[i].abs());
        err = err.max((h * (hi - lo)).abs() / scale);
    }
    Ok((y5, err))
}

const MAX_ADAPTIVE_STEPS: usize = 10_000_000;

/// Integrates from `t0` to `t1` with the adaptive scheme; `h` carries the
/// step-size guess across calls.
fn advance_adaptive(
    model: &Model,
    t0: f64,
    t1: f64,
    y: &mut Vec5,
    h: &mut f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<()> {
    let mut t = t0;
    let mut steps = 0usize;
    while t < t1 {
        let step = h.min(t1 - t);
        let (y_new, err) = dp_step(model, t, y, step, rel_tol, abs_tol)?;
        steps += 1;
        if err <= 1.0 {
            t = if step == t1 - t { t1 } else { t + step };
            *y = y_new;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        // keep a clipped final step from shrinking the carried guess
        if !(err <= 1.0 && step < *h) {
            *h = step * factor;
        }
        if *h < 1e-14 * t.abs().max(1.0) || steps > MAX_ADAPTIVE_STEPS {
            return Err(Error::StepRejected { t, h: *h });
        }
    }
    Ok(())
}

/// Default RK4 step: `min(2π/Ω, 1/γ)/200`, ignoring vanishing scales.
pub fn default_step(model: &Model, span: f64) -> Result<f64> {
    let (osc, decay) = model.time_scales()?;
    let mut scale = f64::INFINITY;
    if osc > 0.0 {
        scale = scale.min(TAU / osc);
    }
    if decay > 0.0 {
        scale = scale.min(1.0 / decay);
    }
    if !scale.is_finite() {
        scale = span.max(f64::MIN_POSITIVE);
    }
    Ok(scale / DEFAULT_STEPS_PER_SCALE)
}

/// Integrates the moment equations of `model` from `initial` at `t_grid[0]`
/// and records the state and diagnostics at every grid time.
pub fn integrate(
    model: &Model,
    initial: &GaussianState,
    t_grid: &[f64],
    opts: &IntegratorOptions,
    c: &PhysConstants,
) -> Result<Trajectory> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid must be finite and strictly increasing".into()));
    }
    initial.purity_nu(c)?;

    let span = t_grid[t_grid.len() - 1] - t_grid[0];
    let rk4_dt = match opts.method {
        Method::Rk4 { dt: Some(dt) } if dt > 0.0 => dt,
        Method::Rk4 { dt: Some(dt) } => {
            return Err(Error::InvalidParameter(format!("RK4 step must be positive, got {dt}")));
        }
        Method::Rk4 { dt: None } => default_step(model, span)?,
        Method::Rk45 { .. } => 0.0,
    };
    let mut adaptive_h = default_step(model, span)?;

    let bound = c.min_sigma();
    let mut y = to_vec(initial);
    let mut traj = Trajectory {
        times: Vec::with_capacity(t_grid.len()),
        states: Vec::with_capacity(t_grid.len()),
        diagnostics: Vec::with_capacity(t_grid.len()),
    };

    for (i, &t) in t_grid.iter().enumerate() {
        if i > 0 {
            let t0 = t_grid[i - 1];
            match opts.method {
                Method::Rk4 { .. } => {
                    let n = ((t - t0) / rk4_dt).ceil().max(1.0) as usize;
                    let h = (t - t0) / n as f64;
                    for j in 0..n {
                        y = rk4_step(model, t0 + j as f64 * h, &y, h)?;
                    }
                }
                Method::Rk45 { rel_tol, abs_tol } => {
                    advance_adaptive(model, t0, t, &mut y, &mut adaptive_h, rel_tol, abs_tol)?;
                }
            }
        }
        let state = from_vec(&y);
        let sigma = state.sigma_det();
        if opts.check_admissibility && !(sigma >= bound * (1.0 - opts.admissibility_tol)) {
            return Err(Error::AdmissibilityLost { t, sigma, bound });
        }
        let diag = if opts.check_admissibility {
            Diagnostics::evaluate(model, &state, t, c)?
        } else {
            Diagnostics::evaluate(model, &state, t, c).or_else(|_| unchecked_diagnostics(model, &state, t, c))?
        };
        traj.times.push(t);
        traj.states.push(state);
        traj.diagnostics.push(diag);
    }
    Ok(traj)
}

/// Diagnostics for a state below the uncertainty bound: `ν` is reported as
/// computed, without clamping or rejection.
fn unchecked_diagnostics(model: &Model, s: &GaussianState, t: f64, c: &PhysConstants) -> Result<Diagnostics> {
    let sigma = s.sigma_det();
    let nu = 2.0 / c.hbar * sigma.max(0.0).sqrt();
    Ok(Diagnostics {
        sigma_det: sigma,
        nu,
        linear_entropy: 1.0 - 1.0 / nu,
        von_neumann_entropy: f64::NAN,
        purity_residual: purity_residual(model, s, t, c)?,
        entropy_rate: entropy_rate(model, s, t, c).unwrap_or(f64::NAN),
        fluctuation_energy: fluctuation_energy(s, model),
        total_energy: total_energy(s, model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{KgCoefficients, LindbladParams};

    const C: PhysConstants = PhysConstants { hbar: 1.0, k_b: 1.0 };

    #[test]
    fn closed_oscillator_returns_after_one_period() {
        let model = Model::Kg(KgCoefficients::constant(1.0, 1.0, 1.0, 0.0, 0.0, 0.0).unwrap());
        let period = TAU;
        let start = GaussianState::new(1.0, 0.5, 0.7, 0.6, 0.1);
        let traj = integrate(&model, &start, &[0.0, period], &IntegratorOptions::rk4(period / 1000.0), &C).unwrap();
        let (_, end, _) = traj.last().unwrap();
        assert!((end.mean_q - start.mean_q).abs() < 1e-8);
        assert!((end.mean_p - start.mean_p).abs() < 1e-8);
    }

    #[test]
    fn rk45_agrees_with_rk4() {
        let model = Model::Lindblad(LindbladParams::new(1.0, 1.3, 0.2, 0.1, 0.3, 0.2, 0.05).unwrap());
        let s0 = GaussianState::new(0.5, -0.3, 1.0, 0.8, 0.1);
        let grid = uniform_grid(5.0, 11);
        let a = integrate(&model, &s0, &grid, &IntegratorOptions::rk4(1e-3), &C).unwrap();
        let b = integrate(&model, &s0, &grid, &IntegratorOptions::rk45(1e-10), &C).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.var_qq - y.var_qq).abs() < 1e-8);
            assert!((x.mean_p - y.mean_p).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let model = Model::Lindblad(LindbladParams::new(1.0, 1.0, 0.1, 0.0, 0.1, 0.1, 0.0).unwrap());
        let s0 = GaussianState::centered(1.0, 1.0, 0.0);
        let o = IntegratorOptions::default();
        assert!(integrate(&model, &s0, &[], &o, &C).is_err());
        assert!(integrate(&model, &s0, &[0.0, 1.0, 1.0], &o, &C).is_err());
        let bad = GaussianState::centered(0.1, 0.1, 0.0);
        assert!(matches!(integrate(&model, &bad, &[0.0, 1.0], &o, &C), Err(Error::UncertaintyViolation { .. })));
    }

    #[test]
    fn admissibility_loss_is_reported_for_invalid_models() {
        // λ > 0 without diffusion violates complete positivity; a pure state
        // immediately drops below ħ²/4.
        let model = Model::Lindblad(LindbladParams::new(1.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0).unwrap());
        let s0 = GaussianState::centered(0.5, 0.5, 0.0);
        let r = integrate(&model, &s0, &uniform_grid(1.0, 5), &IntegratorOptions::default(), &C);
        assert!(matches!(r, Err(Error::AdmissibilityLost { .. })));

        let lax = IntegratorOptions { check_admissibility: false, ..IntegratorOptions::default() };
        let traj = integrate(&model, &s0, &uniform_grid(1.0, 5), &lax, &C).unwrap();
        assert!(traj.diagnostics[4].nu < 1.0);
    }

    #[test]
    fn grid_helper() {
        assert_eq!(uniform_grid(2.0, 3), vec![0.0, 1.0, 2.0]);
        assert_eq!(uniform_grid(2.0, 1), vec![0.0]);
    }
}
