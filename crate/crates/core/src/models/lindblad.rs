//! Lindblad master equation for the damped oscillator with two environment
//! operators linear in `q` and `p`, its complete-positivity constraint, the
//! purity-preserving diffusion coefficients and the Weidlich–Haake special
//! case.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::kg::thermal_coth;
use crate::state::PhysConstants;

/// Relative tolerance for the complete-positivity constraint.
pub const CONSTRAINT_REL_TOL: f64 = 1e-9;

/// Parameters of the Lindblad model: `H = p²/2m + mω²q²/2 + μ(qp+pq)/2`,
/// dissipation constant `λ` and diffusion coefficients `D_pp, D_qq, D_pq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladParams {
    pub m: f64,
    pub omega: f64,
    pub lambda: f64,
    pub mu: f64,
    pub d_pp: f64,
    pub d_qq: f64,
    pub d_pq: f64,
}

impl LindbladParams {
    /// Checks `m > 0`, `ω > 0`, `λ ≥ 0`. The diffusion constraint is checked
    /// separately by [`lindblad_constraint_check`].
    pub fn new(m: f64, omega: f64, lambda: f64, mu: f64, d_pp: f64, d_qq: f64, d_pq: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {lambda}")));
        }
        if ![mu, d_pp, d_qq, d_pq].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("Lindblad coefficients must be finite".into()));
        }
        Ok(Self { m, omega, lambda, mu, d_pp, d_qq, d_pq })
    }

    /// Model with the diffusion coefficients that keep the correlated
    /// coherent state pure.
    pub fn purity_preserving(m: f64, omega: f64, lambda: f64, mu: f64, c: &PhysConstants) -> Result<Self> {
        let d = purity_preserving_diffusion(lambda, mu, omega, m, c)?;
        Self::new(m, omega, lambda, mu, d.d_pp, d.d_qq, d.d_pq)
    }

    pub fn diffusion(&self) -> DiffusionCoefficients {
        DiffusionCoefficients { d_pp: self.d_pp, d_qq: self.d_qq, d_pq: self.d_pq }
    }

    pub fn with_diffusion(self, d: DiffusionCoefficients) -> Self {
        Self { d_pp: d.d_pp, d_qq: d.d_qq, d_pq: d.d_pq, ..self }
    }

    /// `ω² − μ²`; positive in the underdamped regime.
    pub fn omega_sq_shifted(&self) -> f64 {
        self.omega * self.omega - self.mu * self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionCoefficients {
    pub d_pp: f64,
    pub d_qq: f64,
    pub d_pq: f64,
}

impl DiffusionCoefficients {
    pub fn det(&self) -> f64 {
        self.d_pp * self.d_qq - self.d_pq * self.d_pq
    }
}

/// Outcome of the complete-positivity check `D_pp D_qq − D_pq² ≥ ħ²λ²/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintCheck {
    /// `D_pp D_qq − D_pq² − ħ²λ²/4`.
    pub residual: f64,
    pub d_pp_positive: bool,
    pub d_qq_positive: bool,
    pub passed: bool,
}

pub fn lindblad_constraint_check(params: &LindbladParams, c: &PhysConstants) -> ConstraintCheck {
    let bound = 0.25 * c.hbar * c.hbar * params.lambda * params.lambda;
    let residual = params.diffusion().det() - bound;
    let d_pp_positive = params.d_pp > 0.0;
    let d_qq_positive = params.d_qq > 0.0;
    let scale = bound.max(params.d_pp.abs() * params.d_qq.abs());
    let passed = d_pp_positive && d_qq_positive && residual >= -CONSTRAINT_REL_TOL * scale;
    ConstraintCheck { residual, d_pp_positive, d_qq_positive, passed }
}

/// Diffusion coefficients for which the correlated coherent state with the
/// asymptotic variances stays pure. With `Ω = sqrt(ω² − μ²)`:
/// `D_qq = ħλ/2mΩ`, `D_pp = ħλmω²/2Ω`, `D_pq = −ħλμ/2Ω`.
pub fn purity_preserving_diffusion(
    lambda: f64,
    mu: f64,
    omega: f64,
    m: f64,
    c: &PhysConstants,
) -> Result<DiffusionCoefficients> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
    }
    if !(omega > mu.abs()) {
        return Err(Error::OverdampedRegime { omega, mu: mu.abs() });
    }
    let big_omega = (omega * omega - mu * mu).sqrt();
    let k = c.hbar * lambda / (2.0 * big_omega);
    Ok(DiffusionCoefficients { d_pp: k * m * omega * omega, d_qq: k / m, d_pq: -k * mu })
}

/// Coefficients of the single environment operator `V = c_q q + c_p p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleOperator {
    pub c_q: Complex64,
    pub c_p: Complex64,
}

impl SingleOperator {
    /// `[V, V†] = 2ħ Im(c_q* c_p)`.
    pub fn commutator(&self, c: &PhysConstants) -> f64 {
        2.0 * c.hbar * (self.c_q.conj() * self.c_p).im
    }

    /// Diffusion coefficients generated by `V` alone:
    /// `D_pp = ħ|c_q|²/2`, `D_qq = ħ|c_p|²/2`, `D_pq = −ħ Re(c_q* c_p)/2`.
    pub fn diffusion(&self, c: &PhysConstants) -> DiffusionCoefficients {
        let h = 0.5 * c.hbar;
        DiffusionCoefficients {
            d_pp: h * self.c_q.norm_sqr(),
            d_qq: h * self.c_p.norm_sqr(),
            d_pq: -h * (self.c_q.conj() * self.c_p).re,
        }
    }
}

/// Single-operator form `V = sqrt(2/ħD_qq) [(λħ/2 − iD_pq) q + iD_qq p]`,
/// valid when the constraint is saturated.
pub fn lindblad_single_operator(params: &LindbladParams, c: &PhysConstants) -> Result<SingleOperator> {
    if !(params.d_qq > 0.0) {
        return Err(Error::InvalidParameter(format!("D_qq must be positive, got {}", params.d_qq)));
    }
    let norm = (2.0 / (c.hbar * params.d_qq)).sqrt();
    Ok(SingleOperator {
        c_q: Complex64::new(0.5 * params.lambda * c.hbar, -params.d_pq) * norm,
        c_p: Complex64::new(0.0, params.d_qq) * norm,
    })
}

/// Weidlich–Haake transition rates `γ↓,↑ = (γ_c/4)[coth(ħω₀/2k_BT) ± 1]`.
pub fn weidlich_haake_rates(gamma_c: f64, omega0: f64, temperature: f64, c: &PhysConstants) -> (f64, f64) {
    let coth = thermal_coth(omega0, temperature, c);
    (0.25 * gamma_c * (coth + 1.0), 0.25 * gamma_c * (coth - 1.0))
}

/// Weidlich–Haake equation as a Lindblad model: `λ = γ↓ − γ↑`, `μ = 0`,
/// `D_pp = ħMω₀(γ↓+γ↑)/2`, `D_qq = ħ(γ↓+γ↑)/2Mω₀`, `D_pq = 0`.
pub fn weidlich_haake_to_lindblad(
    gamma_down: f64,
    gamma_up: f64,
    omega0: f64,
    mass: f64,
    c: &PhysConstants,
) -> Result<LindbladParams> {
    if !(gamma_down >= gamma_up && gamma_up >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Weidlich-Haake rates need gamma_down >= gamma_up >= 0 (got {gamma_down}, {gamma_up})"
        )));
    }
    let sum = gamma_down + gamma_up;
    LindbladParams::new(
        mass,
        omega0,
        gamma_down - gamma_up,
        0.0,
        0.5 * c.hbar * mass * omega0 * sum,
        0.5 * c.hbar * sum / (mass * omega0),
        0.0,
    )
}
