//! Karrlein–Grabert-form master equations
//!
//! ```text
//! ρ̇ = −i/(2Mħ)[p²,ρ] − iM/(2ħ) γ_q [q²,ρ] − i/(2ħ) γ_p [q,{p,ρ}]
//!     + M/ħ² D_q [p,[q,ρ]] − M²/ħ² D_p [q,[q,ρ]]
//! ```
//!
//! and the coefficient sets of its special cases (thermal initial condition,
//! Ohmic, Drude, weak coupling, Agarwal).

use crate::error::{Error, Result};
use crate::models::source::CoefficientSource;
use crate::state::PhysConstants;

/// Coefficients of the Karrlein–Grabert master equation. `omega0` is the bare
/// oscillator frequency, used only for energies; its effect on the dynamics
/// is carried by `gamma_q`.
#[derive(Debug, Clone)]
pub struct KgCoefficients {
    pub mass: f64,
    pub omega0: f64,
    pub gamma_q: CoefficientSource,
    pub gamma_p: CoefficientSource,
    pub d_q: CoefficientSource,
    pub d_p: CoefficientSource,
}

/// Coefficient values at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgSnapshot {
    pub mass: f64,
    pub omega0: f64,
    pub gamma_q: f64,
    pub gamma_p: f64,
    pub d_q: f64,
    pub d_p: f64,
}

/// Equilibrium data of the bath-coupled oscillator. The variances are
/// optional because only some models need them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub temperature: f64,
    pub q2_eq: Option<f64>,
    pub p2_eq: Option<f64>,
}

impl BathSpec {
    pub fn new(temperature: f64, q2_eq: f64, p2_eq: f64) -> Result<Self> {
        if !(temperature >= 0.0) {
            return Err(Error::InvalidParameter(format!("temperature must be >= 0, got {temperature}")));
        }
        if !(q2_eq > 0.0 && p2_eq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "equilibrium variances must be positive, got <q^2> = {q2_eq}, <p^2> = {p2_eq}"
            )));
        }
        Ok(Self { temperature, q2_eq: Some(q2_eq), p2_eq: Some(p2_eq) })
    }

    /// `(<q²>, <p²>)`, or `MissingBathData`.
    pub fn variances(&self) -> Result<(f64, f64)> {
        match (self.q2_eq, self.p2_eq) {
            (Some(q2), Some(p2)) if q2 > 0.0 && p2 > 0.0 => Ok((q2, p2)),
            _ => Err(Error::MissingBathData),
        }
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if mass > 0.0 && mass.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")))
    }
}

impl KgCoefficients {
    /// Time-independent coefficients. Requires `M > 0`, `γ_q > 0`, `γ_p ≥ 0`.
    pub fn constant(mass: f64, omega0: f64, gamma_q: f64, gamma_p: f64, d_q: f64, d_p: f64) -> Result<Self> {
        check_mass(mass)?;
        if !(gamma_q > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma_q must be positive, got {gamma_q}")));
        }
        if !(gamma_p >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma_p must be non-negative, got {gamma_p}")));
        }
        if !(d_q.is_finite() && d_p.is_finite() && omega0.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(Self { mass, omega0, gamma_q: gamma_q.into(), gamma_p: gamma_p.into(), d_q: d_q.into(), d_p: d_p.into() })
    }

    /// Coefficients that may vary in time (exact master equations for a given
    /// initial preparation). Only `M > 0` is checked up front.
    pub fn time_dependent(
        mass: f64,
        omega0: f64,
        gamma_q: CoefficientSource,
        gamma_p: CoefficientSource,
        d_q: CoefficientSource,
        d_p: CoefficientSource,
    ) -> Result<Self> {
        check_mass(mass)?;
        Ok(Self { mass, omega0, gamma_q, gamma_p, d_q, d_p })
    }

    /// Thermal initial condition: `D_q(t) = γ_q(t)<q²> − <p²>/M²`,
    /// `D_p(t) = γ_p(t)<p²>/M²`.
    pub fn thermal(
        mass: f64,
        omega0: f64,
        gamma_q: CoefficientSource,
        gamma_p: CoefficientSource,
        bath: &BathSpec,
    ) -> Result<Self> {
        check_mass(mass)?;
        let (q2, p2) = bath.variances()?;
        if let (Some(gq), Some(gp)) = (gamma_q.constant(), gamma_p.constant()) {
            let (d_q, d_p) = thermal_diffusion(gq, gp, bath, mass)?;
            return Self::constant(mass, omega0, gq, gp, d_q, d_p);
        }
        let m2 = mass * mass;
        let gq = gamma_q.clone();
        let gp = gamma_p.clone();
        let d_q = CoefficientSource::function(move |t| gq.at("gamma_q", t).unwrap_or(f64::NAN) * q2 - p2 / m2);
        let d_p = CoefficientSource::function(move |t| gp.at("gamma_p", t).unwrap_or(f64::NAN) * p2 / m2);
        Self::time_dependent(mass, omega0, gamma_q, gamma_p, d_q, d_p)
    }

    pub fn is_constant(&self) -> bool {
        self.gamma_q.is_constant() && self.gamma_p.is_constant() && self.d_q.is_constant() && self.d_p.is_constant()
    }

    pub fn at(&self, t: f64) -> Result<KgSnapshot> {
        Ok(KgSnapshot {
            mass: self.mass,
            omega0: self.omega0,
            gamma_q: self.gamma_q.at("gamma_q", t)?,
            gamma_p: self.gamma_p.at("gamma_p", t)?,
            d_q: self.d_q.at("D_q", t)?,
            d_p: self.d_p.at("D_p", t)?,
        })
    }

    /// The coefficient values, if none of them depends on time.
    pub fn constant_snapshot(&self) -> Result<KgSnapshot> {
        if !self.is_constant() {
            return Err(Error::ConstantCoefficientsRequired);
        }
        self.at(0.0)
    }
}

/// Diffusion coefficients for the thermal initial condition (also the
/// time-independent approximate Liouvillians):
/// `D_q = γ_q<q²> − <p²>/M²`, `D_p = γ_p<p²>/M²`.
pub fn thermal_diffusion(gamma_q: f64, gamma_p: f64, bath: &BathSpec, mass: f64) -> Result<(f64, f64)> {
    let (q2, p2) = bath.variances()?;
    let m2 = mass * mass;
    Ok((gamma_q * q2 - p2 / m2, gamma_p * p2 / m2))
}

/// Drude damping: `γ_q = α² + η²`, `γ_p = 2α`.
pub fn drude_gammas(alpha: f64, eta: f64) -> (f64, f64) {
    (alpha * alpha + eta * eta, 2.0 * alpha)
}

/// `coth(ħω₀ / 2k_BT)`, equal to 1 at `T = 0`.
pub fn thermal_coth(omega0: f64, temperature: f64, c: &PhysConstants) -> f64 {
    if temperature <= 0.0 {
        return 1.0;
    }
    let x = c.hbar * omega0 / (2.0 * c.k_b * temperature);
    x.tanh().recip()
}

/// Strictly Ohmic damping: `γ_p = γ`, `γ_q = ω₀²` and thermal diffusion built
/// from a user-regularized `<p²>` (the unregularized one diverges).
pub fn ohmic_coefficients(gamma: f64, omega0: f64, bath: &BathSpec, mass: f64) -> Result<KgCoefficients> {
    let gq = omega0 * omega0;
    let (d_q, d_p) = thermal_diffusion(gq, gamma, bath, mass)?;
    KgCoefficients::constant(mass, omega0, gq, gamma, d_q, d_p)
}

pub fn drude_coefficients(alpha: f64, eta: f64, omega0: f64, bath: &BathSpec, mass: f64) -> Result<KgCoefficients> {
    let (gq, gp) = drude_gammas(alpha, eta);
    let (d_q, d_p) = thermal_diffusion(gq, gp, bath, mass)?;
    KgCoefficients::constant(mass, omega0, gq, gp, d_q, d_p)
}

/// Weak-damping master equation with frequency shift `γ_s`, classical damping
/// `γ_c` and temperature-dependent `K_s`, `K_c`, rewritten in
/// Karrlein–Grabert form: `γ_q = ω₀² + ω₀γ_s`, `γ_p = γ_c`,
/// `D_q = −ħK_s/(M²ω₀)`, `D_p = ħK_c/M²`.
pub fn weak_coupling_coefficients(
    gamma_s: f64,
    gamma_c: f64,
    k_s: f64,
    k_c: f64,
    omega0: f64,
    mass: f64,
    c: &PhysConstants,
) -> Result<KgCoefficients> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!("omega0 must be positive, got {omega0}")));
    }
    check_mass(mass)?;
    let m2 = mass * mass;
    KgCoefficients::constant(
        mass,
        omega0,
        omega0 * omega0 + omega0 * gamma_s,
        gamma_c,
        -c.hbar * k_s / (m2 * omega0),
        c.hbar * k_c / m2,
    )
}

/// Agarwal's equation in Karrlein–Grabert form: `γ_q = ω₀²`, `γ_p = 2κ`,
/// `D_q = 0`, `D_p = ħω₀κ coth(ħω₀/2k_BT)/M`.
///
/// The damping term `−iκ/ħ [q,{p,ρ}]` corresponds to `γ_p/2 = κ`.
pub fn agarwal_coefficients(
    kappa: f64,
    omega0: f64,
    temperature: f64,
    mass: f64,
    c: &PhysConstants,
) -> Result<KgCoefficients> {
    if !(kappa >= 0.0 && omega0 > 0.0 && temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Agarwal model needs kappa >= 0, omega0 > 0, T >= 0 (got {kappa}, {omega0}, {temperature})"
        )));
    }
    let coth = thermal_coth(omega0, temperature, c);
    KgCoefficients::constant(mass, omega0, omega0 * omega0, 2.0 * kappa, 0.0, c.hbar * omega0 * kappa * coth / mass)
}
