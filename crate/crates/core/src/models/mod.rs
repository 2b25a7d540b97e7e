//! Parameter containers and coefficient constructors for the master-equation
//! variants.

pub mod kg;
pub mod lindblad;
pub mod source;
pub mod variant;

pub use kg::{
    agarwal_coefficients, drude_coefficients, drude_gammas, ohmic_coefficients, thermal_coth, thermal_diffusion,
    weak_coupling_coefficients, BathSpec, KgCoefficients, KgSnapshot,
};
pub use lindblad::{
    lindblad_constraint_check, lindblad_single_operator, purity_preserving_diffusion, weidlich_haake_rates,
    weidlich_haake_to_lindblad, ConstraintCheck, DiffusionCoefficients, LindbladParams, SingleOperator,
};
pub use source::CoefficientSource;
pub use variant::{
    Agarwal, DrudeDamping, ModelVariant, OhmicDamping, ThermalKg, VariantKind, WeakCoupling, WeidlichHaake,
};

use crate::error::Result;

/// The two families of moment dynamics: Karrlein–Grabert form (possibly
/// time-dependent) and Lindblad form.
#[derive(Debug, Clone)]
pub enum Model {
    Kg(KgCoefficients),
    Lindblad(LindbladParams),
}

impl Model {
    pub fn is_constant(&self) -> bool {
        match self {
            Self::Kg(k) => k.is_constant(),
            Self::Lindblad(_) => true,
        }
    }

    /// Damping rate (`γ_p` at `t = 0`, or `λ`).
    pub fn rate_scale(&self) -> Result<f64> {
        Ok(match self {
            Self::Kg(k) => k.gamma_p.at("gamma_p", 0.0)?.abs(),
            Self::Lindblad(p) => p.lambda,
        })
    }

    /// Oscillation frequency and fastest decay rate of the second-moment
    /// equations at `t = 0`; used to pick default step sizes.
    pub(crate) fn time_scales(&self) -> Result<(f64, f64)> {
        let (damping, disc) = match self {
            Self::Kg(k) => {
                let s = k.at(0.0)?;
                (s.gamma_p, s.gamma_p * s.gamma_p - 4.0 * s.gamma_q)
            }
            Self::Lindblad(p) => (2.0 * p.lambda, -4.0 * p.omega_sq_shifted()),
        };
        let split = disc.abs().sqrt();
        if disc < 0.0 {
            Ok((split, damping.abs()))
        } else {
            Ok((0.0, damping.abs() + split))
        }
    }
}
