use crate::error::Result;
use crate::models::kg::{
    agarwal_coefficients, drude_coefficients, ohmic_coefficients, weak_coupling_coefficients, BathSpec, KgCoefficients,
};
use crate::models::lindblad::{weidlich_haake_rates, weidlich_haake_to_lindblad, LindbladParams};
use crate::models::source::CoefficientSource;
use crate::models::Model;
use crate::state::PhysConstants;

#[derive(Debug, Clone)]
pub struct ThermalKg {
    pub mass: f64,
    pub omega0: f64,
    pub gamma_q: CoefficientSource,
    pub gamma_p: CoefficientSource,
    pub bath: BathSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicDamping {
    pub mass: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub bath: BathSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeDamping {
    pub mass: f64,
    pub omega0: f64,
    pub alpha: f64,
    pub eta: f64,
    pub bath: BathSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakCoupling {
    pub mass: f64,
    pub omega0: f64,
    pub gamma_s: f64,
    pub gamma_c: f64,
    pub k_s: f64,
    pub k_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agarwal {
    pub mass: f64,
    pub omega0: f64,
    pub kappa: f64,
    pub temperature: f64,
}

/// Weidlich–Haake cavity-mode equation. `gamma_s` only shifts the frequency
/// of the reference Hamiltonian `ħ(ω₀ + γ_s/2)a†a`; the moment dynamics use
/// the unshifted `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeidlichHaake {
    pub mass: f64,
    pub omega0: f64,
    pub gamma_c: f64,
    pub gamma_s: f64,
    pub temperature: f64,
}

/// Every master-equation variant with its own purity condition and entropy
/// production formula.
#[derive(Debug, Clone)]
pub enum ModelVariant {
    KgGeneral(KgCoefficients),
    KgThermal(ThermalKg),
    Ohmic(OhmicDamping),
    Drude(DrudeDamping),
    WeakCoupling(WeakCoupling),
    Agarwal(Agarwal),
    WeidlichHaake(WeidlichHaake),
    Lindblad(LindbladParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantKind {
    KgGeneral,
    KgThermal,
    Ohmic,
    Drude,
    WeakCoupling,
    Agarwal,
    WeidlichHaake,
    Lindblad,
}

impl VariantKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::KgGeneral => "kg_general",
            Self::KgThermal => "kg_thermal",
            Self::Ohmic => "ohmic",
            Self::Drude => "drude",
            Self::WeakCoupling => "weak_coupling",
            Self::Agarwal => "agarwal",
            Self::WeidlichHaake => "weidlich_haake",
            Self::Lindblad => "lindblad",
        }
    }
}

impl ModelVariant {
    pub fn kind(&self) -> VariantKind {
        match self {
            Self::KgGeneral(_) => VariantKind::KgGeneral,
            Self::KgThermal(_) => VariantKind::KgThermal,
            Self::Ohmic(_) => VariantKind::Ohmic,
            Self::Drude(_) => VariantKind::Drude,
            Self::WeakCoupling(_) => VariantKind::WeakCoupling,
            Self::Agarwal(_) => VariantKind::Agarwal,
            Self::WeidlichHaake(_) => VariantKind::WeidlichHaake,
            Self::Lindblad(_) => VariantKind::Lindblad,
        }
    }

    /// The moment dynamics this variant induces.
    pub fn model(&self, c: &PhysConstants) -> Result<Model> {
        Ok(match self {
            Self::KgGeneral(k) => Model::Kg(k.clone()),
            Self::KgThermal(t) => {
                Model::Kg(KgCoefficients::thermal(t.mass, t.omega0, t.gamma_q.clone(), t.gamma_p.clone(), &t.bath)?)
            }
            Self::Ohmic(o) => Model::Kg(ohmic_coefficients(o.gamma, o.omega0, &o.bath, o.mass)?),
            Self::Drude(d) => Model::Kg(drude_coefficients(d.alpha, d.eta, d.omega0, &d.bath, d.mass)?),
            Self::WeakCoupling(w) => {
                Model::Kg(weak_coupling_coefficients(w.gamma_s, w.gamma_c, w.k_s, w.k_c, w.omega0, w.mass, c)?)
            }
            Self::Agarwal(a) => Model::Kg(agarwal_coefficients(a.kappa, a.omega0, a.temperature, a.mass, c)?),
            Self::WeidlichHaake(w) => {
                let (down, up) = weidlich_haake_rates(w.gamma_c, w.omega0, w.temperature, c);
                Model::Lindblad(weidlich_haake_to_lindblad(down, up, w.omega0, w.mass, c)?)
            }
            Self::Lindblad(p) => Model::Lindblad(*p),
        })
    }

    /// Caveats attached to a variant's parameterization.
    pub fn warnings(&self) -> Vec<&'static str> {
        match self {
            Self::Ohmic(_) => {
                vec!["strictly Ohmic <p^2> diverges logarithmically; using the supplied regularized value"]
            }
            Self::WeidlichHaake(w) if w.gamma_s != 0.0 => {
                vec!["gamma_s enters only the reference Hamiltonian; moment dynamics use the unshifted omega0"]
            }
            _ => Vec::new(),
        }
    }

    /// Largest damping rate, used to scale purity tolerances.
    pub fn rate_scale(&self, c: &PhysConstants) -> Result<f64> {
        self.model(c)?.rate_scale()
    }
}
