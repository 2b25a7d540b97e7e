use crate::models::Model;
use crate::state::GaussianState;

/// Energy stored in the fluctuations (second moments).
///
/// Karrlein–Grabert: `σ_pp/2M + Mω₀²σ_qq/2`.
/// Lindblad: `σ_pp/2m + mω²σ_qq/2 + μσ_pq`.
pub fn fluctuation_energy(s: &GaussianState, model: &Model) -> f64 {
    match model {
        Model::Kg(k) => quadratic_kg(k.mass, k.omega0, s.var_qq, s.var_pp),
        Model::Lindblad(p) => s.var_pp / (2.0 * p.m) + 0.5 * p.m * p.omega * p.omega * s.var_qq + p.mu * s.cov_pq,
    }
}

/// Mean of the system Hamiltonian: fluctuation energy plus the same quadratic
/// form evaluated on the means.
pub fn total_energy(s: &GaussianState, model: &Model) -> f64 {
    let coherent = match model {
        Model::Kg(k) => quadratic_kg(k.mass, k.omega0, s.mean_q * s.mean_q, s.mean_p * s.mean_p),
        Model::Lindblad(p) => {
            s.mean_p * s.mean_p / (2.0 * p.m)
                + 0.5 * p.m * p.omega * p.omega * s.mean_q * s.mean_q
                + p.mu * s.mean_p * s.mean_q
        }
    };
    fluctuation_energy(s, model) + coherent
}

fn quadratic_kg(mass: f64, omega0: f64, qq: f64, pp: f64) -> f64 {
    pp / (2.0 * mass) + 0.5 * mass * omega0 * omega0 * qq
}
