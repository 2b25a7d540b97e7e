//! Moment equations, their integration, the closed-form Karrlein–Grabert
//! propagator, steady states and energies.

pub mod energy;
pub mod integrate;
pub mod moments;
pub mod propagator;
pub mod steady;

pub use energy::{fluctuation_energy, total_energy};
pub use integrate::{default_step, integrate, uniform_grid, Diagnostics, IntegratorOptions, Method, Trajectory};
pub use moments::{kg_moment_derivatives, lindblad_moment_derivatives, moment_derivatives, MomentDerivative};
pub use propagator::{
    kg_analytic_propagator, kg_asymptotic_variances, kg_b_matrix, kg_transfer_matrix, KgPropagator, PropagatorBranch,
};
pub use steady::lindblad_steady_state;
