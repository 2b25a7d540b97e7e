use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The covariance determinant sits below the Robertson–Schrödinger bound
    /// by more than the admissibility tolerance.
    #[error("uncertainty relation violated: sigma = {sigma:e} < hbar^2/4 = {bound:e}")]
    UncertaintyViolation { sigma: f64, bound: f64 },

    #[error("degenerate Gaussian state: {0}")]
    DegenerateState(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("equilibrium variances <q^2> and <p^2> are required for this model")]
    MissingBathData,

    #[error("overdamped regime (omega = {omega}, |mu| = {mu}): no diffusion coefficients keep a state pure")]
    OverdampedRegime { omega: f64, mu: f64 },

    #[error("coefficient {name} is undefined at t = {t}")]
    CoefficientUndefined { name: &'static str, t: f64 },

    #[error("analytic propagator requires time-independent coefficients")]
    ConstantCoefficientsRequired,

    #[error("gamma_p = 0: the model has no asymptotic state")]
    UndampedModel,

    #[error("drift matrix is not Hurwitz: no steady state exists")]
    NoSteadyState,

    #[error("adaptive step rejected at t = {t}: step size {h:e} underflowed")]
    StepRejected { t: f64, h: f64 },

    #[error("admissibility lost at t = {t}: sigma = {sigma:e} < hbar^2/4 = {bound:e}")]
    AdmissibilityLost { t: f64, sigma: f64, bound: f64 },

    #[error("state is not pure (nu = {nu})")]
    NotPure { nu: f64 },

    #[error("finite-difference audit needs at least 3 samples, got {0}")]
    InsufficientSamples(usize),

    #[error("finite-difference audit needs uniformly spaced samples")]
    NonUniformSamples,
}
