use crate::error::Result;
use crate::models::{KgSnapshot, LindbladParams, Model};
use crate::state::GaussianState;

/// Time derivatives of the five moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentDerivative {
    pub d_mean_q: f64,
    pub d_mean_p: f64,
    pub d_var_qq: f64,
    pub d_var_pp: f64,
    pub d_cov_pq: f64,
}

impl MomentDerivative {
    /// `dσ/dt` of the covariance determinant along this derivative.
    pub fn sigma_rate(&self, s: &GaussianState) -> f64 {
        self.d_var_qq * s.var_pp + s.var_qq * self.d_var_pp - 2.0 * s.cov_pq * self.d_cov_pq
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.d_mean_q, self.d_mean_p, self.d_var_qq, self.d_var_pp, self.d_cov_pq]
    }
}

/// Karrlein–Grabert moment equations:
///
/// ```text
/// d<q>/dt  = <p>/M                  d<p>/dt = −Mγ_q<q> − γ_p<p>
/// dσ_qq/dt = 2σ_pq/M
/// dσ_pp/dt = −2γ_pσ_pp − 2Mγ_qσ_pq + 2M²D_p
/// dσ_pq/dt = −Mγ_qσ_qq + σ_pp/M − γ_pσ_pq + MD_q
/// ```
pub fn kg_moment_derivatives(s: &GaussianState, k: &KgSnapshot) -> MomentDerivative {
    let m = k.mass;
    MomentDerivative {
        d_mean_q: s.mean_p / m,
        d_mean_p: -m * k.gamma_q * s.mean_q - k.gamma_p * s.mean_p,
        d_var_qq: 2.0 * s.cov_pq / m,
        d_var_pp: -2.0 * k.gamma_p * s.var_pp - 2.0 * m * k.gamma_q * s.cov_pq + 2.0 * m * m * k.d_p,
        d_cov_pq: -m * k.gamma_q * s.var_qq + s.var_pp / m - k.gamma_p * s.cov_pq + m * k.d_q,
    }
}

/// Lindblad moment equations:
///
/// ```text
/// d<q>/dt  = <p>/m − (λ−μ)<q>        d<p>/dt = −mω²<q> − (λ+μ)<p>
/// dσ_qq/dt = −2(λ−μ)σ_qq + 2σ_pq/m + 2D_qq
/// dσ_pp/dt = −2(λ+μ)σ_pp − 2mω²σ_pq + 2D_pp
/// dσ_pq/dt = −2λσ_pq + σ_pp/m − mω²σ_qq + 2D_pq
/// ```
pub fn lindblad_moment_derivatives(s: &GaussianState, p: &LindbladParams) -> MomentDerivative {
    let m = p.m;
    let mw2 = m * p.omega * p.omega;
    let lm = p.lambda - p.mu;
    let lp = p.lambda + p.mu;
    MomentDerivative {
        d_mean_q: s.mean_p / m - lm * s.mean_q,
        d_mean_p: -mw2 * s.mean_q - lp * s.mean_p,
        d_var_qq: -2.0 * lm * s.var_qq + 2.0 * s.cov_pq / m + 2.0 * p.d_qq,
        d_var_pp: -2.0 * lp * s.var_pp - 2.0 * mw2 * s.cov_pq + 2.0 * p.d_pp,
        d_cov_pq: -2.0 * p.lambda * s.cov_pq + s.var_pp / m - mw2 * s.var_qq + 2.0 * p.d_pq,
    }
}

pub fn moment_derivatives(model: &Model, s: &GaussianState, t: f64) -> Result<MomentDerivative> {
    Ok(match model {
        Model::Kg(k) => kg_moment_derivatives(s, &k.at(t)?),
        Model::Lindblad(p) => lindblad_moment_derivatives(s, p),
    })
}
