//! Closed-form propagator of the Karrlein–Grabert second moments.
//!
//! In the scaled basis `X = (M√γ_q σ_qq, σ_pp/(M√γ_q), σ_pq)` the second
//! moments obey `X(t) = T(t)(X(0) − X(∞)) + X(∞)` with
//! `T = −2 e^{−γ_p t} / Ω² · (b_ij)` and `Ω² = 4γ_q − γ_p²`.
//!
//! The `b_ij` contain `O(1)` terms that cancel to `O(Ω²)`, so the entries are
//! evaluated through `C = cos Ωt`, `S = sin(Ωt)/Ω` and
//! `K = (1 − cos Ωt)/Ω²`, which stay finite and accurate through the critical
//! point `Ω² = 0` and continue analytically into the overdamped regime.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::models::{KgCoefficients, KgSnapshot};
use crate::state::GaussianState;

/// Below this value of `|Ω²| t²` the trigonometric functions are replaced by
/// their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropagatorBranch {
    Oscillatory,
    Overdamped,
    Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KgPropagator {
    pub t: f64,
    pub transfer: Matrix3<f64>,
    /// Scaled asymptotic moments `X(∞)`.
    pub x_inf: Vector3<f64>,
    /// `M√γ_q`, the factor between `(σ_qq, σ_pp)` and the first two entries
    /// of `X`.
    pub scaling: f64,
    pub branch: PropagatorBranch,
}

/// `(C, S, K, branch)` for the given `Ω²` and `t`.
fn branch_functions(omega_sq: f64, t: f64) -> (f64, f64, f64, PropagatorBranch) {
    let z = omega_sq * t * t;
    if z.abs() < SERIES_THRESHOLD {
        let c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        let s = t * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        let k = t * t * (0.5 - z / 24.0 + z * z / 720.0 - z * z * z / 40320.0);
        (c, s, k, PropagatorBranch::Series)
    } else if omega_sq > 0.0 {
        let w = omega_sq.sqrt();
        let half = (0.5 * w * t).sin();
        ((w * t).cos(), (w * t).sin() / w, 2.0 * half * half / omega_sq, PropagatorBranch::Oscillatory)
    } else {
        let w = (-omega_sq).sqrt();
        let half = (0.5 * w * t).sinh();
        ((w * t).cosh(), (w * t).sinh() / w, 2.0 * half * half / (-omega_sq), PropagatorBranch::Overdamped)
    }
}

/// Homogeneous transfer matrix `T(t)` in the scaled basis.
pub fn kg_transfer_matrix(gamma_q: f64, gamma_p: f64, t: f64) -> (Matrix3<f64>, PropagatorBranch) {
    let omega_sq = 4.0 * gamma_q - gamma_p * gamma_p;
    let (c, s, k, branch) = branch_functions(omega_sq, t);
    let g = gamma_q.sqrt();
    let e = (-gamma_p * t).exp();
    let gp = gamma_p;
    let m = Matrix3::new(
        2.0 * gamma_q * k + c + gp * s,
        2.0 * gamma_q * k,
        2.0 * g * (gp * k + s),
        2.0 * gamma_q * k,
        2.0 * gamma_q * k + c - gp * s,
        2.0 * g * (gp * k - s),
        -g * (gp * k + s),
        -g * (gp * k - s),
        1.0 - 4.0 * gamma_q * k,
    );
    (m * e, branch)
}

/// The oscillating functions `b_ij(t)` exactly as they appear in the
/// closed-form solution, for `Ω² > 0`. `T = −2e^{−γ_p t}/Ω² · b`.
pub fn kg_b_matrix(gamma_q: f64, gamma_p: f64, t: f64) -> Matrix3<f64> {
    let omega = (4.0 * gamma_q - gamma_p * gamma_p).sqrt();
    let (cs, sn) = ((omega * t).cos(), (omega * t).sin());
    let g = gamma_q.sqrt();
    let gp = gamma_p;
    Matrix3::new(
        (gp * gp / 2.0 - gamma_q) * cs - gp * omega / 2.0 * sn - gamma_q,
        gamma_q * (cs - 1.0),
        g * (gp * cs - omega * sn - gp),
        gamma_q * (cs - 1.0),
        (gp * gp / 2.0 - gamma_q) * cs + gp * omega / 2.0 * sn - gamma_q,
        g * (gp * cs + omega * sn - gp),
        -g * (gp / 2.0 * cs - omega / 2.0 * sn - gp / 2.0),
        -g * (gp / 2.0 * cs + omega / 2.0 * sn - gp / 2.0),
        -2.0 * gamma_q * cs + gp * gp / 2.0,
    )
}

/// Asymptotic second moments `σ_qq(∞) = (D_p + γ_pD_q)/(γ_pγ_q)`,
/// `σ_pp(∞) = M²D_p/γ_p`, `σ_pq(∞) = 0`.
pub fn kg_asymptotic_variances(k: &KgSnapshot) -> Result<(f64, f64, f64)> {
    if !(k.gamma_p > 0.0) {
        return Err(Error::UndampedModel);
    }
    if !(k.gamma_q > 0.0) {
        return Err(Error::NoSteadyState);
    }
    Ok(((k.d_p + k.gamma_p * k.d_q) / (k.gamma_p * k.gamma_q), k.mass * k.mass * k.d_p / k.gamma_p, 0.0))
}

pub fn kg_analytic_propagator(coeffs: &KgCoefficients, t: f64) -> Result<KgPropagator> {
    let k = coeffs.constant_snapshot()?;
    let (qq, pp, pq) = kg_asymptotic_variances(&k)?;
    let scaling = k.mass * k.gamma_q.sqrt();
    let (transfer, branch) = kg_transfer_matrix(k.gamma_q, k.gamma_p, t);
    Ok(KgPropagator { t, transfer, x_inf: Vector3::new(scaling * qq, pp / scaling, pq), scaling, branch })
}

impl KgPropagator {
    pub fn to_scaled(&self, s: &GaussianState) -> Vector3<f64> {
        Vector3::new(self.scaling * s.var_qq, s.var_pp / self.scaling, s.cov_pq)
    }

    /// Second moments at time `t` from `initial`. Means are carried over
    /// unchanged; use the integrator for those.
    pub fn apply(&self, initial: &GaussianState) -> GaussianState {
        let x = self.transfer * (self.to_scaled(initial) - self.x_inf) + self.x_inf;
        GaussianState { var_qq: x[0] / self.scaling, var_pp: x[1] * self.scaling, cov_pq: x[2], ..*initial }
    }

    pub fn asymptotic_state(&self) -> GaussianState {
        GaussianState::centered(self.x_inf[0] / self.scaling, self.x_inf[1] * self.scaling, self.x_inf[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_zero() {
        for (gq, gp) in [(1.0, 0.2), (1.0, 3.0), (1.0, 2.0), (0.3, 0.0)] {
            let (t, branch) = kg_transfer_matrix(gq, gp, 0.0);
            assert_eq!(t, Matrix3::identity());
            assert_eq!(branch, PropagatorBranch::Series);
        }
        // b_11(0) = γ_p²/2 − 2γ_q = −Ω²/2
        let b = kg_b_matrix(1.0, 0.2, 0.0);
        assert!((b[(0, 0)] - (0.02 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn conditioned_form_matches_printed_b_matrix() {
        for &(gq, gp) in &[(1.0, 0.2), (2.5, 1.1), (0.4, 0.05)] {
            let omega_sq = 4.0 * gq - gp * gp;
            for &t in &[0.3, 1.0, 4.7, 12.0] {
                let (tm, branch) = kg_transfer_matrix(gq, gp, t);
                assert_eq!(branch, PropagatorBranch::Oscillatory);
                let printed = kg_b_matrix(gq, gp, t) * (-2.0 * (-gp * t).exp() / omega_sq);
                assert!((tm - printed).amax() < 1e-13, "gq={gq} gp={gp} t={t}");
            }
        }
    }

    #[test]
    fn branches_are_continuous_across_critical_damping() {
        let t = 1.3;
        let crit = 2.0;
        let (below, b1) = kg_transfer_matrix(1.0, crit - 1e-9, t);
        let (at, b2) = kg_transfer_matrix(1.0, crit, t);
        let (above, b3) = kg_transfer_matrix(1.0, crit + 1e-9, t);
        assert_eq!((b1, b2, b3), (PropagatorBranch::Series, PropagatorBranch::Series, PropagatorBranch::Series));
        assert!((below - at).amax() < 1e-8 && (above - at).amax() < 1e-8);

        let (osc, _) = kg_transfer_matrix(1.0, crit - 1e-3, t);
        let (hyp, _) = kg_transfer_matrix(1.0, crit + 1e-3, t);
        assert!((osc - at).amax() < 1e-2 && (hyp - at).amax() < 1e-2);
    }

    #[test]
    fn asymptotics() {
        let k = KgSnapshot { mass: 1.0, omega0: 1.0, gamma_q: 1.0, gamma_p: 0.2, d_q: 0.05, d_p: 0.1 };
        let (qq, pp, pq) = kg_asymptotic_variances(&k).unwrap();
        assert!((qq - 0.55).abs() < 1e-15 && (pp - 0.5).abs() < 1e-15);
        assert_eq!(pq, 0.0);
        let undamped = KgSnapshot { gamma_p: 0.0, ..k };
        assert_eq!(kg_asymptotic_variances(&undamped), Err(Error::UndampedModel));
    }

    #[test]
    fn refuses_time_dependent_coefficients() {
        use crate::models::CoefficientSource;
        let k = KgCoefficients::time_dependent(
            1.0,
            1.0,
            1.0.into(),
            CoefficientSource::function(|t| 0.1 + t),
            0.0.into(),
            0.1.into(),
        )
        .unwrap();
        assert_eq!(kg_analytic_propagator(&k, 1.0), Err(Error::ConstantCoefficientsRequired));
    }

    #[test]
    fn scaled_envelope_is_periodic() {
        let (gq, gp) = (1.0f64, 0.2f64);
        let w = (4.0 * gq - gp * gp).sqrt();
        let period = 2.0 * std::f64::consts::PI / w;
        let (t1, _) = kg_transfer_matrix(gq, gp, 0.7);
        let (t2, _) = kg_transfer_matrix(gq, gp, 0.7 + period);
        let a = t1 * (gp * 0.7f64).exp();
        let b = t2 * (gp * (0.7 + period)).exp();
        assert!((a - b).amax() < 1e-12);
    }
}
