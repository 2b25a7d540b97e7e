use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::models::LindbladParams;
use crate::state::GaussianState;

/// Drift matrix of the Lindblad second moments `(σ_qq, σ_pp, σ_pq)`.
fn drift(p: &LindbladParams) -> Matrix3<f64> {
    let mw2 = p.m * p.omega * p.omega;
    Matrix3::new(
        -2.0 * (p.lambda - p.mu),
        0.0,
        2.0 / p.m,
        0.0,
        -2.0 * (p.lambda + p.mu),
        -2.0 * mw2,
        -mw2,
        1.0 / p.m,
        -2.0 * p.lambda,
    )
}

/// Routh–Hurwitz test on `s³ + a₂s² + a₁s + a₀`, the characteristic
/// polynomial of `a`.
fn is_hurwitz(a: &Matrix3<f64>) -> bool {
    let a2 = -a.trace();
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let a1 = minors;
    let a0 = -a.determinant();
    a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0
}

/// Stationary moments of the Lindblad dynamics (zero means).
pub fn lindblad_steady_state(p: &LindbladParams) -> Result<GaussianState> {
    let a = drift(p);
    if !(p.lambda > 0.0) || !is_hurwitz(&a) {
        return Err(Error::NoSteadyState);
    }
    let b = Vector3::new(-2.0 * p.d_qq, -2.0 * p.d_pp, -2.0 * p.d_pq);
    let x = a.lu().solve(&b).ok_or(Error::NoSteadyState)?;
    Ok(GaussianState::centered(x[0], x[1], x[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::moments::lindblad_moment_derivatives;
    use crate::models::{weidlich_haake_rates, weidlich_haake_to_lindblad};
    use crate::state::PhysConstants;

    const C: PhysConstants = PhysConstants { hbar: 1.0, k_b: 1.0 };

    #[test]
    fn purity_preserving_model_relaxes_to_correlated_coherent_state() {
        let p = LindbladParams::purity_preserving(1.0, 1.0, 0.1, 0.6, &C).unwrap();
        let s = lindblad_steady_state(&p).unwrap();
        assert!((s.var_qq - 0.625).abs() < 1e-12);
        assert!((s.var_pp - 0.625).abs() < 1e-12);
        assert!((s.cov_pq + 0.375).abs() < 1e-12);
    }

    #[test]
    fn weidlich_haake_ground_state() {
        let (down, up) = weidlich_haake_rates(0.2, 1.5, 0.0, &C);
        let p = weidlich_haake_to_lindblad(down, up, 1.5, 2.0, &C).unwrap();
        let s = lindblad_steady_state(&p).unwrap();
        assert!((s.var_qq - 1.0 / 6.0).abs() < 1e-12);
        assert!((s.var_pp - 1.5).abs() < 1e-12);
        assert!(s.cov_pq.abs() < 1e-12);
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        let p = LindbladParams::new(1.3, 0.9, 0.15, 0.4, 0.2, 0.3, -0.05).unwrap();
        let s = lindblad_steady_state(&p).unwrap();
        let d = lindblad_moment_derivatives(&s, &p);
        assert!(d.to_array().iter().all(|v| v.abs() < 1e-14));
        assert!(s.sigma_det() >= 0.25);
    }

    #[test]
    fn unstable_drift_has_no_steady_state() {
        let undamped = LindbladParams::new(1.0, 1.0, 0.0, 0.0, 0.1, 0.1, 0.0).unwrap();
        assert_eq!(lindblad_steady_state(&undamped), Err(Error::NoSteadyState));
        // μ² − ω² > λ²: one direction grows
        let runaway = LindbladParams::new(1.0, 1.0, 0.1, 1.5, 0.1, 0.1, 0.0).unwrap();
        assert_eq!(lindblad_steady_state(&runaway), Err(Error::NoSteadyState));
    }
}
