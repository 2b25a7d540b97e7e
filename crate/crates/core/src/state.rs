//! Gaussian oscillator states and the functionals defined on their moments.
//!
//! A [`GaussianState`] is fully described by its first moments `(<q>, <p>)`
//! and its second central moments `(σ_qq, σ_pp, σ_pq)`. Everything else here
//! (purity, entropies, Wigner function, position-space density matrix) is a
//! closed-form function of those five numbers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance on `σ − ħ²/4` used to call a state pure, and to clamp
/// round-off undershoot of the uncertainty bound.
pub const PURITY_REL_TOL: f64 = 1e-9;

/// Physical constants. Natural units (`ħ = k_B = 1`) by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    pub hbar: f64,
    pub k_b: f64,
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self { hbar: 1.0, k_b: 1.0 }
    }
}

impl PhysConstants {
    pub fn new(hbar: f64, k_b: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(k_b > 0.0 && k_b.is_finite()) {
            return Err(Error::InvalidParameter(format!("k_B must be positive, got {k_b}")));
        }
        Ok(Self { hbar, k_b })
    }

    /// The pure-state value of the covariance determinant, `ħ²/4`.
    pub fn min_sigma(&self) -> f64 {
        0.25 * self.hbar * self.hbar
    }
}

/// First and second moments of a Gaussian state of one oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_qq: f64,
    pub var_pp: f64,
    pub cov_pq: f64,
}

/// Where a state sits relative to the generalized uncertainty bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyClass {
    Violating,
    PureBoundary,
    Mixed,
}

impl GaussianState {
    pub fn new(mean_q: f64, mean_p: f64, var_qq: f64, var_pp: f64, cov_pq: f64) -> Self {
        Self { mean_q, mean_p, var_qq, var_pp, cov_pq }
    }

    /// Zero-mean state with the given second moments.
    pub fn centered(var_qq: f64, var_pp: f64, cov_pq: f64) -> Self {
        Self::new(0.0, 0.0, var_qq, var_pp, cov_pq)
    }

    /// Correlated coherent state with correlation coefficient `r` and
    /// position width `eta = sqrt(σ_qq)`. `r = 0` with `eta² = ħ/2mω` is a
    /// Glauber coherent state.
    pub fn correlated_coherent(r: f64, eta: f64, mean_q: f64, mean_p: f64, c: &PhysConstants) -> Result<Self> {
        if !(r.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("correlation coefficient must satisfy |r| < 1, got {r}")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        let one_minus_r2 = 1.0 - r * r;
        let hbar = c.hbar;
        Ok(Self {
            mean_q,
            mean_p,
            var_qq: eta * eta,
            var_pp: hbar * hbar / (4.0 * eta * eta * one_minus_r2),
            cov_pq: hbar * r / (2.0 * one_minus_r2.sqrt()),
        })
    }

    pub fn with_means(self, mean_q: f64, mean_p: f64) -> Self {
        Self { mean_q, mean_p, ..self }
    }

    /// Determinant of the covariance matrix, `σ = σ_qq σ_pp − σ_pq²`.
    pub fn sigma_det(&self) -> f64 {
        self.var_qq * self.var_pp - self.cov_pq * self.cov_pq
    }

    /// `ν = (2/ħ)√σ`, equal to `1/Tr ρ²`.
    pub fn purity_nu(&self, c: &PhysConstants) -> Result<f64> {
        let sigma = self.sigma_det();
        let bound = c.min_sigma();
        if sigma < bound * (1.0 - PURITY_REL_TOL) || sigma.is_nan() {
            return Err(Error::UncertaintyViolation { sigma, bound });
        }
        Ok((2.0 / c.hbar * sigma.sqrt()).max(1.0))
    }

    /// Linear entropy `S_l = 1 − Tr ρ² = 1 − 1/ν`.
    pub fn linear_entropy(&self, c: &PhysConstants) -> Result<f64> {
        Ok(1.0 - 1.0 / self.purity_nu(c)?)
    }

    pub fn von_neumann_entropy(&self, c: &PhysConstants) -> Result<f64> {
        Ok(entropy_from_nu(self.purity_nu(c)?))
    }

    /// `r = σ_pq / sqrt(σ_qq σ_pp)`.
    pub fn correlation_coefficient(&self) -> Result<f64> {
        let prod = self.var_qq * self.var_pp;
        if !(prod > 0.0) {
            return Err(Error::DegenerateState("correlation coefficient needs var_qq * var_pp > 0"));
        }
        Ok(self.cov_pq / prod.sqrt())
    }

    pub fn uncertainty_class(&self, c: &PhysConstants, tol: f64) -> UncertaintyClass {
        let bound = c.min_sigma();
        let sigma = self.sigma_det();
        if (sigma - bound).abs() <= bound * tol {
            UncertaintyClass::PureBoundary
        } else if sigma < bound {
            UncertaintyClass::Violating
        } else {
            UncertaintyClass::Mixed
        }
    }

    pub fn is_pure(&self, c: &PhysConstants) -> bool {
        self.uncertainty_class(c, PURITY_REL_TOL) == UncertaintyClass::PureBoundary
    }

    /// Gaussian Wigner function `W(p, q)`.
    pub fn wigner(&self, p: f64, q: f64) -> Result<f64> {
        let sigma = self.sigma_det();
        if !(sigma > 0.0) {
            return Err(Error::DegenerateState("Wigner function needs sigma > 0"));
        }
        let dq = q - self.mean_q;
        let dp = p - self.mean_p;
        let quad = self.var_pp * dq * dq + self.var_qq * dp * dp - 2.0 * self.cov_pq * dq * dp;
        Ok((-quad / (2.0 * sigma)).exp() / (2.0 * PI * sigma.sqrt()))
    }

    /// Position-representation matrix element `<x|ρ|y>`.
    pub fn density_matrix(&self, x: f64, y: f64, c: &PhysConstants) -> Result<Complex64> {
        if !(self.var_qq > 0.0) {
            return Err(Error::DegenerateState("density matrix needs var_qq > 0"));
        }
        let hbar = c.hbar;
        let centre = 0.5 * (x + y) - self.mean_q;
        let diff = x - y;
        let coherence = self.var_pp - self.cov_pq * self.cov_pq / self.var_qq;
        let re = -centre * centre / (2.0 * self.var_qq) - coherence * diff * diff / (2.0 * hbar * hbar);
        let im = self.cov_pq / (hbar * self.var_qq) * centre * diff + self.mean_p * diff / hbar;
        let norm = (2.0 * PI * self.var_qq).sqrt().recip();
        Ok(Complex64::new(re, im).exp() * norm)
    }
}

/// Von Neumann entropy of a Gaussian state as a function of `ν`, with
/// `0 ln 0 := 0` at the pure limit.
pub fn entropy_from_nu(nu: f64) -> f64 {
    let plus = 0.5 * (nu + 1.0);
    let minus = 0.5 * (nu - 1.0);
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    (xlnx(plus) - xlnx(minus)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: PhysConstants = PhysConstants { hbar: 1.0, k_b: 1.0 };

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sigma_det_examples() {
        assert_eq!(GaussianState::centered(0.5, 0.5, 0.0).sigma_det(), 0.25);
        assert!(close(GaussianState::centered(0.625, 0.625, -0.375).sigma_det(), 0.25, 1e-15));
        assert_eq!(GaussianState::centered(1.0, 1.0, 0.0).sigma_det(), 1.0);
    }

    #[test]
    fn purity_examples() {
        assert_eq!(GaussianState::centered(0.5, 0.5, 0.0).purity_nu(&C).unwrap(), 1.0);
        assert_eq!(GaussianState::centered(1.0, 1.0, 0.0).purity_nu(&C).unwrap(), 2.0);
        let nu = GaussianState::centered(0.55, 0.5, 0.0).purity_nu(&C).unwrap();
        assert!(close(nu, 1.048_808_848_170_151_5, 1e-14));
    }

    #[test]
    fn purity_clamps_round_off_but_rejects_violations() {
        let just_below = GaussianState::centered(0.5 * (1.0 - 1e-12), 0.5, 0.0);
        assert_eq!(just_below.purity_nu(&C).unwrap(), 1.0);
        let violating = GaussianState::centered(0.25, 0.5, 0.0);
        assert!(matches!(violating.purity_nu(&C), Err(Error::UncertaintyViolation { .. })));
        assert!(violating.linear_entropy(&C).is_err());
    }

    #[test]
    fn linear_entropy_examples() {
        assert_eq!(GaussianState::centered(0.5, 0.5, 0.0).linear_entropy(&C).unwrap(), 0.0);
        assert_eq!(GaussianState::centered(1.0, 1.0, 0.0).linear_entropy(&C).unwrap(), 0.5);
        let s = GaussianState::centered(0.625, 0.625, -0.375).linear_entropy(&C).unwrap();
        assert!(s.abs() < 1e-15);
    }

    #[test]
    fn von_neumann_examples() {
        assert_eq!(entropy_from_nu(1.0), 0.0);
        // thermal oscillator with one mean quantum: (n+1)ln(n+1) − n ln n
        assert!(close(entropy_from_nu(3.0), 2.0 * 2f64.ln(), 1e-14));
        assert!(entropy_from_nu(1.0 + 1e-12) < 1e-10);
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(GaussianState::centered(1.0, 1.0, 0.0).correlation_coefficient().unwrap(), 0.0);
        let r = GaussianState::centered(0.625, 0.625, -0.375).correlation_coefficient().unwrap();
        assert!(close(r, -0.6, 1e-15));
        assert_eq!(GaussianState::centered(0.5, 0.5, 0.25).correlation_coefficient().unwrap(), 0.5);
        assert!(GaussianState::centered(0.0, 1.0, 0.0).correlation_coefficient().is_err());
    }

    #[test]
    fn uncertainty_classes() {
        let tol = PURITY_REL_TOL;
        assert_eq!(GaussianState::centered(0.5, 0.5, 0.0).uncertainty_class(&C, tol), UncertaintyClass::PureBoundary);
        assert_eq!(GaussianState::centered(1.0, 0.5, 0.0).uncertainty_class(&C, tol), UncertaintyClass::Mixed);
        assert_eq!(GaussianState::centered(0.25, 0.5, 0.0).uncertainty_class(&C, tol), UncertaintyClass::Violating);
    }

    #[test]
    fn wigner_peak_values() {
        let s = GaussianState::new(0.3, -0.2, 1.0, 2.0, 0.5);
        let peak = s.wigner(-0.2, 0.3).unwrap();
        assert!(close(peak, 1.0 / (2.0 * PI * s.sigma_det().sqrt()), 1e-15));
        let pure = GaussianState::centered(0.5, 0.5, 0.0);
        assert!(close(pure.wigner(0.0, 0.0).unwrap(), 1.0 / PI, 1e-15));
        assert!(GaussianState::centered(1.0, 0.0, 0.0).wigner(0.0, 0.0).is_err());
    }

    #[test]
    fn density_matrix_diagonal_peak_and_hermiticity() {
        let s = GaussianState::new(0.4, 0.7, 0.8, 0.9, -0.3);
        let peak = s.density_matrix(0.4, 0.4, &C).unwrap();
        assert!(close(peak.re, (2.0 * PI * 0.8f64).sqrt().recip(), 1e-15));
        assert_eq!(peak.im, 0.0);
        for &(x, y) in &[(0.1, -1.3), (2.0, 0.5), (-0.7, 0.9)] {
            let a = s.density_matrix(x, y, &C).unwrap();
            let b = s.density_matrix(y, x, &C).unwrap();
            assert!((a - b.conj()).norm() < 1e-15);
        }
        assert!(GaussianState::centered(0.0, 1.0, 0.0).density_matrix(0.0, 0.0, &C).is_err());
    }

    #[test]
    fn ccs_examples() {
        let glauber = GaussianState::correlated_coherent(0.0, 0.5f64.sqrt(), 0.0, 0.0, &C).unwrap();
        assert!(close(glauber.var_qq, 0.5, 1e-15));
        assert!(close(glauber.var_pp, 0.5, 1e-15));
        assert_eq!(glauber.cov_pq, 0.0);

        let s = GaussianState::correlated_coherent(0.5, 1.0, 0.0, 0.0, &C).unwrap();
        assert_eq!(s.var_qq, 1.0);
        assert!(close(s.var_pp, 1.0 / 3.0, 1e-15));
        assert!(close(s.cov_pq, 0.288_675_134_594_812_9, 1e-15));
        assert!(close(s.sigma_det(), 0.25, 1e-15));
        assert_eq!(s.purity_nu(&C).unwrap(), 1.0);

        assert!(GaussianState::correlated_coherent(1.0, 1.0, 0.0, 0.0, &C).is_err());
        assert!(GaussianState::correlated_coherent(0.2, 0.0, 0.0, 0.0, &C).is_err());
    }

    #[test]
    fn constants_validation() {
        assert!(PhysConstants::new(0.0, 1.0).is_err());
        assert!(PhysConstants::new(1.0, -1.0).is_err());
        assert_eq!(PhysConstants::new(2.0, 1.0).unwrap().min_sigma(), 1.0);
    }
}
