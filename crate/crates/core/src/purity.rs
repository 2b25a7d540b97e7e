//! Purity-of-state conditions for every model variant, classification of
//! purity-preserving initial states, and the `⟨H⟩ = ⟨H'⟩` check for the
//! non-Hermitian Schrödinger-type Hamiltonians.

use num_complex::Complex64;

use crate::dynamics::energy::total_energy;
use crate::dynamics::moments::lindblad_moment_derivatives;
use crate::dynamics::propagator::kg_asymptotic_variances;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::models::{thermal_coth, BathSpec, KgSnapshot, LindbladParams, Model, ModelVariant, VariantKind};
use crate::state::{GaussianState, PhysConstants, PURITY_REL_TOL};

/// A state counts as pure for the Hamiltonian check when `ν ≤ 1 + PURE_NU_TOL`.
pub const PURE_NU_TOL: f64 = 1e-8;

/// Verdict tolerance factor: `|residual| ≤ 1e-8 · ħ²/4 · rate`.
pub const VERDICT_REL_TOL: f64 = 1e-8;

/// `M²D_pσ_qq − MD_qσ_pq − ħ²γ_p/4`.
pub fn kg_purity_residual(s: &GaussianState, k: &KgSnapshot, c: &PhysConstants) -> f64 {
    let m = k.mass;
    m * m * k.d_p * s.var_qq - m * k.d_q * s.cov_pq - 0.25 * c.hbar * c.hbar * k.gamma_p
}

/// Thermal initial condition:
/// `γ_p<p²>σ_qq − (Mγ_q<q²> − <p²>/M)σ_pq − ħ²γ_p/4`.
pub fn thermal_purity_residual(
    s: &GaussianState,
    gamma_q: f64,
    gamma_p: f64,
    bath: &BathSpec,
    mass: f64,
    c: &PhysConstants,
) -> Result<f64> {
    let (q2, p2) = bath.variances()?;
    Ok(gamma_p * p2 * s.var_qq - (mass * gamma_q * q2 - p2 / mass) * s.cov_pq - 0.25 * c.hbar * c.hbar * gamma_p)
}

/// Strictly Ohmic damping:
/// `γ<p²>σ_qq − (Mω₀²<q²> − <p²>/M)σ_pq − ħ²γ/4`.
pub fn ohmic_purity_residual(
    s: &GaussianState,
    gamma: f64,
    omega0: f64,
    bath: &BathSpec,
    mass: f64,
    c: &PhysConstants,
) -> Result<f64> {
    let (q2, p2) = bath.variances()?;
    Ok(gamma * p2 * s.var_qq - (mass * omega0 * omega0 * q2 - p2 / mass) * s.cov_pq - 0.25 * c.hbar * c.hbar * gamma)
}

/// Drude damping:
/// `2α<p²>σ_qq − [M(α²+η²)<q²> − <p²>/M]σ_pq − ħ²α/2`.
pub fn drude_purity_residual(
    s: &GaussianState,
    alpha: f64,
    eta: f64,
    bath: &BathSpec,
    mass: f64,
    c: &PhysConstants,
) -> Result<f64> {
    let (q2, p2) = bath.variances()?;
    Ok(2.0 * alpha * p2 * s.var_qq
        - (mass * (alpha * alpha + eta * eta) * q2 - p2 / mass) * s.cov_pq
        - 0.5 * c.hbar * c.hbar * alpha)
}

/// Weak coupling: `K_cσ_qq + (K_s/Mω₀)σ_pq − ħγ_c/4`.
pub fn weak_coupling_purity_residual(
    s: &GaussianState,
    k_c: f64,
    k_s: f64,
    gamma_c: f64,
    omega0: f64,
    mass: f64,
    c: &PhysConstants,
) -> f64 {
    k_c * s.var_qq + k_s / (mass * omega0) * s.cov_pq - 0.25 * c.hbar * gamma_c
}

/// Agarwal: `Mω₀ coth(ħω₀/2k_BT) σ_qq − ħ/2`.
pub fn agarwal_purity_residual(s: &GaussianState, omega0: f64, temperature: f64, mass: f64, c: &PhysConstants) -> f64 {
    mass * omega0 * thermal_coth(omega0, temperature, c) * s.var_qq - 0.5 * c.hbar
}

/// Weidlich–Haake: `(Mω₀σ_qq + σ_pp/Mω₀) coth(ħω₀/2k_BT) − ħ`.
pub fn weidlich_haake_purity_residual(
    s: &GaussianState,
    omega0: f64,
    temperature: f64,
    mass: f64,
    c: &PhysConstants,
) -> f64 {
    let mw = mass * omega0;
    (mw * s.var_qq + s.var_pp / mw) * thermal_coth(omega0, temperature, c) - c.hbar
}

/// Lindblad: `D_ppσ_qq + D_qqσ_pp − 2D_pqσ_pq − ħ²λ/2`.
pub fn lindblad_purity_residual(s: &GaussianState, p: &LindbladParams, c: &PhysConstants) -> f64 {
    p.d_pp * s.var_qq + p.d_qq * s.var_pp - 2.0 * p.d_pq * s.cov_pq - 0.5 * c.hbar * c.hbar * p.lambda
}

/// Residual of the family-level condition: the Karrlein–Grabert form for
/// KG-type models, the Lindblad form otherwise.
pub fn purity_residual(model: &Model, s: &GaussianState, t: f64, c: &PhysConstants) -> Result<f64> {
    Ok(match model {
        Model::Kg(k) => kg_purity_residual(s, &k.at(t)?, c),
        Model::Lindblad(p) => lindblad_purity_residual(s, p, c),
    })
}

/// Residual of the condition written for the specific variant.
pub fn variant_purity_residual(v: &ModelVariant, s: &GaussianState, t: f64, c: &PhysConstants) -> Result<f64> {
    match v {
        ModelVariant::KgGeneral(k) => Ok(kg_purity_residual(s, &k.at(t)?, c)),
        ModelVariant::KgThermal(th) => {
            thermal_purity_residual(s, th.gamma_q.at("gamma_q", t)?, th.gamma_p.at("gamma_p", t)?, &th.bath, th.mass, c)
        }
        ModelVariant::Ohmic(o) => ohmic_purity_residual(s, o.gamma, o.omega0, &o.bath, o.mass, c),
        ModelVariant::Drude(d) => drude_purity_residual(s, d.alpha, d.eta, &d.bath, d.mass, c),
        ModelVariant::WeakCoupling(w) => {
            Ok(weak_coupling_purity_residual(s, w.k_c, w.k_s, w.gamma_c, w.omega0, w.mass, c))
        }
        ModelVariant::Agarwal(a) => Ok(agarwal_purity_residual(s, a.omega0, a.temperature, a.mass, c)),
        ModelVariant::WeidlichHaake(w) => Ok(weidlich_haake_purity_residual(s, w.omega0, w.temperature, w.mass, c)),
        ModelVariant::Lindblad(p) => Ok(lindblad_purity_residual(s, p, c)),
    }
}

fn coherent_state(mass: f64, omega0: f64, c: &PhysConstants) -> GaussianState {
    let mw = mass * omega0;
    GaussianState::centered(0.5 * c.hbar / mw, 0.5 * c.hbar * mw, 0.0)
}

fn is_minimal(s: &GaussianState, c: &PhysConstants) -> bool {
    let bound = c.min_sigma();
    (s.sigma_det() - bound).abs() <= PURITY_REL_TOL * bound
}

/// The Gaussian initial state that stays pure for all times, if the model
/// has one.
///
/// * Karrlein–Grabert family: the asymptotic variances, provided they are a
///   minimum-uncertainty state.
/// * Agarwal and Weidlich–Haake: the coherent state, only at `T = 0`.
/// * Lindblad: the stationary correlated coherent state, which exists only
///   when the diffusion constraint is saturated and the candidate
///   `(D_qq, D_pp, D_pq)/λ` is stationary.
///
/// Models without damping return `None`: every state stays pure there and
/// none is singled out.
pub fn purity_preserving_initial_state(v: &ModelVariant, c: &PhysConstants) -> Result<Option<GaussianState>> {
    match v {
        ModelVariant::Agarwal(a) => {
            Ok((a.temperature == 0.0 && a.kappa > 0.0).then(|| coherent_state(a.mass, a.omega0, c)))
        }
        ModelVariant::WeidlichHaake(w) => {
            Ok((w.temperature == 0.0 && w.gamma_c > 0.0).then(|| coherent_state(w.mass, w.omega0, c)))
        }
        ModelVariant::Lindblad(p) => Ok(lindblad_pure_stationary(p, c)),
        _ => {
            let model = v.model(c)?;
            let Model::Kg(k) = model else { unreachable!("KG-family variant") };
            let snap = k.constant_snapshot()?;
            let Ok((qq, pp, pq)) = kg_asymptotic_variances(&snap) else {
                return Ok(None);
            };
            let s = GaussianState::centered(qq, pp, pq);
            Ok((qq > 0.0 && pp > 0.0 && is_minimal(&s, c)).then_some(s))
        }
    }
}

fn lindblad_pure_stationary(p: &LindbladParams, c: &PhysConstants) -> Option<GaussianState> {
    if !(p.lambda > 0.0) {
        return None;
    }
    // the constraint must be saturated
    let bound = 0.25 * c.hbar * c.hbar * p.lambda * p.lambda;
    if (p.diffusion().det() - bound).abs() > PURITY_REL_TOL * bound.max(p.d_pp.abs() * p.d_qq.abs()) {
        return None;
    }
    let s = GaussianState::centered(p.d_qq / p.lambda, p.d_pp / p.lambda, p.d_pq / p.lambda);
    if !(s.var_qq > 0.0 && s.var_pp > 0.0) || !is_minimal(&s, c) {
        return None;
    }
    let d = lindblad_moment_derivatives(&s, p);
    let scale = p.lambda * s.var_qq.abs().max(s.var_pp.abs()) + p.d_pp.abs().max(p.d_qq.abs());
    let stationary = [d.d_var_qq, d.d_var_pp, d.d_cov_pq].iter().all(|x| x.abs() <= PURITY_REL_TOL * scale);
    stationary.then_some(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityVerdict {
    PreservesPurity,
    LosesPurity,
}

/// Purity residuals along a trajectory and the resulting verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityReport {
    pub kind: VariantKind,
    pub times: Vec<f64>,
    /// Family-level residual (Karrlein–Grabert or Lindblad form).
    pub residuals: Vec<f64>,
    /// Residual of the variant's own condition.
    pub variant_residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub initially_pure: bool,
    /// `None` for time-dependent coefficients, where only per-sample
    /// residuals are reported.
    pub verdict: Option<PurityVerdict>,
}

/// Largest damping rate of the variant over the sample times; scales the
/// verdict tolerance.
fn verdict_rate(v: &ModelVariant, times: &[f64], c: &PhysConstants) -> Result<f64> {
    Ok(match v {
        ModelVariant::Agarwal(a) => 2.0 * a.kappa,
        ModelVariant::WeidlichHaake(w) => w.gamma_c,
        ModelVariant::WeakCoupling(w) => w.gamma_c.abs(),
        ModelVariant::Lindblad(p) => p.lambda,
        _ => {
            let Model::Kg(k) = v.model(c)? else { unreachable!("KG-family variant") };
            let mut rate = 0.0f64;
            for &t in times {
                rate = rate.max(k.gamma_p.at("gamma_p", t)?.abs());
            }
            rate
        }
    })
}

pub fn purity_report(v: &ModelVariant, traj: &Trajectory, c: &PhysConstants) -> Result<PurityReport> {
    let model = v.model(c)?;
    let mut residuals = Vec::with_capacity(traj.len());
    let mut variant_residuals = Vec::with_capacity(traj.len());
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        residuals.push(purity_residual(&model, s, t, c)?);
        variant_residuals.push(variant_purity_residual(v, s, t, c)?);
    }
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let tolerance = VERDICT_REL_TOL * c.min_sigma() * verdict_rate(v, &traj.times, c)?;
    let initially_pure = traj.states.first().is_some_and(|s| is_minimal(s, c));
    let verdict = model.is_constant().then_some(if initially_pure && max_abs_residual <= tolerance {
        PurityVerdict::PreservesPurity
    } else {
        PurityVerdict::LosesPurity
    });
    Ok(PurityReport {
        kind: v.kind(),
        times: traj.times.clone(),
        residuals,
        variant_residuals,
        max_abs_residual,
        tolerance,
        initially_pure,
        verdict,
    })
}

/// Mean values of the reference Hamiltonian `H` and of the non-Hermitian
/// `H'` that drives a pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianExpectation {
    pub h: f64,
    pub h_prime: Complex64,
}

impl HamiltonianExpectation {
    pub fn gap(&self) -> f64 {
        (self.h_prime - self.h).norm()
    }
}

/// Evaluates `⟨H⟩` and `⟨H'⟩` in a pure Gaussian state at time `t`.
///
/// * Lindblad: `H' = H + λ(σ_p q − σ_q p) − (i/ħ)[D_pp(q−σ_q)² + D_qq(p−σ_p)²
///   − D_pq{(p−σ_p),(q−σ_q)} − λħ²/2]`.
/// * Weidlich–Haake: `H = ħ(ω₀+γ_s/2)a†a`,
///   `H' = H + iħγ_c/2 (σ_{a†}a − σ_a a† + 1/2)
///   − iħγ_c/2 coth(ħω₀/2k_BT)[(a†−σ_{a†})(a−σ_a) + 1/2]`.
/// * Karrlein–Grabert family: `H' = p²/2M + Mγ_q q²/2 + γ_p(qp + σ_p q − σ_q p)/2
///   + (iM/ħ)D_q(p−σ_p)(q−σ_q) − (iM²/ħ)D_p(q−σ_q)²`; `H` is its Hermitian
///   part, so only the imaginary part of `⟨H'⟩` is informative.
pub fn hamiltonian_expectation_check(
    s: &GaussianState,
    v: &ModelVariant,
    t: f64,
    c: &PhysConstants,
) -> Result<HamiltonianExpectation> {
    let nu = s.purity_nu(c)?;
    if nu > 1.0 + PURE_NU_TOL {
        return Err(Error::NotPure { nu });
    }
    let hbar = c.hbar;
    let i = Complex64::i();
    match v {
        ModelVariant::Lindblad(p) => {
            let h = total_energy(s, &Model::Lindblad(*p));
            // ⟨q − σ_q⟩ = 0 and the symmetrized product has mean 2σ_pq;
            // the λ(σ_p q − σ_q p) term averages to zero
            let bracket =
                p.d_pp * s.var_qq + p.d_qq * s.var_pp - 2.0 * p.d_pq * s.cov_pq - 0.5 * p.lambda * hbar * hbar;
            Ok(HamiltonianExpectation { h, h_prime: h - i * bracket / hbar })
        }
        ModelVariant::WeidlichHaake(w) => {
            let mw = w.mass * w.omega0;
            let k = mw / (2.0 * hbar);
            let alpha = Complex64::new(s.mean_q, s.mean_p / mw) * k.sqrt();
            // ⟨a†a⟩ and the fluctuation part ⟨(a†−ᾱ)(a−α)⟩
            let fluct = k * (s.var_qq + s.var_pp / (mw * mw)) - 0.5;
            let number = fluct + alpha.norm_sqr();
            let h = hbar * (w.omega0 + 0.5 * w.gamma_s) * number;
            let coth = thermal_coth(w.omega0, w.temperature, c);
            let drift = alpha.conj() * alpha - alpha * alpha.conj() + 0.5;
            let h_prime =
                h + i * (0.5 * hbar * w.gamma_c) * drift - i * (0.5 * hbar * w.gamma_c * coth * (fluct + 0.5));
            Ok(HamiltonianExpectation { h, h_prime })
        }
        _ => {
            let Model::Kg(k) = v.model(c)? else { unreachable!("KG-family variant") };
            let k = k.at(t)?;
            let m = k.mass;
            let (q, p) = (s.mean_q, s.mean_p);
            let qp = Complex64::new(s.cov_pq + q * p, 0.5 * hbar);
            let centered_pq = Complex64::new(s.cov_pq, -0.5 * hbar);
            let h_prime = (s.var_pp + p * p) / (2.0 * m)
                + 0.5 * m * k.gamma_q * (s.var_qq + q * q)
                + 0.5 * k.gamma_p * (qp + p * q - q * p)
                + i * (m / hbar) * k.d_q * centered_pq
                - i * (m * m / hbar) * k.d_p * s.var_qq;
            Ok(HamiltonianExpectation { h: h_prime.re, h_prime })
        }
    }
}
