//! Closed-form linear-entropy production rates and their finite-difference
//! audit along trajectories.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::models::{thermal_coth, BathSpec, KgSnapshot, LindbladParams, Model, ModelVariant};
use crate::state::{GaussianState, PhysConstants};

fn prefactor(s: &GaussianState) -> Result<(f64, f64)> {
    let sigma = s.sigma_det();
    if !(sigma > 0.0) {
        return Err(Error::DegenerateState("entropy rate needs sigma > 0"));
    }
    Ok((sigma, 1.0 / (2.0 * sigma * sigma.sqrt())))
}

/// `dS_l/dt = ħ/(2σ^{3/2}) [M²D_pσ_qq − MD_qσ_pq − γ_pσ]`.
pub fn kg_entropy_rate(s: &GaussianState, k: &KgSnapshot, c: &PhysConstants) -> Result<f64> {
    let (sigma, f) = prefactor(s)?;
    let m = k.mass;
    Ok(c.hbar * f * (m * m * k.d_p * s.var_qq - m * k.d_q * s.cov_pq - k.gamma_p * sigma))
}

/// `dS_l/dt = ħ/(2σ^{3/2}) [D_ppσ_qq + D_qqσ_pp − 2D_pqσ_pq − 2λσ]`.
pub fn lindblad_entropy_rate(s: &GaussianState, p: &LindbladParams, c: &PhysConstants) -> Result<f64> {
    let (sigma, f) = prefactor(s)?;
    Ok(c.hbar * f * (p.d_pp * s.var_qq + p.d_qq * s.var_pp - 2.0 * p.d_pq * s.cov_pq - 2.0 * p.lambda * sigma))
}

/// Family-level rate for a model at time `t`.
pub fn entropy_rate(model: &Model, s: &GaussianState, t: f64, c: &PhysConstants) -> Result<f64> {
    match model {
        Model::Kg(k) => kg_entropy_rate(s, &k.at(t)?, c),
        Model::Lindblad(p) => lindblad_entropy_rate(s, p, c),
    }
}

fn thermal_rate(
    s: &GaussianState,
    gamma_q: f64,
    gamma_p: f64,
    bath: &BathSpec,
    mass: f64,
    c: &PhysConstants,
) -> Result<f64> {
    let (q2, p2) = bath.variances()?;
    let (sigma, f) = prefactor(s)?;
    Ok(c.hbar * f * (gamma_p * p2 * s.var_qq - (mass * gamma_q * q2 - p2 / mass) * s.cov_pq - gamma_p * sigma))
}

/// Rate written in the variant's own parameters.
///
/// * thermal / Drude: `ħ/(2σ^{3/2}) [γ_p<p²>σ_qq − (Mγ_q<q²> − <p²>/M)σ_pq − γ_pσ]`
/// * Ohmic: the same with `γ_p = γ`, `γ_q = ω₀²`
/// * weak coupling: `ħ²/(2σ^{3/2}) [K_cσ_qq + (K_s/Mω₀)σ_pq − γ_cσ/ħ]`
/// * Agarwal: `ħ²κ/(2σ^{3/2}) [Mω₀ coth σ_qq − 2σ/ħ]`
/// * Weidlich–Haake: `ħ²γ_c/(8σ^{3/2}) [(Mω₀σ_qq + σ_pp/Mω₀) coth − 4σ/ħ]`
/// * Lindblad and general KG: the family-level forms.
pub fn model_entropy_rate(v: &ModelVariant, s: &GaussianState, t: f64, c: &PhysConstants) -> Result<f64> {
    let hbar = c.hbar;
    match v {
        ModelVariant::KgGeneral(k) => kg_entropy_rate(s, &k.at(t)?, c),
        ModelVariant::KgThermal(th) => {
            thermal_rate(s, th.gamma_q.at("gamma_q", t)?, th.gamma_p.at("gamma_p", t)?, &th.bath, th.mass, c)
        }
        ModelVariant::Ohmic(o) => thermal_rate(s, o.omega0 * o.omega0, o.gamma, &o.bath, o.mass, c),
        ModelVariant::Drude(d) => {
            let (gq, gp) = crate::models::drude_gammas(d.alpha, d.eta);
            thermal_rate(s, gq, gp, &d.bath, d.mass, c)
        }
        ModelVariant::WeakCoupling(w) => {
            let (sigma, f) = prefactor(s)?;
            Ok(hbar * hbar * f * (w.k_c * s.var_qq + w.k_s / (w.mass * w.omega0) * s.cov_pq - w.gamma_c * sigma / hbar))
        }
        ModelVariant::Agarwal(a) => {
            let (sigma, f) = prefactor(s)?;
            let coth = thermal_coth(a.omega0, a.temperature, c);
            Ok(hbar * hbar * a.kappa * f * (a.mass * a.omega0 * coth * s.var_qq - 2.0 * sigma / hbar))
        }
        ModelVariant::WeidlichHaake(w) => {
            let (sigma, f) = prefactor(s)?;
            let coth = thermal_coth(w.omega0, w.temperature, c);
            let mw = w.mass * w.omega0;
            // f = 1/(2σ^{3/2}), so ħ²γ_c/(8σ^{3/2}) = ħ²γ_c f/4
            Ok(0.25 * hbar * hbar * w.gamma_c * f * ((mw * s.var_qq + s.var_pp / mw) * coth - 4.0 * sigma / hbar))
        }
        ModelVariant::Lindblad(p) => lindblad_entropy_rate(s, p, c),
    }
}

/// Closed-form rate against finite differences of `S_l` at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRateRecord {
    pub t: f64,
    pub rate_formula: f64,
    /// Central difference `(S_l(t+h) − S_l(t−h))/2h`.
    pub rate_fd: f64,
    /// Richardson combination `(4D_h − D_2h)/3`, where both neighbours at
    /// distance `2h` exist.
    pub rate_richardson: Option<f64>,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateAudit {
    pub records: Vec<EntropyRateRecord>,
    pub max_gap: f64,
    /// Largest gap against the Richardson estimate, or `None` with fewer
    /// than five samples.
    pub max_richardson_gap: Option<f64>,
}

/// Compares the variant's closed-form rate with finite differences of the
/// linear entropy at the interior samples of a uniformly spaced trajectory.
pub fn rate_fd_audit(traj: &Trajectory, v: &ModelVariant, c: &PhysConstants) -> Result<RateAudit> {
    let n = traj.len();
    if n < 3 {
        return Err(Error::InsufficientSamples(n));
    }
    let h = traj.times[1] - traj.times[0];
    let uniform = traj
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(traj.times[n - 1].abs() * f64::EPSILON * 8.0));
    if !(h > 0.0) || !uniform {
        return Err(Error::NonUniformSamples);
    }
    let s_l: Vec<f64> = traj.diagnostics.iter().map(|d| d.linear_entropy).collect();
    let mut records = Vec::with_capacity(n - 2);
    let mut max_gap = 0.0f64;
    let mut max_richardson: Option<f64> = None;
    for i in 1..n - 1 {
        let t = traj.times[i];
        let rate_formula = model_entropy_rate(v, &traj.states[i], t, c)?;
        let d_h = (s_l[i + 1] - s_l[i - 1]) / (2.0 * h);
        let rate_richardson = (i >= 2 && i + 2 < n).then(|| {
            let d_2h = (s_l[i + 2] - s_l[i - 2]) / (4.0 * h);
            (4.0 * d_h - d_2h) / 3.0
        });
        let gap = (rate_formula - d_h).abs();
        max_gap = max_gap.max(gap);
        if let Some(r) = rate_richardson {
            let g = (rate_formula - r).abs();
            max_richardson = Some(max_richardson.map_or(g, |m| m.max(g)));
        }
        records.push(EntropyRateRecord { t, rate_formula, rate_fd: d_h, rate_richardson, gap });
    }
    Ok(RateAudit { records, max_gap, max_richardson_gap: max_richardson })
}
