use dho_core::dynamics::{
    kg_asymptotic_variances, kg_moment_derivatives, lindblad_moment_derivatives, lindblad_steady_state,
};
use dho_core::entropy::{entropy_rate, kg_entropy_rate, lindblad_entropy_rate, model_entropy_rate};
use dho_core::models::{
    drude_gammas, lindblad_constraint_check, lindblad_single_operator, purity_preserving_diffusion,
    weidlich_haake_rates, weidlich_haake_to_lindblad, Agarwal, BathSpec, DrudeDamping, KgSnapshot, LindbladParams,
    ModelVariant, OhmicDamping, ThermalKg, WeakCoupling, WeidlichHaake,
};
use dho_core::purity::{purity_residual, variant_purity_residual};
use dho_core::{entropy_from_nu, GaussianState, PhysConstants};
use proptest::prelude::*;

const C: PhysConstants = PhysConstants { hbar: 1.0, k_b: 1.0 };

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Admissible state: a pure correlated coherent state scaled by `ν ≥ 1`.
fn admissible() -> impl Strategy<Value = GaussianState> {
    (-0.9f64..0.9, 0.2f64..3.0, 1.0f64..4.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(r, eta, nu, q, p)| {
        let s = GaussianState::correlated_coherent(r, eta, q, p, &C).unwrap();
        GaussianState { var_qq: s.var_qq * nu, var_pp: s.var_pp * nu, cov_pq: s.cov_pq * nu, ..s }
    })
}

fn pure() -> impl Strategy<Value = GaussianState> {
    (-0.95f64..0.95, 0.1f64..3.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(r, eta, q, p)| GaussianState::correlated_coherent(r, eta, q, p, &C).unwrap())
}

/// Lindblad parameters satisfying the complete-positivity constraint.
fn valid_lindblad() -> impl Strategy<Value = LindbladParams> {
    (0.2f64..3.0, 0.2f64..3.0, 0.01f64..2.0, 0.01f64..2.0, -0.99f64..0.99, 0.0f64..1.0, -2.0f64..2.0).prop_map(
        |(m, omega, d_pp, d_qq, corr, frac, mu)| {
            let d_pq = corr * (d_pp * d_qq).sqrt();
            let det = d_pp * d_qq - d_pq * d_pq;
            let lambda = frac * 2.0 * det.sqrt() / C.hbar;
            LindbladParams::new(m, omega, lambda, mu, d_pp, d_qq, d_pq).unwrap()
        },
    )
}

fn temperature() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.05f64..10.0]
}

proptest! {
    #[test]
    fn correlated_coherent_states_are_pure(r in -0.99f64..0.99, eta in 0.01f64..10.0, hbar in 0.1f64..3.0) {
        let c = PhysConstants::new(hbar, 1.0).unwrap();
        let s = GaussianState::correlated_coherent(r, eta, 0.0, 0.0, &c).unwrap();
        prop_assert!(rel_close(s.sigma_det(), 0.25 * hbar * hbar, 1e-12));
        prop_assert!((s.purity_nu(&c).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(s.linear_entropy(&c).unwrap().abs() < 1e-7);
        prop_assert!(s.von_neumann_entropy(&c).unwrap() < 1e-6);
        prop_assert!((s.correlation_coefficient().unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_entropy_increases_with_nu(a in 1.0f64..50.0, d in 1e-6f64..5.0) {
        prop_assert!(entropy_from_nu(a + d) > entropy_from_nu(a));
    }

    #[test]
    fn purity_preserving_diffusion_saturates_constraint(
        lambda in 0.0f64..2.0, omega in 0.1f64..5.0, frac in -0.99f64..0.99, m in 0.1f64..5.0, hbar in 0.2f64..2.0,
    ) {
        let c = PhysConstants::new(hbar, 1.0).unwrap();
        let mu = frac * omega;
        let d = purity_preserving_diffusion(lambda, mu, omega, m, &c).unwrap();
        let bound = 0.25 * hbar * hbar * lambda * lambda;
        prop_assert!((d.det() - bound).abs() <= 1e-12 * bound.max(1e-300) + 1e-15);
        let params = LindbladParams::new(m, omega, lambda, mu, d.d_pp, d.d_qq, d.d_pq).unwrap();
        if lambda > 0.0 {
            let v = lindblad_single_operator(&params, &c).unwrap();
            prop_assert!(rel_close(v.commutator(&c), 2.0 * hbar * lambda, 1e-12));
            let back = v.diffusion(&c);
            prop_assert!(rel_close(back.d_pp, d.d_pp, 1e-12));
            prop_assert!(rel_close(back.d_qq, d.d_qq, 1e-12));
            prop_assert!((back.d_pq - d.d_pq).abs() <= 1e-12 * d.d_pp.max(d.d_qq));
        }
    }

    #[test]
    fn weidlich_haake_mapping_is_completely_positive(
        gamma_c in 0.01f64..2.0, omega0 in 0.1f64..5.0, t in temperature(), mass in 0.1f64..5.0,
    ) {
        let (down, up) = weidlich_haake_rates(gamma_c, omega0, t, &C);
        prop_assert!(down >= up && up >= 0.0);
        prop_assert!(rel_close(down - up, 0.5 * gamma_c, 1e-12));
        let p = weidlich_haake_to_lindblad(down, up, omega0, mass, &C).unwrap();
        let check = lindblad_constraint_check(&p, &C);
        prop_assert!(check.passed);
        if t == 0.0 {
            prop_assert!(check.residual.abs() <= 1e-12 * p.d_pp * p.d_qq);
        } else if up > 1e-12 * down {
            prop_assert!(check.residual > 0.0);
        }
    }

    #[test]
    fn drude_damping_is_never_overdamped(alpha in 0.0f64..5.0, eta in 0.0f64..5.0) {
        let (gq, gp) = drude_gammas(alpha, eta);
        prop_assert!(rel_close(4.0 * gq - gp * gp, 4.0 * eta * eta, 1e-12));
    }

    #[test]
    fn determinant_flow_matches_moment_equations(s in admissible(), p in valid_lindblad(),
        gq in 0.1f64..4.0, gp in 0.0f64..3.0, dq in -0.5f64..0.5, dp in 0.0f64..1.0, mass in 0.2f64..3.0) {
        let d = lindblad_moment_derivatives(&s, &p);
        let sigma = s.sigma_det();
        let closed = 2.0 * (p.d_pp * s.var_qq + p.d_qq * s.var_pp - 2.0 * p.d_pq * s.cov_pq - 2.0 * p.lambda * sigma);
        prop_assert!((d.sigma_rate(&s) - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        let via_ode = d.sigma_rate(&s) * C.hbar / (4.0 * sigma.powf(1.5));
        prop_assert!((lindblad_entropy_rate(&s, &p, &C).unwrap() - via_ode).abs() < 1e-12);

        let k = KgSnapshot { mass, omega0: 1.0, gamma_q: gq, gamma_p: gp, d_q: dq, d_p: dp };
        let d = kg_moment_derivatives(&s, &k);
        let m = mass;
        let closed = 2.0 * (m * m * dp * s.var_qq - m * dq * s.cov_pq - gp * sigma);
        prop_assert!((d.sigma_rate(&s) - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        let via_ode = d.sigma_rate(&s) * C.hbar / (4.0 * sigma.powf(1.5));
        prop_assert!((kg_entropy_rate(&s, &k, &C).unwrap() - via_ode).abs() < 1e-12);
    }

    #[test]
    fn pure_states_never_lose_entropy_under_lindblad(s in pure(), p in valid_lindblad()) {
        prop_assert!(lindblad_entropy_rate(&s, &p, &C).unwrap() >= -1e-12);
    }

    #[test]
    fn steady_states_are_admissible_fixed_points(p in valid_lindblad()) {
        if let Ok(s) = lindblad_steady_state(&p) {
            let d = lindblad_moment_derivatives(&s, &p);
            let scale = p.d_pp.max(p.d_qq).max(p.d_pq.abs());
            prop_assert!([d.d_var_qq, d.d_var_pp, d.d_cov_pq].iter().all(|x| x.abs() <= 1e-9 * scale));
            prop_assert!(s.sigma_det() >= 0.25 * (1.0 - 1e-9));
        } else {
            let shifted = p.omega * p.omega - p.mu * p.mu;
            prop_assert!(p.lambda == 0.0 || p.lambda * p.lambda + shifted <= 1e-12);
        }
    }

    #[test]
    fn kg_asymptotic_variances_are_fixed_points(
        gq in 0.1f64..4.0, gp in 0.01f64..3.0, dq in -0.5f64..0.5, dp in 0.0f64..1.0, mass in 0.2f64..3.0,
    ) {
        let k = KgSnapshot { mass, omega0: 1.0, gamma_q: gq, gamma_p: gp, d_q: dq, d_p: dp };
        let (qq, pp, pq) = kg_asymptotic_variances(&k).unwrap();
        let d = kg_moment_derivatives(&GaussianState::centered(qq, pp, pq), &k);
        let scale = mass * mass * dp + mass * dq.abs() + 1e-300;
        prop_assert!([d.d_var_qq, d.d_var_pp, d.d_cov_pq].iter().all(|x| x.abs() <= 1e-12 * scale.max(1.0)));
    }

    #[test]
    fn weidlich_haake_condition_cannot_hold_when_warm(s in admissible(), t in 0.05f64..10.0, omega0 in 0.2f64..3.0) {
        let wh = ModelVariant::WeidlichHaake(WeidlichHaake { mass: 1.0, omega0, gamma_c: 0.3, gamma_s: 0.0, temperature: t });
        prop_assert!(variant_purity_residual(&wh, &s, 0.0, &C).unwrap() > 0.0);
    }
}

fn thermal_bath() -> impl Strategy<Value = BathSpec> {
    (0.0f64..5.0, 0.3f64..3.0, 0.3f64..3.0).prop_map(|(t, q2, p2)| BathSpec::new(t, q2, p2).unwrap())
}

/// Every variant with the factor relating its own purity condition to the
/// family-level one.
fn variants() -> impl Strategy<Value = (ModelVariant, f64)> {
    let hbar = C.hbar;
    prop_oneof![
        (0.3f64..3.0, 0.0f64..2.0, thermal_bath(), 0.3f64..2.0).prop_map(|(gq, gp, bath, mass)| (
            ModelVariant::KgThermal(ThermalKg { mass, omega0: 1.0, gamma_q: gq.into(), gamma_p: gp.into(), bath }),
            1.0
        )),
        (0.0f64..2.0, 0.3f64..3.0, thermal_bath(), 0.3f64..2.0).prop_map(|(gamma, omega0, bath, mass)| (
            ModelVariant::Ohmic(OhmicDamping { mass, omega0, gamma, bath }),
            1.0
        )),
        (0.0f64..2.0, 0.1f64..3.0, thermal_bath(), 0.3f64..2.0).prop_map(|(alpha, eta, bath, mass)| (
            ModelVariant::Drude(DrudeDamping { mass, omega0: 1.0, alpha, eta, bath }),
            1.0
        )),
        (-0.2f64..0.2, 0.0f64..1.0, -0.5f64..0.5, 0.0f64..1.0, 0.5f64..3.0, 0.3f64..2.0).prop_map(
            move |(gamma_s, gamma_c, k_s, k_c, omega0, mass)| (
                ModelVariant::WeakCoupling(WeakCoupling { mass, omega0, gamma_s, gamma_c, k_s, k_c }),
                hbar
            )
        ),
        (0.01f64..1.0, 0.2f64..3.0, temperature(), 0.3f64..2.0).prop_map(move |(kappa, omega0, temperature, mass)| (
            ModelVariant::Agarwal(Agarwal { mass, omega0, kappa, temperature }),
            hbar * kappa
        )),
        (0.01f64..1.0, 0.2f64..3.0, temperature(), 0.3f64..2.0).prop_map(
            move |(gamma_c, omega0, temperature, mass)| (
                ModelVariant::WeidlichHaake(WeidlichHaake { mass, omega0, gamma_c, gamma_s: 0.0, temperature }),
                0.25 * hbar * gamma_c
            )
        ),
    ]
}

proptest! {
    #[test]
    fn variant_conditions_are_rescaled_family_conditions((v, factor) in variants(), s in admissible()) {
        let model = v.model(&C).unwrap();
        let generic = purity_residual(&model, &s, 0.0, &C).unwrap();
        let own = variant_purity_residual(&v, &s, 0.0, &C).unwrap();
        prop_assert!((generic - factor * own).abs() <= 1e-12 * generic.abs().max(1.0), "{generic} vs {factor}*{own}");
    }

    #[test]
    fn printed_rates_reduce_to_family_rates((v, _f) in variants(), s in admissible()) {
        let model = v.model(&C).unwrap();
        let generic = entropy_rate(&model, &s, 0.0, &C).unwrap();
        let printed = model_entropy_rate(&v, &s, 0.0, &C).unwrap();
        prop_assert!((generic - printed).abs() <= 1e-12 * generic.abs().max(1.0), "{generic} vs {printed}");
    }
}
