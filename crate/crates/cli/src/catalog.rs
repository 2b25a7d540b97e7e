/// Model `type` tags accepted in scenario documents with their fields.
/// `coef` marks fields that also accept an expression in `t`.
pub const MODELS: &[(&str, &str, &[&str])] = &[
    (
        "kg_general",
        "Karrlein-Grabert master equation with arbitrary coefficients",
        &["mass", "omega0", "gamma_q (coef)", "gamma_p (coef)", "d_q (coef)", "d_p (coef)"],
    ),
    (
        "kg_thermal",
        "thermal initial condition: D_q = gamma_q<q^2> - <p^2>/M^2, D_p = gamma_p<p^2>/M^2",
        &["mass", "omega0", "gamma_q (coef)", "gamma_p (coef)", "temperature", "q2_eq", "p2_eq"],
    ),
    (
        "ohmic",
        "strictly Ohmic damping, gamma_q = omega0^2, regularized <p^2>",
        &["mass", "omega0", "gamma", "temperature", "q2_eq", "p2_eq"],
    ),
    (
        "drude",
        "Drude damping, gamma_q = alpha^2 + eta^2, gamma_p = 2 alpha",
        &["mass", "omega0", "alpha", "eta", "temperature", "q2_eq", "p2_eq"],
    ),
    (
        "weak_coupling",
        "weak-damping equation with frequency shift and K_s, K_c terms",
        &["mass", "omega0", "gamma_s", "gamma_c", "k_s", "k_c"],
    ),
    ("agarwal", "Agarwal equation", &["mass", "omega0", "kappa", "temperature"]),
    (
        "weidlich_haake",
        "Weidlich-Haake cavity-mode equation (Lindblad form)",
        &["mass", "omega0", "gamma_c", "gamma_s (optional)", "temperature"],
    ),
    ("lindblad", "Lindblad equation with explicit diffusion", &["m", "omega", "lambda", "mu", "d_pp", "d_qq", "d_pq"]),
    (
        "lindblad_pure",
        "Lindblad equation with the purity-preserving diffusion coefficients",
        &["m", "omega", "lambda", "mu"],
    ),
];

pub fn render() -> String {
    let mut s = String::from("model types:\n");
    for (tag, about, fields) in MODELS {
        s.push_str(&format!("  {tag}\n    {about}\n    fields: {}\n", fields.join(", ")));
    }
    s.push_str(
        "\ninitial_state types:\n  auto {mean_q, mean_p}\n  moments {mean_q, mean_p, var_qq, var_pp, cov_pq}\n  \
         ccs {r, eta, mean_q, mean_p}\n\ntime: {t_end, sample_count}\n\
         integrator: {method: rk4, dt (optional)} | {method: rk45, rel_tol, abs_tol (optional)}\n\
         outputs: trajectory_csv, purity_report, entropy_audit, summary\n\
         falsification (optional): {trials, rel_min, rel_max}\n",
    );
    s
}
