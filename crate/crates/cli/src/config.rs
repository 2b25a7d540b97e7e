//! Scenario documents: JSON schema, parsing and eager validation.

use std::collections::BTreeSet;

use dho_core::dynamics::{uniform_grid, IntegratorOptions, Method};
use dho_core::models::{
    lindblad_constraint_check, Agarwal, BathSpec, CoefficientSource, DrudeDamping, KgCoefficients, LindbladParams,
    ModelVariant, OhmicDamping, ThermalKg, WeakCoupling, WeidlichHaake,
};
use dho_core::purity::purity_preserving_initial_state;
use dho_core::{GaussianState, PhysConstants};
use serde::Deserialize;

use crate::error::CliError;
use crate::expr::Expr;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: Option<String>,
    #[serde(default)]
    pub constants: ConstantsDoc,
    pub model: ModelDoc,
    pub initial_state: InitialStateDoc,
    pub time: TimeDoc,
    #[serde(default)]
    pub integrator: IntegratorDoc,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    pub falsification: Option<FalsificationDoc>,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::TrajectoryCsv, OutputKind::Summary]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsDoc {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub k_b: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ConstantsDoc {
    fn default() -> Self {
        Self { hbar: 1.0, k_b: 1.0 }
    }
}

/// A coefficient given as a number or as an expression in `t`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoefficientDoc {
    Number(f64),
    Expression(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDoc {
    KgGeneral {
        mass: f64,
        omega0: f64,
        gamma_q: CoefficientDoc,
        gamma_p: CoefficientDoc,
        d_q: CoefficientDoc,
        d_p: CoefficientDoc,
    },
    KgThermal {
        mass: f64,
        omega0: f64,
        gamma_q: CoefficientDoc,
        gamma_p: CoefficientDoc,
        temperature: f64,
        q2_eq: f64,
        p2_eq: f64,
    },
    Ohmic {
        mass: f64,
        omega0: f64,
        gamma: f64,
        temperature: f64,
        q2_eq: f64,
        p2_eq: f64,
    },
    Drude {
        mass: f64,
        omega0: f64,
        alpha: f64,
        eta: f64,
        temperature: f64,
        q2_eq: f64,
        p2_eq: f64,
    },
    WeakCoupling {
        mass: f64,
        omega0: f64,
        gamma_s: f64,
        gamma_c: f64,
        k_s: f64,
        k_c: f64,
    },
    Agarwal {
        mass: f64,
        omega0: f64,
        kappa: f64,
        temperature: f64,
    },
    WeidlichHaake {
        mass: f64,
        omega0: f64,
        gamma_c: f64,
        #[serde(default)]
        gamma_s: f64,
        temperature: f64,
    },
    Lindblad {
        m: f64,
        omega: f64,
        lambda: f64,
        mu: f64,
        d_pp: f64,
        d_qq: f64,
        d_pq: f64,
    },
    LindbladPure {
        m: f64,
        omega: f64,
        lambda: f64,
        mu: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateDoc {
    Auto {
        #[serde(default)]
        mean_q: f64,
        #[serde(default)]
        mean_p: f64,
    },
    Moments {
        #[serde(default)]
        mean_q: f64,
        #[serde(default)]
        mean_p: f64,
        var_qq: f64,
        var_pp: f64,
        cov_pq: f64,
    },
    Ccs {
        r: f64,
        eta: f64,
        #[serde(default)]
        mean_q: f64,
        #[serde(default)]
        mean_p: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeDoc {
    pub t_end: f64,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegratorDoc {
    Rk4 { dt: Option<f64> },
    Rk45 { rel_tol: f64, abs_tol: Option<f64> },
}

impl Default for IntegratorDoc {
    fn default() -> Self {
        Self::Rk4 { dt: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    TrajectoryCsv,
    PurityReport,
    EntropyAudit,
    Summary,
}

/// Randomized check that perturbed initial states lose purity.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FalsificationDoc {
    pub trials: usize,
    #[serde(default = "default_rel_min")]
    pub rel_min: f64,
    #[serde(default = "default_rel_max")]
    pub rel_max: f64,
}

fn default_rel_min() -> f64 {
    1e-2
}

fn default_rel_max() -> f64 {
    1e-1
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub constants: PhysConstants,
    pub variant: ModelVariant,
    pub initial: GaussianState,
    pub times: Vec<f64>,
    pub integrator: IntegratorOptions,
    pub outputs: BTreeSet<OutputKind>,
    pub falsification: Option<FalsificationDoc>,
}

/// First 1-based line of `text` mentioning the JSON key `key`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn fail(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Validation { line: line_of(self.text, key), message: message.into() }
    }

    fn check<T>(&self, key: &str, r: dho_core::Result<T>) -> Result<T, CliError> {
        r.map_err(|e| self.fail(key, e.to_string()))
    }

    fn positive(&self, key: &str, v: f64) -> Result<f64, CliError> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.fail(key, format!("{key} must be positive, got {v}")))
        }
    }

    fn non_negative(&self, key: &str, v: f64) -> Result<f64, CliError> {
        if v >= 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.fail(key, format!("{key} must be non-negative, got {v}")))
        }
    }

    fn coefficient(&self, key: &str, doc: &CoefficientDoc, times: &[f64]) -> Result<CoefficientSource, CliError> {
        match doc {
            CoefficientDoc::Number(v) if v.is_finite() => Ok(CoefficientSource::Constant(*v)),
            CoefficientDoc::Number(v) => Err(self.fail(key, format!("{key} must be finite, got {v}"))),
            CoefficientDoc::Expression(src) => {
                let expr = Expr::parse(src).map_err(|e| self.fail(key, format!("{key}: {e}")))?;
                if !expr.depends_on_time() {
                    let v = expr.eval(0.0);
                    if !v.is_finite() {
                        return Err(self.fail(key, format!("{key} evaluates to {v}")));
                    }
                    return Ok(CoefficientSource::Constant(v));
                }
                // probe the sample times and the midpoints between them
                let probes = times.iter().copied().chain(times.windows(2).map(|w| 0.5 * (w[0] + w[1])));
                for t in probes {
                    let v = expr.eval(t);
                    if !v.is_finite() {
                        return Err(self.fail(key, format!("{key} is undefined at t = {t} (value {v})")));
                    }
                }
                Ok(CoefficientSource::function(move |t| expr.eval(t)))
            }
        }
    }

    fn bath(&self, temperature: f64, q2: f64, p2: f64, c: &PhysConstants) -> Result<BathSpec, CliError> {
        self.non_negative("temperature", temperature)?;
        self.positive("q2_eq", q2)?;
        self.positive("p2_eq", p2)?;
        if q2 * p2 < c.min_sigma() * (1.0 - dho_core::PURITY_REL_TOL) {
            return Err(self.fail(
                "q2_eq",
                format!("equilibrium variances violate the uncertainty relation: <q^2><p^2> = {} < hbar^2/4", q2 * p2),
            ));
        }
        self.check("q2_eq", BathSpec::new(temperature, q2, p2))
    }

    fn model(&self, doc: &ModelDoc, c: &PhysConstants, times: &[f64]) -> Result<ModelVariant, CliError> {
        let v = match doc {
            ModelDoc::KgGeneral { mass, omega0, gamma_q, gamma_p, d_q, d_p } => {
                self.positive("mass", *mass)?;
                let sources = [
                    self.coefficient("gamma_q", gamma_q, times)?,
                    self.coefficient("gamma_p", gamma_p, times)?,
                    self.coefficient("d_q", d_q, times)?,
                    self.coefficient("d_p", d_p, times)?,
                ];
                let k = match sources.iter().map(CoefficientSource::constant).collect::<Option<Vec<_>>>() {
                    Some(v) => KgCoefficients::constant(*mass, *omega0, v[0], v[1], v[2], v[3]),
                    None => {
                        let [gq, gp, dq, dp] = sources;
                        KgCoefficients::time_dependent(*mass, *omega0, gq, gp, dq, dp)
                    }
                };
                ModelVariant::KgGeneral(self.check("gamma_q", k)?)
            }
            ModelDoc::KgThermal { mass, omega0, gamma_q, gamma_p, temperature, q2_eq, p2_eq } => {
                self.positive("mass", *mass)?;
                ModelVariant::KgThermal(ThermalKg {
                    mass: *mass,
                    omega0: *omega0,
                    gamma_q: self.coefficient("gamma_q", gamma_q, times)?,
                    gamma_p: self.coefficient("gamma_p", gamma_p, times)?,
                    bath: self.bath(*temperature, *q2_eq, *p2_eq, c)?,
                })
            }
            ModelDoc::Ohmic { mass, omega0, gamma, temperature, q2_eq, p2_eq } => ModelVariant::Ohmic(OhmicDamping {
                mass: self.positive("mass", *mass)?,
                omega0: self.positive("omega0", *omega0)?,
                gamma: self.non_negative("gamma", *gamma)?,
                bath: self.bath(*temperature, *q2_eq, *p2_eq, c)?,
            }),
            ModelDoc::Drude { mass, omega0, alpha, eta, temperature, q2_eq, p2_eq } => {
                ModelVariant::Drude(DrudeDamping {
                    mass: self.positive("mass", *mass)?,
                    omega0: self.positive("omega0", *omega0)?,
                    alpha: self.non_negative("alpha", *alpha)?,
                    eta: *eta,
                    bath: self.bath(*temperature, *q2_eq, *p2_eq, c)?,
                })
            }
            ModelDoc::WeakCoupling { mass, omega0, gamma_s, gamma_c, k_s, k_c } => {
                ModelVariant::WeakCoupling(WeakCoupling {
                    mass: self.positive("mass", *mass)?,
                    omega0: self.positive("omega0", *omega0)?,
                    gamma_s: *gamma_s,
                    gamma_c: self.non_negative("gamma_c", *gamma_c)?,
                    k_s: *k_s,
                    k_c: *k_c,
                })
            }
            ModelDoc::Agarwal { mass, omega0, kappa, temperature } => ModelVariant::Agarwal(Agarwal {
                mass: self.positive("mass", *mass)?,
                omega0: self.positive("omega0", *omega0)?,
                kappa: self.positive("kappa", *kappa)?,
                temperature: self.non_negative("temperature", *temperature)?,
            }),
            ModelDoc::WeidlichHaake { mass, omega0, gamma_c, gamma_s, temperature } => {
                ModelVariant::WeidlichHaake(WeidlichHaake {
                    mass: self.positive("mass", *mass)?,
                    omega0: self.positive("omega0", *omega0)?,
                    gamma_c: self.non_negative("gamma_c", *gamma_c)?,
                    gamma_s: *gamma_s,
                    temperature: self.non_negative("temperature", *temperature)?,
                })
            }
            ModelDoc::Lindblad { m, omega, lambda, mu, d_pp, d_qq, d_pq } => {
                let p = self.check("lambda", LindbladParams::new(*m, *omega, *lambda, *mu, *d_pp, *d_qq, *d_pq))?;
                let chk = lindblad_constraint_check(&p, c);
                if !chk.passed {
                    return Err(self.fail(
                        "d_pp",
                        format!(
                            "complete-positivity constraint violated: need D_pp > 0, D_qq > 0 and \
                             D_pp*D_qq - D_pq^2 >= hbar^2*lambda^2/4 (residual {:e})",
                            chk.residual
                        ),
                    ));
                }
                ModelVariant::Lindblad(p)
            }
            ModelDoc::LindbladPure { m, omega, lambda, mu } => {
                if *omega <= mu.abs() || omega.is_nan() {
                    return Err(self.fail(
                        "mu",
                        format!("purity-preserving diffusion needs the underdamped regime omega > |mu| (omega = {omega}, mu = {mu})"),
                    ));
                }
                ModelVariant::Lindblad(
                    self.check("lambda", LindbladParams::purity_preserving(*m, *omega, *lambda, *mu, c))?,
                )
            }
        };
        // building the dynamics surfaces mapping errors (bath data, rates)
        self.check("model", v.model(c))?;
        Ok(v)
    }
}

/// Parses and validates one scenario document. `fallback_name` is used when
/// the document has no `name`.
pub fn parse_scenario(text: &str, fallback_name: &str) -> Result<Scenario, CliError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let v = Validator { text };

    let constants =
        PhysConstants::new(doc.constants.hbar, doc.constants.k_b).map_err(|e| v.fail("constants", e.to_string()))?;

    let t_end = v.positive("t_end", doc.time.t_end)?;
    if doc.time.sample_count < 2 {
        return Err(v.fail("sample_count", format!("sample_count must be >= 2, got {}", doc.time.sample_count)));
    }
    let times = uniform_grid(t_end, doc.time.sample_count);

    let variant = v.model(&doc.model, &constants, &times)?;

    let initial = match doc.initial_state {
        InitialStateDoc::Auto { mean_q, mean_p } => {
            let found = purity_preserving_initial_state(&variant, &constants)
                .map_err(|e| v.fail("initial_state", format!("auto initial state: {e}")))?;
            found
                .ok_or_else(|| v.fail("initial_state", "auto initial state: the model has no purity-preserving state"))?
                .with_means(mean_q, mean_p)
        }
        InitialStateDoc::Moments { mean_q, mean_p, var_qq, var_pp, cov_pq } => {
            GaussianState::new(mean_q, mean_p, var_qq, var_pp, cov_pq)
        }
        InitialStateDoc::Ccs { r, eta, mean_q, mean_p } => {
            GaussianState::correlated_coherent(r, eta, mean_q, mean_p, &constants)
                .map_err(|e| v.fail("initial_state", e.to_string()))?
        }
    };
    initial.purity_nu(&constants).map_err(|e| v.fail("initial_state", e.to_string()))?;

    let method = match doc.integrator {
        IntegratorDoc::Rk4 { dt: Some(dt) } => Method::Rk4 { dt: Some(v.positive("dt", dt)?) },
        IntegratorDoc::Rk4 { dt: None } => Method::Rk4 { dt: None },
        IntegratorDoc::Rk45 { rel_tol, abs_tol } => {
            let rel_tol = v.positive("rel_tol", rel_tol)?;
            let abs_tol = v.positive("abs_tol", abs_tol.unwrap_or(rel_tol * 1e-3))?;
            Method::Rk45 { rel_tol, abs_tol }
        }
    };

    if let Some(f) = doc.falsification {
        if f.trials == 0 || !(f.rel_min > 0.0 && f.rel_max >= f.rel_min && f.rel_max < 1.0) {
            return Err(v.fail("falsification", "falsification needs trials > 0 and 0 < rel_min <= rel_max < 1"));
        }
    }

    let name = doc.name.unwrap_or_else(|| fallback_name.to_string());
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(v.fail("name", format!("scenario name '{name}' cannot be used as a directory name")));
    }

    Ok(Scenario {
        name,
        constants,
        variant,
        initial,
        times,
        integrator: IntegratorOptions { method, ..IntegratorOptions::default() },
        outputs: doc.outputs.into_iter().collect(),
        falsification: doc.falsification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PURE_DOC: &str = r#"{
  "name": "pure",
  "model": { "type": "lindblad_pure", "m": 1, "omega": 1, "lambda": 0.1, "mu": 0.6 },
  "initial_state": { "type": "auto" },
  "time": { "t_end": 10, "sample_count": 11 }
}"#;

    #[test]
    fn minimal_purity_preserving_document() {
        let s = parse_scenario(PURE_DOC, "x").unwrap();
        assert_eq!(s.name, "pure");
        let ModelVariant::Lindblad(p) = s.variant else { panic!("expected Lindblad") };
        assert!((p.d_pp - 0.0625).abs() < 1e-15 && (p.d_pq + 0.0375).abs() < 1e-15);
        assert!((s.initial.var_qq - 0.625).abs() < 1e-12 && (s.initial.cov_pq + 0.375).abs() < 1e-12);
        assert_eq!(s.times.len(), 11);
    }

    #[test]
    fn constraint_breach_names_the_constraint_and_line() {
        let text = r#"{
  "model": {
    "type": "lindblad", "m": 1, "omega": 1, "lambda": 1, "mu": 0,
    "d_pp": 0.1,
    "d_qq": 0.1, "d_pq": 0
  },
  "initial_state": { "type": "ccs", "r": 0, "eta": 0.7 },
  "time": { "t_end": 1, "sample_count": 3 }
}"#;
        let err = parse_scenario(text, "x").unwrap_err();
        let CliError::Validation { line, message } = &err else { panic!("{err:?}") };
        assert_eq!(*line, Some(4));
        assert!(message.contains("complete-positivity"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_field_is_a_parse_error() {
        let text = PURE_DOC.replace("\"t_end\": 10, ", "");
        let err = parse_scenario(&text, "x").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }), "{err:?}");
        assert!(err.to_string().contains("t_end"));
    }

    #[test]
    fn overdamped_purity_preserving_request_is_rejected() {
        let text = PURE_DOC.replace("\"mu\": 0.6", "\"mu\": 1.2");
        let err = parse_scenario(&text, "x").unwrap_err();
        assert!(err.to_string().contains("omega > |mu|"), "{err}");
    }

    #[test]
    fn expressions_become_time_functions() {
        let text = r#"{
  "model": { "type": "kg_thermal", "mass": 1, "omega0": 1,
             "gamma_q": 1, "gamma_p": "0.2 * (1 - exp(-t))",
             "temperature": 0, "q2_eq": 0.55, "p2_eq": 0.5 },
  "initial_state": { "type": "moments", "var_qq": 0.55, "var_pp": 0.5, "cov_pq": 0 },
  "time": { "t_end": 5, "sample_count": 6 }
}"#;
        let s = parse_scenario(text, "thermal").unwrap();
        assert_eq!(s.name, "thermal");
        let model = s.variant.model(&s.constants).unwrap();
        assert!(!model.is_constant());

        let bad = text.replace("exp(-t)", "log(t)");
        let err = parse_scenario(&bad, "x").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("unknown identifier"));
    }

    #[test]
    fn auto_state_needs_a_purity_preserving_model() {
        let text = r#"{
  "model": { "type": "agarwal", "mass": 1, "omega0": 1, "kappa": 0.1, "temperature": 0.5 },
  "initial_state": { "type": "auto" },
  "time": { "t_end": 1, "sample_count": 3 }
}"#;
        assert!(parse_scenario(text, "x").unwrap_err().to_string().contains("no purity-preserving state"));
        let cold = text.replace("0.5 }", "0 }");
        let s = parse_scenario(&cold, "x").unwrap();
        assert_eq!(s.initial, GaussianState::centered(0.5, 0.5, 0.0));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = PURE_DOC.replace("\"mu\": 0.6", "\"mu\": 0.6, \"nu\": 2");
        assert!(matches!(parse_scenario(&text, "x"), Err(CliError::Parse { .. })));
    }
}
