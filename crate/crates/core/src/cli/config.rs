//! JSON run configuration.

use serde::Deserialize;

use crate::constitutive::{EnergyFamily3D, ExtReal, RawStress, StressFamily1D, StressLaw};
use crate::error::{Error, Result};
use crate::numerics::{OdeControls, Quadrature};
use crate::selfsim::{CavityCondition, SolverControls};
use crate::slic::{TestField, DEFAULT_LADDER};

/// Material descriptor, tagged by `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    PowerLaw {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        gamma: f64,
        beta: f64,
    },
    LinearLog {
        #[serde(rename = "L0")]
        l0: f64,
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "D")]
        d: f64,
    },
    ShiftedInversePower {
        tau_inf: f64,
        p: f64,
    },
    PurePower {
        k: f64,
        q: f64,
    },
    /// Unvalidated stress `τ(u) = L u - 1/u` with linear growth `L`, for the
    /// non-slic branch of the line problem.
    LinearGrowthReference {
        #[serde(rename = "L")]
        l: f64,
    },
}

/// A material resolved to its library type.
#[derive(Debug, Clone)]
pub enum Material {
    Radial(EnergyFamily3D),
    Line(StressLaw),
}

impl MaterialSpec {
    pub fn resolve(&self) -> Result<Material> {
        let wrap = |e: Error| Error::Config {
            key: "material".into(),
            msg: e.to_string(),
        };
        Ok(match *self {
            MaterialSpec::PowerLaw { a, b, gamma, beta } => {
                Material::Radial(EnergyFamily3D::power_law(a, b, gamma, beta).map_err(wrap)?)
            }
            MaterialSpec::LinearLog { l0, c, d } => {
                Material::Radial(EnergyFamily3D::linear_log(l0, c, d).map_err(wrap)?)
            }
            MaterialSpec::ShiftedInversePower { tau_inf, p } => Material::Line(
                StressFamily1D::shifted_inverse_power(tau_inf, p)
                    .map_err(wrap)?
                    .into(),
            ),
            MaterialSpec::PurePower { k, q } => {
                Material::Line(StressFamily1D::pure_power(k, q).map_err(wrap)?.into())
            }
            MaterialSpec::LinearGrowthReference { l } => {
                if !(l > 0.0) {
                    return Err(Error::Config {
                        key: "material.L".into(),
                        msg: format!("must be positive, got {l}"),
                    });
                }
                Material::Line(
                    RawStress::new(
                        format!("{l} u - 1/u"),
                        move |u| l * u - 1.0 / u,
                        ExtReal::Finite(l),
                        ExtReal::Infinite,
                    )
                    .into(),
                )
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CavitySpec {
    #[default]
    StressFree,
    PrescribedV0(f64),
}

impl From<CavitySpec> for CavityCondition {
    fn from(c: CavitySpec) -> Self {
        match c {
            CavitySpec::StressFree => CavityCondition::StressFree,
            CavitySpec::PrescribedV0(v) => CavityCondition::PrescribedV0(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub max_step: Option<f64>,
    pub eps_sonic: Option<f64>,
    pub quad_epsabs: Option<f64>,
    pub quad_epsrel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialSpec,
    /// Far-field stretch.
    pub lambda: Option<f64>,
    /// Inner stretch of the fracture fan.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub cavity: CavitySpec,
    /// Stretches for `sweep-lambda`.
    pub lambdas: Option<Vec<f64>>,
    /// Bracket for the critical-stretch bisection in `sweep-lambda`.
    pub lambda_bracket: Option<[f64; 2]>,
    pub lambda_tol: Option<f64>,
    /// Time for single-time reports.
    pub t: Option<f64>,
    /// Times for `energy-report`.
    pub t_values: Option<Vec<f64>>,
    /// Ball radius for energy integrals.
    pub rho: Option<f64>,
    pub n_ladder: Option<Vec<u32>>,
    /// Subset of the test-field catalogue, by name.
    pub test_fields: Option<Vec<String>>,
    /// Random sample count for `validate-material`.
    pub samples: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn cfg_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        msg: msg.into(),
    }
}

fn check_positive(key: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(cfg_err(
            key,
            format!("must be positive and finite, got {x}"),
        )),
        _ => Ok(()),
    }
}

impl RunConfig {
    /// Parse and schema-check; errors name the offending key. Material
    /// hypotheses are checked separately by [`RunConfig::radial_material`]
    /// and [`RunConfig::line_material`].
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            cfg_err(
                if path == "." { "(root)" } else { &path },
                e.into_inner().to_string(),
            )
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let t = &self.tolerances;
        for (k, v) in [
            ("tolerances.rtol", t.rtol),
            ("tolerances.atol", t.atol),
            ("tolerances.max_step", t.max_step),
            ("tolerances.eps_sonic", t.eps_sonic),
            ("tolerances.quad_epsabs", t.quad_epsabs),
            ("tolerances.quad_epsrel", t.quad_epsrel),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("lambda_tol", self.lambda_tol),
            ("t", self.t),
            ("rho", self.rho),
        ] {
            check_positive(k, v)?;
        }
        if let CavitySpec::PrescribedV0(v) = self.cavity {
            check_positive("cavity.prescribed_v0", Some(v))?;
        }
        for (i, l) in self.lambdas.iter().flatten().enumerate() {
            check_positive(&format!("lambdas[{i}]"), Some(*l))?;
        }
        for (i, l) in self.t_values.iter().flatten().enumerate() {
            check_positive(&format!("t_values[{i}]"), Some(*l))?;
        }
        if let Some([lo, hi]) = self.lambda_bracket {
            check_positive("lambda_bracket[0]", Some(lo))?;
            if !(hi > lo) {
                return Err(cfg_err(
                    "lambda_bracket",
                    format!("upper end {hi} must exceed lower end {lo}"),
                ));
            }
        }
        if let Some(l) = &self.n_ladder {
            if l.len() < 2 || l.contains(&0) || l.windows(2).any(|w| w[1] <= w[0]) {
                return Err(cfg_err(
                    "n_ladder",
                    "needs at least two strictly increasing positive levels",
                ));
            }
        }
        if let Some(names) = &self.test_fields {
            let known: Vec<&str> = TestField::radial_catalogue()
                .iter()
                .chain(TestField::line_catalogue().iter())
                .map(|f| f.name)
                .collect();
            for (i, n) in names.iter().enumerate() {
                if !known.contains(&n.as_str()) {
                    return Err(cfg_err(
                        &format!("test_fields[{i}]"),
                        format!("unknown test field `{n}`"),
                    ));
                }
            }
        }
        if self.samples == Some(0) {
            return Err(cfg_err("samples", "must be at least 1"));
        }
        self.material.resolve()?;
        Ok(())
    }

    pub fn material(&self) -> Result<Material> {
        self.material.resolve()
    }

    pub fn radial_material(&self) -> Result<EnergyFamily3D> {
        match self.material()? {
            Material::Radial(f) => {
                f.validate()
                    .into_result()
                    .map_err(|e| cfg_err("material", e.to_string()))?;
                Ok(f)
            }
            Material::Line(_) => Err(cfg_err(
                "material.kind",
                "this command needs a 3-d stored energy",
            )),
        }
    }

    pub fn line_material(&self) -> Result<StressLaw> {
        match self.material()? {
            Material::Line(l) => {
                if let StressLaw::Family(f) = &l {
                    f.validate()
                        .into_result()
                        .map_err(|e| cfg_err("material", e.to_string()))?;
                }
                Ok(l)
            }
            Material::Radial(_) => Err(cfg_err(
                "material.kind",
                "this command needs a 1-d stress law",
            )),
        }
    }

    pub fn require_lambda(&self) -> Result<f64> {
        self.lambda.ok_or_else(|| cfg_err("lambda", "missing"))
    }

    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| cfg_err("alpha", "missing"))
    }

    pub fn time(&self) -> f64 {
        self.t.unwrap_or(1.0)
    }

    pub fn ladder(&self) -> Vec<u32> {
        self.n_ladder
            .clone()
            .unwrap_or_else(|| DEFAULT_LADDER.to_vec())
    }

    pub fn solver_controls(&self) -> SolverControls {
        let t = &self.tolerances;
        let d = SolverControls::default();
        let o = OdeControls::default();
        SolverControls {
            ode: OdeControls {
                rtol: t.rtol.unwrap_or(o.rtol),
                atol: t.atol.unwrap_or(o.atol),
                max_step: t.max_step.unwrap_or(o.max_step),
                ..o
            },
            eps_sonic: t.eps_sonic.unwrap_or(d.eps_sonic),
            ..d
        }
    }

    pub fn quadrature(&self) -> Quadrature {
        let d = Quadrature::new(1e-12, 1e-9);
        Quadrature::new(
            self.tolerances.quad_epsabs.unwrap_or(d.epsabs),
            self.tolerances.quad_epsrel.unwrap_or(d.epsrel),
        )
    }

    /// Selected test fields from `catalogue`, or all of them.
    pub fn fields(&self, catalogue: &[TestField]) -> Vec<TestField> {
        match &self.test_fields {
            None => catalogue.to_vec(),
            Some(names) => catalogue
                .iter()
                .copied()
                .filter(|f| names.iter().any(|n| n == f.name))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::from_json(
            r#"{"material": {"kind": "power_law", "A": 1.0, "B": 1.0, "gamma": 1.25, "beta": 1.0}, "lambda": 3.0}"#,
        )
        .unwrap();
        assert_eq!(c.cavity, CavitySpec::StressFree);
        assert!(matches!(c.material().unwrap(), Material::Radial(_)));
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let e = RunConfig::from_json(r#"{"material": {"kind": "linear_log", "L0": 1, "C": 1, "D": 1}, "tolerances": {"rtoll": 1}}"#)
            .unwrap_err();
        match e {
            Error::Config { key, .. } => assert!(key.starts_with("tolerances"), "{key}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance_and_bad_family() {
        let e = RunConfig::from_json(
            r#"{"material": {"kind": "pure_power", "k": 1, "q": 0.5}, "tolerances": {"rtol": -1}}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Config { ref key, .. } if key == "tolerances.rtol"));
        let e = RunConfig::from_json(
            r#"{"material": {"kind": "power_law", "A": 1, "B": -1, "gamma": 1.5, "beta": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Config { ref key, .. } if key == "material"));
        let c = RunConfig::from_json(
            r#"{"material": {"kind": "power_law", "A": 1, "B": 1, "gamma": 2.5, "beta": 1}}"#,
        )
        .unwrap();
        let e = c.radial_material().unwrap_err();
        assert!(e.to_string().contains("gamma"), "{e}");
        assert!(c.line_material().is_err());
    }

    #[test]
    fn prescribed_cavity_volume() {
        let c = RunConfig::from_json(
            r#"{"material": {"kind": "linear_log", "L0": 1, "C": 1, "D": 1}, "cavity": {"prescribed_v0": 0.8}}"#,
        )
        .unwrap();
        assert_eq!(c.cavity, CavitySpec::PrescribedV0(0.8));
    }
}
