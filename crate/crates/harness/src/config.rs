//! TOML experiment configuration and its validation.
//!
//! A config names one scenario: a model, a target (density points, a tail
//! set, or overshoot thresholds), the grid of `ns` × `draws`, and the
//! methods to run. Validation resolves everything into library types up
//! front so a run never fails on a malformed field halfway through.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spis_core::{BaselineKind, Family, ISOverrides, Matrix, Sign, TailSet};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SPIS")]
    Spis,
    Naive,
    #[serde(rename = "CMC")]
    Cmc,
    #[serde(rename = "OET")]
    Oet,
    #[serde(rename = "BGL")]
    Bgl,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Spis => "SPIS",
            Method::Naive => "Naive",
            Method::Cmc => "CMC",
            Method::Oet => "OET",
            Method::Bgl => "BGL",
        }
    }

    pub fn baseline(self) -> Option<BaselineKind> {
        match self {
            Method::Spis => None,
            Method::Naive => Some(BaselineKind::Naive),
            Method::Cmc => Some(BaselineKind::Cmc),
            Method::Oet => Some(BaselineKind::Oet),
            Method::Bgl => Some(BaselineKind::Bgl),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub description: Option<String>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub ns: Vec<usize>,
    pub draws: Vec<usize>,
    pub methods: Vec<Method>,
    /// Method whose per-draw variance is the numerator of the variance
    /// reduction column.
    pub reference: Option<Method>,
    #[serde(default)]
    pub antithetic: bool,
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub target: TargetSpec,
    #[serde(default)]
    pub is_params: IsParamsSpec,
    /// BGL freeze multiplier.
    pub freeze_multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: FamilyName,
    pub rate: Option<f64>,
    pub shape: Option<f64>,
    pub scale: Option<f64>,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// Number of iid copies stacked into a vector (default 1).
    pub dim: Option<usize>,
    /// Optional row-major dim × dim matrix B; the model becomes B·X.
    pub matrix: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Exponential,
    Gamma,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Density { points: Vec<Vec<f64>> },
    Tail { set: SetSpec },
    Overshoot { thresholds: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    FullOrthant { x0: Vec<f64> },
    PartialOrthant { x0: Vec<f64>, dims: usize },
    AffineOrthant { x0: Vec<f64>, matrix: Vec<f64> },
    Rectangle { x0: Vec<f64>, widths: Vec<f64> },
    Signed { terms: Vec<TermSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub sign: String,
    #[serde(flatten)]
    pub set: SetSpec,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsParamsSpec {
    pub alpha: Option<f64>,
    pub radius: Option<f64>,
    pub core_mass: Option<f64>,
    pub core_scale: Option<f64>,
    pub schedule_xi: Option<f64>,
}

impl From<IsParamsSpec> for ISOverrides<f64> {
    fn from(s: IsParamsSpec) -> Self {
        ISOverrides {
            alpha: s.alpha,
            radius: s.radius,
            core_mass: s.core_mass,
            core_scale: s.core_scale,
            schedule_xi: s.schedule_xi,
        }
    }
}

/// The resolved target.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Density(Vec<Vec<f64>>),
    Tail(TailSet<f64>),
    Overshoot(Vec<f64>),
}

/// A config whose model and target have been built and checked.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub config: ExperimentConfig,
    pub model: Family<f64>,
    pub target: Target,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        if self.scenario.trim().is_empty() {
            return Err(invalid("scenario", "must not be empty"));
        }
        if self.ns.is_empty() {
            return Err(invalid("ns", "must list at least one n"));
        }
        if let Some(i) = self.ns.iter().position(|&n| n == 0) {
            return Err(invalid(format!("ns[{i}]"), "n must be at least 1"));
        }
        if self.draws.is_empty() {
            return Err(invalid("draws", "must list at least one draw count"));
        }
        if let Some(i) = self.draws.iter().position(|&n| n < 2) {
            return Err(invalid(format!("draws[{i}]"), "at least 2 draws are needed"));
        }
        if self.methods.is_empty() {
            return Err(invalid("methods", "must list at least one method"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }
        if let Some(r) = self.reference {
            if !self.methods.contains(&r) {
                return Err(invalid("reference", format!("{} is not in `methods`", r.label())));
            }
        }
        if let Some(f) = self.freeze_multiplier {
            if f.is_nan() || f <= 1.0 {
                return Err(invalid("freeze_multiplier", "must exceed 1"));
            }
        }
        let model = build_model(&self.model)?;
        let d = spis_core::CumulantModel::dim(&model);
        let target = build_target(&self.target, d)?;
        for (i, &m) in self.methods.iter().enumerate() {
            check_admissible(m, &target, &model).map_err(|msg| invalid(format!("methods[{i}]"), msg))?;
        }
        Ok(ValidatedConfig {
            config: self,
            model,
            target,
        })
    }
}

fn need(value: Option<f64>, path: &str) -> Result<f64, ConfigError> {
    value.ok_or_else(|| invalid(path, "required for this family"))
}

fn build_model(spec: &ModelSpec) -> Result<Family<f64>, ConfigError> {
    let lib = |e: spis_core::Error| invalid("model", e.to_string());
    let scalar = match spec.family {
        FamilyName::Exponential => Family::exponential(need(spec.rate, "model.rate")?),
        FamilyName::Gamma => Family::gamma(need(spec.shape, "model.shape")?, spec.scale.unwrap_or(1.0)),
        FamilyName::Normal => Family::normal(spec.mean.unwrap_or(0.0), need(spec.variance, "model.variance")?),
    }
    .map_err(lib)?;
    let d = spec.dim.unwrap_or(1);
    if d == 0 {
        return Err(invalid("model.dim", "must be at least 1"));
    }
    let base = if d == 1 && spec.matrix.is_none() {
        scalar
    } else {
        Family::iid(scalar, d).map_err(lib)?
    };
    match &spec.matrix {
        None => Ok(base),
        Some(data) => {
            let m = square(data, d, "model.matrix")?;
            Family::linear_map(base, m).map_err(|e| invalid("model.matrix", e.to_string()))
        }
    }
}

fn square(data: &[f64], d: usize, path: &str) -> Result<Matrix<f64>, ConfigError> {
    Matrix::from_row_major(d, d, data.to_vec()).ok_or_else(|| {
        invalid(
            path,
            format!("expected {} entries (row-major {d}x{d}), got {}", d * d, data.len()),
        )
    })
}

fn check_len(v: &[f64], d: usize, path: &str) -> Result<(), ConfigError> {
    if v.len() != d {
        return Err(invalid(path, format!("expected {d} coordinates, got {}", v.len())));
    }
    if v.iter().any(|x| x.is_nan()) {
        return Err(invalid(path, "NaN coordinate"));
    }
    Ok(())
}

fn build_target(spec: &TargetSpec, d: usize) -> Result<Target, ConfigError> {
    match spec {
        TargetSpec::Density { points } => {
            if points.is_empty() {
                return Err(invalid("target.points", "must list at least one point"));
            }
            for (i, p) in points.iter().enumerate() {
                check_len(p, d, &format!("target.points[{i}]"))?;
            }
            Ok(Target::Density(points.clone()))
        }
        TargetSpec::Tail { set } => Ok(Target::Tail(build_set(set, d, "target.set")?)),
        TargetSpec::Overshoot { thresholds } => {
            if d != 1 {
                return Err(invalid("target", "overshoot needs a one-dimensional model"));
            }
            if thresholds.is_empty() {
                return Err(invalid("target.thresholds", "must list at least one threshold"));
            }
            Ok(Target::Overshoot(thresholds.clone()))
        }
    }
}

fn build_set(spec: &SetSpec, d: usize, path: &str) -> Result<TailSet<f64>, ConfigError> {
    let lib = |e: spis_core::Error| invalid(path, e.to_string());
    match spec {
        SetSpec::FullOrthant { x0 } => {
            check_len(x0, d, &format!("{path}.x0"))?;
            Ok(TailSet::full_orthant(x0.clone()))
        }
        SetSpec::PartialOrthant { x0, dims } => {
            check_len(x0, d, &format!("{path}.x0"))?;
            if *dims == 0 || *dims > d {
                return Err(invalid(format!("{path}.dims"), format!("must lie in 1..={d}")));
            }
            TailSet::partial_orthant(x0.clone(), *dims).map_err(lib)
        }
        SetSpec::AffineOrthant { x0, matrix } => {
            check_len(x0, d, &format!("{path}.x0"))?;
            let m = square(matrix, d, &format!("{path}.matrix"))?;
            TailSet::affine_orthant(x0.clone(), m).map_err(lib)
        }
        SetSpec::Rectangle { x0, widths } => {
            check_len(x0, d, &format!("{path}.x0"))?;
            check_len(widths, d, &format!("{path}.widths"))?;
            TailSet::rectangle(x0.clone(), widths.clone()).map_err(lib)
        }
        SetSpec::Signed { terms } => {
            if terms.is_empty() {
                return Err(invalid(format!("{path}.terms"), "must list at least one term"));
            }
            let mut out = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let tp = format!("{path}.terms[{i}]");
                let sign = match t.sign.as_str() {
                    "+" | "plus" => Sign::Plus,
                    "-" | "minus" => Sign::Minus,
                    other => {
                        return Err(invalid(
                            format!("{tp}.sign"),
                            format!("expected \"+\" or \"-\", got {other:?}"),
                        ))
                    }
                };
                if matches!(t.set, SetSpec::Signed { .. }) {
                    return Err(invalid(tp, "signed combinations cannot be nested"));
                }
                out.push((sign, build_set(&t.set, d, &tp)?));
            }
            TailSet::signed(out).map_err(lib)
        }
    }
}

fn check_admissible(method: Method, target: &Target, model: &Family<f64>) -> Result<(), String> {
    use spis_core::CumulantModel;
    let ok = match (method, target) {
        (Method::Spis, _) => true,
        (Method::Cmc, Target::Density(_)) => model.dim() == 1 && model.density(model.mean()[0]).is_some(),
        (Method::Naive, Target::Tail(_)) => true,
        (Method::Oet, Target::Tail(set)) => !set.is_signed(),
        (Method::Bgl, Target::Tail(TailSet::FullOrthant { x0 })) => x0.len() == 1,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        let what = match target {
            Target::Density(_) => "a density target",
            Target::Tail(_) => "this tail set",
            Target::Overshoot(_) => "an overshoot target",
        };
        Err(format!("{} is not admissible for {what}", method.label()))
    }
}
