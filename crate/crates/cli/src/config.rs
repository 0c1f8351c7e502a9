//! Run configuration: a JSON document with fixed top-level blocks. Unknown keys
//! are rejected everywhere.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use stefan_core::coefficients::{
    BoundaryCondition, CoefficientBounds, ConstantCoefficients, FixedFace, LinearCoefficients, TabulatedCoefficients,
    ThermalCoefficients, ThermalModel,
};
use stefan_core::fixed_point::InnerSettings;
use stefan_core::lambda_solver::SolverSettings;
use stefan_core::pde_verifier::FrontFixedScheme;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bc: FixedFace,
    pub coefficients: CoefficientsConfig,
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub verify: Option<FrontFixedScheme>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientsConfig {
    /// Missing `k` and `rho_c` default to the reference values. The convective
    /// speed is given either directly as `mu` or as a Peclet number `pe`.
    Constant {
        #[serde(default)]
        k: Option<f64>,
        #[serde(default)]
        rho_c: Option<f64>,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        pe: Option<f64>,
        #[serde(default)]
        bounds: Option<CoefficientBounds>,
    },
    /// Affine in `theta = (T - t_ref) / (T_m - t_ref)`; `t_ref` defaults to the
    /// ambient temperature.
    Linear {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        pe: f64,
        #[serde(default)]
        t_ref: Option<f64>,
        #[serde(default)]
        bounds: Option<CoefficientBounds>,
    },
    /// CSV file with header `T,k,rho_c,mu`, relative to the config file.
    Table {
        path: PathBuf,
        #[serde(default)]
        bounds: Option<CoefficientBounds>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub k0: f64,
    pub rho0: f64,
    pub c0: f64,
    pub ell: f64,
    #[serde(rename = "T_m")]
    pub t_melt: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub grid: usize,
    pub inner_tol: f64,
    pub outer_tol: f64,
    pub max_iter: usize,
    pub lambda_max: f64,
    pub scan_intervals: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            grid: s.grid,
            inner_tol: s.inner.tol,
            outer_tol: s.outer_tol,
            max_iter: s.inner.max_iter,
            lambda_max: s.lambda_max,
            scan_intervals: s.scan_intervals,
        }
    }
}

impl NumericsConfig {
    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            grid: self.grid,
            inner: InnerSettings { tol: self.inner_tol, max_iter: self.max_iter },
            outer_tol: self.outer_tol,
            lambda_max: self.lambda_max,
            scan_intervals: self.scan_intervals,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    /// Output directory; `--out` takes precedence.
    pub dir: PathBuf,
    pub profile_csv: String,
    pub field_csv: String,
    pub front_csv: String,
    /// Times at which the temperature field is sampled.
    pub field_times: Vec<f64>,
    /// Intervals per sampled field, spanning `[0, s(t)]`.
    pub field_points: usize,
    pub front_times: Vec<f64>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            profile_csv: "profile.csv".into(),
            field_csv: "field.csv".into(),
            front_csv: "front.csv".into(),
            field_times: vec![1.0],
            field_points: 100,
            front_times: (1..=10).map(|i| i as f64 * 0.1).collect(),
        }
    }
}

/// Cartesian grid over scalar config entries addressed by dotted paths such as
/// `bc.h` or `coefficients.beta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameters: Vec<SweepAxis>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<f64>,
}

/// A parsed configuration together with its raw JSON, which sweeps rewrite.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub raw: serde_json::Value,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_str(&text, base_dir)
    }

    pub fn from_str(text: &str, base_dir: PathBuf) -> Result<Self, CliError> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
        let config = parse(&raw)?;
        Ok(Self { config, raw, base_dir })
    }
}

pub fn parse(raw: &serde_json::Value) -> Result<RunConfig, CliError> {
    let config: RunConfig = serde_json::from_value(raw.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    config.numerics.settings().validate().map_err(|e| CliError::Config(format!("numerics: {e}")))?;
    if config.outputs.field_points == 0 {
        return Err(CliError::Config("outputs.field_points must be at least 1".into()));
    }
    if let Some(t) = config.outputs.field_times.iter().chain(&config.outputs.front_times).find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::Config(format!("output times must be positive, got {t}")));
    }
    if let Some(scheme) = &config.verify {
        scheme.validate().map_err(|e| CliError::Config(format!("verify: {e}")))?;
    }
    Ok(config)
}

impl RunConfig {
    pub fn boundary(&self) -> BoundaryCondition {
        BoundaryCondition { t_melt: self.reference.t_melt, face: self.bc }
    }

    /// Physical model; table paths are resolved against `base_dir`.
    pub fn model(&self, base_dir: &Path) -> Result<ThermalModel, CliError> {
        let r = &self.reference;
        let stage = "coefficients";
        let (coefficients, bounds): (Arc<dyn ThermalCoefficients>, Option<CoefficientBounds>) = match &self.coefficients {
            CoefficientsConfig::Constant { k, rho_c, mu, pe, bounds } => {
                let mu = match (mu, pe) {
                    (Some(_), Some(_)) => return Err(CliError::Config("coefficients: give either mu or pe, not both".into())),
                    (Some(m), None) => *m,
                    (None, Some(p)) => p * (r.rho0 * r.c0 * r.k0).sqrt(),
                    (None, None) => 0.0,
                };
                let c = ConstantCoefficients::new(k.unwrap_or(r.k0), rho_c.unwrap_or(r.rho0 * r.c0), mu)
                    .map_err(|e| CliError::core(stage, e))?;
                (Arc::new(c), *bounds)
            }
            CoefficientsConfig::Linear { alpha, beta, pe, t_ref, bounds } => {
                let t_ref = match (*t_ref, self.boundary().t_star()) {
                    (Some(t), _) | (None, Some(t)) => t,
                    (None, None) => {
                        return Err(CliError::Config("coefficients.t_ref is required for the neumann condition".into()))
                    }
                };
                let c = LinearCoefficients::from_reference(r.k0, r.rho0, r.c0, *alpha, *beta, *pe, t_ref, r.t_melt)
                    .map_err(|e| CliError::core(stage, e))?;
                (Arc::new(c), *bounds)
            }
            CoefficientsConfig::Table { path, bounds } => {
                let full = base_dir.join(path);
                if !full.is_file() {
                    return Err(CliError::Config(format!("coefficient table {} does not exist", full.display())));
                }
                (Arc::new(TabulatedCoefficients::from_path(&full).map_err(|e| CliError::core(stage, e))?), *bounds)
            }
        };
        let model = ThermalModel::new(coefficients, r.k0, r.rho0, r.c0, r.ell).map_err(|e| CliError::core("reference", e))?;
        match bounds {
            Some(b) => model.with_bounds(b).map_err(|e| CliError::core(stage, e)),
            None => Ok(model),
        }
    }
}

/// Sets the scalar at a dotted path, which must already exist or belong to an
/// existing object.
pub fn set_path(raw: &mut serde_json::Value, path: &str, value: f64) -> Result<(), CliError> {
    let mut node = raw;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("sweep path `{path}`: `{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            let number = serde_json::Number::from_f64(value)
                .ok_or_else(|| CliError::Config(format!("sweep path `{path}`: value {value} is not finite")))?;
            obj.insert((*part).to_owned(), serde_json::Value::Number(number));
            return Ok(());
        }
        node = obj
            .get_mut(*part)
            .ok_or_else(|| CliError::Config(format!("sweep path `{path}`: no block `{part}`")))?;
    }
    Err(CliError::Config("sweep path is empty".into()))
}
