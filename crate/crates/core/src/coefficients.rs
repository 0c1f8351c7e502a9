//! Dimensional thermal coefficients and their reduction to the dimensionless
//! functions `L*`, `N*`, `mu*` of the profile value.
//!
//! A [`ThermalModel`] pairs a coefficient family with the reference constants
//! `k0`, `rho0`, `c0` and the latent heat. [`build_dimensionless`] composes the
//! coefficients with the temperature map of the chosen boundary condition and
//! scales their bounds and Lipschitz constants into a [`DimensionlessProblem`].

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryRegistry, BoundaryStrategy};
use crate::error::{non_negative, positive, Error, Result};

/// Temperature-dependent conductivity `k`, volumetric heat capacity `rho c`
/// and convective speed amplitude `mu` (the velocity is `mu(T) / sqrt(t)`).
pub trait ThermalCoefficients: Send + Sync + fmt::Debug {
    fn family(&self) -> &'static str;
    fn conductivity(&self, t: f64) -> f64;
    fn heat_capacity(&self, t: f64) -> f64;
    fn convective_speed(&self, t: f64) -> f64;

    /// Exact bounds on `[lo, hi]` when the family admits them.
    fn analytic_bounds(&self, _lo: f64, _hi: f64) -> Option<CoefficientBounds> {
        None
    }

    /// Temperatures where the coefficients have kinks; added to sample sets.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Bounds and Lipschitz constants of the dimensional coefficients over a
/// temperature range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientBounds {
    pub k_min: f64,
    pub k_max: f64,
    pub k_lip: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_lip: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    pub nu_lip: f64,
}

impl CoefficientBounds {
    pub fn validate(&self) -> Result<()> {
        positive("k_min", self.k_min)?;
        positive("gamma_min", self.gamma_min)?;
        non_negative("nu_min", self.nu_min)?;
        for (name, lo, hi) in [
            ("k_max", self.k_min, self.k_max),
            ("gamma_max", self.gamma_min, self.gamma_max),
            ("nu_max", self.nu_min, self.nu_max),
        ] {
            if !(hi.is_finite() && hi >= lo) {
                return Err(Error::InvalidParameter {
                    name,
                    value: hi,
                    reason: "must be finite and not below the matching minimum",
                });
            }
        }
        non_negative("k_lip", self.k_lip)?;
        non_negative("gamma_lip", self.gamma_lip)?;
        non_negative("nu_lip", self.nu_lip)?;
        Ok(())
    }
}

/// Where the bounds of a problem came from. Only `Supplied` and `Analytic`
/// bounds can back a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsSource {
    Supplied,
    Analytic,
    Sampled,
}

impl BoundsSource {
    pub fn is_certified(self) -> bool {
        !matches!(self, BoundsSource::Sampled)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoefficients {
    pub k: f64,
    pub rho_c: f64,
    pub mu: f64,
}

impl ConstantCoefficients {
    pub fn new(k: f64, rho_c: f64, mu: f64) -> Result<Self> {
        Ok(Self {
            k: positive("k", k)?,
            rho_c: positive("rho_c", rho_c)?,
            mu: non_negative("mu", mu)?,
        })
    }

    /// Reference-valued coefficients whose dimensionless speed equals `pe`.
    pub fn from_peclet(k0: f64, rho0: f64, c0: f64, pe: f64) -> Result<Self> {
        Self::new(k0, rho0 * c0, pe * (rho0 * c0 * k0).sqrt())
    }
}

impl ThermalCoefficients for ConstantCoefficients {
    fn family(&self) -> &'static str {
        "constant"
    }
    fn conductivity(&self, _t: f64) -> f64 {
        self.k
    }
    fn heat_capacity(&self, _t: f64) -> f64 {
        self.rho_c
    }
    fn convective_speed(&self, _t: f64) -> f64 {
        self.mu
    }
    fn analytic_bounds(&self, _lo: f64, _hi: f64) -> Option<CoefficientBounds> {
        Some(CoefficientBounds {
            k_min: self.k,
            k_max: self.k,
            k_lip: 0.0,
            gamma_min: self.rho_c,
            gamma_max: self.rho_c,
            gamma_lip: 0.0,
            nu_min: self.mu,
            nu_max: self.mu,
            nu_lip: 0.0,
        })
    }
}

/// Coefficients affine in `theta = (T - t_ref) / (t_melt - t_ref)`:
/// `k = k_ref (1 + beta theta)`, `rho c = rho_c_ref (1 + alpha theta)`,
/// `mu = mu_ref (1 + alpha theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCoefficients {
    pub k_ref: f64,
    pub rho_c_ref: f64,
    pub mu_ref: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t_ref: f64,
    pub t_melt: f64,
}

impl LinearCoefficients {
    pub fn new(
        k_ref: f64,
        rho_c_ref: f64,
        mu_ref: f64,
        alpha: f64,
        beta: f64,
        t_ref: f64,
        t_melt: f64,
    ) -> Result<Self> {
        if !(t_ref.is_finite() && t_melt.is_finite()) || t_ref == t_melt {
            return Err(Error::InvalidParameter {
                name: "t_ref",
                value: t_ref,
                reason: "anchor temperatures must be finite and distinct",
            });
        }
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha, reason: "must exceed -1" });
        }
        if !(beta.is_finite() && beta > -1.0) {
            return Err(Error::InvalidParameter { name: "beta", value: beta, reason: "must exceed -1" });
        }
        Ok(Self {
            k_ref: positive("k_ref", k_ref)?,
            rho_c_ref: positive("rho_c_ref", rho_c_ref)?,
            mu_ref: non_negative("mu_ref", mu_ref)?,
            alpha,
            beta,
            t_ref,
            t_melt,
        })
    }

    /// The family anchored at the reference constants, with `theta` running
    /// from 0 at `t_ref` to 1 at `t_melt` and dimensionless speed `pe`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_reference(
        k0: f64,
        rho0: f64,
        c0: f64,
        alpha: f64,
        beta: f64,
        pe: f64,
        t_ref: f64,
        t_melt: f64,
    ) -> Result<Self> {
        let pe = non_negative("pe", pe)?;
        Self::new(k0, rho0 * c0, pe * (rho0 * c0 * k0).sqrt(), alpha, beta, t_ref, t_melt)
    }

    fn theta(&self, t: f64) -> f64 {
        (t - self.t_ref) / (self.t_melt - self.t_ref)
    }
}

impl ThermalCoefficients for LinearCoefficients {
    fn family(&self) -> &'static str {
        "linear"
    }
    fn conductivity(&self, t: f64) -> f64 {
        self.k_ref * (1.0 + self.beta * self.theta(t))
    }
    fn heat_capacity(&self, t: f64) -> f64 {
        self.rho_c_ref * (1.0 + self.alpha * self.theta(t))
    }
    fn convective_speed(&self, t: f64) -> f64 {
        self.mu_ref * (1.0 + self.alpha * self.theta(t))
    }
    fn analytic_bounds(&self, lo: f64, hi: f64) -> Option<CoefficientBounds> {
        let span = (self.t_melt - self.t_ref).abs();
        let ends = |g: &dyn Fn(f64) -> f64| {
            let (a, b) = (g(lo), g(hi));
            (a.min(b), a.max(b))
        };
        let (k_min, k_max) = ends(&|t| self.conductivity(t));
        let (gamma_min, gamma_max) = ends(&|t| self.heat_capacity(t));
        let (nu_min, nu_max) = ends(&|t| self.convective_speed(t));
        Some(CoefficientBounds {
            k_min,
            k_max,
            k_lip: self.k_ref * self.beta.abs() / span,
            gamma_min,
            gamma_max,
            gamma_lip: self.rho_c_ref * self.alpha.abs() / span,
            nu_min,
            nu_max,
            nu_lip: self.mu_ref * self.alpha.abs() / span,
        })
    }
}

/// Piecewise-linear coefficient table, clamped to the end values outside the
/// tabulated temperature range.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCoefficients {
    t: Vec<f64>,
    k: Vec<f64>,
    rho_c: Vec<f64>,
    mu: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct TableRow {
    #[serde(rename = "T")]
    t: f64,
    k: f64,
    rho_c: f64,
    mu: f64,
}

impl TabulatedCoefficients {
    pub fn new(t: Vec<f64>, k: Vec<f64>, rho_c: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 2 || k.len() != n || rho_c.len() != n || mu.len() != n {
            return Err(Error::InvalidInput(format!(
                "coefficient table needs at least two rows of equal length (got T:{n} k:{} rho_c:{} mu:{})",
                k.len(),
                rho_c.len(),
                mu.len()
            )));
        }
        for i in 0..n {
            if !t[i].is_finite() || (i > 0 && t[i] <= t[i - 1]) {
                return Err(Error::InvalidInput(format!(
                    "coefficient table T column must be finite and strictly increasing (row {})",
                    i + 1
                )));
            }
            for (name, v, strict) in [("k", k[i], true), ("rho_c", rho_c[i], true), ("mu", mu[i], false)] {
                if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                    return Err(Error::CoefficientEvaluation { name, temperature: t[i], value: v });
                }
            }
        }
        Ok(Self { t, k, rho_c, mu })
    }

    /// Reads a CSV table with header `T,k,rho_c,mu`.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["T", "k", "rho_c", "mu"];
        if headers.len() != expected.len() || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::InvalidInput(format!(
                "coefficient table header must be `T,k,rho_c,mu`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut t, mut k, mut rho_c, mut mu) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for row in rdr.deserialize() {
            let row: TableRow = row?;
            t.push(row.t);
            k.push(row.k);
            rho_c.push(row.rho_c);
            mu.push(row.mu);
        }
        Self::new(t, k, rho_c, mu)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.t
    }

    fn interp(&self, values: &[f64], t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return values[0];
        }
        if t >= self.t[n - 1] {
            return values[n - 1];
        }
        let j = self.t.partition_point(|&x| x <= t);
        let (t0, t1) = (self.t[j - 1], self.t[j]);
        let w = (t - t0) / (t1 - t0);
        values[j - 1] + w * (values[j] - values[j - 1])
    }
}

impl ThermalCoefficients for TabulatedCoefficients {
    fn family(&self) -> &'static str {
        "table"
    }
    fn conductivity(&self, t: f64) -> f64 {
        self.interp(&self.k, t)
    }
    fn heat_capacity(&self, t: f64) -> f64 {
        self.interp(&self.rho_c, t)
    }
    fn convective_speed(&self, t: f64) -> f64 {
        self.interp(&self.mu, t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.t.clone()
    }
}

/// Coefficient family plus reference constants.
#[derive(Debug, Clone)]
pub struct ThermalModel {
    pub coefficients: Arc<dyn ThermalCoefficients>,
    pub k0: f64,
    pub rho0: f64,
    pub c0: f64,
    /// Latent heat per unit mass.
    pub ell: f64,
    /// User-supplied bounds; when absent they are derived or estimated.
    pub bounds: Option<CoefficientBounds>,
}

impl ThermalModel {
    pub fn new(coefficients: Arc<dyn ThermalCoefficients>, k0: f64, rho0: f64, c0: f64, ell: f64) -> Result<Self> {
        Ok(Self {
            coefficients,
            k0: positive("k0", k0)?,
            rho0: positive("rho0", rho0)?,
            c0: positive("c0", c0)?,
            ell: positive("ell", ell)?,
            bounds: None,
        })
    }

    pub fn with_bounds(mut self, bounds: CoefficientBounds) -> Result<Self> {
        bounds.validate()?;
        self.bounds = Some(bounds);
        Ok(self)
    }

    /// Reference diffusivity `k0 / (rho0 c0)`.
    pub fn alpha0(&self) -> f64 {
        self.k0 / (self.rho0 * self.c0)
    }

    pub fn k(&self, t: f64) -> f64 {
        self.coefficients.conductivity(t)
    }
    pub fn rho_c(&self, t: f64) -> f64 {
        self.coefficients.heat_capacity(t)
    }
    pub fn mu(&self, t: f64) -> f64 {
        self.coefficients.convective_speed(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
    Radiative,
}

impl BcKind {
    pub const ALL: [BcKind; 4] = [BcKind::Dirichlet, BcKind::Neumann, BcKind::Robin, BcKind::Radiative];

    pub fn name(self) -> &'static str {
        match self {
            BcKind::Dirichlet => "dirichlet",
            BcKind::Neumann => "neumann",
            BcKind::Robin => "robin",
            BcKind::Radiative => "radiative",
        }
    }
}

impl fmt::Display for BcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Condition imposed at the fixed face `x = 0`. Flux-type data are amplitudes
/// of `1/sqrt(t)` signals, as required for similarity solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FixedFace {
    /// Prescribed temperature `t_star`.
    Dirichlet { t_star: f64 },
    /// Prescribed incoming heat flux `q / sqrt(t)`.
    Neumann { q: f64 },
    /// Convective exchange with an ambient at `t_star`, coefficient `h / sqrt(t)`.
    Robin { h: f64, t_star: f64 },
    /// Convective plus radiative exchange with an ambient at `t_star`.
    Radiative { h: f64, sigma: f64, epsilon: f64, t_star: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub t_melt: f64,
    pub face: FixedFace,
}

/// Affine map `T = slope * theta + offset` from the profile value to temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureMap {
    pub slope: f64,
    pub offset: f64,
}

impl TemperatureMap {
    pub fn temperature(&self, theta: f64) -> f64 {
        self.slope * theta + self.offset
    }
    pub fn theta(&self, t: f64) -> f64 {
        (t - self.offset) / self.slope
    }
    /// Factor converting a Lipschitz constant in `T` into one in `theta`.
    pub fn scale(&self) -> f64 {
        self.slope.abs()
    }
    /// Temperature interval covered by `theta` in `[0, 1]`.
    pub fn unit_range(&self) -> (f64, f64) {
        let (a, b) = (self.temperature(0.0), self.temperature(1.0));
        (a.min(b), a.max(b))
    }
}

impl BoundaryCondition {
    pub fn dirichlet(t_melt: f64, t_star: f64) -> Self {
        Self { t_melt, face: FixedFace::Dirichlet { t_star } }
    }
    pub fn neumann(t_melt: f64, q: f64) -> Self {
        Self { t_melt, face: FixedFace::Neumann { q } }
    }
    pub fn robin(t_melt: f64, h: f64, t_star: f64) -> Self {
        Self { t_melt, face: FixedFace::Robin { h, t_star } }
    }
    pub fn radiative(t_melt: f64, h: f64, sigma: f64, epsilon: f64, t_star: f64) -> Self {
        Self { t_melt, face: FixedFace::Radiative { h, sigma, epsilon, t_star } }
    }

    pub fn kind(&self) -> BcKind {
        match self.face {
            FixedFace::Dirichlet { .. } => BcKind::Dirichlet,
            FixedFace::Neumann { .. } => BcKind::Neumann,
            FixedFace::Robin { .. } => BcKind::Robin,
            FixedFace::Radiative { .. } => BcKind::Radiative,
        }
    }

    pub fn t_star(&self) -> Option<f64> {
        match self.face {
            FixedFace::Dirichlet { t_star }
            | FixedFace::Robin { t_star, .. }
            | FixedFace::Radiative { t_star, .. } => Some(t_star),
            FixedFace::Neumann { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t_melt.is_finite() {
            return Err(Error::InvalidParameter { name: "T_m", value: self.t_melt, reason: "must be finite" });
        }
        if let Some(t_star) = self.t_star() {
            if !(t_star.is_finite() && t_star > self.t_melt) {
                return Err(Error::InvalidParameter {
                    name: "T_star",
                    value: t_star,
                    reason: "must exceed the melting temperature",
                });
            }
        }
        match self.face {
            FixedFace::Dirichlet { .. } => {}
            FixedFace::Neumann { q } => {
                positive("q", q)?;
                positive("T_m", self.t_melt)?;
            }
            FixedFace::Robin { h, .. } => {
                non_negative("h", h)?;
            }
            FixedFace::Radiative { h, sigma, epsilon, .. } => {
                non_negative("h", h)?;
                positive("sigma", sigma)?;
                non_negative("epsilon", epsilon)?;
            }
        }
        Ok(())
    }

    /// Profile-to-temperature map: `(T_m - T*) theta + T*` for conditions with
    /// an ambient temperature, `T_m theta + T_m` for the flux condition.
    pub fn temperature_map(&self) -> TemperatureMap {
        match self.t_star() {
            Some(t_star) => TemperatureMap { slope: self.t_melt - t_star, offset: t_star },
            None => TemperatureMap { slope: self.t_melt, offset: self.t_melt },
        }
    }
}

/// Bounds and Lipschitz constants of `L*`, `N*`, `mu*` on `f` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub l_min: f64,
    pub l_max: f64,
    pub l_lip: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub n_lip: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_lip: f64,
}

impl ProblemConstants {
    pub fn validate(&self) -> Result<()> {
        CoefficientBounds {
            k_min: self.l_min,
            k_max: self.l_max,
            k_lip: self.l_lip,
            gamma_min: self.n_min,
            gamma_max: self.n_max,
            gamma_lip: self.n_lip,
            nu_min: self.mu_min,
            nu_max: self.mu_max,
            nu_lip: self.mu_lip,
        }
        .validate()
    }

    pub fn from_bounds(model: &ThermalModel, map: &TemperatureMap, b: &CoefficientBounds) -> Self {
        let rho_c0 = model.rho0 * model.c0;
        let mu_scale = (rho_c0 * model.k0).sqrt();
        let s = map.scale();
        Self {
            l_min: b.k_min / model.k0,
            l_max: b.k_max / model.k0,
            l_lip: b.k_lip * s / model.k0,
            n_min: b.gamma_min / rho_c0,
            n_max: b.gamma_max / rho_c0,
            n_lip: b.gamma_lip * s / rho_c0,
            mu_min: b.nu_min / mu_scale,
            mu_max: b.nu_max / mu_scale,
            mu_lip: b.nu_lip * s / mu_scale,
        }
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The dimensionless problem consumed by the solver: coefficient functions of
/// the profile value, their constants, and the boundary strategy.
#[derive(Clone)]
pub struct DimensionlessProblem {
    l_star: ScalarFn,
    n_star: ScalarFn,
    mu_star: ScalarFn,
    constants: ProblemConstants,
    bounds_source: BoundsSource,
    strategy: Arc<dyn BoundaryStrategy>,
}

impl fmt::Debug for DimensionlessProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DimensionlessProblem")
            .field("constants", &self.constants)
            .field("bounds_source", &self.bounds_source)
            .field("strategy", &self.strategy)
            .finish_non_exhaustive()
    }
}

impl DimensionlessProblem {
    pub fn new(
        l_star: ScalarFn,
        n_star: ScalarFn,
        mu_star: ScalarFn,
        constants: ProblemConstants,
        bounds_source: BoundsSource,
        strategy: Arc<dyn BoundaryStrategy>,
    ) -> Result<Self> {
        constants.validate()?;
        Ok(Self { l_star, n_star, mu_star, constants, bounds_source, strategy })
    }

    /// `L* = N* = 1`, `mu* = pe`.
    pub fn constant(pe: f64, strategy: Arc<dyn BoundaryStrategy>) -> Result<Self> {
        let pe = non_negative("pe", pe)?;
        let constants = ProblemConstants {
            l_min: 1.0,
            l_max: 1.0,
            l_lip: 0.0,
            n_min: 1.0,
            n_max: 1.0,
            n_lip: 0.0,
            mu_min: pe,
            mu_max: pe,
            mu_lip: 0.0,
        };
        Self::new(Arc::new(|_| 1.0), Arc::new(|_| 1.0), Arc::new(move |_| pe), constants, BoundsSource::Analytic, strategy)
    }

    /// `L* = 1 + beta f`, `N* = 1 + alpha f`, `mu* = pe (1 + alpha f)`.
    pub fn linear(alpha: f64, beta: f64, pe: f64, strategy: Arc<dyn BoundaryStrategy>) -> Result<Self> {
        let pe = non_negative("pe", pe)?;
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha, reason: "must exceed -1" });
        }
        if !(beta.is_finite() && beta > -1.0) {
            return Err(Error::InvalidParameter { name: "beta", value: beta, reason: "must exceed -1" });
        }
        let (n_lo, n_hi) = (1f64.min(1.0 + alpha), 1f64.max(1.0 + alpha));
        let constants = ProblemConstants {
            l_min: 1f64.min(1.0 + beta),
            l_max: 1f64.max(1.0 + beta),
            l_lip: beta.abs(),
            n_min: n_lo,
            n_max: n_hi,
            n_lip: alpha.abs(),
            mu_min: pe * n_lo,
            mu_max: pe * n_hi,
            mu_lip: pe * alpha.abs(),
        };
        Self::new(
            Arc::new(move |f| 1.0 + beta * f),
            Arc::new(move |f| 1.0 + alpha * f),
            Arc::new(move |f| pe * (1.0 + alpha * f)),
            constants,
            BoundsSource::Analytic,
            strategy,
        )
    }

    /// Same coefficients, different boundary strategy.
    pub fn with_strategy(&self, strategy: Arc<dyn BoundaryStrategy>) -> Self {
        Self { strategy, ..self.clone() }
    }

    pub fn l(&self, f: f64) -> f64 {
        (self.l_star)(f)
    }
    pub fn n(&self, f: f64) -> f64 {
        (self.n_star)(f)
    }
    pub fn mu(&self, f: f64) -> f64 {
        (self.mu_star)(f)
    }
    pub fn constants(&self) -> &ProblemConstants {
        &self.constants
    }
    pub fn bounds_source(&self) -> BoundsSource {
        self.bounds_source
    }
    pub fn strategy(&self) -> &dyn BoundaryStrategy {
        self.strategy.as_ref()
    }
    pub fn strategy_arc(&self) -> Arc<dyn BoundaryStrategy> {
        Arc::clone(&self.strategy)
    }
    pub fn kind(&self) -> BcKind {
        self.strategy.kind()
    }
}

/// Options controlling how bounds are obtained when the model has none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Fall back to sampled estimates when neither supplied nor analytic
    /// bounds exist.
    pub estimate: bool,
    pub samples: usize,
    /// Temperature range for bounds; defaults to the image of `theta` in `[0, 1]`.
    pub range: Option<(f64, f64)>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { estimate: true, samples: 257, range: None }
    }
}

/// Builds the dimensionless problem with the built-in boundary strategies and
/// default bound handling.
pub fn build_dimensionless(model: &ThermalModel, bc: &BoundaryCondition) -> Result<DimensionlessProblem> {
    build_dimensionless_with(model, bc, &BoundaryRegistry::with_builtins(), &BuildOptions::default())
}

pub fn build_dimensionless_with(
    model: &ThermalModel,
    bc: &BoundaryCondition,
    registry: &BoundaryRegistry,
    options: &BuildOptions,
) -> Result<DimensionlessProblem> {
    bc.validate()?;
    let map = bc.temperature_map();
    let (lo, hi) = options.range.unwrap_or_else(|| map.unit_range());
    let (bounds, source) = match model.bounds {
        Some(b) => {
            check_supplied_bounds(model, &b, (lo, hi), options.samples.max(2))?;
            (b, BoundsSource::Supplied)
        }
        None => match model.coefficients.analytic_bounds(lo, hi) {
            Some(b) => (b, BoundsSource::Analytic),
            None if options.estimate => (estimate_bounds(model, (lo, hi), options.samples)?.bounds, BoundsSource::Sampled),
            None => return Err(Error::MissingBounds),
        },
    };
    bounds.validate()?;
    let constants = ProblemConstants::from_bounds(model, &map, &bounds);
    let strategy = registry.build(bc, model)?;

    let k0 = model.k0;
    let rho_c0 = model.rho0 * model.c0;
    let mu_scale = (rho_c0 * model.k0).sqrt();
    let (c1, c2, c3) = (model.coefficients.clone(), model.coefficients.clone(), model.coefficients.clone());
    DimensionlessProblem::new(
        Arc::new(move |f| c1.conductivity(map.temperature(f)) / k0),
        Arc::new(move |f| c2.heat_capacity(map.temperature(f)) / rho_c0),
        Arc::new(move |f| c3.convective_speed(map.temperature(f)) / mu_scale),
        constants,
        source,
        strategy,
    )
}

/// Result of [`estimate_bounds`]; always tagged as sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsEstimate {
    pub bounds: CoefficientBounds,
    pub source: BoundsSource,
    pub sample_count: usize,
}

/// Min, max and steepest finite-difference slope of each coefficient over
/// `samples` uniform temperatures in `range` plus any breakpoints inside it.
pub fn estimate_bounds(model: &ThermalModel, range: (f64, f64), samples: usize) -> Result<BoundsEstimate> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidInput(format!("degenerate temperature range [{lo}, {hi}]")));
    }
    if samples < 2 {
        return Err(Error::InvalidInput(format!("at least two samples are required, got {samples}")));
    }
    let ts = sample_points(model, range, samples);
    let c = &model.coefficients;
    let k = evaluate("k", &ts, |t| c.conductivity(t), true)?;
    let g = evaluate("rho_c", &ts, |t| c.heat_capacity(t), true)?;
    let m = evaluate("mu", &ts, |t| c.convective_speed(t), false)?;
    let (k_min, k_max, k_lip) = summarize(&ts, &k);
    let (gamma_min, gamma_max, gamma_lip) = summarize(&ts, &g);
    let (nu_min, nu_max, nu_lip) = summarize(&ts, &m);
    Ok(BoundsEstimate {
        bounds: CoefficientBounds { k_min, k_max, k_lip, gamma_min, gamma_max, gamma_lip, nu_min, nu_max, nu_lip },
        source: BoundsSource::Sampled,
        sample_count: ts.len(),
    })
}

fn sample_points(model: &ThermalModel, (lo, hi): (f64, f64), samples: usize) -> Vec<f64> {
    let mut set: BTreeSet<u64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .chain(model.coefficients.breakpoints().into_iter().filter(|t| *t > lo && *t < hi))
        .map(f64::to_bits)
        .collect();
    set.insert(hi.to_bits());
    let mut ts: Vec<f64> = set.into_iter().map(f64::from_bits).collect();
    ts.sort_by(f64::total_cmp);
    ts
}

fn evaluate(name: &'static str, ts: &[f64], g: impl Fn(f64) -> f64, strict: bool) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| {
            let v = g(t);
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                Err(Error::CoefficientEvaluation { name, temperature: t, value: v })
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn summarize(ts: &[f64], vs: &[f64]) -> (f64, f64, f64) {
    let min = vs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lip = ts
        .windows(2)
        .zip(vs.windows(2))
        .map(|(t, v)| ((v[1] - v[0]) / (t[1] - t[0])).abs())
        .fold(0.0, f64::max);
    (min, max, lip)
}

fn check_supplied_bounds(model: &ThermalModel, b: &CoefficientBounds, range: (f64, f64), samples: usize) -> Result<()> {
    b.validate()?;
    let ts = sample_points(model, range, samples);
    let slack = |x: f64| 1e-12 * x.abs().max(1.0);
    for &t in &ts {
        for (name, v, lo, hi) in [
            ("k", model.k(t), b.k_min, b.k_max),
            ("rho_c", model.rho_c(t), b.gamma_min, b.gamma_max),
            ("mu", model.mu(t), b.nu_min, b.nu_max),
        ] {
            if v < lo - slack(lo) || v > hi + slack(hi) {
                return Err(Error::InvalidInput(format!(
                    "supplied bounds [{lo}, {hi}] for {name} are violated at T = {t} (value {v})"
                )));
            }
        }
    }
    Ok(())
}
