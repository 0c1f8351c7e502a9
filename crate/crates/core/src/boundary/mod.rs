//! Fixed-face boundary conditions as interchangeable strategies.
//!
//! Each strategy supplies its integral operator, the outer map `V`, the
//! contraction function, the sandwich bounds used to bracket the root and the
//! sufficient conditions checked by the certifier. Strategies are registered by
//! name in a [`BoundaryRegistry`] and selected from configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use libm::erf;

use crate::coefficients::{BcKind, BoundaryCondition, FixedFace, ProblemConstants, ThermalModel};
use crate::error::{Error, Result};
use crate::existence::FlagStatus;

mod dirichlet;
mod neumann;
mod radiative;
mod robin;

pub use dirichlet::Dirichlet;
pub use neumann::Neumann;
pub use radiative::Radiative;
pub use robin::Robin;

/// Quantities at the two ends of a profile needed to evaluate `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontState {
    pub lambda: f64,
    /// Profile value at `xi = 0`.
    pub f_origin: f64,
    /// `E(f)(lambda)`.
    pub e_front: f64,
    /// `Phi(f)(lambda)`.
    pub phi_front: f64,
    /// `L*(f(lambda))`.
    pub l_front: f64,
}

pub trait BoundaryStrategy: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn kind(&self) -> BcKind;

    /// Dimensionless parameters, keyed by their conventional symbol.
    fn parameters(&self) -> BTreeMap<&'static str, f64>;

    /// Starting iterate at `s = xi / lambda`.
    fn initial_value(&self, s: f64) -> f64;

    /// Whether admissible profiles are confined to `[0, 1]`.
    fn confined(&self) -> bool {
        true
    }

    /// Whether iterates that leave `[0, 1]` are clamped back.
    fn clamp_on_escape(&self, _c: &ProblemConstants) -> bool {
        false
    }

    /// Writes the operator image given the current `f(0)` and `Phi(f)`.
    fn apply(&self, f_origin: f64, phi: &[f64], out: &mut [f64]);

    /// The outer map `V(lambda)` for a converged profile.
    fn v_value(&self, front: &FrontState) -> f64;

    /// Contraction function at `z >= 0`.
    fn contraction(&self, z: f64, c: &ProblemConstants) -> Result<f64>;

    /// Lower sandwich bound `V1(lambda)`; `None` when the lower bound is 0.
    fn lower_bound(&self, lambda: f64, c: &ProblemConstants) -> Option<f64>;

    /// Upper sandwich bound `V2(lambda)`.
    fn upper_bound(&self, lambda: f64, c: &ProblemConstants) -> f64;

    /// Condition-specific sufficient hypotheses, by flag name.
    fn hypotheses(&self, c: &ProblemConstants) -> Vec<(&'static str, FlagStatus)>;

    /// Relative mismatch in the front condition given the profile slope at
    /// `xi = lambda` and `L*(f(lambda))`.
    fn stefan_residual(&self, lambda: f64, slope: f64, l_front: f64) -> f64;

    /// Lipschitz constant of the radiative flux term, when present.
    fn d5(&self) -> Option<f64> {
        None
    }
}

pub type StrategyFactory = fn(&BoundaryCondition, &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>>;

/// Name-to-factory map of boundary strategies.
#[derive(Clone, Default)]
pub struct BoundaryRegistry {
    factories: BTreeMap<&'static str, StrategyFactory>,
}

impl fmt::Debug for BoundaryRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.factories.keys()).finish()
    }
}

impl BoundaryRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(BcKind::Dirichlet.name(), Dirichlet::from_physical);
        r.register(BcKind::Neumann.name(), Neumann::from_physical);
        r.register(BcKind::Robin.name(), Robin::from_physical);
        r.register(BcKind::Radiative.name(), Radiative::from_physical);
        r
    }

    /// Registers or replaces a factory.
    pub fn register(&mut self, name: &'static str, factory: StrategyFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    /// Builds the strategy registered under the condition's kind name.
    pub fn build(&self, bc: &BoundaryCondition, model: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
        self.build_named(bc.kind().name(), bc, model)
    }

    pub fn build_named(&self, name: &str, bc: &BoundaryCondition, model: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownBoundary(name.to_owned()))?;
        factory(bc, model)
    }
}

pub(crate) fn stefan_number(bc: &BoundaryCondition, model: &ThermalModel) -> Result<f64> {
    let t_star = bc.t_star().ok_or(Error::InvalidInput(format!("{} condition has no ambient temperature", bc.kind())))?;
    Ok((t_star - bc.t_melt) * model.c0 / model.ell)
}

pub(crate) fn biot_number(h: f64, model: &ThermalModel) -> f64 {
    h * model.alpha0().sqrt() / model.k0
}

pub(crate) fn wrong_face(expected: BcKind, bc: &BoundaryCondition) -> Error {
    Error::InvalidInput(format!("{expected} factory received a {} condition", bc.kind()))
}

pub(crate) fn face(bc: &BoundaryCondition) -> FixedFace {
    bc.face
}

/// Relative front-condition residual for conditions whose front equation reads
/// `L* f'(lambda) = 2 lambda / Ste`.
pub(crate) fn ambient_stefan_residual(ste: f64, lambda: f64, slope: f64, l_front: f64) -> f64 {
    let target = 2.0 * lambda / ste;
    (l_front * slope - target).abs() / target
}

/// Upper sandwich bound shared by the prescribed-temperature and convective
/// conditions.
pub(crate) fn ambient_upper_bound(ste: f64, lambda: f64, c: &ProblemConstants) -> f64 {
    let a = (c.n_max / c.l_min).sqrt();
    let growth = (2.0 * lambda * c.mu_max / c.l_min - lambda * lambda * c.n_min / c.l_max).exp();
    ste / std::f64::consts::PI.sqrt() * a * c.l_max * growth / erf(a * lambda)
}

pub(crate) fn extra_contraction_flag(c: &ProblemConstants) -> FlagStatus {
    FlagStatus::from_bool(2.0 * c.l_max * c.l_lip / (c.l_min * c.l_min) < 1.0)
}

/// Contraction function shared by the prescribed-temperature and convective
/// conditions: `2 D4(z) L_M exp(N_M z^2 / L_m)`.
pub(crate) fn ambient_contraction(z: f64, c: &ProblemConstants) -> f64 {
    let d4 = crate::kernels::lipschitz_from_constants(z, c).d4;
    2.0 * d4 * c.l_max * (c.n_max * z * z / c.l_min).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::ConstantCoefficients;

    fn model() -> ThermalModel {
        ThermalModel::new(Arc::new(ConstantCoefficients::new(1.0, 1.0, 0.0).unwrap()), 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn builtins_are_registered_by_name() {
        let r = BoundaryRegistry::with_builtins();
        let names: Vec<_> = r.names().collect();
        assert_eq!(names, ["dirichlet", "neumann", "radiative", "robin"]);
        let s = r.build(&BoundaryCondition::robin(0.0, 2.0, 1.0), &model()).unwrap();
        assert_eq!(s.kind(), BcKind::Robin);
        assert_eq!(s.name(), "robin");
    }

    #[test]
    fn unknown_names_are_reported() {
        let r = BoundaryRegistry::empty();
        let err = r.build(&BoundaryCondition::dirichlet(0.0, 1.0), &model()).unwrap_err();
        assert!(matches!(err, Error::UnknownBoundary(n) if n == "dirichlet"));
    }

    #[test]
    fn factories_can_be_replaced() {
        fn fixed(_: &BoundaryCondition, _: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
            Ok(Arc::new(Dirichlet::new(0.25)?))
        }
        let mut r = BoundaryRegistry::with_builtins();
        r.register("dirichlet", fixed);
        let s = r.build(&BoundaryCondition::dirichlet(0.0, 1.0), &model()).unwrap();
        assert_eq!(s.parameters()["Ste"], 0.25);
    }

    #[test]
    fn factory_rejects_mismatched_condition() {
        let err = Dirichlet::from_physical(&BoundaryCondition::neumann(1.0, 1.0), &model()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
