use std::collections::BTreeMap;
use std::sync::Arc;

use super::{face, wrong_face, BoundaryStrategy, FrontState};
use crate::coefficients::{BcKind, BoundaryCondition, FixedFace, ProblemConstants, ThermalModel};
use crate::error::{positive, Error, Result};
use crate::existence::FlagStatus;

/// Prescribed heat flux `q / sqrt(t)` at the fixed face. Profiles are not
/// confined to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neumann {
    pub q_star: f64,
    pub m: f64,
}

impl Neumann {
    pub fn new(q_star: f64, m: f64) -> Result<Self> {
        Ok(Self { q_star: positive("q_star", q_star)?, m: positive("M", m)? })
    }

    pub fn from_physical(bc: &BoundaryCondition, model: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
        let FixedFace::Neumann { q } = face(bc) else {
            return Err(wrong_face(BcKind::Neumann, bc));
        };
        let t_m = positive("T_m", bc.t_melt)?;
        let k_front = model.k(t_m);
        if !(k_front.is_finite() && k_front > 0.0) {
            return Err(Error::CoefficientEvaluation { name: "k", temperature: t_m, value: k_front });
        }
        let q_star = 2.0 * q * model.alpha0().sqrt() / (model.k0 * t_m);
        let m = 2.0 * model.ell * model.k0 / (t_m * model.c0 * k_front);
        Ok(Arc::new(Self::new(q_star, m)?))
    }
}

impl BoundaryStrategy for Neumann {
    fn name(&self) -> &'static str {
        "neumann"
    }
    fn kind(&self) -> BcKind {
        BcKind::Neumann
    }
    fn parameters(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([("q_star", self.q_star), ("M", self.m)])
    }
    fn initial_value(&self, _s: f64) -> f64 {
        0.0
    }
    fn confined(&self) -> bool {
        false
    }
    fn apply(&self, _f_origin: f64, phi: &[f64], out: &mut [f64]) {
        let total = phi[phi.len() - 1];
        for (o, p) in out.iter_mut().zip(phi) {
            *o = self.q_star * (total - p);
        }
    }
    fn v_value(&self, s: &FrontState) -> f64 {
        self.q_star * s.e_front / (self.m * s.l_front)
    }
    fn contraction(&self, z: f64, c: &ProblemConstants) -> Result<f64> {
        Ok(2.0 * self.q_star * z * crate::kernels::lipschitz_from_constants(z, c).d4)
    }
    fn lower_bound(&self, lambda: f64, c: &ProblemConstants) -> Option<f64> {
        Some(self.q_star / (self.m * c.l_max) * (-lambda * lambda * c.n_max / c.l_min).exp())
    }
    fn upper_bound(&self, lambda: f64, c: &ProblemConstants) -> f64 {
        self.q_star / (self.m * c.l_min) * (2.0 * lambda * c.mu_max / c.l_min - lambda * lambda * c.n_min / c.l_max).exp()
    }
    fn hypotheses(&self, _c: &ProblemConstants) -> Vec<(&'static str, FlagStatus)> {
        Vec::new()
    }
    fn stefan_residual(&self, lambda: f64, slope: f64, _l_front: f64) -> f64 {
        let target = self.m * lambda;
        (slope + target).abs() / target
    }
}
