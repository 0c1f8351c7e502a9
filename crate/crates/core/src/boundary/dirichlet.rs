use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    ambient_contraction, ambient_stefan_residual, ambient_upper_bound, extra_contraction_flag, face, stefan_number,
    wrong_face, BoundaryStrategy, FrontState,
};
use crate::coefficients::{BcKind, BoundaryCondition, FixedFace, ProblemConstants, ThermalModel};
use crate::error::{positive, Result};
use crate::existence::{FlagStatus, FLAG_EXTRA_CONTRACTION};

/// Prescribed temperature at the fixed face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dirichlet {
    pub ste: f64,
}

impl Dirichlet {
    pub fn new(ste: f64) -> Result<Self> {
        Ok(Self { ste: positive("Ste", ste)? })
    }

    pub fn from_physical(bc: &BoundaryCondition, model: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
        match face(bc) {
            FixedFace::Dirichlet { .. } => Ok(Arc::new(Self::new(stefan_number(bc, model)?)?)),
            _ => Err(wrong_face(BcKind::Dirichlet, bc)),
        }
    }
}

impl BoundaryStrategy for Dirichlet {
    fn name(&self) -> &'static str {
        "dirichlet"
    }
    fn kind(&self) -> BcKind {
        BcKind::Dirichlet
    }
    fn parameters(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([("Ste", self.ste)])
    }
    fn initial_value(&self, s: f64) -> f64 {
        s
    }
    fn apply(&self, _f_origin: f64, phi: &[f64], out: &mut [f64]) {
        let total = phi[phi.len() - 1];
        for (o, p) in out.iter_mut().zip(phi) {
            *o = p / total;
        }
    }
    fn v_value(&self, s: &FrontState) -> f64 {
        0.5 * self.ste * s.e_front / s.phi_front
    }
    fn contraction(&self, z: f64, c: &ProblemConstants) -> Result<f64> {
        Ok(ambient_contraction(z, c))
    }
    fn lower_bound(&self, lambda: f64, c: &ProblemConstants) -> Option<f64> {
        Some(self.ste * c.mu_max * (-2.0 * lambda * c.mu_max / c.l_min - 2.0 * lambda * lambda * c.n_max / c.l_min).exp())
    }
    fn upper_bound(&self, lambda: f64, c: &ProblemConstants) -> f64 {
        ambient_upper_bound(self.ste, lambda, c)
    }
    fn hypotheses(&self, c: &ProblemConstants) -> Vec<(&'static str, FlagStatus)> {
        vec![(FLAG_EXTRA_CONTRACTION, extra_contraction_flag(c))]
    }
    fn stefan_residual(&self, lambda: f64, slope: f64, l_front: f64) -> f64 {
        ambient_stefan_residual(self.ste, lambda, slope, l_front)
    }
}
