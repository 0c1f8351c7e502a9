use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    ambient_contraction, ambient_stefan_residual, ambient_upper_bound, biot_number, extra_contraction_flag, face,
    stefan_number, wrong_face, BoundaryStrategy, FrontState,
};
use crate::coefficients::{BcKind, BoundaryCondition, FixedFace, ProblemConstants, ThermalModel};
use crate::error::{non_negative, positive, Result};
use crate::existence::{FlagStatus, FLAG_EXTRA_CONTRACTION};

/// Convective exchange with an ambient at `T*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robin {
    pub ste: f64,
    pub bi: f64,
}

impl Robin {
    pub fn new(ste: f64, bi: f64) -> Result<Self> {
        Ok(Self { ste: positive("Ste", ste)?, bi: non_negative("Bi", bi)? })
    }

    pub fn from_physical(bc: &BoundaryCondition, model: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
        match face(bc) {
            FixedFace::Robin { h, .. } => Ok(Arc::new(Self::new(stefan_number(bc, model)?, biot_number(h, model))?)),
            _ => Err(wrong_face(BcKind::Robin, bc)),
        }
    }
}

impl BoundaryStrategy for Robin {
    fn name(&self) -> &'static str {
        "robin"
    }
    fn kind(&self) -> BcKind {
        BcKind::Robin
    }
    fn parameters(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([("Ste", self.ste), ("Bi", self.bi)])
    }
    fn initial_value(&self, s: f64) -> f64 {
        s
    }
    fn apply(&self, _f_origin: f64, phi: &[f64], out: &mut [f64]) {
        let denom = 1.0 + 2.0 * self.bi * phi[phi.len() - 1];
        for (o, p) in out.iter_mut().zip(phi) {
            *o = (1.0 + 2.0 * self.bi * p) / denom;
        }
    }
    fn v_value(&self, s: &FrontState) -> f64 {
        self.ste * self.bi * s.e_front / (1.0 + 2.0 * self.bi * s.phi_front)
    }
    fn contraction(&self, z: f64, c: &ProblemConstants) -> Result<f64> {
        Ok(ambient_contraction(z, c))
    }
    fn lower_bound(&self, _lambda: f64, _c: &ProblemConstants) -> Option<f64> {
        None
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
