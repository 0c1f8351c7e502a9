use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::{ambient_stefan_residual, biot_number, face, stefan_number, wrong_face, BoundaryStrategy, FrontState};
use crate::coefficients::{BcKind, BoundaryCondition, FixedFace, ProblemConstants, ThermalModel};
use crate::error::{non_negative, positive, Error, Result};
use crate::existence::{FlagStatus, FLAG_RADIATIVE_D5, FLAG_RADIATIVE_DELTA, FLAG_RADIATIVE_T4};

/// Convective plus radiative exchange with an ambient at `T*`.
///
/// Temperatures enter through the fourth-power law and are therefore kept in
/// physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radiative {
    pub ste: f64,
    pub bi: f64,
    pub r: f64,
    pub t_star: f64,
    pub t_melt: f64,
}

impl Radiative {
    pub fn new(ste: f64, bi: f64, r: f64, t_star: f64, t_melt: f64) -> Result<Self> {
        if !(t_star.is_finite() && t_melt.is_finite() && t_star > t_melt) {
            return Err(Error::InvalidParameter {
                name: "T_star",
                value: t_star,
                reason: "must exceed the melting temperature",
            });
        }
        Ok(Self { ste: positive("Ste", ste)?, bi: non_negative("Bi", bi)?, r: non_negative("r", r)?, t_star, t_melt })
    }

    pub fn from_physical(bc: &BoundaryCondition, model: &ThermalModel) -> Result<Arc<dyn BoundaryStrategy>> {
        let FixedFace::Radiative { h, sigma, epsilon, t_star } = face(bc) else {
            return Err(wrong_face(BcKind::Radiative, bc));
        };
        let r = 2.0 * sigma * epsilon * model.alpha0().sqrt() / (model.k0 * (t_star - bc.t_melt));
        Ok(Arc::new(Self::new(stefan_number(bc, model)?, biot_number(h, model), r, t_star, bc.t_melt)?))
    }

    /// `G(f)(0) = 2 Bi f(0) + r (T*^4 - T(0)^4)`.
    pub fn g(&self, f_origin: f64) -> f64 {
        let t0 = (self.t_melt - self.t_star) * f_origin + self.t_star;
        2.0 * self.bi * f_origin + self.r * (self.t_star.powi(4) - t0.powi(4))
    }

    fn d5_value(&self) -> f64 {
        4.0 * (self.t_star - self.t_melt) * self.t_star.abs().powi(3)
    }

    fn envelope_factor(c: &ProblemConstants) -> f64 {
        PI.sqrt() * (c.mu_max * c.mu_max * c.l_max / (c.l_min * c.l_min * c.n_min)).exp()
            / (c.l_min * (c.n_min / c.l_max).sqrt())
    }

    fn t4_holds(&self, c: &ProblemConstants) -> bool {
        (2.0 * self.bi + self.r * self.t_star.powi(4)) * Self::envelope_factor(c) <= 1.0
    }
}

impl BoundaryStrategy for Radiative {
    fn name(&self) -> &'static str {
        "radiative"
    }
    fn kind(&self) -> BcKind {
        BcKind::Radiative
    }
    fn parameters(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([
            ("Ste", self.ste),
            ("Bi", self.bi),
            ("r", self.r),
            ("T_star", self.t_star),
            ("T_m", self.t_melt),
            ("D5", self.d5_value()),
        ])
    }
    fn initial_value(&self, s: f64) -> f64 {
        s
    }
    fn clamp_on_escape(&self, c: &ProblemConstants) -> bool {
        !self.t4_holds(c)
    }
    fn apply(&self, f_origin: f64, phi: &[f64], out: &mut [f64]) {
        let g = self.g(f_origin);
        let total = phi[phi.len() - 1];
        for (o, p) in out.iter_mut().zip(phi) {
            *o = 1.0 - g * (total - p);
        }
    }
    fn v_value(&self, s: &FrontState) -> f64 {
        0.5 * self.ste * self.g(s.f_origin) * s.e_front
    }
    fn contraction(&self, z: f64, c: &ProblemConstants) -> Result<f64> {
        let d4 = crate::kernels::lipschitz_from_constants(z, c).d4;
        let growth = 2.0 * (2.0 * self.bi + self.r * self.t_star.powi(4)) * z * d4;
        let g_lip = 2.0 * self.bi + self.r * self.d5_value();
        if g_lip == 0.0 {
            return Ok(growth);
        }
        if c.mu_max <= 0.0 {
            return Err(Error::ContractionUndefined("radiative contraction function requires mu_M > 0"));
        }
        Ok(growth + (2.0 * z * c.mu_max / c.l_min).exp() * g_lip / c.mu_max)
    }
    fn lower_bound(&self, _lambda: f64, _c: &ProblemConstants) -> Option<f64> {
        None
    }
    fn upper_bound(&self, lambda: f64, c: &ProblemConstants) -> f64 {
        0.5 * self.ste
            * (2.0 * self.bi + self.r * self.t_star.powi(4))
            * (2.0 * lambda * c.mu_max / c.l_min - lambda * lambda * c.n_min / c.l_max).exp()
    }
    fn hypotheses(&self, c: &ProblemConstants) -> Vec<(&'static str, FlagStatus)> {
        let delta = 2.0 * self.bi + self.r * (self.t_star.powi(4) - self.t_melt.powi(4));
        let d5_flag = c.mu_max > 0.0 && (2.0 * self.bi + self.r * self.d5_value()) / c.mu_max < 1.0;
        vec![
            (FLAG_RADIATIVE_T4, FlagStatus::from_bool(self.t4_holds(c))),
            (FLAG_RADIATIVE_DELTA, FlagStatus::from_bool(delta * Self::envelope_factor(c) < 1.0)),
            (FLAG_RADIATIVE_D5, FlagStatus::from_bool(d5_flag)),
        ]
    }
    fn stefan_residual(&self, lambda: f64, slope: f64, l_front: f64) -> f64 {
        ambient_stefan_residual(self.ste, lambda, slope, l_front)
    }
    fn d5(&self) -> Option<f64> {
        Some(self.d5_value())
    }
}
