//! Finite-difference cross-check of a similarity solution against the
//! dimensional moving-boundary problem.
//!
//! The liquid region `[0, s(t)]` is mapped onto `y = x / s(t)` in `[0, 1]`:
//!
//! ```text
//! u_t = [ (k(u) u_y)_y / s^2 - mu(u) u_y / (s sqrt(t)) ] / rho_c(u) + y (s'/s) u_y
//! s'  = -k(T_m) u_y(1) / (rho0 ell s)
//! ```
//!
//! Explicit Euler in time, conservative centred differences in space. The face
//! condition at `y = 0` is imposed exactly for a prescribed temperature and
//! through a scalar Newton solve on the second-order one-sided flux otherwise.
//! The front slope uses a first-order one-sided difference, so the front
//! discrepancy decays linearly under refinement.

use serde::{Deserialize, Serialize};

use crate::coefficients::{estimate_bounds, BoundaryCondition, FixedFace, ThermalModel};
use crate::error::{positive, Error, Result};
use crate::reconstruct::PhysicalSolution;

/// Diffusive stability safety factor.
pub const STABILITY_FACTOR: f64 = 0.4;
/// Growth of `max |T - T_m|` over its initial value treated as instability.
pub const INSTABILITY_GROWTH: f64 = 10.0;
const CHECKPOINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontFixedScheme {
    /// Spatial nodes on `[0, 1]`, both ends included.
    pub nodes: usize,
    pub t0: f64,
    pub t1: f64,
}

impl Default for FrontFixedScheme {
    fn default() -> Self {
        Self { nodes: 200, t0: 1.0, t1: 2.0 }
    }
}

impl FrontFixedScheme {
    pub fn validate(&self) -> Result<()> {
        positive("t0", self.t0)?;
        if !(self.t1.is_finite() && self.t1 >= self.t0) {
            return Err(Error::InvalidParameter { name: "t1", value: self.t1, reason: "must be finite and at least t0" });
        }
        if self.nodes < 4 {
            return Err(Error::InvalidInput(format!("front-fixed scheme needs at least 4 nodes, got {}", self.nodes)));
        }
        Ok(())
    }

    pub fn dy(&self) -> f64 {
        1.0 / (self.nodes - 1) as f64
    }

    /// Largest stable step for front position `s`, given the minimum heat
    /// capacity and maximum conductivity.
    pub fn max_step(&self, s: f64, gamma_min: f64, k_max: f64) -> f64 {
        STABILITY_FACTOR * self.dy().powi(2) * s * s * gamma_min / k_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub nodes: usize,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub dt: f64,
    pub s_initial: f64,
    pub s_final: f64,
    pub s_similarity_final: f64,
    /// `|s - s_sim| / s_sim` at `t1`.
    pub s_final_relative: f64,
    /// Largest relative front discrepancy over the checkpoints.
    pub s_max_relative: f64,
    /// Largest `|T - T_sim|` over checkpoints, divided by the temperature scale
    /// of the profile map.
    pub t_max_relative: f64,
    pub temperature_scale: f64,
}

pub fn verify(
    sol: &PhysicalSolution,
    model: &ThermalModel,
    bc: &BoundaryCondition,
    scheme: &FrontFixedScheme,
) -> Result<DiscrepancyReport> {
    scheme.validate()?;
    bc.validate()?;
    let j_max = scheme.nodes - 1;
    let dy = scheme.dy();
    let t_melt = bc.t_melt;
    let map = bc.temperature_map();
    let scale = map.scale();

    // The similarity field is stationary in y.
    let exact: Vec<f64> = (0..=j_max)
        .map(|j| map.temperature(sol.profile_at(sol.lambda_tilde * j as f64 * dy)))
        .collect();
    let mut u = exact.clone();
    u[j_max] = t_melt;

    let initial_dev = u.iter().map(|v| (v - t_melt).abs()).fold(0.0, f64::max);
    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let span = (hi - lo).max(1e-12 * scale.max(1.0));
    let bounds = estimate_bounds(model, (lo - 0.5 * span, hi + 0.5 * span), 257)?.bounds;

    let mut s = sol.front_position(scheme.t0)?;
    let s_initial = s;
    let (steps, dt) = if scheme.t1 == scheme.t0 {
        (0, 0.0)
    } else {
        let limit = scheme.max_step(s, bounds.gamma_min, bounds.k_max);
        let steps = ((scheme.t1 - scheme.t0) / limit).ceil().max(1.0) as usize;
        (steps, (scheme.t1 - scheme.t0) / steps as f64)
    };

    let k_melt = model.k(t_melt);
    let latent = model.rho0 * model.ell;
    let every = (steps / CHECKPOINTS).max(1);
    let mut s_max_relative = 0.0_f64;
    let mut t_max_relative = 0.0_f64;
    let mut next = u.clone();
    let mut k = vec![0.0; j_max + 1];

    for step in 0..steps {
        let t = scheme.t0 + dt * step as f64;
        let sqrt_t = t.sqrt();
        for (kj, uj) in k.iter_mut().zip(&u) {
            *kj = model.k(*uj);
        }
        let sdot = -k_melt * (u[j_max] - u[j_max - 1]) / (dy * latent * s);
        for j in 1..j_max {
            let uy = (u[j + 1] - u[j - 1]) / (2.0 * dy);
            let kp = 0.5 * (k[j] + k[j + 1]);
            let km = 0.5 * (k[j] + k[j - 1]);
            let diffusion = (kp * (u[j + 1] - u[j]) - km * (u[j] - u[j - 1])) / (dy * dy * s * s);
            let convection = model.mu(u[j]) * uy / (s * sqrt_t);
            let moving = j as f64 * dy * sdot / s * uy;
            next[j] = u[j] + dt * ((diffusion - convection) / model.rho_c(u[j]) + moving);
        }
        next[j_max] = t_melt;
        s += dt * sdot;
        let t_new = t + dt;
        next[0] = face_value(bc, model, &next, dy, s, t_new.sqrt())?;
        std::mem::swap(&mut u, &mut next);

        let max_dev = u.iter().map(|v| (v - t_melt).abs()).fold(0.0, f64::max);
        if !max_dev.is_finite() || max_dev > INSTABILITY_GROWTH * initial_dev.max(f64::MIN_POSITIVE) {
            return Err(Error::Instability { step: step + 1, time: t_new, max_dev });
        }
        if (step + 1) % every == 0 || step + 1 == steps {
            let s_sim = sol.front_position(t_new)?;
            s_max_relative = s_max_relative.max((s - s_sim).abs() / s_sim);
            let dev = u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            t_max_relative = t_max_relative.max(dev / scale);
        }
    }

    let s_similarity_final = sol.front_position(scheme.t1)?;
    Ok(DiscrepancyReport {
        nodes: scheme.nodes,
        t0: scheme.t0,
        t1: scheme.t1,
        steps,
        dt,
        s_initial,
        s_final: s,
        s_similarity_final,
        s_final_relative: (s - s_similarity_final).abs() / s_similarity_final,
        s_max_relative,
        t_max_relative,
        temperature_scale: scale,
    })
}

/// Face temperature satisfying the boundary condition given the interior
/// values `u[1]`, `u[2]`.
fn face_value(bc: &BoundaryCondition, model: &ThermalModel, u: &[f64], dy: f64, s: f64, sqrt_t: f64) -> Result<f64> {
    // Incoming heat flux times sqrt(t) as a function of the face temperature.
    let flux = |u0: f64| -> f64 {
        match bc.face {
            FixedFace::Dirichlet { t_star } => t_star,
            FixedFace::Neumann { q } => q,
            FixedFace::Robin { h, t_star } => h * (t_star - u0),
            FixedFace::Radiative { h, sigma, epsilon, t_star } => {
                h * (t_star - u0) + sigma * epsilon * (t_star.powi(4) - u0.powi(4))
            }
        }
    };
    if let FixedFace::Dirichlet { t_star } = bc.face {
        return Ok(t_star);
    }
    // k(u0) u_x(0) + flux(u0) / sqrt(t) = 0 with a second-order u_x.
    let residual = |u0: f64| model.k(u0) * (-3.0 * u0 + 4.0 * u[1] - u[2]) / (2.0 * dy * s) + flux(u0) / sqrt_t;
    let mut x = u[1];
    for _ in 0..50 {
        let r = residual(x);
        let h = 1e-7 * x.abs().max(1.0);
        let slope = (residual(x + h) - residual(x - h)) / (2.0 * h);
        if !(slope.is_finite() && slope != 0.0) {
            break;
        }
        let step = r / slope;
        x -= step;
        if step.abs() <= 1e-14 * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    if residual(x).is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite { quantity: "face temperature", node: 0, xi: 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::dirichlet_constant;
    use crate::coefficients::ConstantCoefficients;
    use std::sync::Arc;

    fn setup(ste: f64) -> (PhysicalSolution, ThermalModel, BoundaryCondition) {
        let model = ThermalModel::new(Arc::new(ConstantCoefficients::new(1.0, 1.0, 0.0).unwrap()), 1.0, 1.0, 1.0, 1.0 / ste)
            .unwrap();
        let bc = BoundaryCondition::dirichlet(0.0, 1.0);
        let exact = dirichlet_constant(ste, 0.0).unwrap();
        let sol = PhysicalSolution::new(exact.lambda, 1.0, bc, exact.profile_grid(2048).unwrap()).unwrap();
        (sol, model, bc)
    }

    #[test]
    fn zero_steps_give_zero_discrepancy() {
        let (sol, model, bc) = setup(0.5);
        let r = verify(&sol, &model, &bc, &FrontFixedScheme { nodes: 50, t0: 1.0, t1: 1.0 }).unwrap();
        assert_eq!(r.steps, 0);
        assert_eq!(r.s_final_relative, 0.0);
        assert_eq!(r.t_max_relative, 0.0);
    }

    #[test]
    fn short_run_tracks_the_front() {
        let (sol, model, bc) = setup(0.5);
        let r = verify(&sol, &model, &bc, &FrontFixedScheme { nodes: 60, t0: 1.0, t1: 1.2 }).unwrap();
        assert!(r.steps > 0);
        assert!(r.s_final_relative < 1e-2, "{r:?}");
        assert!(r.t_max_relative < 1e-2, "{r:?}");
    }

    #[test]
    fn time_step_respects_stability_bound() {
        let (sol, model, bc) = setup(0.5);
        let scheme = FrontFixedScheme { nodes: 40, t0: 1.0, t1: 1.1 };
        let r = verify(&sol, &model, &bc, &scheme).unwrap();
        assert!(r.dt <= scheme.max_step(r.s_initial, 1.0, 1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn invalid_schemes_are_rejected() {
        assert!(FrontFixedScheme { nodes: 3, ..Default::default() }.validate().is_err());
        assert!(FrontFixedScheme { t0: 0.0, ..Default::default() }.validate().is_err());
        assert!(FrontFixedScheme { t1: 0.5, ..Default::default() }.validate().is_err());
    }
}
