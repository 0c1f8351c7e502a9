//! Physical temperature field and front trajectory from a similarity profile.

use serde::{Deserialize, Serialize};

use crate::coefficients::{BoundaryCondition, TemperatureMap, ThermalModel};
use crate::error::{non_negative, positive, Error, Result};
use crate::kernels::ProfileGrid;
use crate::lambda_solver::SolveReport;

/// Monotone piecewise-cubic Hermite interpolant on a uniform grid.
///
/// Interior slopes follow Fritsch and Carlson (harmonic mean of neighbouring
/// secants, zero at extrema). End slopes use the three-point one-sided
/// difference, so derivative queries at the ends agree with
/// [`ProfileGrid::front_slope`] unless the monotonicity limiter engages.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Result<Self> {
        positive("h", h)?;
        if y.len() < 3 {
            return Err(Error::InvalidInput(format!("interpolation needs at least 3 values, got {}", y.len())));
        }
        let n = y.len() - 1;
        let secant: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n + 1];
        for k in 1..n {
            let (a, b) = (secant[k - 1], secant[k]);
            if a * b > 0.0 {
                d[k] = 2.0 / (1.0 / a + 1.0 / b);
            }
        }
        d[0] = limit_end((-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h), secant[0]);
        d[n] = limit_end((3.0 * y[n] - 4.0 * y[n - 1] + y[n - 2]) / (2.0 * h), secant[n - 1]);
        Ok(Self { x0, h, y, d })
    }

    pub fn from_profile(profile: &ProfileGrid) -> Result<Self> {
        Self::new(0.0, profile.step(), profile.f.clone())
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.y.len() - 1;
        let s = ((x - self.x0) / self.h).clamp(0.0, n as f64);
        let k = (s.floor() as usize).min(n - 1);
        (k, s - k as f64)
    }

    /// Value at `x`; clamps to the end values outside the grid.
    pub fn value(&self, x: f64) -> f64 {
        let (k, t) = self.locate(x);
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * self.h * self.d[k] + h01 * self.y[k + 1] + h11 * self.h * self.d[k + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (k, t) = self.locate(x);
        let t2 = t * t;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        (dh00 * self.y[k] + dh01 * self.y[k + 1]) / self.h + dh10 * self.d[k] + dh11 * self.d[k + 1]
    }
}

/// Keeps an end slope monotone-compatible with the adjacent secant.
fn limit_end(d: f64, secant: f64) -> f64 {
    if d * secant <= 0.0 {
        0.0
    } else if d.abs() > 3.0 * secant.abs() {
        3.0 * secant
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "region", content = "value")]
pub enum Temperature {
    Inside(f64),
    /// The point lies in the region not yet reached by the front.
    BeyondFront,
}

impl Temperature {
    pub fn value(self) -> Option<f64> {
        match self {
            Temperature::Inside(t) => Some(t),
            Temperature::BeyondFront => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhysicalSolution {
    pub lambda_tilde: f64,
    pub alpha0: f64,
    pub bc: BoundaryCondition,
    pub profile: ProfileGrid,
    map: TemperatureMap,
    interp: Pchip,
}

impl PhysicalSolution {
    pub fn new(lambda_tilde: f64, alpha0: f64, bc: BoundaryCondition, profile: ProfileGrid) -> Result<Self> {
        positive("lambda", lambda_tilde)?;
        positive("alpha0", alpha0)?;
        bc.validate()?;
        let profile = profile.rescaled(lambda_tilde)?;
        let interp = Pchip::from_profile(&profile)?;
        Ok(Self { lambda_tilde, alpha0, bc, map: bc.temperature_map(), profile, interp })
    }

    pub fn from_report(report: &SolveReport, model: &ThermalModel, bc: BoundaryCondition) -> Result<Self> {
        Self::new(report.lambda, model.alpha0(), bc, report.profile.clone())
    }

    pub fn temperature_map(&self) -> TemperatureMap {
        self.map
    }

    /// Similarity variable of `(x, t)`.
    pub fn xi(&self, x: f64, t: f64) -> f64 {
        x / (2.0 * (self.alpha0 * t).sqrt())
    }

    /// Profile value at `xi`, interpolated on the grid.
    pub fn profile_at(&self, xi: f64) -> f64 {
        self.interp.value(xi)
    }

    pub fn profile_slope_at(&self, xi: f64) -> f64 {
        self.interp.derivative(xi)
    }

    pub fn temperature_at(&self, x: f64, t: f64) -> Result<Temperature> {
        positive("t", t)?;
        non_negative("x", x)?;
        let xi = self.xi(x, t);
        if xi > self.lambda_tilde {
            return Ok(Temperature::BeyondFront);
        }
        Ok(Temperature::Inside(self.map.temperature(self.profile_at(xi))))
    }

    pub fn front_position(&self, t: f64) -> Result<f64> {
        non_negative("t", t)?;
        Ok(2.0 * self.lambda_tilde * (self.alpha0 * t).sqrt())
    }

    pub fn front_velocity(&self, t: f64) -> Result<f64> {
        positive("t", t)?;
        Ok(self.lambda_tilde * (self.alpha0 / t).sqrt())
    }

    /// `points + 1` uniform samples `(x, T)` of the liquid region at time `t`.
    pub fn sample_field(&self, t: f64, points: usize) -> Result<Vec<(f64, f64)>> {
        positive("t", t)?;
        if points == 0 {
            return Err(Error::InvalidInput("field sampling needs at least one interval".into()));
        }
        let s = self.front_position(t)?;
        Ok((0..=points)
            .map(|j| {
                let x = if j == points { s } else { s * j as f64 / points as f64 };
                let xi = (self.xi(x, t)).min(self.lambda_tilde);
                (x, self.map.temperature(self.profile_at(xi)))
            })
            .collect())
    }

    /// Relative mismatch `|k(T_m) T_x + rho0 ell s'| / (rho0 ell s')` at the
    /// front, in physical units. Independent of `t` for a similarity solution.
    pub fn stefan_residual(&self, model: &ThermalModel, t: f64) -> Result<f64> {
        let sdot = self.front_velocity(t)?;
        let tx = self.map.slope * self.profile_slope_at(self.lambda_tilde) / (2.0 * (self.alpha0 * t).sqrt());
        let latent = model.rho0 * model.ell * sdot;
        Ok((model.k(self.bc.t_melt) * tx + latent).abs() / latent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_reproduces_nodes_and_monotonicity() {
        let y: Vec<f64> = (0..=20).map(|i| (i as f64 * 0.05).powi(3)).collect();
        let p = Pchip::new(0.0, 0.05, y.clone()).unwrap();
        for (i, yi) in y.iter().enumerate() {
            assert!((p.value(0.05 * i as f64) - yi).abs() < 1e-15);
        }
        let mut prev = p.value(0.0);
        for j in 1..=1000 {
            let v = p.value(j as f64 * 1e-3);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn pchip_end_slope_matches_profile() {
        let g = ProfileGrid::from_fn(0.8, 64, |x| (x * 1.3).sin()).unwrap();
        let p = Pchip::from_profile(&g).unwrap();
        assert!((p.derivative(0.8) - g.front_slope()).abs() < 1e-12);
    }

    #[test]
    fn pchip_is_exact_for_lines_and_accurate_for_smooth_data() {
        let p = Pchip::new(1.0, 0.1, (0..=10).map(|i| 2.0 + 3.0 * (1.0 + 0.1 * i as f64)).collect()).unwrap();
        assert!((p.value(1.37) - (2.0 + 3.0 * 1.37)).abs() < 1e-13);
        assert!((p.derivative(1.52) - 3.0).abs() < 1e-12);
        let q = Pchip::new(0.0, 0.01, (0..=100).map(|i| (0.01 * i as f64).exp()).collect()).unwrap();
        assert!((q.value(0.505) - 0.505f64.exp()).abs() < 1e-7);
    }

    fn dirichlet_solution() -> PhysicalSolution {
        let bc = BoundaryCondition::dirichlet(1.0, 3.0);
        let g = ProfileGrid::from_fn(0.5, 100, |x| x / 0.5).unwrap();
        PhysicalSolution::new(0.5, 1.0, bc, g).unwrap()
    }

    #[test]
    fn front_and_endpoint_temperatures() {
        let s = dirichlet_solution();
        assert_eq!(s.front_position(0.0).unwrap(), 0.0);
        assert!((s.front_position(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((s.front_position(4.0).unwrap() - 2.0 * s.front_position(1.0).unwrap()).abs() < 1e-15);
        let front = s.front_position(2.0).unwrap();
        assert_eq!(s.temperature_at(front, 2.0).unwrap(), Temperature::Inside(1.0));
        assert_eq!(s.temperature_at(0.0, 2.0).unwrap(), Temperature::Inside(3.0));
        assert_eq!(s.temperature_at(front * 1.01, 2.0).unwrap(), Temperature::BeyondFront);
        assert!(s.temperature_at(0.1, 0.0).is_err());
    }

    #[test]
    fn neumann_front_is_at_melting_temperature() {
        let bc = BoundaryCondition::neumann(2.0, 1.0);
        let g = ProfileGrid::from_fn(0.4, 50, |x| 0.7 * (0.4 - x)).unwrap();
        let s = PhysicalSolution::new(0.4, 0.5, bc, g).unwrap();
        let front = s.front_position(3.0).unwrap();
        assert_eq!(s.temperature_at(front, 3.0).unwrap(), Temperature::Inside(2.0));
        assert!((s.temperature_at(0.0, 3.0).unwrap().value().unwrap() - 2.0 * 1.28).abs() < 1e-12);
    }

    #[test]
    fn sampled_field_spans_the_liquid() {
        let s = dirichlet_solution();
        let field = s.sample_field(1.0, 10).unwrap();
        assert_eq!(field.len(), 11);
        assert_eq!(field[10], (1.0, 1.0));
        assert!(field.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}
