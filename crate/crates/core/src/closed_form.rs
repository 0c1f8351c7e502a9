//! Explicit solutions for constant coefficients with a prescribed face
//! temperature or a prescribed face flux. They serve as oracles for the
//! generic pipeline.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use libm::{erf, erfc};

use crate::coefficients::BcKind;
use crate::error::{non_negative, positive, Error, Result};
use crate::kernels::ProfileGrid;
use crate::quadrature::{bisect, sign_changes};

pub const DEFAULT_LAMBDA_MAX: f64 = 10.0;
const SCAN_POINTS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormSolution {
    pub bc_kind: BcKind,
    pub lambda: f64,
    pub pe: f64,
    /// Every root found on the scan; `lambda` is the smallest.
    pub roots: Vec<f64>,
    pub unique: bool,
    /// Flux scale of the Neumann profile; absent for Dirichlet.
    pub q_star: Option<f64>,
}

impl ClosedFormSolution {
    /// Rescales the Neumann profile for a front coefficient `M != 1`.
    pub fn with_q_star(mut self, q_star: f64) -> Result<Self> {
        if self.bc_kind != BcKind::Neumann {
            return Err(Error::InvalidInput("q_star only applies to the Neumann solution".into()));
        }
        self.q_star = Some(positive("q_star", q_star)?);
        Ok(self)
    }

    pub fn profile(&self, xi: f64) -> f64 {
        let (pe, lambda) = (self.pe, self.lambda);
        match self.q_star {
            None => erf_difference(pe, pe - xi) / erf_difference(pe, pe - lambda),
            Some(q) => q * 0.5 * PI.sqrt() * (pe * pe).exp() * erf_difference(pe - xi, pe - lambda),
        }
    }

    pub fn profile_grid(&self, n: usize) -> Result<ProfileGrid> {
        ProfileGrid::from_fn(self.lambda, n, |xi| self.profile(xi))
    }
}

/// `erf(a) - erf(b)` for `a >= b`, through complementary functions when both
/// arguments are large and positive.
fn erf_difference(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        erfc(b) - erfc(a)
    } else if a < 0.0 {
        erfc(-a) - erfc(-b)
    } else {
        erf(a) - erf(b)
    }
}

/// Right-hand side of the Dirichlet transcendental equation, `Ste(lambda)`.
pub fn dirichlet_stefan(lambda: f64, pe: f64) -> f64 {
    PI.sqrt() * lambda * erf_difference(pe, pe - lambda) * (pe - lambda).powi(2).exp()
}

/// Right-hand side of the Neumann equation, `load(lambda)`.
pub fn neumann_load(lambda: f64, pe: f64) -> f64 {
    lambda * (lambda * lambda - 2.0 * lambda * pe).exp()
}

pub fn dirichlet_constant(ste: f64, pe: f64) -> Result<ClosedFormSolution> {
    dirichlet_constant_with(ste, pe, DEFAULT_LAMBDA_MAX)
}

pub fn dirichlet_constant_with(ste: f64, pe: f64, lambda_max: f64) -> Result<ClosedFormSolution> {
    positive("Ste", ste)?;
    non_negative("Pe", pe)?;
    positive("lambda_max", lambda_max)?;
    let roots = roots_of(|l| dirichlet_stefan(l, pe) - ste, lambda_max, "the Dirichlet front equation")?;
    Ok(ClosedFormSolution { bc_kind: BcKind::Dirichlet, lambda: roots[0], pe, unique: true, roots, q_star: None })
}

pub fn neumann_constant(load: f64, pe: f64) -> Result<ClosedFormSolution> {
    neumann_constant_with(load, pe, DEFAULT_LAMBDA_MAX)
}

/// The profile uses `q* = load`, i.e. a unit front coefficient.
pub fn neumann_constant_with(load: f64, pe: f64, lambda_max: f64) -> Result<ClosedFormSolution> {
    positive("load", load)?;
    non_negative("Pe", pe)?;
    positive("lambda_max", lambda_max)?;
    let roots = roots_of(|l| neumann_load(l, pe) - load, lambda_max, "the Neumann front equation")?;
    Ok(ClosedFormSolution {
        bc_kind: BcKind::Neumann,
        lambda: roots[0],
        pe,
        unique: pe <= SQRT_2,
        roots,
        q_star: Some(load),
    })
}

fn roots_of(g: impl Fn(f64) -> f64, upper: f64, what: &'static str) -> Result<Vec<f64>> {
    // Both right-hand sides vanish at 0 while the target is positive, so the
    // scan starts just inside the interval.
    let lo = upper * 1e-12;
    let roots: Vec<f64> = sign_changes(&g, lo, upper, SCAN_POINTS)
        .into_iter()
        .map(|(a, b)| if a == b { a } else { bisect(&g, a, b, 0.0) })
        .collect();
    if roots.is_empty() {
        Err(Error::NoRoot { what, upper })
    } else {
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_dirichlet_value() {
        let s = dirichlet_constant(1.0, 0.0).unwrap();
        // Independent root of sqrt(pi) x erf(x) exp(x^2) = 1.
        let x = bisect(|x| PI.sqrt() * x * erf(x) * (x * x).exp() - 1.0, 0.1, 2.0, 0.0);
        assert!((s.lambda - x).abs() < 1e-12);
        assert!((s.lambda - 0.6201).abs() < 1e-4);
        assert_eq!(s.profile(0.0), 0.0);
        assert!((s.profile(s.lambda) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_residual_resubstitution() {
        let s = dirichlet_constant(0.5, 1.0).unwrap();
        let l = s.lambda;
        let direct = PI.sqrt() * l * (erf(1.0) - erf(1.0 - l)) * (1.0 - l).powi(2).exp();
        assert!((direct - 0.5).abs() < 1e-10);
    }

    #[test]
    fn small_stefan_number_gives_small_lambda() {
        let a = dirichlet_constant(1e-6, 0.5).unwrap().lambda;
        let b = dirichlet_constant(1e-3, 0.5).unwrap().lambda;
        assert!(a < b && b < 0.1);
        assert!(neumann_constant(1e-6, 0.0).unwrap().lambda < 1e-5);
    }

    #[test]
    fn erf_difference_is_accurate_in_the_tail() {
        // erfc(6) - erfc(7) from tabulated values.
        let expected = 2.151_973_671_249_891_3e-17 - 4.183_825_607_779_414e-23;
        let d = erf_difference(7.0, 6.0);
        assert!((d - expected).abs() / expected < 1e-10, "{d:e}");
    }

    #[test]
    fn neumann_pe_zero() {
        let s = neumann_constant(0.5, 0.0).unwrap();
        let x = bisect(|x| x * (x * x).exp() - 0.5, 0.0, 1.0, 0.0);
        assert!((s.lambda - x).abs() < 1e-12);
        assert!(s.unique && s.roots.len() == 1);
        assert_eq!(s.profile(s.lambda), 0.0);
    }

    #[test]
    fn neumann_uniqueness_threshold() {
        assert!(neumann_constant(0.2, SQRT_2).unwrap().unique);
        let s = neumann_constant(0.06, 2.0).unwrap();
        assert!(!s.unique);
        assert_eq!(s.roots.len(), 3);
        for r in &s.roots {
            assert!((neumann_load(*r, 2.0) - 0.06).abs() < 1e-10);
        }
        assert_eq!(s.lambda, s.roots[0]);
    }

    #[test]
    fn neumann_profile_derivative_matches_flux() {
        let s = neumann_constant(0.7, 0.5).unwrap().with_q_star(1.4).unwrap();
        let h = 1e-6;
        let slope = (s.profile(h) - s.profile(0.0)) / h;
        // f'(0) = -q* exp(2 Pe * 0) = -q*.
        assert!((slope + 1.4).abs() < 1e-5, "{slope}");
    }

    #[test]
    fn missing_root_is_an_error() {
        assert!(matches!(dirichlet_constant_with(1e3, 0.0, 1.0), Err(Error::NoRoot { .. })));
    }
}
