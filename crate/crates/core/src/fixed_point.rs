//! The boundary-specific integral operator and the inner Picard iteration
//! `f <- H(f)` for a fixed front coefficient.

use serde::{Deserialize, Serialize};

use crate::coefficients::DimensionlessProblem;
use crate::error::{positive, Error, Result};
use crate::kernels::{eval_kernels, KernelEval, ProfileGrid};

/// Slack before an image value counts as having left `[0, 1]`.
const ESCAPE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerSettings {
    /// Max-node residual `|H(f) - f|` accepted as converged.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for InnerSettings {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200 }
    }
}

impl InnerSettings {
    pub fn validate(&self) -> Result<()> {
        positive("inner_tol", self.tol)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Image of a profile under the operator, with the kernels of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorImage {
    pub profile: ProfileGrid,
    pub kernels: KernelEval,
    /// Some image value left `[0, 1]` for a confined condition.
    pub escaped: bool,
    /// The image was clamped back into `[0, 1]`.
    pub clamped: bool,
}

pub fn apply_operator(prob: &DimensionlessProblem, profile: &ProfileGrid) -> Result<OperatorImage> {
    let kernels = eval_kernels(profile, prob)?;
    let strategy = prob.strategy();
    let mut g = vec![0.0; profile.f.len()];
    strategy.apply(profile.f[0], &kernels.phi, &mut g);
    let mut escaped = false;
    let mut clamped = false;
    if strategy.confined() && g.iter().any(|v| *v < -ESCAPE_SLACK || *v > 1.0 + ESCAPE_SLACK) {
        escaped = true;
        if strategy.clamp_on_escape(prob.constants()) {
            g.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
            clamped = true;
        }
    }
    Ok(OperatorImage { profile: ProfileGrid::new(profile.lambda, g)?, kernels, escaped, clamped })
}

/// Starting iterate for the problem's boundary strategy on `n` intervals.
pub fn initial_profile(prob: &DimensionlessProblem, lambda: f64, n: usize) -> Result<ProfileGrid> {
    let s = prob.strategy();
    ProfileGrid::from_fn(lambda, n, |xi| s.initial_value(xi / lambda))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub profile: ProfileGrid,
    /// Kernels of `profile`.
    pub kernels: KernelEval,
    /// Number of updates `f <- H(f)` performed.
    pub iterations: usize,
    /// `max |H(f) - f|` for the returned profile.
    pub residual: f64,
    /// Ratio of the last two residuals; needs at least two iterations.
    pub contraction_observed: Option<f64>,
    /// Contraction function at `lambda`, when it certifies a contraction.
    pub contraction_theoretical: Option<f64>,
    pub converged: bool,
    pub escaped: bool,
    pub clamped: bool,
}

/// Picard iteration from `f0` (re-gridded onto `[0, lambda]`).
///
/// Non-convergence after `max_iter` updates is reported through
/// `converged = false`, never silently.
pub fn solve_profile(
    prob: &DimensionlessProblem,
    lambda: f64,
    settings: &InnerSettings,
    f0: &ProfileGrid,
) -> Result<InnerResult> {
    positive("lambda", lambda)?;
    settings.validate()?;
    let mut current = apply_operator(prob, &f0.rescaled(lambda)?)?;
    let mut escaped = current.escaped;
    let mut clamped = current.clamped;
    let mut previous_residual: Option<f64> = None;
    let mut contraction_observed = None;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next = apply_operator(prob, &current.profile)?;
        escaped |= next.escaped;
        clamped |= next.clamped;
        let residual = next.profile.max_distance(&current.profile);
        if let Some(prev) = previous_residual {
            if prev > 0.0 {
                contraction_observed = Some(residual / prev);
            }
        }
        let converged = residual <= settings.tol;
        if converged || iterations >= settings.max_iter {
            let contraction_theoretical = prob.strategy().contraction(lambda, prob.constants()).ok().filter(|e| *e < 1.0);
            return Ok(InnerResult {
                profile: current.profile,
                kernels: next.kernels,
                iterations,
                residual,
                contraction_observed,
                contraction_theoretical,
                converged,
                escaped,
                clamped,
            });
        }
        previous_residual = Some(residual);
        current = next;
    }
}

/// Contraction function of the problem's boundary condition at `z`.
pub fn contraction_bound(prob: &DimensionlessProblem, z: f64) -> Result<f64> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidParameter { name: "z", value: z, reason: "must be finite and non-negative" });
    }
    prob.strategy().contraction(z, prob.constants())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryStrategy, Dirichlet, Neumann, Radiative, Robin};
    use libm::erf;
    use std::sync::Arc;

    fn dirichlet() -> Arc<dyn BoundaryStrategy> {
        Arc::new(Dirichlet::new(1.0).unwrap())
    }

    #[test]
    fn dirichlet_image_endpoints() {
        let prob = DimensionlessProblem::linear(0.2, 0.3, 0.1, dirichlet()).unwrap();
        let f = ProfileGrid::from_fn(0.7, 50, |x| (x / 0.7).powf(0.3)).unwrap();
        let g = apply_operator(&prob, &f).unwrap().profile;
        assert_eq!(g.f[0], 0.0);
        assert_eq!(g.f[50], 1.0);
    }

    #[test]
    fn dirichlet_image_matches_erf_ratio() {
        let pe: f64 = 1.0;
        let lambda = 0.5;
        let prob = DimensionlessProblem::constant(pe, dirichlet()).unwrap();
        let f = ProfileGrid::from_fn(lambda, 512, |x| x / lambda).unwrap();
        let g = apply_operator(&prob, &f).unwrap().profile;
        let denom = erf(pe) - erf(pe - lambda);
        for (j, xi) in g.nodes().enumerate() {
            assert!((g.f[j] - (erf(pe) - erf(pe - xi)) / denom).abs() < 1e-6);
        }
    }

    #[test]
    fn radiative_without_exchange_maps_to_one() {
        let rad = Arc::new(Radiative::new(1.0, 0.0, 0.0, 2.0, 1.0).unwrap());
        let prob = DimensionlessProblem::constant(0.5, rad).unwrap();
        let f = ProfileGrid::from_fn(0.4, 20, |x| x / 0.4).unwrap();
        let g = apply_operator(&prob, &f).unwrap();
        assert!(g.profile.f.iter().all(|v| *v == 1.0));
        assert!(!g.escaped);
    }

    #[test]
    fn constant_coefficients_converge_in_one_update() {
        let strategies: [Arc<dyn BoundaryStrategy>; 3] =
            [dirichlet(), Arc::new(Neumann::new(0.7, 1.0).unwrap()), Arc::new(Robin::new(1.0, 2.0).unwrap())];
        for s in strategies {
            let prob = DimensionlessProblem::constant(0.5, s).unwrap();
            let f0 = initial_profile(&prob, 0.6, 256).unwrap();
            let r = solve_profile(&prob, 0.6, &InnerSettings::default(), &f0).unwrap();
            assert!(r.converged);
            assert_eq!(r.iterations, 1, "{}", prob.strategy().name());
            assert_eq!(r.contraction_observed, None);
        }
    }

    #[test]
    fn linear_family_converges_at_predicted_rate() {
        let prob = DimensionlessProblem::linear(0.1, 0.1, 0.5, dirichlet()).unwrap();
        let lambda = 0.15;
        let bound = contraction_bound(&prob, lambda).unwrap();
        assert!(bound < 1.0);
        let f0 = initial_profile(&prob, lambda, 512).unwrap();
        let r = solve_profile(&prob, lambda, &InnerSettings { tol: 1e-10, max_iter: 200 }, &f0).unwrap();
        assert!(r.converged && r.residual <= 1e-10);
        assert_eq!(r.contraction_theoretical, Some(bound));
        assert!(r.contraction_observed.unwrap() <= bound + 0.05);
        assert!(r.profile.f.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn neumann_profile_may_exceed_one() {
        let neu = Arc::new(Neumann::new(4.0, 1.0).unwrap());
        let prob = DimensionlessProblem::linear(0.1, 0.1, 0.2, neu).unwrap();
        let lambda = 0.5;
        let f0 = initial_profile(&prob, lambda, 256).unwrap();
        let r = solve_profile(&prob, lambda, &InnerSettings::default(), &f0).unwrap();
        assert!(r.converged);
        assert!(r.profile.f[0] > 1.0);
        assert!(r.profile.f[256].abs() < 1e-15);
        assert!(r.profile.f.windows(2).all(|w| w[1] <= w[0]));
        assert!(!r.escaped);
    }

    #[test]
    fn non_convergence_is_reported() {
        let prob = DimensionlessProblem::linear(0.3, 0.9, 0.5, dirichlet()).unwrap();
        let f0 = initial_profile(&prob, 2.0, 64).unwrap();
        let r = solve_profile(&prob, 2.0, &InnerSettings { tol: 1e-14, max_iter: 2 }, &f0).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn contraction_bound_special_values() {
        let c = DimensionlessProblem::constant(0.5, dirichlet()).unwrap();
        assert_eq!(contraction_bound(&c, 2.0).unwrap(), 0.0);
        let lin = DimensionlessProblem::linear(0.1, 0.1, 0.5, dirichlet()).unwrap();
        assert!((contraction_bound(&lin, 0.0).unwrap() - 0.22).abs() < 1e-14);
        let rob = lin.with_strategy(Arc::new(Robin::new(1.0, 3.0).unwrap()));
        for z in [0.1, 0.5, 1.3] {
            assert_eq!(contraction_bound(&rob, z).unwrap(), contraction_bound(&lin, z).unwrap());
        }
    }

    #[test]
    fn extra_update_does_not_grow_residual() {
        let prob = DimensionlessProblem::linear(0.2, 0.2, 0.3, dirichlet()).unwrap();
        let f0 = initial_profile(&prob, 0.5, 256).unwrap();
        let r = solve_profile(&prob, 0.5, &InnerSettings::default(), &f0).unwrap();
        let again = apply_operator(&prob, &r.profile).unwrap().profile;
        let next = apply_operator(&prob, &again).unwrap().profile;
        assert!(next.max_distance(&again) <= r.residual * (1.0 + 1e-6) + 1e-15);
    }
}
