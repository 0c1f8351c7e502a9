//! The outer stage: evaluate `V(lambda)` through an inner solve, bracket the
//! root of `V(lambda) = lambda` with the sandwich bounds, and bisect.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boundary::FrontState;
use crate::coefficients::{BcKind, DimensionlessProblem};
use crate::error::{positive, Error, Result};
use crate::existence::{certify_with, ExistenceReport};
use crate::fixed_point::{initial_profile, solve_profile, InnerResult, InnerSettings};
use crate::kernels::{ProfileGrid, DEFAULT_GRID};
use crate::quadrature::{bisect, sign_changes};

/// Points used when scanning the upper sandwich bound for its first crossing.
const BRACKET_SCAN_POINTS: usize = 1024;
/// Relative widening of an analytic bracket before scanning. The bounds hold
/// for the exact map; the discretised map can cross just outside them when
/// they are sharp (constant coefficients).
pub const SCAN_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Number of grid intervals on `[0, lambda]`.
    pub grid: usize,
    pub inner: InnerSettings,
    /// Tolerance on both the bracket width and `|V(lambda) - lambda|`.
    pub outer_tol: f64,
    /// Upper end of the fallback bracket and of all scans.
    pub lambda_max: f64,
    /// Sub-intervals in the left-to-right sign-change scan.
    pub scan_intervals: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID, inner: InnerSettings::default(), outer_tol: 1e-9, lambda_max: 10.0, scan_intervals: 64 }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        positive("outer_tol", self.outer_tol)?;
        positive("lambda_max", self.lambda_max)?;
        if self.grid < 16 {
            return Err(Error::InvalidInput(format!("grid must have at least 16 intervals, got {}", self.grid)));
        }
        if self.scan_intervals == 0 {
            return Err(Error::InvalidInput("scan_intervals must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketProvenance {
    /// Roots of the sandwich bounds.
    Analytic,
    /// `[0, lambda_max]` after the sandwich root search failed.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lambda1: f64,
    pub lambda2: f64,
    pub provenance: BracketProvenance,
}

impl Bracket {
    /// Left end used by the scan. A zero lower bound is replaced by a tiny
    /// positive value because the inner problem needs `lambda > 0`.
    pub fn scan_start(&self) -> f64 {
        if self.lambda1 > 0.0 {
            self.lambda1 * (1.0 - SCAN_MARGIN)
        } else {
            self.lambda2 * 1e-8
        }
    }

    /// Right end used by the scan.
    pub fn scan_end(&self) -> f64 {
        match self.provenance {
            BracketProvenance::Analytic => self.lambda2 * (1.0 + SCAN_MARGIN),
            BracketProvenance::Fallback => self.lambda2,
        }
    }
}

/// `lambda1` from the lower sandwich bound and `lambda2` as the first crossing
/// of the upper bound above it.
pub fn bracket(prob: &DimensionlessProblem, lambda_max: f64) -> Bracket {
    let s = prob.strategy();
    let c = *prob.constants();
    let lambda1 = match s.lower_bound(0.0, &c) {
        Some(v0) if v0 > 0.0 => bisect(|x| s.lower_bound(x, &c).unwrap_or(0.0) - x, 0.0, v0, 0.0),
        _ => 0.0,
    };
    let start = if lambda1 > 0.0 { lambda1 } else { lambda_max * 1e-12 };
    let upper = |x: f64| s.upper_bound(x, &c) - x;
    let crossing = if start < lambda_max {
        sign_changes(upper, start, lambda_max, BRACKET_SCAN_POINTS).into_iter().next()
    } else {
        None
    };
    match crossing {
        Some((a, b)) if upper(a).is_finite() => {
            let lambda2 = bisect(upper, a, b, 0.0);
            if lambda2 >= lambda1 {
                Bracket { lambda1, lambda2, provenance: BracketProvenance::Analytic }
            } else {
                fallback(lambda_max)
            }
        }
        _ => fallback(lambda_max),
    }
}

fn fallback(lambda_max: f64) -> Bracket {
    Bracket { lambda1: 0.0, lambda2: lambda_max, provenance: BracketProvenance::Fallback }
}

/// One evaluation of the outer map.
#[derive(Debug, Clone, PartialEq)]
pub struct VEvaluation {
    pub lambda: f64,
    pub v: f64,
    pub inner: InnerResult,
}

impl VEvaluation {
    pub fn g(&self) -> f64 {
        self.v - self.lambda
    }
}

/// Evaluates `V` repeatedly, warm-starting each inner solve from the last
/// converged profile.
#[derive(Debug)]
pub struct LambdaSolver<'a> {
    prob: &'a DimensionlessProblem,
    settings: SolverSettings,
    warm: Option<ProfileGrid>,
    evaluations: usize,
}

impl<'a> LambdaSolver<'a> {
    pub fn new(prob: &'a DimensionlessProblem, settings: SolverSettings) -> Result<Self> {
        settings.validate()?;
        Ok(Self { prob, settings, warm: None, evaluations: 0 })
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn evaluate(&mut self, lambda: f64) -> Result<VEvaluation> {
        let f0 = match &self.warm {
            Some(p) => p.rescaled(lambda)?,
            None => initial_profile(self.prob, lambda, self.settings.grid)?,
        };
        let inner = solve_profile(self.prob, lambda, &self.settings.inner, &f0)?;
        self.evaluations += 1;
        if !inner.converged {
            return Err(Error::InnerNonConvergence { lambda, iterations: inner.iterations, residual: inner.residual });
        }
        let v = self.prob.strategy().v_value(&front_state(lambda, &inner));
        if !v.is_finite() {
            return Err(Error::NonFinite { quantity: "V(lambda)", node: self.settings.grid, xi: lambda });
        }
        self.warm = Some(inner.profile.clone());
        Ok(VEvaluation { lambda, v, inner })
    }
}

fn front_state(lambda: f64, inner: &InnerResult) -> FrontState {
    FrontState {
        lambda,
        f_origin: inner.profile.f[0],
        e_front: inner.kernels.e_front(),
        phi_front: inner.kernels.phi_front(),
        l_front: inner.kernels.l_front(),
    }
}

/// `V(lambda)` from a cold start.
pub fn v_value(prob: &DimensionlessProblem, lambda: f64, settings: &SolverSettings) -> Result<f64> {
    positive("lambda", lambda)?;
    Ok(LambdaSolver::new(prob, *settings)?.evaluate(lambda)?.v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub bc_kind: BcKind,
    pub parameters: BTreeMap<String, f64>,
    pub lambda: f64,
    /// `|V(lambda) - lambda|` at the returned root.
    pub outer_residual: f64,
    pub outer_evaluations: usize,
    pub bisection_steps: usize,
    pub inner_iterations: usize,
    pub inner_residual: f64,
    pub contraction_observed: Option<f64>,
    pub contraction_theoretical: Option<f64>,
    /// Relative mismatch of the front condition at the returned profile.
    pub stefan_residual: f64,
    pub bracket: Bracket,
    /// Sign changes of `V(lambda) - lambda` seen beyond the first, as intervals.
    pub additional_sign_changes: Vec<(f64, f64)>,
    pub max_f: f64,
    pub min_f: f64,
    /// A confined profile left `[0, 1]` during the final inner solve.
    pub escaped: bool,
    pub clamped: bool,
    pub grid: usize,
    pub profile: ProfileGrid,
    pub existence: ExistenceReport,
}

pub fn solve_lambda(prob: &DimensionlessProblem, settings: &SolverSettings) -> Result<SolveReport> {
    settings.validate()?;
    let existence = certify_with(prob, settings.lambda_max);
    let bracket = existence.bracket;
    let mut solver = LambdaSolver::new(prob, *settings)?;
    let (lo, hi) = (bracket.scan_start(), bracket.scan_end());
    let tol = settings.outer_tol;

    // Left-to-right scan, warm-starting along the way.
    let n = settings.scan_intervals;
    let mut previous: Option<VEvaluation> = None;
    let mut first: Option<(VEvaluation, VEvaluation)> = None;
    let mut exact: Option<VEvaluation> = None;
    let mut additional = Vec::new();
    let mut g_lo = f64::NAN;
    let mut g_hi = f64::NAN;
    for j in 0..=n {
        let x = if j == n { hi } else { lo + (hi - lo) * j as f64 / n as f64 };
        let ev = match solver.evaluate(x) {
            Ok(ev) => ev,
            Err(_) if first.is_some() || exact.is_some() => break,
            Err(e) => return Err(e),
        };
        let g = ev.g();
        if j == 0 {
            g_lo = g;
        }
        g_hi = g;
        if g.abs() <= tol && exact.is_none() && first.is_none() {
            exact = Some(ev.clone());
        } else if let Some(prev) = previous.as_ref().filter(|p| p.g().abs() > tol) {
            if prev.g() * g < 0.0 {
                if first.is_none() && exact.is_none() {
                    first = Some((prev.clone(), ev.clone()));
                } else {
                    additional.push((prev.lambda, ev.lambda));
                }
            }
        }
        previous = Some(ev);
    }

    let (root, steps) = match (exact, first) {
        (Some(ev), _) => (ev, 0),
        (None, Some((a, b))) => bisect_root(&mut solver, a, b, tol)?,
        (None, None) => return Err(Error::NoSignChange { lo, hi, g_lo, g_hi }),
    };

    let inner = &root.inner;
    let profile = inner.profile.clone();
    let stefan_residual = prob.strategy().stefan_residual(root.lambda, profile.front_slope(), inner.kernels.l_front());
    Ok(SolveReport {
        bc_kind: prob.kind(),
        parameters: prob.strategy().parameters().into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
        lambda: root.lambda,
        outer_residual: root.g().abs(),
        outer_evaluations: solver.evaluations(),
        bisection_steps: steps,
        inner_iterations: inner.iterations,
        inner_residual: inner.residual,
        contraction_observed: inner.contraction_observed,
        contraction_theoretical: inner.contraction_theoretical,
        stefan_residual,
        bracket,
        additional_sign_changes: additional,
        max_f: profile.f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_f: profile.f.iter().copied().fold(f64::INFINITY, f64::min),
        escaped: inner.escaped,
        clamped: inner.clamped,
        grid: profile.n(),
        profile,
        existence,
    })
}

fn bisect_root(solver: &mut LambdaSolver<'_>, mut a: VEvaluation, mut b: VEvaluation, tol: f64) -> Result<(VEvaluation, usize)> {
    let mut steps = 0;
    let mut best = if a.g().abs() <= b.g().abs() { a.clone() } else { b.clone() };
    loop {
        let width = b.lambda - a.lambda;
        let mid = 0.5 * (a.lambda + b.lambda);
        if (width <= tol && best.g().abs() <= tol) || mid <= a.lambda || mid >= b.lambda {
            return Ok((best, steps));
        }
        let m = solver.evaluate(mid)?;
        steps += 1;
        if m.g().abs() <= best.g().abs() {
            best = m.clone();
        }
        if m.g() == 0.0 {
            return Ok((m, steps));
        }
        if (m.g() < 0.0) == (a.g() < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
}
