//! Numeric certificate of the sufficient existence conditions.
//!
//! A problem is certified when every hypothesis that applies to its boundary
//! condition holds, the bounds behind them are supplied or analytic, the
//! bracket comes from the sandwich bounds, and the contraction function is
//! below 1 at the bracket's upper end. Failing certification never blocks a
//! solve; it only downgrades the report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coefficients::{BcKind, BoundsSource, DimensionlessProblem};
use crate::lambda_solver::{bracket, Bracket, BracketProvenance};
use crate::quadrature::bisect;

pub const FLAG_BOUNDS: &str = "bounds certified";
pub const FLAG_EXTRA_CONTRACTION: &str = "2L_M L̃/L_m² < 1";
pub const FLAG_RADIATIVE_T4: &str = "(2Bi+rT*⁴)√π exp(μ_M²L_M/(L_m²N_m))/(L_m√(N_m/L_M)) ≤ 1";
pub const FLAG_RADIATIVE_DELTA: &str = "(2Bi+r(T*⁴−T_m⁴))√π exp(μ_M²L_M/(L_m²N_m))/(L_m√(N_m/L_M)) < 1";
pub const FLAG_RADIATIVE_D5: &str = "(2Bi+rD5)/μ_M < 1";

/// Every flag name a report can carry.
pub const ALL_FLAGS: [&str; 5] =
    [FLAG_BOUNDS, FLAG_EXTRA_CONTRACTION, FLAG_RADIATIVE_T4, FLAG_RADIATIVE_DELTA, FLAG_RADIATIVE_D5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagStatus {
    Holds,
    Fails,
    NotApplicable,
}

impl FlagStatus {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            FlagStatus::Holds
        } else {
            FlagStatus::Fails
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    /// Everything holds except that the bounds were sampled.
    Heuristic,
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    pub bc_kind: BcKind,
    /// Root of `contraction(z) = 1`; absent when there is none.
    pub lambda_bar: Option<f64>,
    pub lambda_bar_note: Option<String>,
    pub bracket: Bracket,
    /// Contraction function at the bracket's upper end; absent when undefined.
    pub epsilon_at_lambda2: Option<f64>,
    pub hypothesis_flags: BTreeMap<String, FlagStatus>,
    pub certified: bool,
    pub status: CertificateStatus,
    pub bounds_source: BoundsSource,
    pub notes: Vec<String>,
}

pub fn certify(prob: &DimensionlessProblem) -> ExistenceReport {
    certify_with(prob, crate::lambda_solver::SolverSettings::default().lambda_max)
}

pub fn certify_with(prob: &DimensionlessProblem, lambda_max: f64) -> ExistenceReport {
    let strategy = prob.strategy();
    let c = prob.constants();
    let mut notes = Vec::new();

    let mut flags: BTreeMap<String, FlagStatus> =
        ALL_FLAGS.iter().map(|f| (f.to_string(), FlagStatus::NotApplicable)).collect();
    flags.insert(FLAG_BOUNDS.into(), FlagStatus::from_bool(prob.bounds_source().is_certified()));
    for (name, status) in strategy.hypotheses(c) {
        flags.insert(name.into(), status);
    }

    let (lambda_bar, lambda_bar_note) = lambda_bar(prob, lambda_max);
    let br = bracket(prob, lambda_max);
    let epsilon = strategy.contraction(br.lambda2, c).ok();

    if c.mu_max <= 0.0 {
        notes.push("mu_M = 0: the Phi upper envelope is replaced by z / L_m".into());
    } else if c.mu_min <= 0.0 {
        notes.push("mu_m = 0: the speed bound is not strictly positive".into());
    }
    if br.provenance == BracketProvenance::Fallback {
        notes.push(format!("no crossing of the upper sandwich bound below {lambda_max}; fallback bracket used"));
    }
    if let Some(bar) = lambda_bar {
        if br.lambda2 > bar {
            notes.push(format!("lambda2 = {:.6} exceeds lambda_bar = {bar:.6}", br.lambda2));
        }
    }

    let eps_ok = epsilon.is_some_and(|e| e < 1.0);
    let analytic = br.provenance == BracketProvenance::Analytic;
    let holds = |skip: Option<&str>| {
        flags.iter().filter(|(k, _)| Some(k.as_str()) != skip).all(|(_, s)| *s != FlagStatus::Fails)
    };
    let certified = holds(None) && eps_ok && analytic;
    let status = if certified {
        CertificateStatus::Certified
    } else if holds(Some(FLAG_BOUNDS)) && eps_ok && analytic {
        CertificateStatus::Heuristic
    } else {
        CertificateStatus::Uncertified
    };

    ExistenceReport {
        bc_kind: prob.kind(),
        lambda_bar,
        lambda_bar_note,
        bracket: br,
        epsilon_at_lambda2: epsilon,
        hypothesis_flags: flags,
        certified,
        status,
        bounds_source: prob.bounds_source(),
        notes,
    }
}

/// Root of the (increasing) contraction function equal to 1.
fn lambda_bar(prob: &DimensionlessProblem, lambda_max: f64) -> (Option<f64>, Option<String>) {
    let s = prob.strategy();
    let c = prob.constants();
    let eps = |z: f64| s.contraction(z, c);
    let e0 = match eps(0.0) {
        Ok(v) => v,
        Err(e) => return (None, Some(e.to_string())),
    };
    if e0 >= 1.0 {
        return (None, Some(format!("contraction function is {e0:.6} >= 1 at z = 0")));
    }
    if e0 == 0.0 && eps(1.0).is_ok_and(|v| v == 0.0) {
        return (None, Some("unconditional contraction".into()));
    }
    let below = |z: f64| eps(z).is_ok_and(|v| v < 1.0);
    let mut hi = 1.0;
    while below(hi) {
        hi *= 2.0;
        if hi > 1e3 * lambda_max.max(1.0) {
            return (None, Some("contraction function stays below 1".into()));
        }
    }
    let root = bisect(
        |z| match eps(z) {
            Ok(v) if v.is_finite() => v - 1.0,
            _ => 1.0,
        },
        0.0,
        hi,
        0.0,
    );
    (Some(root), None)
}
