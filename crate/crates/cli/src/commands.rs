use std::path::{Path, PathBuf};

use serde::Serialize;
use stefan_core::closed_form::{dirichlet_constant_with, neumann_constant_with, ClosedFormSolution};
use stefan_core::coefficients::{build_dimensionless, BcKind, BoundaryCondition, DimensionlessProblem, ThermalModel};
use stefan_core::existence::{certify_with, ExistenceReport, FlagStatus};
use stefan_core::lambda_solver::{solve_lambda, BracketProvenance, SolveReport, SolverSettings};
use stefan_core::pde_verifier::{verify, DiscrepancyReport};
use stefan_core::reconstruct::PhysicalSolution;

use crate::config::{CoefficientsConfig, LoadedConfig, RunConfig};
use crate::error::{is_numerical, CliError};
use crate::output::{num, note, OutputDir};

pub const SOLVE_JSON: &str = "solve.json";
pub const CERTIFY_JSON: &str = "certify.json";
pub const ORACLE_JSON: &str = "oracle.json";
pub const ORACLE_PROFILE_CSV: &str = "oracle_profile.csv";
pub const VERIFY_JSON: &str = "verify.json";

pub struct Context {
    pub loaded: LoadedConfig,
    pub out: OutputDir,
    pub quiet: bool,
    pub workers: Option<usize>,
}

impl Context {
    pub fn config(&self) -> &RunConfig {
        &self.loaded.config
    }
}

/// A configured problem ready for the solver.
pub struct Prepared {
    pub model: ThermalModel,
    pub bc: BoundaryCondition,
    pub problem: DimensionlessProblem,
    pub settings: SolverSettings,
}

pub fn prepare(config: &RunConfig, base_dir: &Path) -> Result<Prepared, CliError> {
    let model = config.model(base_dir)?;
    let bc = config.boundary();
    let problem = build_dimensionless(&model, &bc).map_err(|e| CliError::core("dimensionless problem", e))?;
    Ok(Prepared { model, bc, problem, settings: config.numerics.settings() })
}

/// Runs the similarity solve. Numerical failures on uncertified problems are
/// reported as hypothesis violations.
pub fn run_solve(p: &Prepared) -> Result<SolveReport, CliError> {
    solve_lambda(&p.problem, &p.settings).map_err(|e| {
        if is_numerical(&e) {
            let cert = certify_with(&p.problem, p.settings.lambda_max);
            if !cert.certified {
                return CliError::Hypothesis { stage: "similarity solve", failed: failed_hypotheses(&cert), source: e };
            }
        }
        CliError::core("similarity solve", e)
    })
}

/// Human-readable list of what keeps a certificate from holding.
pub fn failed_hypotheses(cert: &ExistenceReport) -> String {
    let mut failed: Vec<String> = cert
        .hypothesis_flags
        .iter()
        .filter(|(_, s)| **s == FlagStatus::Fails)
        .map(|(k, _)| k.clone())
        .collect();
    match cert.epsilon_at_lambda2 {
        Some(e) if e < 1.0 => {}
        Some(e) => failed.push(format!("contraction at lambda2 = {e:.4} >= 1")),
        None => failed.push("contraction at lambda2 undefined".into()),
    }
    if cert.bracket.provenance == BracketProvenance::Fallback {
        failed.push("no analytic bracket".into());
    }
    failed.join("; ")
}

#[derive(Debug, Serialize)]
struct PhysicalSummary {
    alpha0: f64,
    /// Front position `s(t) = 2 lambda sqrt(alpha0 t)` at `t = 1`.
    front_at_unit_time: f64,
    stefan_residual: f64,
}

#[derive(Debug, Serialize)]
struct SolveOutput<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    report: serde_json::Value,
    physical: PhysicalSummary,
}

pub fn solve(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let p = prepare(ctx.config(), &ctx.loaded.base_dir)?;
    let report = run_solve(&p)?;
    let sol = PhysicalSolution::from_report(&report, &p.model, p.bc).map_err(|e| CliError::core("reconstruction", e))?;
    let outputs = &ctx.config().outputs;
    note(ctx.quiet, format!("lambda = {} ({:?})", report.lambda, report.existence.status));

    let mut report_json = serde_json::to_value(&report).map_err(|e| CliError::Output(e.to_string()))?;
    if let Some(map) = report_json.as_object_mut() {
        map.remove("profile");
    }
    let reconstruct = |e| CliError::core("reconstruction", e);
    let physical = PhysicalSummary {
        alpha0: p.model.alpha0(),
        front_at_unit_time: sol.front_position(1.0).map_err(reconstruct)?,
        stefan_residual: sol.stefan_residual(&p.model, 1.0).map_err(reconstruct)?,
    };
    let mut files = vec![ctx.out.write_json(SOLVE_JSON, &SolveOutput { config: ctx.config(), report: report_json, physical })?];

    let profile = report.profile.nodes().zip(&report.profile.f).map(|(xi, f)| [num(xi), num(*f)]);
    files.push(ctx.out.write_csv(&outputs.profile_csv, &["xi", "f"], profile)?);

    let mut field = Vec::new();
    for &t in &outputs.field_times {
        for (x, temp) in sol.sample_field(t, outputs.field_points).map_err(reconstruct)? {
            field.push([num(x), num(t), num(temp)]);
        }
    }
    files.push(ctx.out.write_csv(&outputs.field_csv, &["x", "t", "T"], field)?);

    let front = outputs
        .front_times
        .iter()
        .map(|&t| Ok([num(t), num(sol.front_position(t)?), num(sol.front_velocity(t)?)]))
        .collect::<Result<Vec<_>, stefan_core::Error>>()
        .map_err(reconstruct)?;
    files.push(ctx.out.write_csv(&outputs.front_csv, &["t", "s", "s_dot"], front)?);
    Ok(files)
}

pub fn certify(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let p = prepare(ctx.config(), &ctx.loaded.base_dir)?;
    let report = certify_with(&p.problem, p.settings.lambda_max);
    note(ctx.quiet, format!("certified = {} ({:?})", report.certified, report.status));
    Ok(vec![ctx.out.write_json(CERTIFY_JSON, &report)?])
}

#[derive(Debug, Serialize)]
struct OracleOutput {
    parameters: std::collections::BTreeMap<&'static str, f64>,
    #[serde(flatten)]
    solution: ClosedFormSolution,
}

/// Closed-form solution, available for constant coefficients equal to the
/// reference values with a prescribed temperature or flux.
pub fn oracle(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let config = ctx.config();
    let r = &config.reference;
    let CoefficientsConfig::Constant { k, rho_c, .. } = &config.coefficients else {
        return Err(CliError::Config("oracle: closed forms need the constant coefficient family".into()));
    };
    let same = |given: Option<f64>, reference: f64| given.map_or(true, |v| (v - reference).abs() <= 1e-12 * reference);
    if !same(*k, r.k0) || !same(*rho_c, r.rho0 * r.c0) {
        return Err(CliError::Config("oracle: closed forms need k = k0 and rho_c = rho0 c0".into()));
    }
    let p = prepare(config, &ctx.loaded.base_dir)?;
    let pe = p.problem.mu(0.5);
    let params = p.problem.strategy().parameters();
    let lambda_max = p.settings.lambda_max;
    let stage = |e| CliError::core("closed form", e);
    let solution = match p.bc.kind() {
        BcKind::Dirichlet => dirichlet_constant_with(params["Ste"], pe, lambda_max).map_err(stage)?,
        BcKind::Neumann => {
            let (q_star, m) = (params["q_star"], params["M"]);
            neumann_constant_with(q_star / m, pe, lambda_max).and_then(|s| s.with_q_star(q_star)).map_err(stage)?
        }
        kind => {
            return Err(CliError::Config(format!("oracle: no closed form for the {} condition", kind.name())));
        }
    };
    note(ctx.quiet, format!("lambda = {} (unique: {})", solution.lambda, solution.unique));
    let grid = solution.profile_grid(p.settings.grid).map_err(stage)?;
    let rows: Vec<[String; 2]> = grid.nodes().zip(&grid.f).map(|(xi, f)| [num(xi), num(*f)]).collect();
    let out = OracleOutput { parameters: params, solution };
    Ok(vec![
        ctx.out.write_json(ORACLE_JSON, &out)?,
        ctx.out.write_csv(ORACLE_PROFILE_CSV, &["xi", "f"], rows)?,
    ])
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    lambda: f64,
    certified: bool,
    #[serde(flatten)]
    discrepancy: DiscrepancyReport,
}

pub fn verify_pde(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let p = prepare(ctx.config(), &ctx.loaded.base_dir)?;
    let report = run_solve(&p)?;
    let sol = PhysicalSolution::from_report(&report, &p.model, p.bc).map_err(|e| CliError::core("reconstruction", e))?;
    let scheme = ctx.config().verify.unwrap_or_default();
    let discrepancy = verify(&sol, &p.model, &p.bc, &scheme).map_err(|e| CliError::core("front-fixed scheme", e))?;
    note(
        ctx.quiet,
        format!("front discrepancy {:.3e}, temperature discrepancy {:.3e}", discrepancy.s_max_relative, discrepancy.t_max_relative),
    );
    let out = VerifyOutput { lambda: report.lambda, certified: report.existence.certified, discrepancy };
    Ok(vec![ctx.out.write_json(VERIFY_JSON, &out)?])
}
