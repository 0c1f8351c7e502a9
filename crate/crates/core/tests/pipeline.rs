use std::sync::Arc;

use approx::assert_relative_eq;
use stefan_core::boundary::{BoundaryRegistry, BoundaryStrategy, Dirichlet};
use stefan_core::closed_form::{dirichlet_constant, neumann_constant};
use stefan_core::coefficients::{
    build_dimensionless, build_dimensionless_with, BoundaryCondition, BoundsSource, BuildOptions, ConstantCoefficients,
    LinearCoefficients, TabulatedCoefficients, ThermalModel,
};
use stefan_core::existence::{certify, CertificateStatus};
use stefan_core::lambda_solver::{solve_lambda, SolverSettings};
use stefan_core::pde_verifier::{verify, FrontFixedScheme};
use stefan_core::reconstruct::{PhysicalSolution, Temperature};
use stefan_core::Error;

fn constant_model(pe: f64, ell: f64) -> ThermalModel {
    let coeff = ConstantCoefficients::from_peclet(2.0, 1.5, 0.8, pe).unwrap();
    ThermalModel::new(Arc::new(coeff), 2.0, 1.5, 0.8, ell).unwrap()
}

#[test]
fn physical_dirichlet_reproduces_closed_form_field() {
    let (t_m, t_star) = (5.0, 6.0);
    // Ste = (T* - T_m) c0 / ell = 1.
    let model = constant_model(0.0, 0.8);
    let bc = BoundaryCondition::dirichlet(t_m, t_star);
    let prob = build_dimensionless(&model, &bc).unwrap();
    let report = solve_lambda(&prob, &SolverSettings::default()).unwrap();
    let oracle = dirichlet_constant(1.0, 0.0).unwrap();
    assert!((report.lambda - oracle.lambda).abs() < 1e-6);

    let sol = PhysicalSolution::from_report(&report, &model, bc).unwrap();
    let t = 1.0;
    let s = sol.front_position(t).unwrap();
    let Temperature::Inside(mid) = sol.temperature_at(0.5 * s, t).unwrap() else { panic!("inside the liquid") };
    let expected = (t_m - t_star) * oracle.profile(0.5 * oracle.lambda) + t_star;
    assert!((mid - expected).abs() < 1e-6, "{mid} vs {expected}");
    assert_eq!(sol.temperature_at(0.0, t).unwrap(), Temperature::Inside(t_star));
    assert!(sol.stefan_residual(&model, t).unwrap() <= 1e-3);
}

#[test]
fn ambient_fields_stay_between_melting_and_ambient() {
    let model = {
        let coeff = LinearCoefficients::from_reference(1.0, 1.0, 1.0, 0.1, 0.2, 0.4, 400.0, 300.0).unwrap();
        ThermalModel::new(Arc::new(coeff), 1.0, 1.0, 1.0, 100.0).unwrap()
    };
    for bc in [
        BoundaryCondition::dirichlet(300.0, 400.0),
        BoundaryCondition::robin(300.0, 2.0, 400.0),
        BoundaryCondition::radiative(300.0, 0.3, 5.67e-8, 0.01, 400.0),
    ] {
        let prob = build_dimensionless(&model, &bc).unwrap();
        let report = solve_lambda(&prob, &SolverSettings::default()).unwrap();
        let sol = PhysicalSolution::from_report(&report, &model, bc).unwrap();
        for (_, temp) in sol.sample_field(3.0, 64).unwrap() {
            assert!((300.0 - 1e-9..=400.0 + 1e-9).contains(&temp), "{:?}: {temp}", bc.kind());
        }
        assert!(sol.stefan_residual(&model, 3.0).unwrap() <= 1e-3);
    }
}

#[test]
fn strong_radiation_reports_inner_non_convergence() {
    let coeff = LinearCoefficients::from_reference(1.0, 1.0, 1.0, 0.1, 0.2, 0.4, 400.0, 300.0).unwrap();
    let model = ThermalModel::new(Arc::new(coeff), 1.0, 1.0, 1.0, 100.0).unwrap();
    let bc = BoundaryCondition::radiative(300.0, 1.0, 5.67e-8, 0.3, 400.0);
    let prob = build_dimensionless(&model, &bc).unwrap();
    assert!(!certify(&prob).certified);
    let err = solve_lambda(&prob, &SolverSettings::default()).unwrap_err();
    assert!(matches!(err, Error::InnerNonConvergence { iterations: 200, .. }), "{err}");
}

#[test]
fn physical_neumann_matches_closed_form_with_front_coefficient() {
    let t_m = 2.0;
    let model = constant_model(0.3, 1.7);
    let bc = BoundaryCondition::neumann(t_m, 0.9);
    let prob = build_dimensionless(&model, &bc).unwrap();
    let params = prob.strategy().parameters();
    let (q_star, m) = (params["q_star"], params["M"]);
    assert!((m - 1.0).abs() > 0.1, "exercise a non-unit front coefficient");

    let report = solve_lambda(&prob, &SolverSettings { grid: 2048, ..SolverSettings::default() }).unwrap();
    let oracle = neumann_constant(q_star / m, 0.3).unwrap().with_q_star(q_star).unwrap();
    assert!((report.lambda - oracle.lambda).abs() < 1e-6);
    for (j, xi) in report.profile.nodes().enumerate().step_by(64) {
        assert!((report.profile.f[j] - oracle.profile(xi)).abs() < 1e-6);
    }
}

#[test]
fn registry_selects_and_rejects_strategies_by_name() {
    let model = constant_model(0.2, 1.0);
    let bc = BoundaryCondition::robin(0.0, 1.0, 1.0);
    let registry = BoundaryRegistry::with_builtins();
    assert_eq!(registry.names().collect::<Vec<_>>(), ["dirichlet", "neumann", "radiative", "robin"]);
    assert!(matches!(registry.build_named("stefan", &bc, &model), Err(Error::UnknownBoundary(_))));

    let mut custom = BoundaryRegistry::empty();
    custom.register("robin", |bc, model| {
        let ste = (bc.t_star().unwrap() - bc.t_melt) * model.c0 / model.ell;
        Ok(Arc::new(Dirichlet::new(ste)?) as Arc<dyn BoundaryStrategy>)
    });
    let prob = build_dimensionless_with(&model, &bc, &custom, &BuildOptions::default()).unwrap();
    assert_eq!(prob.strategy().name(), "dirichlet");
    let missing = build_dimensionless_with(&model, &BoundaryCondition::dirichlet(0.0, 1.0), &custom, &BuildOptions::default());
    assert!(matches!(missing, Err(Error::UnknownBoundary(name)) if name == "dirichlet"));
}

#[test]
fn tabulated_coefficients_solve_with_sampled_bounds() {
    let csv = "T,k,rho_c,mu\n0,1.0,1.0,0.2\n0.5,1.1,1.05,0.25\n1.0,1.15,1.1,0.3\n";
    let table = TabulatedCoefficients::from_reader(csv.as_bytes()).unwrap();
    // Ste = 0.02 keeps the bracket inside the contraction region.
    let model = ThermalModel::new(Arc::new(table), 1.0, 1.0, 1.0, 50.0).unwrap();
    let prob = build_dimensionless(&model, &BoundaryCondition::dirichlet(0.0, 1.0)).unwrap();
    assert_eq!(prob.bounds_source(), BoundsSource::Sampled);
    let cert = certify(&prob);
    assert!(!cert.certified);
    assert_eq!(cert.status, CertificateStatus::Heuristic, "{cert:#?}");
    let report = solve_lambda(&prob, &SolverSettings::default()).unwrap();
    assert!(report.stefan_residual <= 1e-3);
    assert_eq!(report.existence.bounds_source, BoundsSource::Sampled);
}

#[test]
fn missing_bounds_error_when_estimation_is_disabled() {
    let table = TabulatedCoefficients::new(vec![0.0, 1.0], vec![1.0, 1.2], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
    let model = ThermalModel::new(Arc::new(table), 1.0, 1.0, 1.0, 1.0).unwrap();
    let opts = BuildOptions { estimate: false, ..BuildOptions::default() };
    let r = build_dimensionless_with(&model, &BoundaryCondition::dirichlet(0.0, 1.0), &BoundaryRegistry::with_builtins(), &opts);
    assert!(matches!(r, Err(Error::MissingBounds)));
}

fn dirichlet_solution(ste: f64) -> (PhysicalSolution, ThermalModel, BoundaryCondition) {
    let coeff = ConstantCoefficients::new(1.0, 1.0, 0.0).unwrap();
    let model = ThermalModel::new(Arc::new(coeff), 1.0, 1.0, 1.0, 1.0 / ste).unwrap();
    let bc = BoundaryCondition::dirichlet(0.0, 1.0);
    let prob = build_dimensionless(&model, &bc).unwrap();
    let report = solve_lambda(&prob, &SolverSettings { grid: 2048, ..SolverSettings::default() }).unwrap();
    (PhysicalSolution::from_report(&report, &model, bc).unwrap(), model, bc)
}

#[test]
fn front_discrepancy_decreases_under_refinement() {
    let (sol, model, bc) = dirichlet_solution(0.5);
    let d: Vec<f64> = [50, 100, 200]
        .into_iter()
        .map(|nodes| verify(&sol, &model, &bc, &FrontFixedScheme { nodes, t0: 1.0, t1: 1.5 }).unwrap().s_final_relative)
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    assert_relative_eq!(d[0] / d[1], 2.0, max_relative = 0.25);
}

#[test]
fn flux_conditions_pass_the_pde_cross_check() {
    let coeff = LinearCoefficients::from_reference(1.0, 1.0, 1.0, 0.1, 0.1, 0.2, 2.0, 1.0).unwrap();
    let model = ThermalModel::new(Arc::new(coeff), 1.0, 1.0, 1.0, 2.0).unwrap();
    for bc in [
        BoundaryCondition::neumann(1.0, 0.5),
        BoundaryCondition::robin(1.0, 1.0, 2.0),
        BoundaryCondition::radiative(1.0, 0.5, 1.0, 0.01, 2.0),
    ] {
        let prob = build_dimensionless(&model, &bc).unwrap();
        let report = solve_lambda(&prob, &SolverSettings { grid: 1024, ..SolverSettings::default() }).unwrap();
        let sol = PhysicalSolution::from_report(&report, &model, bc).unwrap();
        let r = verify(&sol, &model, &bc, &FrontFixedScheme { nodes: 120, t0: 1.0, t1: 1.3 }).unwrap();
        assert!(r.s_max_relative < 5e-3, "{:?}: {r:?}", bc.kind());
        assert!(r.t_max_relative < 1e-2, "{:?}: {r:?}", bc.kind());
    }
}
