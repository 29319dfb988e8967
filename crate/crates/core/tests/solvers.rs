//! End-to-end behaviour of the two extragradient methods.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vip_core::extragradient::diagnostics::{self, DEFAULT_SLACK};
use vip_core::extragradient::{
    armijo_search, einexpm_step, einexpmls_step, gamma_schedule, halfspace_stepsize, StepOutcome,
};
use vip_core::oracles::halfspace_project;
use vip_core::problem::FnField;
use vip_core::problems::{
    linear_saddle_operator, nonlipschitz_operator, th_operator, zero_operator, BenchmarkProblem, MonotonicityClass,
};
use vip_core::{
    dot, einexpm_solve, einexpmls_solve, ASchedule, EInexPmConfig, LsConfig, PNormBall, Point, SolveStatus,
    StopRule, VipError,
};

fn assert_no_violations(label: &str, checks: &[diagnostics::InequalityCheck]) {
    let bad = diagnostics::violations(checks, DEFAULT_SLACK);
    assert!(bad.is_empty(), "{label}: {:?}", bad.first());
}

/// `F(x) = x - c` on the Euclidean unit ball with `||c|| > 1`: strongly monotone,
/// Lipschitz 1, solution `c / ||c||`.
fn shifted_identity(c: [f64; 2]) -> (BenchmarkProblem, Point) {
    let c = Point::from(c);
    let target = c.clone();
    let field = FnField::new(2, move |x: &Point| x - &target);
    let x_star = c.scale(1.0 / c.norm());
    let problem = BenchmarkProblem {
        name: "shifted-identity".into(),
        field: Arc::new(field),
        set: Arc::new(PNormBall::new(2, 2.0).unwrap()),
        x_start: Point::from([0.0, -0.5]),
        x_ref: Some(x_star.clone()),
        lipschitz: Some(1.0),
        monotonicity: MonotonicityClass::Monotone,
    };
    (problem, x_star)
}

#[test]
fn zero_operator_stops_at_the_first_iterate() {
    let problem = zero_operator(3).unwrap();
    let (x, trace) = einexpm_solve(&problem, &EInexPmConfig::default(), &problem.x_start).unwrap();
    assert_eq!((trace.status, trace.outer_steps), (SolveStatus::Converged, 1));
    assert_eq!(x, problem.x_start);

    let (x, trace) = einexpmls_solve(&problem, &LsConfig::default(), &problem.x_start).unwrap();
    assert_eq!((trace.status, trace.outer_steps), (SolveStatus::Converged, 1));
    assert_eq!(x, problem.x_start);
}

#[test]
fn schedule_examples() {
    let harmonic = ASchedule::Harmonic { b_bar: 1.0 };
    assert_eq!(harmonic.a(1), 1.0);
    assert_eq!(gamma_schedule(1, 0.0, 0.2, &harmonic), 0.999 * 0.2);
    let g = gamma_schedule(3, 10.0, 0.2, &harmonic);
    assert!((g - (1.0f64 / 60.0).min(0.999 * 0.2)).abs() < 1e-16);
    assert!((gamma_schedule(3, 10.0, 0.01, &harmonic) - 0.999 * 0.01).abs() < 1e-16);
}

#[test]
fn armijo_accepts_immediately_for_a_constant_operator() {
    let field = FnField::new(2, |_: &Point| Point::from([1.0, -2.0]));
    let x = Point::from([0.2, 0.1]);
    // Any y with <F, y - x> <= 0, as the projection step guarantees.
    let y = Point::from([-0.3, 0.6]);
    let (i, z) = armijo_search(&x, &y, &field, &LsConfig::default()).unwrap();
    assert_eq!(i, 0);
    assert!(z.dist(&x.add_scaled(0.9, &(&y - &x))) < 1e-15);
    assert!(armijo_search(&x, &x, &field, &LsConfig::default()).is_err());
}

#[test]
fn halfspace_stepsize_examples() {
    let x = Point::from([0.5, 0.0]);
    let z = Point::from([0.0, 0.0]);
    assert_eq!(halfspace_stepsize(&x, &z, &[1.0, 0.0].into()).unwrap(), 0.5);
    // x on the boundary of the halfspace.
    let on = Point::from([0.0, 3.0]);
    assert_eq!(halfspace_stepsize(&on, &z, &[1.0, 0.0].into()).unwrap(), 0.0);
    assert!(matches!(halfspace_stepsize(&x, &z, &Point::zeros(2)), Err(VipError::VanishingOperator)));
}

#[test]
fn halfspace_step_is_the_exact_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let d = rng.random_range(2..=6);
        let mut draw = || Point::new((0..d).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>());
        let (x, z, mut fz) = (draw(), draw(), draw());
        if dot(&fz, &(&x - &z)).unwrap() < 0.0 {
            fz = -&fz;
        }
        let lambda = halfspace_stepsize(&x, &z, &fz).unwrap();
        assert!(lambda >= 0.0);
        let via = x.add_scaled(-lambda, &fz);
        let exact = halfspace_project(&x, &fz, &z).unwrap();
        assert!(via.dist(&exact) <= 1e-12);
        // KKT: on the boundary, displaced along the normal.
        assert!(dot(&fz, &(&exact - &z)).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn solution_is_a_fixed_point_of_one_step() {
    let problem = th_operator(5, 10.0, 0.6).unwrap();
    let x_star = problem.x_ref.clone().unwrap();
    let cfg = EInexPmConfig { alpha: 0.3, gamma_bar: 0.106, ..EInexPmConfig::default() };
    let (outcome, record) = einexpm_step(&problem, &cfg, &x_star, 1).unwrap();
    assert!(matches!(outcome, StepOutcome::Converged(_)));
    assert!(record.displacement() <= cfg.stop.tol());

    let ls = LsConfig::default();
    let (outcome, _) = einexpmls_step(&problem, &ls, &x_star, 1).unwrap();
    assert!(matches!(outcome, StepOutcome::Converged(_)));
}

#[test]
fn repeated_runs_are_bit_identical() {
    let problem = linear_saddle_operator();
    let cfg = EInexPmConfig { alpha: 0.21, gamma_bar: 0.106, ..EInexPmConfig::default() };
    let a = einexpm_solve(&problem, &cfg, &problem.x_start).unwrap();
    let b = einexpm_solve(&problem, &cfg, &problem.x_start).unwrap();
    assert_eq!(a, b);
    let ls = LsConfig::default();
    let a = einexpmls_solve(&nonlipschitz_operator(), &ls, &[0.0, 1.0].into()).unwrap();
    let b = einexpmls_solve(&nonlipschitz_operator(), &ls, &[0.0, 1.0].into()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn constant_step_audits_on_a_strongly_monotone_problem() {
    let (problem, x_star) = shifted_identity([2.0, 1.0]);
    let cfg = EInexPmConfig { alpha: 0.5, gamma_bar: 0.2, ..EInexPmConfig::default() };
    assert!(cfg.step_within_guarantee(1.0));
    let (x, trace) = einexpm_solve(&problem, &cfg, &problem.x_start).unwrap();
    assert_eq!(trace.status, SolveStatus::Converged);
    assert!(x.dist(&x_star) <= 1e-4);
    assert_no_violations("quasi-Fejer", &diagnostics::quasi_fejer(&trace, &x_star, &cfg, 1.0));
    assert_no_violations("step bounds", &diagnostics::step_bounds(&trace));
    assert_no_violations("budget", &[diagnostics::tolerance_budget(&trace, &cfg.schedule)]);
    assert!(diagnostics::infeasible_iterates(&trace, problem.set.as_ref()).is_empty());
}

#[test]
fn sweep_cell_is_within_two_steps_of_the_reference_count() {
    let problem = linear_saddle_operator();
    let cfg = EInexPmConfig {
        alpha: 0.21,
        gamma_bar: 0.106,
        stop: StopRule::Displacement { tol: 4.5e-5 },
        ..EInexPmConfig::default()
    };
    let (_, trace) = einexpm_solve(&problem, &cfg, &problem.x_start).unwrap();
    assert_eq!(trace.status, SolveStatus::Converged);
    // Reference count: 11 outer steps. The stop tolerance is not fixed, so +-2 is the accepted band.
    assert!(trace.outer_steps.abs_diff(11) <= 2, "{}", trace.outer_steps);
    assert_no_violations("step bounds", &diagnostics::step_bounds(&trace));
    assert_no_violations("budget", &[diagnostics::tolerance_budget(&trace, &cfg.schedule)]);
    assert!(diagnostics::infeasible_iterates(&trace, problem.set.as_ref()).is_empty());
}

#[test]
fn line_search_run_on_the_non_lipschitz_problem() {
    let problem = nonlipschitz_operator();
    let x_star = problem.x_ref.clone().unwrap();
    let cfg = LsConfig { stop: StopRule::NearReference { tol: 1e-2 }, ..LsConfig::default() };
    let (x, trace) = einexpmls_solve(&problem, &cfg, &problem.x_start).unwrap();
    assert_eq!(trace.status, SolveStatus::Converged);
    assert!(x.dist(&x_star) <= 1e-2);
    assert!(trace.records.iter().all(|r| r.i_k.is_some() || r.x_next.is_none()));
    assert_no_violations("Fejer", &diagnostics::fejer_monotone(&trace, &x_star));
    assert_no_violations("decrease", &diagnostics::halfspace_decrease(&trace, &x_star, &cfg));
    assert_no_violations("step bounds", &diagnostics::step_bounds(&trace));
    assert_no_violations("descent", &diagnostics::descent_lower_bound(&trace, &cfg));
    assert_no_violations("separation", &diagnostics::separation(&trace));
    assert_no_violations("Armijo", &diagnostics::armijo_acceptance(&trace, &cfg));
    assert!(diagnostics::infeasible_iterates(&trace, problem.set.as_ref()).is_empty());
}

#[test]
fn max_outer_is_a_status_not_an_error() {
    let problem = linear_saddle_operator();
    let cfg = EInexPmConfig { alpha: 0.01, max_outer: 3, ..EInexPmConfig::default() };
    let (_, trace) = einexpm_solve(&problem, &cfg, &problem.x_start).unwrap();
    assert_eq!(trace.status, SolveStatus::MaxOuter);
    assert_eq!(trace.records.len(), 3);
}

#[test]
fn invalid_configurations_are_rejected() {
    let problem = linear_saddle_operator();
    let x = problem.x_start.clone();
    for cfg in [
        EInexPmConfig { alpha: 0.0, ..EInexPmConfig::default() },
        EInexPmConfig { gamma_bar: 0.5, ..EInexPmConfig::default() },
        EInexPmConfig { max_outer: 0, ..EInexPmConfig::default() },
    ] {
        assert!(einexpm_solve(&problem, &cfg, &x).is_err());
    }
    let too_loose = LsConfig { gamma_bar: 0.3, ..LsConfig::default() };
    assert!(einexpmls_solve(&problem, &too_loose, &x).is_err());
    assert!(einexpm_solve(&problem, &EInexPmConfig::default(), &[2.0, 0.0].into()).is_err());
    // No reference solution to stop on.
    let near = EInexPmConfig { stop: StopRule::NearReference { tol: 1e-2 }, ..EInexPmConfig::default() };
    assert!(einexpm_solve(&problem, &near, &x).is_err());
}
