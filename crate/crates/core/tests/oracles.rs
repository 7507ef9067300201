//! Frozen-value oracles for the solver and verification layers.

use quasilin::params::{ProblemParams, StructureBounds};
use quasilin::radial::{m_harmonic, RadialGrid, RadialProfile};
use quasilin::solver::{
    fixed_point_solve_with, homotopy_solve_with, log_ladder, nonexistence_probe_with, principal_eigenpair,
    DirichletProblem, ProbeOptions, SolveOptions,
};
use quasilin::verify::{harnack_ratio, integral_scalings, weak_harnack};
use quasilin::Error;

fn canonical(lambda: f64) -> DirichletProblem {
    let params = ProblemParams::new(3, 2.0, 1.2, 0.3).unwrap();
    let bounds = StructureBounds::with_alpha1(&params, 1.0, 1.0, 0.1, 2.25, 1.2).unwrap();
    DirichletProblem::new(params, bounds, lambda, 1.0).unwrap()
}

fn cold(prob: &DirichletProblem, opts: &SolveOptions) -> RadialProfile {
    prob.cold_start(prob.grid(opts.nodes).unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn canonical_solve_frozen() {
    let prob = canonical(0.5);
    let opts = SolveOptions::default();
    let r = fixed_point_solve_with(&prob, &cold(&prob, &opts), &opts).unwrap();
    assert!(r.converged && !r.trivial);
    assert!(r.final_residual <= 1e-6, "{}", r.final_residual);
    assert!(r.min_interior > 0.0);
    assert_eq!(r.iterations, 28);
    assert!(rel(r.profile.sup(), 0.087358295699303) <= 1e-9, "{}", r.profile.sup());
    assert!(rel(r.harnack_ratio.unwrap(), 0.770977544153506) <= 1e-6);
    assert!(r.picone_slack.unwrap() > 0.0);
}

#[test]
fn single_stage_homotopy_is_the_fixed_point_solve() {
    let opts = SolveOptions { nodes: 1024, ..SolveOptions::default() };
    let stages = homotopy_solve_with(&canonical(7.0), &[1.0], 0.5, &opts).unwrap();
    let prob = canonical(0.5);
    let direct = fixed_point_solve_with(&prob, &cold(&prob, &opts), &opts).unwrap();
    assert_eq!(stages.len(), 1);
    assert_eq!(stages[0], direct);
}

#[test]
fn solutions_are_ordered_in_the_forcing() {
    let opts = SolveOptions { nodes: 1024, picone: false, ..SolveOptions::default() };
    let solve = |lambda: f64| {
        let prob = canonical(lambda);
        fixed_point_solve_with(&prob, &cold(&prob, &opts), &opts).unwrap().profile
    };
    let (lo, hi) = (solve(0.25), solve(0.5));
    assert!(lo.u().iter().zip(hi.u()).all(|(a, b)| a <= b));
    assert!(hi.sup() > lo.sup());
}

#[test]
fn damping_does_not_change_the_fixed_point() {
    let prob = canonical(0.5);
    let base = SolveOptions { nodes: 1024, picone: false, ..SolveOptions::default() };
    let a = fixed_point_solve_with(&prob, &cold(&prob, &base), &base).unwrap();
    let full = SolveOptions { omega: 1.0, ..base };
    let b = fixed_point_solve_with(&prob, &cold(&prob, &full), &full).unwrap();
    assert!(a.converged && b.converged);
    let gap = a.profile.u().iter().zip(b.profile.u()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(gap <= 1e-9 * a.profile.sup(), "{gap:e}");
}

#[test]
fn large_forcing_does_not_converge() {
    let prob = canonical(1e3);
    let opts = SolveOptions { nodes: 512, picone: false, ..SolveOptions::default() };
    match fixed_point_solve_with(&prob, &cold(&prob, &opts), &opts) {
        Err(e @ Error::NonConvergence { .. }) => assert!(e.is_nonconvergence()),
        Ok(r) => assert!(!r.converged),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn nonexistence_bracket_frozen() {
    let opts = ProbeOptions {
        solve: SolveOptions { nodes: 1024, ..ProbeOptions::default().solve },
        ..ProbeOptions::default()
    };
    let b = nonexistence_probe_with(&canonical(0.0), &log_ladder(1.0, 100.0, 5), &opts).unwrap();
    assert!(b.monotone);
    assert!(rel(b.lambda_lo, 10f64.sqrt()) <= 1e-12 && rel(b.lambda_hi, 10.0) <= 1e-12);
    assert!(b.outcomes[..2].iter().all(|o| o.converged));
    assert!(!b.outcomes[2].converged);
    assert!(b.rate_lo < b.rate_hi);
    assert!(!b.rate_exceeds_lambda1);
    assert!(rel(b.lambda1, std::f64::consts::PI.powi(2)) <= 1e-5);
}

#[test]
fn eigenvalue_scales_with_radius() {
    for m in [1.5, 2.0, 3.0] {
        let a = principal_eigenpair(3, m, 1.0).unwrap();
        let b = principal_eigenpair(3, m, 0.5).unwrap();
        assert!(rel(b.lambda1, a.lambda1 * 2f64.powf(m)) <= 1e-9, "m = {m}");
        assert!(rel(a.rayleigh, a.lambda1) <= 1e-4, "m = {m}: {} vs {}", a.rayleigh, a.lambda1);
    }
}

#[test]
fn one_dimensional_laplace_eigenvalue() {
    let e = principal_eigenpair(1, 2.0, 1.0).unwrap();
    assert!(rel(e.lambda1, std::f64::consts::PI.powi(2) / 4.0) <= 1e-6, "{}", e.lambda1);
    assert!(e.phi1.u().iter().all(|&v| v >= 0.0));
}

#[test]
fn harnack_constants_of_an_explicit_decreasing_profile() {
    // u = 1 - r^2 / 2 on [0, 1]: sup over B_R is 1, inf is 1 - R^2 / 2
    let g = RadialGrid::uniform(0.0, 1.0, 512).unwrap();
    let u = RadialProfile::from_fn(g, |r| 1.0 - 0.5 * r * r, |r| -r).unwrap();
    let ratio = harnack_ratio(&u, 0.25, 0.0, 2.0).unwrap();
    // the value at r = R is interpolated linearly inside its cell
    assert!(rel(ratio, 1.0 / (1.0 - 0.5 * 0.0625)) <= 1e-5, "{ratio}");
    let w = weak_harnack(&u, 3, 2.0, 0.25, 1.0).unwrap();
    assert!(w > 0.0 && w.is_finite());
}

#[test]
fn scaling_fit_recovers_power_laws_of_a_fundamental_solution() {
    // u = r^{-1} in three dimensions (m = 2): the ball integrals of u and |u'|
    // grow like R^2 and R^1
    let g = RadialGrid::geometric(1e-4, 2.0, 2000).unwrap();
    let u = m_harmonic(3, 2.0, 0.0, 1.0, g).unwrap();
    let params = ProblemParams::new(3, 2.0, 0.0, 2.0).unwrap();
    let r = integral_scalings(&u, &params, 2.0, 1.0, 1.0, &[0.05, 0.1, 0.2, 0.4, 0.8]).unwrap();
    assert!((r.u_power.fitted_slope - 2.0).abs() <= 1e-3, "{}", r.u_power.fitted_slope);
    assert!((r.gradient_power.fitted_slope - 1.0).abs() <= 1e-3, "{}", r.gradient_power.fitted_slope);
    assert!(r.u_power.r2 > 0.999999);
}
