//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use quasilin::bernstein::{coefficients, discriminant_raw, reduced_discriminant, search, BernsteinFrame};
use quasilin::params::{classify_liouville, feasibility_scan, Condition, FPredicate, ProblemParams, StructureBounds};
use quasilin::radial::{
    blowup_shoot, fit_explicit_bubble, invert_t, m_harmonic, m_laplacian_residual, residual_with, singular_profile,
    BlowupOptions, BubbleOptions, PEqualsMTransform, RadialGrid, RadialProfile,
};
use quasilin::solver::{homotopy_solve, log_ladder, nonexistence_probe, principal_eigenpair, DirichletProblem};
use quasilin::verify::{exponent_identity_gap, integral_scalings, liouville_probe, ProbeOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn pp(n: u32, m: f64, p: f64, q: f64) -> ProblemParams {
    ProblemParams::new(n, m, p, q).expect("valid parameters")
}

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn reduction_chain() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut draws = 0;
    while draws < 1000 {
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(1.0..4.0);
        let p = rng.gen_range(0.0..m);
        let big_q = rng.gen_range(0.05..5.0);
        let q = big_q - p + m - 1.0;
        if q < 0.0 {
            continue;
        }
        let params = pp(n, m, p, q);
        let beta = rng.gen_range(1.0..6.0);
        let lambda = rng.gen_range(-12.0..-2.05);
        let frame = BernsteinFrame::from_beta_lambda(&params, beta, lambda, 0.0).map_err(err)?;
        let d2 = reduced_discriminant(&params, frame.s_bar, frame.l).map_err(err)?;
        let c = coefficients(&params, beta, lambda).map_err(err)?;
        let nf = n as f64;
        let rhs = nf * params.big_q() * beta.powf(2.0 * (m - p - 1.0)) * discriminant_raw(&c) / (lambda + 2.0).powi(2);
        let rel = (d2 - rhs).abs() / d2.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        draws += 1;
    }
    ensure(worst <= 1e-9, format!("max relative gap {worst:.2e} over {draws} draws (tol 1e-9)"))
}

fn worked_frame() -> Check {
    let params = pp(2, 2.0, 0.0, 2.0);
    let r = search(&params).map_err(err)?;
    let c = coefficients(&params, 4.0, -6.0).map_err(err)?;
    let gaps = [
        (r.d2 + 1.75).abs(),
        (r.alpha - 0.5).abs(),
        (r.gradient_exponent + 2.0).abs(),
        (c.a1 - 7.5).abs(),
        (c.a2 + 0.25).abs(),
        (c.a6 - 1.0 / 32.0).abs(),
    ];
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    ensure(
        worst <= 1e-12,
        format!(
            "D2={} alpha={} exponent={} A1={} A2={} A6={} (max gap {worst:.1e}, tol 1e-12)",
            r.d2, r.alpha, r.gradient_exponent, c.a1, c.a2, c.a6
        ),
    )
}

fn search_equivalence() -> Check {
    let dims = [2u32, 3, 4, 6, 10];
    let ms: Vec<f64> = (0..10).map(|i| 1.1 + 0.3 * i as f64).collect();
    let mut points = Vec::new();
    for &n in &dims {
        for &m in &ms {
            for i in 0..10 {
                let p = m * i as f64 / 10.0;
                for j in 0..22 {
                    // Q spread over (0, 6.6]
                    let big_q = 0.3 * (j as f64 + 0.5);
                    let q = big_q - p + m - 1.0;
                    if q >= 0.0 {
                        points.push(pp(n, m, p, q));
                    }
                }
            }
        }
    }
    let points: Vec<ProblemParams> = points.into_iter().take(10_000).collect();
    if points.len() < 10_000 {
        return Err(format!("grid produced only {} admissible points", points.len()));
    }
    let mut mismatches = 0;
    let mut successes = 0;
    for params in &points {
        let rep = classify_liouville(params);
        let ok = |c: Condition| rep.certificate(c).is_some_and(|x| x.pass);
        let case_i = ok(Condition::CaseIQLower) && ok(Condition::CaseIQUpper) && ok(Condition::CaseIGrowth);
        let case_ii = ok(Condition::CaseIIQUpper) && ok(Condition::CaseIIGrowth);
        let found = search(params).is_ok();
        successes += found as usize;
        if found != (case_i || case_ii) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, format!("{mismatches} mismatches over {} points ({successes} frames found)", points.len()))
}

fn inversion_oracle() -> Check {
    let grid = RadialGrid::uniform(0.0, 1.0, 4096).map_err(err)?;
    let mut worst = 0.0f64;
    for (m, n) in [(2.0, 3u32), (3.0, 3), (1.5, 4)] {
        let w = invert_t(&RadialProfile::constant(grid.clone(), 1.0).map_err(err)?, m, n).map_err(err)?;
        let nf = n as f64;
        for (r, wi) in grid.nodes().iter().zip(w.u()) {
            let exact = (m - 1.0) / m * nf.powf(-1.0 / (m - 1.0)) * (1.0 - r.powf(m / (m - 1.0)));
            worst = worst.max((wi - exact).abs());
        }
    }
    ensure(worst <= 1e-8, format!("sup error {worst:.2e} at n=4096 (tol 1e-8)"))
}

fn transform_residual(q: f64, n: usize) -> Result<f64, String> {
    let params = pp(3, 2.0, 2.0, q);
    let v = m_harmonic(3, 2.0, 0.0, 1.0, RadialGrid::uniform(0.5, 2.0, n).map_err(err)?).map_err(err)?;
    let u = PEqualsMTransform::new(2.0, q).map_err(err)?.inverse(&v).map_err(err)?;
    Ok(m_laplacian_residual(&u, &params).map_err(err)?.max_abs_residual)
}

fn transformation() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for q in [0.0, 1.0] {
        let fine = transform_residual(q, 8192)?;
        // decay is read where truncation dominates; n=8192 is at rounding level
        let ladder: Vec<f64> = [128, 256, 512].iter().map(|&n| transform_residual(q, n)).collect::<Result<_, _>>()?;
        let ratios = [ladder[0] / ladder[1], ladder[1] / ladder[2]];
        ok &= fine <= 1e-5 && ratios.iter().all(|r| *r >= 3.5);
        parts.push(format!("q={q}: residual {fine:.2e} at n=8192, decay {:.1}x/{:.1}x", ratios[0], ratios[1]));
    }
    ensure(ok, format!("{} (tol 1e-5, decay >= 3.5x)", parts.join("; ")))
}

fn explicit_bubble() -> Check {
    let fit = fit_explicit_bubble(&pp(3, 2.0, 0.0, 5.0), &BubbleOptions::default()).map_err(err)?;
    let c_exact = 3f64.powf(0.25);
    let ok = (fit.beta - 0.5).abs() <= 1e-3 && (fit.c - c_exact).abs() <= 1e-3 && fit.sup_residual <= 1e-6;
    ensure(
        ok,
        format!(
            "beta={:.6} C={:.6} (3^(1/4)={c_exact:.6}) residual {:.2e} (tol 1e-3, 1e-3, 1e-6)",
            fit.beta, fit.c, fit.sup_residual
        ),
    )
}

fn singular_and_scalings() -> Check {
    let params = pp(3, 2.0, 0.0, 4.0);
    let sp = singular_profile(&params, RadialGrid::uniform(0.01, 1.0, 4096).map_err(err)?).map_err(err)?;
    let (m, p, q, nf) = (2.0f64, 0.0f64, 4.0f64, 3.0f64);
    let theta = sp.theta;
    let balance =
        sp.amplitude.powf(m - 1.0 - q - p) * theta.powf(m - 1.0 - p) * (nf - 1.0 - (theta + 1.0) * (m - 1.0)) - 1.0;
    let a_gap = (sp.amplitude - (2.0f64 / 9.0).powf(1.0 / 3.0)).abs();

    let alpha1 = (p + m * q) / (m - p);
    let (gamma, mu) = (1.0, 1.0);
    let radii = [0.05, 0.1, 0.2, 0.4, 0.8];
    let s = integral_scalings(&sp.profile, &params, alpha1, gamma, mu, &radii).map_err(err)?;
    let want_u = nf - theta * gamma;
    let want_g = nf - (theta + 1.0) * mu;
    let e_u = (s.u_power.fitted_slope - want_u).abs() / want_u.abs();
    let e_g = (s.gradient_power.fitted_slope - want_g).abs() / want_g.abs();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_id = 0.0f64;
    let mut draws = 0;
    while draws < 100 {
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(1.1..4.0);
        let p = rng.gen_range(0.0..m * 0.95);
        let q = rng.gen_range(0.0..6.0);
        let params = pp(n, m, p, q);
        if params.big_q() <= 1e-3 {
            continue;
        }
        let gamma = rng.gen_range(1.0..3.0);
        let theta_gamma = (m - p) / params.big_q() * gamma;
        worst_id = worst_id.max(exponent_identity_gap(&params, gamma).map_err(err)? / theta_gamma.max(1.0));
        draws += 1;
    }
    let ok = a_gap <= 1e-9 && balance.abs() <= 1e-9 && e_u <= 0.02 && e_g <= 0.02 && worst_id <= 1e-12;
    ensure(
        ok,
        format!(
            "A={:.12} (gap {a_gap:.1e}, balance {balance:.1e}); slopes {:.4}/{want_u:.4} and {:.4}/{want_g:.4}; identity gap {worst_id:.1e} on 100 draws",
            sp.amplitude, s.u_power.fitted_slope, s.gradient_power.fitted_slope
        ),
    )
}

fn blowup_rate() -> Check {
    let ladder = [1e2, 1e3, 1e4, 1e5, 1e6];
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, m, p, q) in [(3, 2.0, 0.0, 4.0), (2, 2.0, 1.0, 1.0)] {
        let r = blowup_shoot(&pp(n, m, p, q), 1.0, &ladder, &BlowupOptions::default()).map_err(err)?;
        let e = r.relative_theta_error();
        ok &= e <= 0.05;
        parts.push(format!(
            "({n},{m},{p},{q}): theta {:.4} vs {:.4} ({:.2}%)",
            r.fitted_theta,
            r.expected_theta,
            100.0 * e
        ));
    }
    ensure(ok, format!("{} (tol 5%)", parts.join("; ")))
}

fn eigenpair() -> Check {
    let e1 = principal_eigenpair(3, 2.0, 1.0).map_err(err)?;
    let e2 = principal_eigenpair(3, 2.0, 2.0).map_err(err)?;
    let pi2 = std::f64::consts::PI.powi(2);
    let scaling = (e2.lambda1 * 2f64.powf(2.0) / e1.lambda1 - 1.0).abs();
    let lam = e1.lambda1;
    let res = residual_with(&e1.phi1, 3, 2.0, |_, u, _| lam * u.max(0.0).powf(1.0));
    let rel = res.max_abs_residual / lam;
    let ok = (lam - pi2).abs() <= 1e-3 && scaling <= 1e-6 && rel <= 1e-6;
    ensure(
        ok,
        format!(
            "lambda1={lam:.8} (pi^2 gap {:.1e}); R^-m scaling gap {scaling:.1e}; eigen-residual {rel:.1e} relative",
            (lam - pi2).abs()
        ),
    )
}

fn canonical(lambda: f64) -> Result<DirichletProblem, String> {
    let params = pp(3, 2.0, 1.2, 0.3);
    let bounds = StructureBounds::with_alpha1(&params, 1.0, 1.0, 0.1, 2.25, 1.2).map_err(err)?;
    DirichletProblem::new(params, bounds, lambda, 1.0).map_err(err)
}

fn existence_pipeline() -> Check {
    let prob = canonical(0.5)?;
    let stages = homotopy_solve(&prob, &[1.0, 0.5, 0.25, 0.0], 0.5).map_err(err)?;
    let s = &stages[0];
    let slack = s.picone_slack.unwrap_or(f64::NEG_INFINITY);
    let ladder = log_ladder(1e-3, 1e2, 21);
    let bracket = nonexistence_probe(&prob, &ladder).map_err(err)?;
    let finite =
        bracket.lambda_lo.is_finite() && bracket.lambda_hi.is_finite() && bracket.lambda_lo < bracket.lambda_hi;
    let ok =
        s.converged && s.lambda == 0.5 && s.final_residual <= 1e-6 && s.min_interior > 0.0 && slack >= -1e-6 && finite;
    ensure(
        ok,
        format!(
            "lambda=0.5 residual {:.2e}, min interior {:.2e}, Picone slack {slack:.4}; bracket [{:.4}, {:.4}] on 5 decades",
            s.final_residual, s.min_interior, bracket.lambda_lo, bracket.lambda_hi
        ),
    )
}

fn feasibility_finding() -> Check {
    let expected = (FPredicate::BlowupExponent, FPredicate::Subcritical);
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m) in [(3u32, 2.0f64), (5, 1.5), (4, 3.0)] {
        let r = feasibility_scan(n, m, 200).map_err(err)?;
        // with q >= 0 the pair forces m-1+m/N < p < N(m-1)/(N-1), empty iff m/N >= (m-1)/(N-1), i.e. m <= N
        let nf = n as f64;
        let symbolic = m / nf >= (m - 1.0) / (nf - 1.0);
        let hit = r.is_empty() && r.conflicting_pairs.contains(&expected) && r.most_frequent_conflict == Some(expected);
        ok &= hit && symbolic;
        parts.push(format!("({n},{m}) empty={} pair={}", r.is_empty(), hit));
    }
    ensure(ok, format!("{} at resolution 200", parts.join(", ")))
}

fn liouville() -> Check {
    let params = pp(2, 2.0, 0.0, 2.0);
    let slopes: Vec<f64> = (-20..=20).filter(|k| *k != 0).map(|k| 0.25 * k as f64).collect();
    let rep = liouville_probe(&params, 1.0, &slopes, 100.0).map_err(err)?;
    let failing = rep
        .trajectories
        .iter()
        .filter(|t| matches!(t.outward, ProbeOutcome::HitsZero | ProbeOutcome::GradientBlowup | ProbeOutcome::Overflow))
        .count();
    ensure(
        failing == rep.trajectories.len() && rep.counterexamples == 0,
        format!(
            "{failing}/{} trajectories fail before R=100, {} counterexamples",
            rep.trajectories.len(),
            rep.counterexamples
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("reduction chain identity", reduction_chain),
        ("worked frame (2,2,0,2)", worked_frame),
        ("search equivalence", search_equivalence),
        ("operator inversion oracle", inversion_oracle),
        ("gradient-critical transformation", transformation),
        ("explicit bubble", explicit_bubble),
        ("singular profile and scalings", singular_and_scalings),
        ("boundary blow-up rate", blowup_rate),
        ("principal eigenpair", eigenpair),
        ("existence pipeline", existence_pipeline),
        ("feasibility finding", feasibility_finding),
        ("Liouville probe", liouville),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed in {:.1}s", 12 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
