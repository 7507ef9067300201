//! Large (boundary blow-up) radial solutions of `Δ_m u = u^q |u'|^p`.
//!
//! Solutions of `-Δ_m u = u^q |u'|^p` are radially nonincreasing, so boundary
//! blow-up lives in the absorption form. For `p = 0` the ball problem with
//! `u'(0) = 0` is shot from the center value; for `p > 0` the only
//! center-regular solutions are constant, so the annulus `[R/2, R]` with
//! `u(R/2) = 1` is shot from the inner slope. Each ladder value `U` is hit by
//! bisection on the shooting parameter, since `u(R)` is increasing in it.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ode::{self, OdeOptions, Stop};
use crate::params::ProblemParams;
use crate::quadrature::linear_fit;
use crate::radial::profile::{RadialGrid, RadialProfile};

pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy)]
pub struct BlowupOptions {
    /// Uniform nodes before the geometric boundary cluster.
    pub n_uniform: usize,
    pub cluster_ratio: f64,
    /// Smallest boundary distance resolved, relative to R.
    pub d_min_rel: f64,
    /// Relative sup-norm tolerance between the last two ladder members on r <= 0.9 R.
    pub cauchy_tol: f64,
    /// Fit window: boundary distance at most this fraction of R.
    pub window_d_max_rel: f64,
    /// Fit window: values at most this fraction of the largest boundary value.
    pub window_u_frac: f64,
    pub execution: Execution,
}

impl Default for BlowupOptions {
    fn default() -> Self {
        BlowupOptions {
            n_uniform: 400,
            cluster_ratio: 1.05,
            d_min_rel: 1e-10,
            cauchy_tol: 1e-2,
            window_d_max_rel: 0.02,
            window_u_frac: 1e-2,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlowupDomain {
    /// Ball `[0, R]`, shooting on the center value.
    Ball,
    /// Annulus `[r_in, R]` with `u(r_in) = 1`, shooting on the inner slope.
    Annulus { r_in: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSolve {
    pub boundary_value: f64,
    pub shooting_parameter: f64,
    pub profile: RadialProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupResult {
    pub domain: BlowupDomain,
    pub ladder: Vec<LadderSolve>,
    pub fitted_theta: f64,
    pub expected_theta: f64,
    pub fit_r2: f64,
    pub fit_points: usize,
    /// Relative sup difference of the last two members on r <= 0.9 R.
    pub cauchy_gap: f64,
}

impl BlowupResult {
    pub fn profile(&self) -> &RadialProfile {
        &self.ladder.last().expect("nonempty ladder").profile
    }

    pub fn relative_theta_error(&self) -> f64 {
        (self.fitted_theta - self.expected_theta).abs() / self.expected_theta
    }
}

struct Shooter {
    n: f64,
    m: f64,
    p: f64,
    q: f64,
    r_start: f64,
    outputs: Vec<f64>,
}

enum Shot {
    /// Reached R; values at the output nodes.
    Reached(Vec<f64>),
    Overflow,
}

impl Shooter {
    fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let psi = y[1];
        let du = psi.signum() * psi.abs().powf(1.0 / (self.m - 1.0));
        let src = crate::radial::operator::power_source(self.q, self.p, y[0], du);
        [du, src - (self.n - 1.0) * psi / r]
    }

    fn shoot(&self, y0: [f64; 2]) -> Result<Shot> {
        let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, ..OdeOptions::default() };
        let run = ode::integrate(
            |r, y| self.rhs(r, y),
            self.r_start,
            y0,
            &self.outputs,
            &opts,
            |_, y| (y[0] > OVERFLOW_GUARD || !y[0].is_finite()).then_some(()),
        );
        match run.stop {
            Stop::Completed => Ok(Shot::Reached(run.outputs.iter().map(|y| y[0]).collect())),
            Stop::Event(()) | Stop::StepUnderflow => Ok(Shot::Overflow),
            Stop::MaxSteps => Err(Error::Tolerance("blow-up shooting exceeded the step budget".into())),
        }
    }
}

fn solve_one(
    sh: &Shooter,
    domain: BlowupDomain,
    big_u: f64,
    initial: &dyn Fn(f64) -> [f64; 2],
) -> Result<(f64, Vec<f64>)> {
    let end = |s: &Shot| match s {
        Shot::Reached(v) => *v.last().unwrap(),
        Shot::Overflow => f64::INFINITY,
    };
    let (mut lo, mut hi) = match domain {
        BlowupDomain::Ball => (big_u * 1e-12, big_u),
        BlowupDomain::Annulus { .. } => {
            let mut hi = 1.0;
            for _ in 0..200 {
                if end(&sh.shoot(initial(hi))?) > big_u {
                    break;
                }
                hi *= 2.0;
            }
            (0.0, hi)
        }
    };
    let mut best: Option<Vec<f64>> = None;
    for _ in 0..400 {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        let shot = sh.shoot(initial(mid))?;
        let e = end(&shot);
        if e > big_u {
            hi = mid;
        } else {
            lo = mid;
            if let Shot::Reached(v) = shot {
                best = Some(v);
            }
        }
        if let Some(v) = &best {
            if (big_u - v.last().unwrap()).abs() <= 1e-10 * big_u {
                break;
            }
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let vals = match best {
        Some(v) => v,
        None => match sh.shoot(initial(lo))? {
            Shot::Reached(v) => v,
            Shot::Overflow => return Err(Error::Tolerance("blow-up shooting lost its lower bracket".into())),
        },
    };
    Ok((lo, vals))
}

/// Shoots one large-data Dirichlet problem per ladder value, checks that the
/// interior values settle, and fits the boundary rate on the largest member.
pub fn blowup_shoot(params: &ProblemParams, radius: f64, ladder: &[f64], opts: &BlowupOptions) -> Result<BlowupResult> {
    let (n, m, p, q) = (params.nf(), params.m(), params.p(), params.q());
    let big_q = params.big_q();
    if !(p < m) {
        return Err(Error::domain(format!("boundary blow-up requires p < m for {params}")));
    }
    if !(p + q > m - 1.0 && big_q > 0.0) {
        return Err(Error::domain(format!("boundary blow-up requires p + q > m - 1 for {params}")));
    }
    if !(radius > 0.0) {
        return Err(Error::domain("boundary blow-up requires R > 0"));
    }
    if ladder.len() < 2 || ladder.windows(2).any(|w| !(w[1] > w[0])) || !(ladder[0] > 1.0) {
        return Err(Error::domain("boundary ladder must be ascending, above 1, with at least two values"));
    }
    let domain = if p == 0.0 { BlowupDomain::Ball } else { BlowupDomain::Annulus { r_in: 0.5 * radius } };
    let r0 = match domain {
        BlowupDomain::Ball => 0.0,
        BlowupDomain::Annulus { r_in } => r_in,
    };
    let grid =
        RadialGrid::clustered_toward_end(r0, radius, opts.n_uniform, opts.cluster_ratio, opts.d_min_rel * radius)?;
    let r_start = match domain {
        BlowupDomain::Ball => 1e-6 * radius,
        BlowupDomain::Annulus { r_in } => r_in,
    };
    let outputs: Vec<f64> = grid.nodes().iter().copied().filter(|&r| r > r_start).collect();
    let sh = Shooter { n, m, p, q, r_start, outputs };
    let initial = move |s: f64| -> [f64; 2] {
        match domain {
            BlowupDomain::Ball => {
                let rs = r_start;
                let src = s.powf(q) / n;
                let u = s + (m - 1.0) / m * src.powf(1.0 / (m - 1.0)) * rs.powf(m / (m - 1.0));
                [u, src * rs]
            }
            BlowupDomain::Annulus { .. } => [1.0, s.powf(m - 1.0)],
        }
    };

    let solved = opts.execution.map(ladder, |&big_u| solve_one(&sh, domain, big_u, &initial));
    let mut members = Vec::with_capacity(ladder.len());
    for (big_u, res) in ladder.iter().zip(solved) {
        let (param, mut vals) = res?;
        // the first node is the center (value = shooting parameter) or r_in (value 1)
        let first = match domain {
            BlowupDomain::Ball => param,
            BlowupDomain::Annulus { .. } => 1.0,
        };
        let mut values = Vec::with_capacity(grid.len());
        values.push(first);
        values.append(&mut vals);
        let last = values.len() - 1;
        values[last] = *big_u;
        let profile = RadialProfile::new(grid.clone(), values)?;
        members.push(LadderSolve { boundary_value: *big_u, shooting_parameter: param, profile });
    }

    let r = grid.nodes();
    let interior: Vec<usize> = (0..r.len()).filter(|&i| r[i] <= 0.9 * radius).collect();
    let (a, b) = (&members[members.len() - 2].profile, &members[members.len() - 1].profile);
    let scale = interior.iter().map(|&i| b.u()[i]).fold(0.0, f64::max);
    let cauchy_gap = interior.iter().map(|&i| (b.u()[i] - a.u()[i]).abs()).fold(0.0, f64::max) / scale;
    let monotone =
        members.windows(2).all(|w| interior.iter().all(|&i| w[1].profile.u()[i] >= w[0].profile.u()[i] * (1.0 - 1e-9)));
    if !monotone || !(cauchy_gap <= opts.cauchy_tol) {
        return Err(Error::NonConvergence {
            iterations: members.len(),
            gap: cauchy_gap,
            sup: scale,
            diverged: !monotone,
        });
    }

    let top = b;
    let u_cut = opts.window_u_frac * ladder[ladder.len() - 1];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&ri, &ui) in r.iter().zip(top.u()).take(r.len() - 1) {
        let d = radius - ri;
        if d <= opts.window_d_max_rel * radius && ui <= u_cut && ui > 0.0 {
            xs.push(d.ln());
            ys.push(ui.ln());
        }
    }
    if xs.len() < 8 {
        return Err(Error::Tolerance(format!(
            "boundary fit window has only {} nodes; raise the ladder or widen the window",
            xs.len()
        )));
    }
    let (slope, _, r2) = linear_fit(&xs, &ys);
    Ok(BlowupResult {
        domain,
        ladder: members,
        fitted_theta: -slope,
        expected_theta: (m - p) / big_q,
        fit_r2: r2,
        fit_points: xs.len(),
        cauchy_gap,
    })
}
