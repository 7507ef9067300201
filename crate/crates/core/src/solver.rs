//! Radial Dirichlet problems `-Δ_m u = f(u, u') + λ` on a ball.
//!
//! The fixed-point map is `u -> T(N(u))` with `N` the nodewise source and `T`
//! the exact radial inverse of `-Δ_m` with zero boundary data. The forcing
//! homotopy, the principal eigenpair, the Picone check and the nonexistence
//! probe are built on it.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::{nonexistence_rate, ProblemParams, StructureBounds};
use crate::quadrature::radial_integral;
use crate::radial::operator::{power_source, residual_with};
use crate::radial::{invert_t, RadialGrid, RadialProfile};
use crate::verify;

pub const TOL_FP: f64 = 1e-10;
pub const TOL_PDE: f64 = 1e-6;
pub const TOL_INT: f64 = 1e-6;
pub const K_MAX: usize = 500;
/// Iterates whose sup exceeds this are treated as escaping to infinity.
/// Relative spacing growth of the boundary grading.
pub const GRADING_RATE: f64 = 0.01;
/// Smallest spacing at r = R, relative to R. Finer cells lose more to
/// roundoff in the residual stencils than they gain in truncation.
pub const GRADING_FLOOR: f64 = 1e-10;
pub const DIVERGENCE_CAP: f64 = 1e8;

/// Which representative of the structure bracket is used as `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceModel {
    /// `u^q |u'|^p + M1 u^α1`.
    #[default]
    Canonical,
    /// `max{0, u^q |u'|^p + M1 u^α1 - M2 |u'|^α2}`.
    WithGradientAbsorption,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletProblem {
    pub params: ProblemParams,
    pub bounds: StructureBounds,
    pub lambda: f64,
    pub radius: f64,
    pub source: SourceModel,
}

impl DirichletProblem {
    pub fn new(params: ProblemParams, bounds: StructureBounds, lambda: f64, radius: f64) -> Result<Self> {
        bounds.check(&params)?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("forcing must satisfy lambda >= 0 (got {lambda})")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("ball radius must satisfy R > 0 (got {radius})")));
        }
        Ok(DirichletProblem { params, bounds, lambda, radius, source: SourceModel::default() })
    }

    pub fn with_source(mut self, source: SourceModel) -> Self {
        self.source = source;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("forcing must satisfy lambda >= 0 (got {lambda})")));
        }
        self.lambda = lambda;
        Ok(self)
    }

    /// `f(u, u') + λ`, clipped below at 0.
    pub fn source_value(&self, u: f64, du: f64) -> f64 {
        let (p, q) = (self.params.p(), self.params.q());
        let b = &self.bounds;
        let mut f = power_source(q, p, u, du) + b.m1 * u.max(0.0).powf(b.alpha1);
        if self.source == SourceModel::WithGradientAbsorption {
            f -= b.m2 * du.abs().powf(b.alpha2);
        }
        (f + self.lambda).max(0.0)
    }

    /// Ball grid with `nodes` uniform cells graded geometrically toward
    /// r = R, where a sublinear source makes the solution only C^{1,q}.
    pub fn grid(&self, nodes: usize) -> Result<RadialGrid> {
        RadialGrid::graded_toward_end(0.0, self.radius, nodes, GRADING_RATE, GRADING_FLOOR * self.radius)
    }

    /// `T(λ)`: the solution of `-Δ_m w = λ`, the default cold start.
    pub fn cold_start(&self, grid: RadialGrid) -> Result<RadialProfile> {
        let forcing = RadialProfile::constant(grid, self.lambda)?;
        invert_t(&forcing, self.params.m(), self.params.n())
    }
}

/// Nodewise source `f(u, u') + λ` of the problem.
pub fn apply_n(u: &RadialProfile, prob: &DirichletProblem) -> Result<RadialProfile> {
    let values = u.u().iter().zip(u.du()).map(|(&v, &d)| prob.source_value(v, d)).collect();
    RadialProfile::new(u.grid().clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub omega: f64,
    pub k_max: usize,
    pub tol_fp: f64,
    pub tol_pde: f64,
    /// Times the damping may be halved when the fixed-point gap grows.
    pub max_halvings: usize,
    pub divergence_cap: f64,
    /// Uniform grid size used when the solver builds its own start.
    pub nodes: usize,
    /// Compute the Picone slack of converged positive solutions.
    pub picone: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            omega: 0.5,
            k_max: K_MAX,
            tol_fp: TOL_FP,
            tol_pde: TOL_PDE,
            max_halvings: 4,
            divergence_cap: DIVERGENCE_CAP,
            nodes: 4096,
            picone: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Max interior residual of `-Δ_m u - f(u, u') - λ`.
    pub final_residual: f64,
    pub l2_residual: f64,
    /// Last fixed-point update in sup norm.
    pub gap: f64,
    /// Damping in effect at the end.
    pub omega: f64,
    pub lambda: f64,
    pub profile: RadialProfile,
    /// Smallest value over all nodes but the boundary node.
    pub min_interior: f64,
    pub trivial: bool,
    /// Harnack ratio on `B_{R/4}`; `None` when undefined (zero profile, no forcing).
    pub harnack_ratio: Option<f64>,
    /// Picone slack against the principal eigenpair; `None` for non-positive profiles.
    pub picone_slack: Option<f64>,
    pub degenerate_nodes: usize,
}

struct Iterate {
    profile: RadialProfile,
    iterations: usize,
    gap: f64,
    omega: f64,
}

fn check_start(prob: &DirichletProblem, u0: &RadialProfile) -> Result<()> {
    let r = u0.r();
    if r[0] != 0.0 || (u0.grid().r_max() - prob.radius).abs() > 1e-12 * prob.radius {
        return Err(Error::domain(format!(
            "start profile must live on [0, R] = [0, {}] (got [{}, {}])",
            prob.radius,
            r[0],
            u0.grid().r_max()
        )));
    }
    Ok(())
}

fn iterate(prob: &DirichletProblem, u0: &RadialProfile, opts: &SolveOptions) -> Result<Iterate> {
    if !(opts.omega > 0.0 && opts.omega <= 1.0) {
        return Err(Error::domain(format!("damping must satisfy 0 < omega <= 1 (got {})", opts.omega)));
    }
    check_start(prob, u0)?;
    let (m, dim) = (prob.params.m(), prob.params.n());
    let grid = u0.grid().clone();
    let mut u = u0.clone();
    let mut omega = opts.omega;
    let mut halvings = 0;
    let mut prev_gap = f64::INFINITY;
    let mut gap = f64::INFINITY;
    for k in 1..=opts.k_max {
        let image = invert_t(&apply_n(&u, prob)?, m, dim)?;
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| (1.0 - omega) * x + omega * y).collect()
        };
        let values = mix(u.u(), image.u());
        let deriv = mix(u.du(), image.du());
        let sup_u = u.sup();
        gap = values.iter().zip(u.u()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let sup_next = values.iter().copied().fold(0.0, f64::max);
        if !(sup_next.is_finite() && sup_next <= opts.divergence_cap && gap.is_finite()) {
            return Err(Error::NonConvergence { iterations: k, gap, sup: sup_next, diverged: true });
        }
        if gap <= opts.tol_fp * (1.0 + sup_u) {
            // the undamped image carries no mixing roundoff in its derivative
            return Ok(Iterate { profile: image, iterations: k, gap, omega });
        }
        u = RadialProfile::with_derivative(grid.clone(), values, deriv)?;
        if gap > prev_gap && halvings < opts.max_halvings {
            omega *= 0.5;
            halvings += 1;
        }
        prev_gap = gap;
    }
    Err(Error::NonConvergence { iterations: opts.k_max, gap, sup: u.sup(), diverged: false })
}

fn report(
    prob: &DirichletProblem,
    it: Iterate,
    opts: &SolveOptions,
    eig: &mut Option<EigenPair>,
) -> Result<SolveReport> {
    let u = it.profile;
    let res = residual_with(&u, prob.params.n(), prob.params.m(), |_, v, d| prob.source_value(v, d));
    if !(res.max_abs_residual <= opts.tol_pde) {
        return Err(Error::Tolerance(format!(
            "fixed point reached after {} iterations but the PDE residual {:.3e} exceeds {:.1e}; refine the grid",
            it.iterations, res.max_abs_residual, opts.tol_pde
        )));
    }
    let n = u.len();
    let min_interior = u.u()[..n - 1].iter().copied().fold(f64::INFINITY, f64::min);
    let trivial = u.sup() == 0.0;
    let harnack_ratio = verify::harnack_ratio(&u, 0.25 * prob.radius, prob.lambda, prob.params.m()).ok();
    let picone_slack = if opts.picone && !trivial && min_interior > 0.0 {
        if eig.is_none() {
            *eig = Some(principal_eigenpair_on(u.grid().clone(), prob.params.n(), prob.params.m())?);
        }
        let h = apply_n(&u, prob)?;
        Some(picone_check(&h, &u, eig.as_ref().unwrap())?)
    } else {
        None
    };
    Ok(SolveReport {
        converged: true,
        iterations: it.iterations,
        final_residual: res.max_abs_residual,
        l2_residual: res.l2_residual,
        gap: it.gap,
        omega: it.omega,
        lambda: prob.lambda,
        profile: u,
        min_interior,
        trivial,
        harnack_ratio,
        picone_slack,
        degenerate_nodes: res.degenerate_nodes.len(),
    })
}

/// Damped Picard iteration `u <- (1-ω) u + ω T(N(u))` with default options.
pub fn fixed_point_solve(prob: &DirichletProblem, u0: &RadialProfile, omega: f64) -> Result<SolveReport> {
    fixed_point_solve_with(prob, u0, &SolveOptions { omega, ..SolveOptions::default() })
}

pub fn fixed_point_solve_with(prob: &DirichletProblem, u0: &RadialProfile, opts: &SolveOptions) -> Result<SolveReport> {
    let it = iterate(prob, u0, opts)?;
    report(prob, it, opts, &mut None)
}

/// Continuation in the forcing: stage `i` solves with `λ = t_i λ0`, the first
/// stage from the cold start and each later one warm-started from the previous
/// solution. The problem's own `lambda` is not used.
pub fn homotopy_solve(prob: &DirichletProblem, t_schedule: &[f64], lambda0: f64) -> Result<Vec<SolveReport>> {
    homotopy_solve_with(prob, t_schedule, lambda0, &SolveOptions::default())
}

pub fn homotopy_solve_with(
    prob: &DirichletProblem,
    t_schedule: &[f64],
    lambda0: f64,
    opts: &SolveOptions,
) -> Result<Vec<SolveReport>> {
    if t_schedule.is_empty() {
        return Err(Error::domain("homotopy schedule must not be empty"));
    }
    if t_schedule.iter().any(|t| !(0.0..=1.0).contains(t)) || t_schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::domain("homotopy schedule must be strictly descending within [0, 1]"));
    }
    if !(lambda0 >= 0.0 && lambda0.is_finite()) {
        return Err(Error::domain(format!("homotopy forcing must satisfy lambda0 >= 0 (got {lambda0})")));
    }
    let mut eig = None;
    let mut reports: Vec<SolveReport> = Vec::with_capacity(t_schedule.len());
    for (stage, &t) in t_schedule.iter().enumerate() {
        let stage_prob = prob.with_lambda(t * lambda0)?;
        let start = match reports.last() {
            Some(r) => r.profile.clone(),
            None => stage_prob.cold_start(stage_prob.grid(opts.nodes)?)?,
        };
        let res = iterate(&stage_prob, &start, opts).and_then(|it| report(&stage_prob, it, opts, &mut eig));
        match res {
            Ok(r) => reports.push(r),
            Err(e) => return Err(Error::StageFailed { stage, source: Box::new(e) }),
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Read from the normalized iteration: `T(φ^{m-1}) = s φ` gives `λ1 = s^{1-m}`.
    pub lambda1: f64,
    /// `∫|φ'|^m / ∫φ^m` of the final iterate.
    pub rayleigh: f64,
    /// Normalized to max 1.
    pub phi1: RadialProfile,
    pub iterations: usize,
    pub dim: u32,
    pub m: f64,
}

/// Default grid size for [`principal_eigenpair`].
pub const EIGEN_NODES: usize = 2048;
pub const EIGEN_K_MAX: usize = 5000;

/// First Dirichlet eigenpair of `-Δ_m` on the ball of radius `radius`.
pub fn principal_eigenpair(dim: u32, m: f64, radius: f64) -> Result<EigenPair> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("ball radius must satisfy R > 0 (got {radius})")));
    }
    principal_eigenpair_on(RadialGrid::uniform(0.0, radius, EIGEN_NODES)?, dim, m)
}

/// Inverse power iteration `φ <- T(φ^{m-1}) / max` on a ball grid.
pub fn principal_eigenpair_on(grid: RadialGrid, dim: u32, m: f64) -> Result<EigenPair> {
    if dim < 1 {
        return Err(Error::domain(format!("dimension must satisfy N >= 1 (got N = {dim})")));
    }
    if !(m > 1.0) {
        return Err(Error::domain(format!("operator index must satisfy m > 1 (got m = {m})")));
    }
    let big_r = grid.r_max();
    let mut phi = RadialProfile::from_fn(grid.clone(), |r| 1.0 - (r / big_r).powi(2), |r| -2.0 * r / (big_r * big_r))?;
    let mut lambda = f64::NAN;
    let mut change = f64::INFINITY;
    for k in 1..=EIGEN_K_MAX {
        let rhs = RadialProfile::new(grid.clone(), phi.u().iter().map(|v| v.powf(m - 1.0)).collect())?;
        let w = invert_t(&rhs, m, dim)?;
        let s = w.sup();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Tolerance("eigen iteration lost its scale".into()));
        }
        let next = RadialProfile::with_derivative(
            grid.clone(),
            w.u().iter().map(|v| v / s).collect(),
            w.du().iter().map(|v| v / s).collect(),
        )?;
        let new_lambda = s.powf(1.0 - m);
        change = next.u().iter().zip(phi.u()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let lambda_change = ((new_lambda - lambda) / new_lambda).abs();
        phi = next;
        lambda = new_lambda;
        if change <= 1e-10 && lambda_change <= 1e-10 {
            let rayleigh = rayleigh_quotient(&phi, dim, m);
            return Ok(EigenPair { lambda1: lambda, rayleigh, phi1: phi, iterations: k, dim, m });
        }
    }
    Err(Error::NonConvergence { iterations: EIGEN_K_MAX, gap: change, sup: 1.0, diverged: false })
}

fn rayleigh_quotient(phi: &RadialProfile, dim: u32, m: f64) -> f64 {
    let r = phi.r();
    let k = dim as f64 - 1.0;
    let grad: Vec<f64> = phi.du().iter().map(|d| d.abs().powf(m)).collect();
    let mass: Vec<f64> = phi.u().iter().map(|v| v.powf(m)).collect();
    let top = radial_integral(r, &grad, k, r[0], phi.grid().r_max()).unwrap_or(f64::NAN);
    let bottom = radial_integral(r, &mass, k, r[0], phi.grid().r_max()).unwrap_or(f64::NAN);
    top / bottom
}

/// `λ1 ∫φ1^m - ∫h φ1^m / u^{m-1}` over the ball, with `φ1` interpolated onto
/// the grid of `u` when the grids differ. Nodes where `u` vanishes (the
/// boundary) contribute their limit 0.
pub fn picone_check(h: &RadialProfile, u: &RadialProfile, eig: &EigenPair) -> Result<f64> {
    if h.r() != u.r() {
        return Err(Error::domain("Picone check needs h and u on the same grid"));
    }
    let (dim, m) = (eig.dim, eig.m);
    let phi: Vec<f64> = if eig.phi1.r() == u.r() {
        eig.phi1.u().to_vec()
    } else {
        u.r().iter().map(|&r| eig.phi1.value_at(r)).collect()
    };
    let r = u.r();
    let omega_n = verify::sphere_area(dim);
    let k = dim as f64 - 1.0;
    let mass: Vec<f64> = phi.iter().map(|v| v.powf(m)).collect();
    let weighted: Vec<f64> =
        (0..r.len()).map(|i| if u.u()[i] > 0.0 { h.u()[i] * mass[i] / u.u()[i].powf(m - 1.0) } else { 0.0 }).collect();
    let hi = u.grid().r_max();
    let a = radial_integral(r, &mass, k, r[0], hi).unwrap_or(f64::NAN);
    let b = radial_integral(r, &weighted, k, r[0], hi).unwrap_or(f64::NAN);
    Ok(omega_n * (eig.lambda1 * a - b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderOutcome {
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    pub sup: f64,
    /// Iterates escaped past the divergence cap.
    pub diverged: bool,
}

/// Empirical bracket for the forcing level above which no positive solution
/// is found. Divergence of the iteration is evidence, not proof, of
/// nonexistence.
#[derive(Debug, Clone, PartialEq)]
pub struct NonexistenceBracket {
    /// Largest converged forcing below `lambda_hi`.
    pub lambda_lo: f64,
    /// Smallest forcing without convergence.
    pub lambda_hi: f64,
    /// `l(λ) = min_t (λ + M1 t^α1)/t^{m-1}` at both ends.
    pub rate_lo: f64,
    pub rate_hi: f64,
    pub lambda1: f64,
    /// `l(lambda_hi) > λ1 (1 + margin)`.
    pub rate_exceeds_lambda1: bool,
    /// No ladder point above `lambda_hi` converged.
    pub monotone: bool,
    pub outcomes: Vec<LadderOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub solve: SolveOptions,
    pub margin: f64,
    pub execution: Execution,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            solve: SolveOptions { picone: false, ..SolveOptions::default() },
            margin: 0.1,
            execution: Execution::default(),
        }
    }
}

/// Runs the fixed-point solver from the cold start at every ladder value.
pub fn nonexistence_probe(template: &DirichletProblem, lambda_ladder: &[f64]) -> Result<NonexistenceBracket> {
    nonexistence_probe_with(template, lambda_ladder, &ProbeOptions::default())
}

pub fn nonexistence_probe_with(
    template: &DirichletProblem,
    lambda_ladder: &[f64],
    opts: &ProbeOptions,
) -> Result<NonexistenceBracket> {
    if lambda_ladder.len() < 2 || lambda_ladder.windows(2).any(|w| !(w[1] > w[0])) || !(lambda_ladder[0] > 0.0) {
        return Err(Error::domain("forcing ladder must be positive and strictly ascending"));
    }
    let span = lambda_ladder[lambda_ladder.len() - 1] / lambda_ladder[0];
    if !(span >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::domain(format!("forcing ladder must span at least 2 decades (spans a factor {span})")));
    }
    let grid = template.grid(opts.solve.nodes)?;
    let runs = opts.execution.map(lambda_ladder, |&lambda| -> Result<LadderOutcome> {
        let prob = template.with_lambda(lambda)?;
        let start = prob.cold_start(grid.clone())?;
        match iterate(&prob, &start, &opts.solve) {
            Ok(it) => Ok(LadderOutcome {
                lambda,
                converged: true,
                iterations: it.iterations,
                sup: it.profile.sup(),
                diverged: false,
            }),
            Err(Error::NonConvergence { iterations, sup, diverged, .. }) => {
                Ok(LadderOutcome { lambda, converged: false, iterations, sup, diverged })
            }
            Err(e) => Err(e),
        }
    });
    let outcomes = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let Some(hi_idx) = outcomes.iter().position(|o| !o.converged) else {
        return Err(Error::BracketNotFound(format!(
            "all {} ladder points converged up to lambda = {}",
            outcomes.len(),
            lambda_ladder[lambda_ladder.len() - 1]
        )));
    };
    if hi_idx == 0 {
        return Err(Error::BracketNotFound(format!(
            "no ladder point converged, starting at lambda = {}",
            lambda_ladder[0]
        )));
    }
    let (lambda_lo, lambda_hi) = (outcomes[hi_idx - 1].lambda, outcomes[hi_idx].lambda);
    let (m, b) = (template.params.m(), &template.bounds);
    let rate_lo = nonexistence_rate(lambda_lo, b.m1, b.alpha1, m)?;
    let rate_hi = nonexistence_rate(lambda_hi, b.m1, b.alpha1, m)?;
    let eig = principal_eigenpair_on(grid, template.params.n(), m)?;
    Ok(NonexistenceBracket {
        lambda_lo,
        lambda_hi,
        rate_lo,
        rate_hi,
        lambda1: eig.lambda1,
        rate_exceeds_lambda1: rate_hi > eig.lambda1 * (1.0 + opts.margin),
        monotone: outcomes[hi_idx..].iter().all(|o| !o.converged),
        outcomes,
    })
}

/// `n` log-spaced values from `lo` to `hi`.
pub fn log_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn canonical(lambda: f64) -> DirichletProblem {
        let params = ProblemParams::new(3, 2.0, 1.2, 0.3).unwrap();
        let bounds = StructureBounds::new(&params, 1.0, 1.0, 0.1, 1.2).unwrap();
        DirichletProblem::new(params, bounds, lambda, 1.0).unwrap()
    }

    #[test]
    fn apply_n_examples() {
        let prob = canonical(0.0);
        let g = prob.grid(64).unwrap();
        let zero = RadialProfile::constant(g.clone(), 0.0).unwrap();
        assert!(apply_n(&zero, &prob).unwrap().u().iter().all(|&v| v == 0.0));
        let params = prob.params;
        let bounds = StructureBounds::with_alpha1(&params, 1.0, 1.0, 0.1, 2.25, 1.2).unwrap();
        let prob = DirichletProblem::new(params, bounds, 0.5, 1.0).unwrap();
        let one = RadialProfile::constant(g, 1.0).unwrap();
        assert!(apply_n(&one, &prob).unwrap().u().iter().all(|&v| (v - 1.5).abs() < 1e-15));
    }

    #[test]
    fn problem_validation() {
        let p = canonical(0.5);
        assert!(DirichletProblem::new(p.params, p.bounds, -1.0, 1.0).is_err());
        assert!(DirichletProblem::new(p.params, p.bounds, 0.5, 0.0).is_err());
        let other = ProblemParams::new(3, 1.5, 1.2, 0.3).unwrap();
        assert!(DirichletProblem::new(other, p.bounds, 0.5, 1.0).is_err());
    }

    #[test]
    fn zero_is_fixed_at_zero_forcing() {
        let prob = canonical(0.0);
        let u0 = prob.cold_start(prob.grid(256).unwrap()).unwrap();
        let rep = fixed_point_solve(&prob, &u0, 0.5).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.trivial);
        assert_eq!(rep.picone_slack, None);
    }

    #[test]
    fn rejects_bad_damping_and_grid() {
        let prob = canonical(0.5);
        let u0 = prob.cold_start(prob.grid(64).unwrap()).unwrap();
        assert!(fixed_point_solve(&prob, &u0, 0.0).is_err());
        assert!(fixed_point_solve(&prob, &u0, 1.5).is_err());
        let off = RadialProfile::constant(RadialGrid::uniform(0.0, 2.0, 64).unwrap(), 0.0).unwrap();
        assert!(fixed_point_solve(&prob, &off, 0.5).is_err());
    }

    #[test]
    fn eigenpair_one_dimensional() {
        let e = principal_eigenpair(1, 2.0, 1.0).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 4.0;
        assert!((e.lambda1 - exact).abs() < 1e-4, "{}", e.lambda1);
        assert!((e.rayleigh - exact).abs() < 1e-4, "{}", e.rayleigh);
    }

    #[test]
    fn picone_zero_source_is_positive() {
        let e = principal_eigenpair_on(RadialGrid::uniform(0.0, 1.0, 256).unwrap(), 3, 2.0).unwrap();
        let h = RadialProfile::constant(e.phi1.grid().clone(), 0.0).unwrap();
        let u = RadialProfile::constant(e.phi1.grid().clone(), 1.0).unwrap();
        let slack = picone_check(&h, &u, &e).unwrap();
        assert!(slack > 0.0);
    }

    #[test]
    fn ladder_spacing() {
        let l = log_ladder(1e-2, 1e3, 6);
        assert_eq!(l.len(), 6);
        for (a, b) in l.iter().zip([1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3]) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}
