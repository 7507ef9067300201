use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::ProblemParams;
use crate::quadrature;
use crate::radial::profile::{RadialGrid, RadialProfile};

/// `a + b r^{(m-N)/(m-1)}`, which solves `Δ_m v = 0` away from the origin.
pub fn m_harmonic(dim: u32, m: f64, a: f64, b: f64, grid: RadialGrid) -> Result<RadialProfile> {
    let nf = dim as f64;
    if b != 0.0 && !(nf > m) {
        return Err(Error::domain(format!("nonconstant m-harmonic profile requires N > m (got N = {dim}, m = {m})")));
    }
    if b != 0.0 && grid.r_min() <= 0.0 {
        return Err(Error::domain("nonconstant m-harmonic profile needs an annulus with r_in > 0"));
    }
    if b == 0.0 {
        return RadialProfile::constant(grid, a);
    }
    let k = (m - nf) / (m - 1.0);
    RadialProfile::from_fn(grid, |r| a + b * r.powf(k), |r| b * k * r.powf(k - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularProfile {
    pub amplitude: f64,
    pub theta: f64,
    pub profile: RadialProfile,
}

/// Exact separable solution `A r^{-theta}`, `theta = (m-p)/Q`, whose amplitude
/// solves `A^{m-1-q-p} theta^{m-1-p} (N-1-(theta+1)(m-1)) = 1`.
pub fn singular_profile(params: &ProblemParams, grid: RadialGrid) -> Result<SingularProfile> {
    let (n, m, p) = (params.nf(), params.m(), params.p());
    let big_q = params.big_q();
    if !(p < m && big_q > 0.0) {
        return Err(Error::domain(format!("singular profile requires p < m and Q > 0 for {params}")));
    }
    let theta = (m - p) / big_q;
    let k = n - 1.0 - (theta + 1.0) * (m - 1.0);
    if !(k > 0.0) {
        return Err(Error::domain(format!(
            "singular profile requires the supercritical range: N-1-(theta+1)(m-1) = {k} <= 0 for {params}"
        )));
    }
    if grid.r_min() <= 0.0 {
        return Err(Error::domain("singular profile needs r_min > 0"));
    }
    let amplitude = (theta.powf(m - 1.0 - p) * k).powf(1.0 / big_q);
    let profile =
        RadialProfile::from_fn(grid, |r| amplitude * r.powf(-theta), |r| -theta * amplitude * r.powf(-theta - 1.0))?;
    Ok(SingularProfile { amplitude, theta, profile })
}

/// Residual of `C (1+r^2)^{-beta}` for `-Δu = u^q |u'|^p` in closed form.
pub fn bubble_residual(n: f64, p: f64, q: f64, beta: f64, c: f64, r: f64) -> f64 {
    let (lap, src) = bubble_terms(n, p, q, beta, c, r);
    lap - src
}

/// `(-Δu, u^q |u'|^p)` for the bubble.
fn bubble_terms(n: f64, p: f64, q: f64, beta: f64, c: f64, r: f64) -> (f64, f64) {
    let s = 1.0 + r * r;
    let lap = 2.0 * beta * c * s.powf(-beta - 2.0) * (n + (n - 2.0 * beta - 2.0) * r * r);
    let u = c * s.powf(-beta);
    let du = 2.0 * beta * c * r * s.powf(-beta - 1.0);
    (lap, crate::radial::operator::power_source(q, p, u, du))
}

pub fn bubble_profile(beta: f64, c: f64, grid: RadialGrid) -> Result<RadialProfile> {
    RadialProfile::from_fn(
        grid,
        |r| c * (1.0 + r * r).powf(-beta),
        |r| -2.0 * beta * c * r * (1.0 + r * r).powf(-beta - 1.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleFit {
    pub beta: f64,
    pub c: f64,
    /// Most negative residual over the sample window (>= -tol when feasible).
    pub min_residual: f64,
    /// Largest absolute residual over the sample window.
    pub sup_residual: f64,
    /// Mean squared relative residual `(-Δu - f) / (|Δu| + f)`.
    pub objective: f64,
    pub refined: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct BubbleOptions {
    pub beta_steps: usize,
    pub c_steps: usize,
    pub c_max: f64,
    pub r_max: f64,
    pub samples: usize,
    pub feasibility_tol: f64,
    pub execution: Execution,
}

impl Default for BubbleOptions {
    fn default() -> Self {
        BubbleOptions {
            beta_steps: 120,
            c_steps: 120,
            c_max: 10.0,
            r_max: 20.0,
            samples: 801,
            feasibility_tol: 1e-8,
            execution: Execution::default(),
        }
    }
}

struct BubbleEval {
    min: f64,
    sup: f64,
    obj: f64,
}

fn eval_bubble(n: f64, p: f64, q: f64, beta: f64, c: f64, rs: &[f64]) -> BubbleEval {
    let (mut min, mut sup, mut obj) = (f64::INFINITY, 0.0f64, 0.0);
    for &r in rs {
        let (lap, src) = bubble_terms(n, p, q, beta, c, r);
        let v = lap - src;
        min = min.min(v);
        sup = sup.max(v.abs());
        // relative, so that shrinking C toward the trivial solution does not pay
        let scale = lap.abs() + src;
        if scale > 0.0 {
            obj += (v / scale).powi(2);
        }
    }
    BubbleEval { min, sup, obj: obj / rs.len() as f64 }
}

/// Fits `C (1+r^2)^{-beta}` as a supersolution for the Laplacian (m = 2).
///
/// A grid over `(0, N] x (0, c_max]` seeds a compass search on the mean
/// squared relative residual. The refined pair is returned when it is feasible
/// (residual >= -tol everywhere); otherwise the feasible grid pair with the
/// smallest objective is returned.
pub fn fit_explicit_bubble(params: &ProblemParams, opts: &BubbleOptions) -> Result<BubbleFit> {
    if params.m() != 2.0 {
        return Err(Error::domain(format!("bubble fit requires m = 2 (got m = {})", params.m())));
    }
    if !(params.subcritical_margin() < 0.0) {
        return Err(Error::domain(format!(
            "bubble fit requires the supercritical range (margin {} >= 0) for {params}",
            params.subcritical_margin()
        )));
    }
    let (n, p, q) = (params.nf(), params.p(), params.q());
    let rs: Vec<f64> = (0..opts.samples).map(|i| opts.r_max * i as f64 / (opts.samples - 1) as f64).collect();
    let pairs: Vec<(f64, f64)> = (1..=opts.beta_steps)
        .flat_map(|i| {
            (1..=opts.c_steps)
                .map(move |j| (n * i as f64 / opts.beta_steps as f64, opts.c_max * j as f64 / opts.c_steps as f64))
        })
        .collect();
    let evals = opts.execution.map(&pairs, |&(b, c)| eval_bubble(n, p, q, b, c, &rs));

    let best = (0..pairs.len()).min_by(|&i, &j| evals[i].obj.total_cmp(&evals[j].obj)).expect("nonempty grid");
    let (mut b, mut c) = pairs[best];
    let mut f = evals[best].obj;
    let (mut hb, mut hc) = (n / opts.beta_steps as f64, opts.c_max / opts.c_steps as f64);
    while hb > 1e-13 || hc > 1e-13 {
        let mut moved = false;
        for (db, dc) in [(hb, 0.0), (-hb, 0.0), (0.0, hc), (0.0, -hc)] {
            let (nb, nc) = (b + db, c + dc);
            if nb <= 0.0 || nb > n || nc <= 0.0 || nc > opts.c_max {
                continue;
            }
            let e = eval_bubble(n, p, q, nb, nc, &rs);
            if e.obj < f {
                (b, c, f) = (nb, nc, e.obj);
                moved = true;
                break;
            }
        }
        if !moved {
            hb /= 2.0;
            hc /= 2.0;
        }
    }
    let refined = eval_bubble(n, p, q, b, c, &rs);
    if refined.min >= -opts.feasibility_tol {
        return Ok(BubbleFit {
            beta: b,
            c,
            min_residual: refined.min,
            sup_residual: refined.sup,
            objective: refined.obj,
            refined: true,
        });
    }
    let feasible = (0..pairs.len())
        .filter(|&i| evals[i].min >= -opts.feasibility_tol)
        .min_by(|&i, &j| evals[i].obj.total_cmp(&evals[j].obj));
    match feasible {
        Some(i) => Ok(BubbleFit {
            beta: pairs[i].0,
            c: pairs[i].1,
            min_residual: evals[i].min,
            sup_residual: evals[i].sup,
            objective: evals[i].obj,
            refined: false,
        }),
        None => Err(Error::NoFeasiblePair { evaluated: pairs.len() }),
    }
}

/// The map `u -> v = ∫_0^u exp(s^{q+1}/((q+1)(m-1))) ds` turning solutions
/// of the gradient-critical equation into m-harmonic functions.
#[derive(Debug, Clone, Copy)]
pub struct PEqualsMTransform {
    pub m: f64,
    pub q: f64,
}

impl PEqualsMTransform {
    pub fn new(m: f64, q: f64) -> Result<Self> {
        if !(m > 1.0 && q >= 0.0) {
            return Err(Error::domain("transform requires m > 1 and q >= 0"));
        }
        Ok(PEqualsMTransform { m, q })
    }

    /// Integrand `G'(s)`.
    pub fn density(&self, s: f64) -> f64 {
        (s.powf(self.q + 1.0) / ((self.q + 1.0) * (self.m - 1.0))).exp()
    }

    pub fn forward_value(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        quadrature::integrate(|s| self.density(s), 0.0, u, 1e-16 * u)
    }

    /// Inverse by safeguarded Newton on `[0, v]` (G' >= 1 so G(u) >= u).
    pub fn inverse_value(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, v);
        let mut u = 0.5 * v;
        for _ in 0..200 {
            let g = self.forward_value(u) - v;
            if g > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let mut next = u - g / self.density(u);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 4.0 * f64::EPSILON * u.max(f64::MIN_POSITIVE) {
                return next;
            }
            u = next;
        }
        u
    }

    pub fn forward(&self, u: &RadialProfile) -> Result<RadialProfile> {
        let values: Vec<f64> = u.u().iter().map(|&x| self.forward_value(x)).collect();
        let derivative = u.u().iter().zip(u.du()).map(|(&x, &d)| self.density(x) * d).collect();
        RadialProfile::with_derivative(u.grid().clone(), values, derivative)
    }

    pub fn inverse(&self, v: &RadialProfile) -> Result<RadialProfile> {
        let values: Vec<f64> = v.u().iter().map(|&x| self.inverse_value(x)).collect();
        let derivative = values.iter().zip(v.du()).map(|(&x, &d)| d / self.density(x)).collect();
        RadialProfile::with_derivative(v.grid().clone(), values, derivative)
    }
}

/// `w(r) = S^{-1} u(M r)` with `M = S^{Q/(p-m)}`, sampled on the nodes `r_i/M`.
pub fn rescale_blowup(profile: &RadialProfile, s: f64, params: &ProblemParams) -> Result<RadialProfile> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("rescaling requires S > 0 (got {s})")));
    }
    if params.p() == params.m() {
        return Err(Error::domain("rescaling requires p != m"));
    }
    let mfac = s.powf(params.big_q() / (params.p() - params.m()));
    let grid = profile.grid().scaled(1.0 / mfac)?;
    let values = profile.u().iter().map(|u| u / s).collect();
    let derivative = profile.du().iter().map(|d| d * mfac / s).collect();
    let out = RadialProfile::with_derivative(grid, values, derivative)?;
    Ok(match profile.blowup_from() {
        Some(k) => out.with_blowup_from(k),
        None => out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::operator::{m_laplacian_residual, residual_with};

    fn pp(n: u32, m: f64, p: f64, q: f64) -> ProblemParams {
        ProblemParams::new(n, m, p, q).unwrap()
    }

    #[test]
    fn harmonic_examples() {
        let g = RadialGrid::uniform(0.5, 2.0, 4096).unwrap();
        let v = m_harmonic(3, 2.0, 1.0, 1.0, g.clone()).unwrap();
        let res = residual_with(&v, 3, 2.0, |_, _, _| 0.0).max_abs_residual;
        assert!(res <= 1e-8, "{res}");
        let v = m_harmonic(4, 3.0, 0.0, 1.0, g.clone()).unwrap();
        assert!((v.u()[0] - 0.5f64.powf(-0.5)).abs() < 1e-15);
        assert!(residual_with(&v, 4, 3.0, |_, _, _| 0.0).max_abs_residual <= 1e-6);
        let c = m_harmonic(2, 2.0, 3.0, 0.0, g.clone()).unwrap();
        assert_eq!(residual_with(&c, 2, 2.0, |_, _, _| 0.0).max_abs_residual, 0.0);
        assert!(m_harmonic(2, 3.0, 0.0, 1.0, g).is_err());
    }

    #[test]
    fn singular_amplitude() {
        let g = RadialGrid::uniform(0.1, 1.0, 4096).unwrap();
        let s = singular_profile(&pp(3, 2.0, 0.0, 4.0), g.clone()).unwrap();
        assert!((s.theta - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.amplitude - (2.0f64 / 9.0).cbrt()).abs() < 1e-15);
        let rep = m_laplacian_residual(&s.profile, &pp(3, 2.0, 0.0, 4.0)).unwrap();
        assert!(rep.max_abs_residual <= 1e-6, "{}", rep.max_abs_residual);
        assert!(singular_profile(&pp(3, 2.0, 0.0, 2.0), g).is_err());
    }

    #[test]
    fn aubin_talenti_residual() {
        let g = RadialGrid::uniform(0.0, 10.0, 4096).unwrap();
        let c = 3f64.powf(0.25);
        let u = bubble_profile(0.5, c, g).unwrap();
        let rep = m_laplacian_residual(&u, &pp(3, 2.0, 0.0, 5.0)).unwrap();
        assert!(rep.max_abs_residual <= 1e-6, "{}", rep.max_abs_residual);
        assert!(bubble_residual(3.0, 0.0, 5.0, 0.5, c, 1.3).abs() < 1e-14);
    }

    #[test]
    fn transform_round_trip_and_cole_hopf() {
        let t = PEqualsMTransform::new(2.0, 0.0).unwrap();
        for u in [0.0, 1e-8, 0.3, 1.0, 4.0] {
            assert!((t.forward_value(u) - u.exp_m1()).abs() <= 1e-14 * u.exp());
            assert!((t.inverse_value(t.forward_value(u)) - u).abs() <= 1e-12 * (1.0 + u));
        }
        let t1 = PEqualsMTransform::new(2.0, 1.0).unwrap();
        for u in [0.1, 0.7, 2.0] {
            assert!((t1.inverse_value(t1.forward_value(u)) - u).abs() <= 1e-12);
        }
    }

    #[test]
    fn rescale_identity_and_invariance() {
        let params = pp(3, 2.0, 0.0, 4.0);
        let g = RadialGrid::uniform(0.1, 1.0, 512).unwrap();
        let s = singular_profile(&params, g).unwrap().profile;
        let same = rescale_blowup(&s, 1.0, &params).unwrap();
        assert_eq!(same, s);
        let w = rescale_blowup(&s, 10.0, &params).unwrap();
        let amp = (2.0f64 / 9.0).cbrt();
        for (r, v) in w.r().iter().zip(w.u()) {
            assert!((v - amp * r.powf(-2.0 / 3.0)).abs() < 1e-12 * v);
        }
    }
}
