//! Measurements on radial profiles: Harnack ratios, the weak Harnack constant,
//! integral scaling laws on balls, and shooting probes for entire solutions.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ode::{self, OdeOptions, Stop};
use crate::params::ProblemParams;
use crate::quadrature::{linear_fit, radial_integral};
use crate::radial::operator::power_source;
use crate::radial::RadialProfile;

/// Area of the unit sphere in R^N: `ω1 = 2`, `ω2 = 2π`, `ω_{N+2} = 2π ω_N / N`.
pub fn sphere_area(dim: u32) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = if dim % 2 == 1 { 2.0 } else { two_pi };
    let mut k = if dim % 2 == 1 { 1 } else { 2 };
    while k < dim {
        w *= two_pi / k as f64;
        k += 2;
    }
    w
}

/// `∫_{B_R} h(|x|) dx` for samples `h` on the profile grid. Below the first
/// node the first cell's power law is continued to the origin.
pub fn ball_integral(r: &[f64], h: &[f64], dim: u32, radius: f64) -> Option<f64> {
    radial_integral(r, h, dim as f64 - 1.0, 0.0, radius).map(|v| v * sphere_area(dim))
}

fn range_extrema(u: &RadialProfile, lo: f64, hi: f64) -> (f64, f64) {
    let (mut inf, mut sup) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in [u.value_at(lo), u.value_at(hi)] {
        inf = inf.min(x);
        sup = sup.max(x);
    }
    for (&r, &v) in u.r().iter().zip(u.u()) {
        if r >= lo && r <= hi {
            inf = inf.min(v);
            sup = sup.max(v);
        }
    }
    (inf, sup)
}

/// `sup_{B_R} u / (inf_{B_R} u + R^m λ)` on the ball centered at the origin.
pub fn harnack_ratio(u: &RadialProfile, radius: f64, lambda: f64, m: f64) -> Result<f64> {
    harnack_ratio_at(u, 0.0, radius, lambda, m)
}

/// Harnack ratio on the ball `B_R(x0)` with `|x0| = center`; the radial
/// values over it are those with `|r - center| <= R`. The profile must cover
/// `B_{2R}(x0)`.
pub fn harnack_ratio_at(u: &RadialProfile, center: f64, radius: f64, lambda: f64, m: f64) -> Result<f64> {
    if !(radius > 0.0) || !(center >= 0.0) || !(lambda >= 0.0) {
        return Err(Error::domain("Harnack ratio needs R > 0, center >= 0 and lambda >= 0"));
    }
    let (r0, r1) = (u.r()[0], u.grid().r_max());
    let (lo2, hi2) = (center - 2.0 * radius, center + 2.0 * radius);
    let covers_low = if lo2 <= 0.0 { r0 == 0.0 } else { lo2 >= r0 * (1.0 - 1e-12) };
    if !covers_low || hi2 > r1 * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "ball of radius 2R = {} around |x0| = {center} leaves the profile domain [{r0}, {r1}]",
            2.0 * radius
        )));
    }
    let (inf, sup) = range_extrema(u, (center - radius).max(0.0), center + radius);
    let den = inf + radius.powf(m) * lambda;
    if !(den > 0.0) {
        return Err(Error::domain("Harnack ratio undefined: profile vanishes on the ball and lambda = 0"));
    }
    Ok(sup / den)
}

/// Empirical weak Harnack constant `inf_{B_R} u · R^{N/γ} / ||u||_{L^γ(B_{2R})}`
/// on balls centered at the origin.
pub fn weak_harnack(u: &RadialProfile, dim: u32, m: f64, radius: f64, gamma: f64) -> Result<f64> {
    let nf = dim as f64;
    if !(m < nf) {
        return Err(Error::domain(format!("weak Harnack needs m < N (got m = {m}, N = {dim})")));
    }
    let m_star = m * (nf - 1.0) / (nf - m);
    if !(gamma >= 1.0 && gamma < m_star - 1.0) {
        return Err(Error::domain(format!(
            "weak Harnack needs 1 <= gamma < m* - 1 = {} (got gamma = {gamma})",
            m_star - 1.0
        )));
    }
    if !(radius > 0.0 && 2.0 * radius <= u.grid().r_max() * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "ball of radius 2R = {} leaves the profile domain [0, {}]",
            2.0 * radius,
            u.grid().r_max()
        )));
    }
    let (inf, _) = range_extrema(u, u.r()[0], radius.max(u.r()[0]));
    let h: Vec<f64> = u.u().iter().map(|v| v.powf(gamma)).collect();
    let norm = ball_integral(u.r(), &h, dim, 2.0 * radius)
        .ok_or_else(|| Error::domain("u^gamma is not integrable at the origin"))?
        .powf(1.0 / gamma);
    let c = inf * radius.powf(nf / gamma) / norm;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain("weak Harnack constant is not positive; profile must be positive"));
    }
    Ok(c)
}

/// Log-log fit `log measured ~ slope · log R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub radii: Vec<f64>,
    pub measured: Vec<f64>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub predicted_slope: f64,
    /// `r2 >= 0.99` over at least one decade of radii.
    pub reliable: bool,
}

impl ScalingFit {
    pub fn fit(radii: &[f64], measured: &[f64], predicted_slope: f64) -> Result<Self> {
        if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
            return Err(Error::domain("scaling fit needs at least 3 positive ascending radii"));
        }
        if measured.len() != radii.len() || measured.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::domain("scaling fit needs one positive finite measurement per radius"));
        }
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = measured.iter().map(|v| v.ln()).collect();
        let (fitted_slope, intercept, r2) = linear_fit(&xs, &ys);
        let decade = radii[radii.len() - 1] / radii[0] >= 10.0 * (1.0 - 1e-12);
        Ok(ScalingFit {
            radii: radii.to_vec(),
            measured: measured.to_vec(),
            fitted_slope,
            intercept,
            r2,
            predicted_slope,
            reliable: r2 >= 0.99 && decade,
        })
    }

    pub fn relative_slope_error(&self) -> f64 {
        (self.fitted_slope - self.predicted_slope).abs() / self.predicted_slope.abs()
    }
}

/// The three ball integrals `∫u^γ`, `∫|u'|^μ`, `∫u^{γ-α1-1}|u'|^m` against
/// their predicted growth exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralScalings {
    pub u_power: ScalingFit,
    pub gradient_power: ScalingFit,
    pub mixed: ScalingFit,
}

/// Predicted exponents `N - mγ/(α1-m+1)`, `N - (α1+1)μ/(α1-m+1)` and
/// `N - mγ/(α1-m+1)` of the three integrals.
pub fn predicted_exponents(dim: u32, m: f64, alpha1: f64, gamma: f64, mu: f64) -> [f64; 3] {
    let nf = dim as f64;
    let d = alpha1 - m + 1.0;
    [nf - m * gamma / d, nf - (alpha1 + 1.0) * mu / d, nf - m * gamma / d]
}

/// `|mγ/(α1-m+1) - θγ|` with `α1 = (p+mq)/(m-p)` and `θ = (m-p)/Q`; zero in
/// exact arithmetic whenever both are defined.
pub fn exponent_identity_gap(params: &ProblemParams, gamma: f64) -> Result<f64> {
    let d = params.derived();
    let (Some(alpha1), Some(theta)) = (d.alpha1, d.theta) else {
        return Err(Error::domain(format!("identity needs p < m and Q != 0 for {params}")));
    };
    let m = params.m();
    Ok((m * gamma / (alpha1 - m + 1.0) - theta * gamma).abs())
}

pub fn integral_scalings(
    u: &RadialProfile,
    params: &ProblemParams,
    alpha1: f64,
    gamma: f64,
    mu: f64,
    radii: &[f64],
) -> Result<IntegralScalings> {
    let m = params.m();
    if !(gamma > 0.0 && gamma < alpha1) {
        return Err(Error::domain(format!("integral scalings need 0 < gamma < alpha1 = {alpha1} (got {gamma})")));
    }
    let mu_max = m * alpha1 / (alpha1 + 1.0);
    if !(mu > 0.0 && mu < mu_max) {
        return Err(Error::domain(format!(
            "integral scalings need 0 < mu < m alpha1/(alpha1+1) = {mu_max} (got {mu})"
        )));
    }
    if radii.len() < 4 {
        return Err(Error::domain("integral scalings need at least 4 radii"));
    }
    if radii.iter().any(|&r| !(r > 0.0) || r > u.grid().r_max() * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("radii must lie in (0, {}]", u.grid().r_max())));
    }
    let dim = params.n();
    let (uu, du) = (u.u(), u.du());
    let h1: Vec<f64> = uu.iter().map(|v| v.powf(gamma)).collect();
    let h2: Vec<f64> = du.iter().map(|d| d.abs().powf(mu)).collect();
    let h3: Vec<f64> = uu.iter().zip(du).map(|(v, d)| v.powf(gamma - alpha1 - 1.0) * d.abs().powf(m)).collect();
    let measure = |h: &[f64]| -> Result<Vec<f64>> {
        radii
            .iter()
            .map(|&r| {
                ball_integral(u.r(), h, dim, r).ok_or_else(|| Error::domain("integrand not integrable at the origin"))
            })
            .collect()
    };
    let pred = predicted_exponents(dim, m, alpha1, gamma, mu);
    Ok(IntegralScalings {
        u_power: ScalingFit::fit(radii, &measure(&h1)?, pred[0])?,
        gradient_power: ScalingFit::fit(radii, &measure(&h2)?, pred[1])?,
        mixed: ScalingFit::fit(radii, &measure(&h3)?, pred[2])?,
    })
}

/// How a shooting trajectory ended in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Zero slope with p > 0: the constant solution.
    Constant,
    HitsZero,
    GradientBlowup,
    Overflow,
    /// Reached the inner cutoff with `r u'/u` bounded away from 0.
    SingularAtOrigin,
    /// Reached the end of the interval positive and bounded.
    Survived,
}

impl ProbeOutcome {
    pub fn name(self) -> &'static str {
        match self {
            ProbeOutcome::Constant => "Constant",
            ProbeOutcome::HitsZero => "HitsZero",
            ProbeOutcome::GradientBlowup => "GradientBlowup",
            ProbeOutcome::Overflow => "Overflow",
            ProbeOutcome::SingularAtOrigin => "SingularAtOrigin",
            ProbeOutcome::Survived => "Survived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub slope: f64,
    pub outward: ProbeOutcome,
    /// Radius where the outward run stopped.
    pub outward_r: f64,
    pub inward: ProbeOutcome,
    pub inward_r: f64,
}

impl Trajectory {
    /// A positive bounded nonconstant solution on (0, R_max].
    pub fn is_counterexample(&self) -> bool {
        self.outward == ProbeOutcome::Survived && self.inward == ProbeOutcome::Survived
    }

    /// First failure, inward before outward; `Survived` when neither failed.
    pub fn outcome(&self) -> ProbeOutcome {
        if self.inward != ProbeOutcome::Survived {
            self.inward
        } else {
            self.outward
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub params: ProblemParams,
    pub r0: f64,
    pub r_max: f64,
    pub trajectories: Vec<Trajectory>,
    pub counterexamples: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LiouvilleProbeOptions {
    /// Inner cutoff relative to r0.
    pub r_min_rel: f64,
    pub gradient_cap: f64,
    pub overflow: f64,
    /// `|r u'/u|` above this at the inner cutoff flags a singular origin.
    pub singular_log_slope: f64,
    pub execution: Execution,
}

impl Default for LiouvilleProbeOptions {
    fn default() -> Self {
        LiouvilleProbeOptions {
            r_min_rel: 1e-8,
            gradient_cap: 1e10,
            overflow: 1e12,
            singular_log_slope: 0.1,
            execution: Execution::default(),
        }
    }
}

pub fn liouville_probe(params: &ProblemParams, r0: f64, slopes: &[f64], r_max: f64) -> Result<ProbeReport> {
    liouville_probe_with(params, r0, slopes, r_max, &LiouvilleProbeOptions::default())
}

/// Shoots `-Δ_m u = u^q|u'|^p` from `u(r0) = 1`, `u'(r0) = g` outward to
/// `r_max` and inward toward the origin for every slope `g`.
pub fn liouville_probe_with(
    params: &ProblemParams,
    r0: f64,
    slopes: &[f64],
    r_max: f64,
    opts: &LiouvilleProbeOptions,
) -> Result<ProbeReport> {
    if !(r0 > 0.0 && r_max > r0) {
        return Err(Error::domain(format!("probe needs 0 < r0 < R_max (got r0 = {r0}, R_max = {r_max})")));
    }
    if slopes.is_empty() || slopes.iter().any(|g| !g.is_finite()) {
        return Err(Error::domain("probe needs at least one finite slope"));
    }
    let trajectories = opts.execution.map(slopes, |&g| shoot_both(params, r0, g, r_max, opts));
    let counterexamples = trajectories.iter().filter(|t| t.is_counterexample()).count();
    Ok(ProbeReport { params: *params, r0, r_max, trajectories, counterexamples })
}

fn shoot_both(params: &ProblemParams, r0: f64, g: f64, r_max: f64, opts: &LiouvilleProbeOptions) -> Trajectory {
    if g == 0.0 && params.p() > 0.0 {
        return Trajectory {
            slope: g,
            outward: ProbeOutcome::Constant,
            outward_r: r_max,
            inward: ProbeOutcome::Constant,
            inward_r: 0.0,
        };
    }
    let (outward, outward_r) = shoot(params, r0, g, r_max, opts);
    let (inward, inward_r) = shoot(params, r0, g, r0 * opts.r_min_rel, opts);
    Trajectory { slope: g, outward, outward_r, inward, inward_r }
}

fn shoot(params: &ProblemParams, r0: f64, g: f64, r_end: f64, opts: &LiouvilleProbeOptions) -> (ProbeOutcome, f64) {
    let (n, m, p, q) = (params.nf(), params.m(), params.p(), params.q());
    let phi = |d: f64| d.signum() * d.abs().powf(m - 1.0);
    let phi_inv = |s: f64| s.signum() * s.abs().powf(1.0 / (m - 1.0));
    let rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        let du = phi_inv(y[1]);
        [du, -(n - 1.0) * y[1] / r - power_source(q, p, y[0], du)]
    };
    let ode_opts = OdeOptions { rtol: 1e-10, atol: 1e-13, ..OdeOptions::default() };
    let run = ode::integrate(rhs, r0, [1.0, phi(g)], &[r_end], &ode_opts, |_, y| {
        if !(y[0] > 0.0) {
            Some(ProbeOutcome::HitsZero)
        } else if y[0] > opts.overflow {
            Some(ProbeOutcome::Overflow)
        } else if phi_inv(y[1]).abs() > opts.gradient_cap {
            Some(ProbeOutcome::GradientBlowup)
        } else {
            None
        }
    });
    let outcome = match run.stop {
        Stop::Event(e) => e,
        Stop::StepUnderflow | Stop::MaxSteps => ProbeOutcome::GradientBlowup,
        Stop::Completed => {
            let (u, du) = (run.y_last[0], phi_inv(run.y_last[1]));
            if r_end < r0 && (r_end * du / u).abs() > opts.singular_log_slope {
                ProbeOutcome::SingularAtOrigin
            } else {
                ProbeOutcome::Survived
            }
        }
    };
    (outcome, run.t_last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert_eq!(sphere_area(1), 2.0);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn constant_harnack_is_one() {
        let u = RadialProfile::constant(RadialGrid::uniform(0.0, 1.0, 64).unwrap(), 3.0).unwrap();
        assert_eq!(harnack_ratio(&u, 0.25, 0.0, 2.0).unwrap(), 1.0);
        assert!(harnack_ratio(&u, 0.6, 0.0, 2.0).is_err());
    }

    #[test]
    fn constant_weak_harnack_is_geometric() {
        let u = RadialProfile::constant(RadialGrid::uniform(0.0, 1.0, 256).unwrap(), 2.0).unwrap();
        let gamma = 1.5;
        let expected = (sphere_area(3) * 8.0 / 3.0f64).powf(-1.0 / gamma);
        for r in [0.1, 0.2, 0.4] {
            let c = weak_harnack(&u, 3, 2.0, r, gamma).unwrap();
            assert!((c - expected).abs() <= 1e-6 * expected, "{c} {expected}");
        }
        assert!(weak_harnack(&u, 3, 2.0, 0.2, 3.0).is_err());
        assert!(weak_harnack(&u, 3, 2.0, 0.2, 0.5).is_err());
    }

    #[test]
    fn exact_power_fit() {
        let radii = [0.1, 0.2, 0.5, 1.0];
        let vals: Vec<f64> = radii.iter().map(|r: &f64| 3.0 * r.powf(2.5)).collect();
        let f = ScalingFit::fit(&radii, &vals, 2.5).unwrap();
        assert!(f.relative_slope_error() < 1e-12);
        assert!(f.reliable);
    }

    #[test]
    fn constant_slope_zero_is_constant_for_gradient_source() {
        let params = ProblemParams::new(2, 2.0, 1.0, 1.0).unwrap();
        let rep = liouville_probe(&params, 1.0, &[0.0], 10.0).unwrap();
        assert_eq!(rep.trajectories[0].outcome(), ProbeOutcome::Constant);
        assert_eq!(rep.counterexamples, 0);
    }
}
