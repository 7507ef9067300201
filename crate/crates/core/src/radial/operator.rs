use std::ops::Range;

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::radial::profile::RadialProfile;
use crate::radial::stencil;

/// Gradient magnitude below which a node is flagged as degenerate when m < 2.
pub const DEGENERATE_GRADIENT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    /// Root mean square over the window.
    pub l2_residual: f64,
    pub window: Range<usize>,
    /// Residual at each window node.
    pub residuals: Vec<f64>,
    /// Window nodes with |u'| below [`DEGENERATE_GRADIENT`] when m < 2.
    pub degenerate_nodes: Vec<usize>,
    /// Largest gap between the stored derivative and a five-point difference
    /// of the values, relative to `1 + max |u'|`, on the window.
    pub derivative_mismatch: f64,
}

/// `|g|^{m-2} g`.
pub fn phi(g: f64, m: f64) -> f64 {
    if m == 2.0 {
        g
    } else if g == 0.0 {
        0.0
    } else {
        g.abs().powf(m - 2.0) * g
    }
}

/// Radial m-Laplacian `g' + (N-1) g / r` with `g = phi(u')` taken from the
/// profile's stored derivative. `g'` uses a five-point difference, with the
/// odd extension of `g` when the grid starts at r = 0.
///
/// Working from the stored `u'` avoids second differences of values and needs
/// no regularization where `u'` vanishes, so degenerate nodes are only flagged.
pub fn m_laplacian(profile: &RadialProfile, dim: u32, m: f64) -> (Vec<f64>, Vec<usize>) {
    let r = profile.r();
    let du = profile.du();
    let nf = dim as f64;
    let g: Vec<f64> = du.iter().map(|&d| phi(d, m)).collect();
    let dg = stencil::derivative_odd(r, &g);
    let mut degenerate = Vec::new();
    let out = (0..r.len())
        .map(|i| {
            if m < 2.0 && du[i].abs() < DEGENERATE_GRADIENT {
                degenerate.push(i);
            }
            if r[i] > 0.0 {
                dg[i] + (nf - 1.0) * g[i] / r[i]
            } else {
                nf * dg[i]
            }
        })
        .collect();
    (out, degenerate)
}

/// Evaluation window: drops two nodes at each end and anything touching the
/// capped part of a blow-up profile.
pub fn residual_window(profile: &RadialProfile) -> Range<usize> {
    let n = profile.len();
    let mut end = n.saturating_sub(2);
    if let Some(k) = profile.blowup_from() {
        end = end.min(k.saturating_sub(2));
    }
    2..end.max(2)
}

/// Residual of `-Δ_m u - source(r, u, u')` on the interior window.
pub fn residual_with<F>(profile: &RadialProfile, dim: u32, m: f64, source: F) -> ResidualReport
where
    F: Fn(f64, f64, f64) -> f64,
{
    let (lap, degenerate) = m_laplacian(profile, dim, m);
    let window = residual_window(profile);
    let r = profile.r();
    let u = profile.u();
    let du = profile.du();
    let residuals: Vec<f64> = window.clone().map(|i| -lap[i] - source(r[i], u[i], du[i])).collect();
    let (fd, _) = stencil::derivatives(r, u);
    let scale = 1.0 + window.clone().map(|i| du[i].abs()).fold(0.0, f64::max);
    let derivative_mismatch = window.clone().map(|i| (fd[i] - du[i]).abs()).fold(0.0, f64::max) / scale;
    let max_abs_residual = residuals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let l2_residual = if residuals.is_empty() {
        0.0
    } else {
        (residuals.iter().map(|v| v * v).sum::<f64>() / residuals.len() as f64).sqrt()
    };
    let degenerate_nodes = degenerate.into_iter().filter(|i| window.contains(i)).collect();
    ResidualReport { max_abs_residual, l2_residual, window, residuals, degenerate_nodes, derivative_mismatch }
}

/// `u^q |u'|^p` with the conventions `0^0 = 1`.
pub fn power_source(q: f64, p: f64, u: f64, du: f64) -> f64 {
    let a = if q == 0.0 { 1.0 } else { u.max(0.0).powf(q) };
    let b = if p == 0.0 { 1.0 } else { du.abs().powf(p) };
    a * b
}

/// Residual of `-Δ_m u - u^q |u'|^p`.
pub fn m_laplacian_residual(profile: &RadialProfile, params: &ProblemParams) -> Result<ResidualReport> {
    let window = residual_window(profile);
    if window.is_empty() {
        return Err(Error::domain("profile too short for a residual window"));
    }
    let (q, p) = (params.q(), params.p());
    Ok(residual_with(profile, params.n(), params.m(), |_, u, du| power_source(q, p, u, du)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::profile::RadialGrid;

    #[test]
    fn constant_profile_has_zero_residual() {
        let params = ProblemParams::new(3, 2.5, 1.0, 2.0).unwrap();
        let p = RadialProfile::constant(RadialGrid::uniform(0.0, 1.0, 64).unwrap(), 2.0).unwrap();
        let rep = m_laplacian_residual(&p, &params).unwrap();
        assert_eq!(rep.max_abs_residual, 0.0);
        assert_eq!(rep.window, 2..62);
    }

    #[test]
    fn quadratic_solves_poisson_with_unit_source() {
        // -Δu = 1 in R^3 for u = (1 - r^2)/6
        let g = RadialGrid::uniform(0.0, 1.0, 100).unwrap();
        let p = RadialProfile::new(g.clone(), g.nodes().iter().map(|r| (1.0 - r * r) / 6.0).collect()).unwrap();
        let rep = residual_with(&p, 3, 2.0, |_, _, _| 1.0);
        assert!(rep.max_abs_residual < 1e-10, "{}", rep.max_abs_residual);
    }

    #[test]
    fn degenerate_nodes_flagged_for_singular_operator() {
        let g = RadialGrid::uniform(0.0, 1.0, 40).unwrap();
        let p = RadialProfile::constant(g, 1.0).unwrap();
        let rep = residual_with(&p, 2, 1.5, |_, _, _| 0.0);
        assert_eq!(rep.degenerate_nodes.len(), rep.window.len());
    }
}
