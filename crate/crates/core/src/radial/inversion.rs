use crate::error::{Error, Result};
use crate::quadrature::linear_weight_moments;
use crate::radial::profile::{RadialGrid, RadialProfile};

/// Solves `-Δ_m w = v` on the ball `[0, R]` with `w(R) = 0`, `w'(0) = 0`.
///
/// Uses the first integral `r^{N-1} |w'|^{m-2} w' = -F(r)`,
/// `F(r) = ∫_0^r s^{N-1} v`, then `w(r) = ∫_r^R s^{1/(m-1)} phi(s) ds` with
/// `phi = (F/s^N)^{1/(m-1)}`. Both integrals are product rules: `v` and `phi`
/// are interpolated linearly per cell and the power weights are integrated
/// exactly, so constant sources are reproduced to rounding.
pub fn invert_t(source: &RadialProfile, m: f64, dim: u32) -> Result<RadialProfile> {
    let r = source.r();
    if r[0] != 0.0 {
        return Err(Error::domain("operator inversion needs a ball grid starting at r = 0"));
    }
    if !(m > 1.0) || dim < 1 {
        return Err(Error::domain("operator inversion needs m > 1 and N >= 1"));
    }
    let v = source.u();
    let n = r.len();
    let nf = dim as f64;
    let a = 1.0 / (m - 1.0);

    let mut flux = vec![0.0; n];
    for i in 0..n - 1 {
        let (lo, hi) = (r[i], r[i + 1]);
        let h = hi - lo;
        let (m0, m1) = linear_weight_moments(lo, hi, nf - 1.0);
        flux[i + 1] = flux[i] + v[i] * m0 + (v[i + 1] - v[i]) / h * m1;
    }
    let mut phi = vec![0.0; n];
    phi[0] = (v[0].max(0.0) / nf).powf(a);
    for i in 1..n {
        phi[i] = (flux[i].max(0.0) / r[i].powf(nf)).powf(a);
    }
    let mut w = vec![0.0; n];
    for i in (0..n - 1).rev() {
        let (lo, hi) = (r[i], r[i + 1]);
        let h = hi - lo;
        let (p0, p1) = linear_weight_moments(lo, hi, a);
        let cell = phi[i] * p0 + (phi[i + 1] - phi[i]) / h * p1;
        w[i] = w[i + 1] + cell.max(0.0);
    }
    let mut dw = vec![0.0; n];
    for i in 1..n {
        // r^a phi written as one power to keep the derivative within a few ulps
        let g = flux[i].max(0.0) / r[i].powi(dim as i32 - 1);
        dw[i] = -if m == 2.0 { g } else { g.powf(a) };
    }
    RadialProfile::with_derivative(source.grid().clone(), w, dw)
}

/// Inverse together with a Richardson-style error estimate from a
/// half-resolution solve (`|w_h - w_2h| / 3` at shared nodes).
pub fn invert_t_with_estimate(source: &RadialProfile, m: f64, dim: u32) -> Result<(RadialProfile, f64)> {
    let fine = invert_t(source, m, dim)?;
    let n = source.len();
    let mut idx: Vec<usize> = (0..n).step_by(2).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    if idx.len() < crate::radial::profile::MIN_NODES {
        return Ok((fine, f64::NAN));
    }
    let grid = RadialGrid::new(idx.iter().map(|&i| source.r()[i]).collect())?;
    let coarse_src = RadialProfile::with_derivative(
        grid,
        idx.iter().map(|&i| source.u()[i]).collect(),
        idx.iter().map(|&i| source.du()[i]).collect(),
    )?;
    let coarse = invert_t(&coarse_src, m, dim)?;
    let est = idx.iter().zip(coarse.u()).map(|(&i, c)| (fine.u()[i] - c).abs() / 3.0).fold(0.0, f64::max);
    Ok((fine, est))
}
