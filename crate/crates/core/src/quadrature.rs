//! Quadrature helpers: adaptive Gauss-Kronrod, per-cell moment integration of
//! sampled radial data, and least-squares line fits.

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod integration to absolute-or-relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, err: f64, tol: f64, depth: u32) -> f64 {
        if err <= tol.max(1e-15 * whole.abs()) || depth == 0 {
            return whole;
        }
        let c = 0.5 * (a + b);
        let (l, el) = gk15(f, a, c);
        let (r, er) = gk15(f, c, b);
        rec(f, a, c, l, el, 0.5 * tol, depth - 1) + rec(f, c, b, r, er, 0.5 * tol, depth - 1)
    }
    let (whole, err) = gk15(&f, a, b);
    rec(&f, a, b, whole, err, tol, 40)
}

/// `(b^e - a^e)/e`, with the logarithmic limit at e = 0.
fn power_moment(a: f64, b: f64, e: f64) -> f64 {
    if e.abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(e) - a.powf(e)) / e
    }
}

/// `(∫_lo^hi s^k ds, ∫_lo^hi s^k (s - lo) ds)` without the cancellation of
/// the closed forms on thin cells far from the origin.
pub(crate) fn linear_weight_moments(lo: f64, hi: f64, k: f64) -> (f64, f64) {
    if lo <= 0.0 {
        return (hi.powf(k + 1.0) / (k + 1.0), hi.powf(k + 2.0) / (k + 2.0));
    }
    let t = (hi - lo) / lo;
    let l1 = ln_1p_pow(t, k + 1.0);
    let m0 = lo.powf(k + 1.0) * l1 / (k + 1.0);
    // J(t) = ∫_0^t (1+x)^k x dx
    let j = if t < 0.05 {
        let (mut coef, mut tp, mut sum) = (1.0, t * t, 0.0);
        for i in 0..40 {
            let term = coef * tp / (i as f64 + 2.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coef *= (k - i as f64) / (i as f64 + 1.0);
            tp *= t;
        }
        sum
    } else {
        ln_1p_pow(t, k + 2.0) / (k + 2.0) - l1 / (k + 1.0)
    };
    (m0, lo.powf(k + 2.0) * j)
}

/// `(1+t)^e - 1`.
fn ln_1p_pow(t: f64, e: f64) -> f64 {
    (e * t.ln_1p()).exp_m1()
}

/// `∫_a^b h(t) t^k dt` where h is interpolated between `ha = h(a)` and
/// `hb = h(b)`: log-linearly (exact for power laws) when both are positive and
/// `a > 0`, linearly otherwise.
pub fn cell_integral(a: f64, b: f64, ha: f64, hb: f64, k: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a > 0.0 && ha > 0.0 && hb > 0.0 {
        let ratio = hb / ha;
        if (ratio - 1.0).abs() > 1e-12 {
            let e = ratio.ln() / (b / a).ln();
            return ha * a.powf(-e) * power_moment(a, b, e + k + 1.0);
        }
    }
    let (m0, m1) = linear_weight_moments(a, b, k);
    ha * m0 + (hb - ha) / (b - a) * m1
}

fn interp_cell(a: f64, b: f64, ha: f64, hb: f64, x: f64) -> f64 {
    if a > 0.0 && ha > 0.0 && hb > 0.0 {
        let e = (hb / ha).ln() / (b / a).ln();
        ha * (x / a).powf(e)
    } else {
        ha + (hb - ha) * (x - a) / (b - a)
    }
}

/// `∫_lo^hi h(r) r^k dr` for h sampled at ascending nodes `r`.
///
/// The range is clipped to the sampled interval, except that when `lo` lies
/// below the first node (typically `lo = 0` for a ball) the first cell's
/// power law is extrapolated analytically; `None` is returned when that tail
/// is not integrable.
pub fn radial_integral(r: &[f64], h: &[f64], k: f64, lo: f64, hi: f64) -> Option<f64> {
    let n = r.len();
    debug_assert_eq!(n, h.len());
    if n < 2 || hi <= lo {
        return Some(0.0);
    }
    let hi = hi.min(r[n - 1]);
    let mut total = 0.0;
    if lo < r[0] {
        let (a, b, ha, hb) = (r[0], r[1], h[0], h[1]);
        if a > 0.0 {
            let e = if ha > 0.0 && hb > 0.0 { (hb / ha).ln() / (b / a).ln() } else { 0.0 };
            let g = e + k + 1.0;
            let top = hi.min(a);
            if lo > 0.0 {
                total += ha * a.powf(-e) * power_moment(lo, top, g);
            } else if g > 0.0 {
                total += ha * a.powf(-e) * top.powf(g) / g;
            } else {
                return None;
            }
        }
    }
    let lo = lo.max(r[0]);
    for i in 0..n - 1 {
        let (a, b) = (r[i], r[i + 1]);
        if b <= lo || a >= hi {
            continue;
        }
        let (ca, cb) = (a.max(lo), b.min(hi));
        let ha = if ca > a { interp_cell(a, b, h[i], h[i + 1], ca) } else { h[i] };
        let hb = if cb < b { interp_cell(a, b, h[i], h[i + 1], cb) } else { h[i + 1] };
        total += cell_integral(ca, cb, ha, hb, k);
    }
    Some(total)
}

/// Least-squares fit `y = intercept + slope x`; returns (slope, intercept, r^2).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, my - slope * mx, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_polynomials_and_exp() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-14) - 9.0).abs() < 1e-13);
        assert!((integrate(f64::exp, 0.0, 1.0, 1e-15) - (1f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn power_law_cells_are_exact() {
        let r: Vec<f64> = (0..20).map(|i| 0.1 + 0.05 * i as f64).collect();
        let h: Vec<f64> = r.iter().map(|x| 2.0 * x.powf(-0.7)).collect();
        let got = radial_integral(&r, &h, 2.0, 0.0, 0.8).unwrap();
        let want = 2.0 * 0.8f64.powf(2.3) / 2.3;
        assert!((got - want).abs() / want < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn linear_cells_handle_zero_endpoint() {
        let r = [0.0, 0.5, 1.0];
        let h = [1.0, 1.0, 1.0];
        assert!((radial_integral(&r, &h, 2.0, 0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn nonintegrable_tail_is_reported() {
        let r: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let h: Vec<f64> = r.iter().map(|x| x.powi(-3)).collect();
        assert!(radial_integral(&r, &h, 0.0, 0.0, 5.0).is_none());
    }

    #[test]
    fn thin_cell_moments_match_expansion() {
        let (lo, k) = (1.0 - 3e-9, 2.0);
        let hi = lo + 2.5e-10;
        let h = hi - lo;
        let (m0, m1) = linear_weight_moments(lo, hi, k);
        // ∫ s^2 ds and ∫ s^2 (s - lo) ds to leading orders in h
        let e0 = lo * lo * h + lo * h * h + h * h * h / 3.0;
        let e1 = lo * lo * h * h / 2.0 + 2.0 * lo * h.powi(3) / 3.0;
        assert!((m0 - e0).abs() / e0 < 1e-14);
        assert!((m1 - e1).abs() / e1 < 1e-12, "{m1} {e1}");
        let (w0, w1) = linear_weight_moments(1.0, 3.0, 1.5);
        assert!((w0 - (3f64.powf(2.5) - 1.0) / 2.5).abs() < 1e-13);
        let exact1 = (3f64.powf(3.5) - 1.0) / 3.5 - w0;
        assert!((w1 - exact1).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (s, c, r2) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15 && (r2 - 1.0).abs() < 1e-15);
    }
}
