//! Trinomial coefficients of the Bernstein gradient estimate, the reduced
//! discriminant, and the search for an admissible substitution frame.
//!
//! The substitution is `u = v^{-beta}`, `z = |∇v|^2`, `z = v^{-lambda} Y`. The
//! gradient bound holds when the quadratic `A6 t^2 + A2 t + A1` has negative
//! discriminant; in the reduced variables `(s_bar, l)` this is `D2 < 0`.

use crate::error::{Error, Result};
use crate::params::{growth_threshold, ProblemParams};

/// Substitution parameters of one Bernstein frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinFrame {
    pub beta: f64,
    pub lambda: f64,
    pub s: f64,
    pub s_bar: f64,
    pub l: f64,
    pub eps0: f64,
}

impl BernsteinFrame {
    /// Builds the frame from (beta, lambda); `eps0` is carried verbatim.
    pub fn from_beta_lambda(params: &ProblemParams, beta: f64, lambda: f64, eps0: f64) -> Result<Self> {
        if lambda == -2.0 {
            return Err(Error::domain("frame requires lambda != -2"));
        }
        let (m, p) = (params.m(), params.p());
        let s = m - p - 1.0 - beta * params.big_q();
        Ok(BernsteinFrame { beta, lambda, s, s_bar: s_bar_of(params, s, lambda), l: lambda / (lambda + 2.0), eps0 })
    }

    /// Recovers (beta, lambda) from the reduced variables.
    pub fn from_reduced(params: &ProblemParams, s_bar: f64, l: f64, eps0: f64) -> Result<Self> {
        if l == 1.0 {
            return Err(Error::domain("frame requires l != 1"));
        }
        let big_q = params.big_q();
        if !(big_q > 0.0) {
            return Err(Error::domain(format!("frame recovery requires Q > 0 (got {big_q})")));
        }
        let lambda = 2.0 * l / (1.0 - l);
        let c = params.m() - params.p() - 1.0;
        let beta = (c - s_bar) * (lambda + 2.0) / (2.0 * big_q);
        let s = c - beta * big_q;
        Ok(BernsteinFrame { beta, lambda, s, s_bar, l, eps0 })
    }

    /// alpha = -(lambda+2)/(2 beta): the power of u whose gradient is bounded.
    pub fn alpha(&self) -> f64 {
        -(self.lambda + 2.0) / (2.0 * self.beta)
    }
}

fn s_bar_of(params: &ProblemParams, s: f64, lambda: f64) -> f64 {
    let (m, p) = (params.m(), params.p());
    (2.0 * s - lambda * (p - m + 1.0)) / (lambda + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrinomialCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub a7: f64,
}

pub fn coefficients(params: &ProblemParams, beta: f64, lambda: f64) -> Result<TrinomialCoeffs> {
    let (n, m, p) = (params.nf(), params.m(), params.p());
    if !(p < m) {
        return Err(Error::domain(format!("coefficients require p < m (got p = {p}, m = {m})")));
    }
    if beta == 0.0 {
        return Err(Error::domain("coefficients require beta != 0"));
    }
    if lambda == -2.0 {
        return Err(Error::domain("coefficients require lambda != -2"));
    }
    let s = m - p - 1.0 - beta * params.big_q();
    let mm2 = m - 2.0;
    let b1 = beta + 1.0;
    let lam_coef = m / 2.0 - mm2 * mm2 / (2.0 * n);
    let bpow = beta.abs().powf(p - m) * beta;

    let a1 = (m - 1.0).powi(2) * b1 * b1 / n
        - (m - 1.0) * b1
        - 0.5 * lambda * (lam_coef * lambda + (m - 1.0) * (beta + 2.0 - 2.0 * mm2 * b1 / n));
    let a2 = (2.0 * (m - 1.0) * b1 / n + s - lambda * ((p - m + 1.0) / 2.0 - mm2 / n)) * bpow;
    let a3 = lam_coef * lambda + (m - 1.0) * (1.0 - mm2 / n) * b1;
    let a4 = -mm2 / 4.0;
    let a5 = mm2 / 2.0 + mm2 * mm2 / (4.0 * n);
    let a6 = (beta * beta).powf(p - m + 1.0) / n;
    let a7 = ((p - m + 2.0) / 2.0 - mm2 / n) * bpow;
    Ok(TrinomialCoeffs { a1, a2, a3, a4, a5, a6, a7 })
}

/// D = A2^2 - 4 A6 A1.
pub fn discriminant_raw(c: &TrinomialCoeffs) -> f64 {
    c.a2 * c.a2 - 4.0 * c.a6 * c.a1
}

fn require_growth(params: &ProblemParams) -> Result<f64> {
    let big_q = params.big_q();
    if big_q > 0.0 {
        Ok(big_q)
    } else {
        Err(Error::domain(format!("reduced discriminant requires Q > 0 (got Q = {big_q})")))
    }
}

/// D2(s_bar, l) = Q (l - s_bar/2)^2 + T(s_bar).
pub fn reduced_discriminant(params: &ProblemParams, s_bar: f64, l: f64) -> Result<f64> {
    let big_q = require_growth(params)?;
    let d = l - s_bar / 2.0;
    Ok(big_q * d * d + t_poly(params, s_bar)?)
}

/// Leading coefficient (N-1)Q/4 - (m-1) of [`t_poly`].
fn t_leading(params: &ProblemParams) -> f64 {
    (params.nf() - 1.0) * params.big_q() / 4.0 - (params.m() - 1.0)
}

/// T(s_bar) = [(N-1)Q/4 - m + 1] s_bar^2 + (m-1)(q-1) s_bar + (m-1) q.
pub fn t_poly(params: &ProblemParams, s_bar: f64) -> Result<f64> {
    require_growth(params)?;
    let (m, q) = (params.m(), params.q());
    Ok(t_leading(params) * s_bar * s_bar + (m - 1.0) * (q - 1.0) * s_bar + (m - 1.0) * q)
}

/// -1 - alpha (m - p)/Q.
pub fn gradient_bound_exponent(params: &ProblemParams, alpha: f64) -> Result<f64> {
    let (m, p) = (params.m(), params.p());
    let big_q = require_growth(params)?;
    if !(p < m) {
        return Err(Error::domain(format!("gradient exponent requires p < m (got p = {p})")));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("gradient exponent requires alpha > 0 (got {alpha})")));
    }
    Ok(-1.0 - alpha * (m - p) / big_q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchCase {
    CaseI,
    CaseII,
    CaseIII,
}

impl SearchCase {
    pub fn name(self) -> &'static str {
        match self {
            SearchCase::CaseI => "CaseI",
            SearchCase::CaseII => "CaseII",
            SearchCase::CaseIII => "CaseIII",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub frame: BernsteinFrame,
    pub coeffs: TrinomialCoeffs,
    /// Raw discriminant of the unperturbed trinomial.
    pub discriminant: f64,
    pub d2: f64,
    pub case_label: SearchCase,
    pub alpha: f64,
    pub gradient_exponent: f64,
}

const SCAN_GROWTH: f64 = 1.25;
const SCAN_CAP: f64 = 1e6;

/// Searches for an admissible frame (`D2 < 0`, `s_bar > max{0, m-p-1}`,
/// `alpha > 0`, `l != 1`).
pub fn search(params: &ProblemParams) -> Result<SearchResult> {
    let (n, m, p, q) = (params.nf(), params.m(), params.p(), params.q());
    let big_q = params.big_q();
    if params.n() < 2 {
        return Err(Error::domain("search requires N >= 2"));
    }
    if !(p < m) {
        return Err(Error::domain(format!("search requires p < m (got p = {p}, m = {m})")));
    }
    if !(big_q > 0.0) {
        return Err(Error::domain(format!("search requires Q > 0 (got Q = {big_q})")));
    }
    let c = m - p - 1.0;
    let floor = c.max(0.0);
    let threshold = growth_threshold(params);
    let case = if big_q < threshold {
        SearchCase::CaseI
    } else if big_q == threshold {
        SearchCase::CaseII
    } else {
        SearchCase::CaseIII
    };

    let (s_bar, l) = match case {
        SearchCase::CaseI | SearchCase::CaseII => {
            let mut start = floor.max(2.0);
            if case == SearchCase::CaseII {
                start = start.max(-q / (q - 1.0));
            }
            let mut s_bar = start + 1.0;
            loop {
                if t_poly(params, s_bar)? < 0.0 {
                    break (s_bar, s_bar / 2.0);
                }
                s_bar *= SCAN_GROWTH;
                if s_bar > SCAN_CAP {
                    return Err(Error::NoAdmissibleFrame(format!(
                        "{}: T(s_bar) stays nonnegative up to s_bar = {SCAN_CAP:e} for {params}",
                        case.name()
                    )));
                }
            }
        }
        SearchCase::CaseIII => {
            let a = t_leading(params);
            let s_bar = (m - 1.0) * (1.0 - q) / (2.0 * a);
            if !(s_bar > floor) {
                return Err(Error::NoAdmissibleFrame(format!(
                    "CaseIII: vertex s_bar = {s_bar} does not exceed max{{0, m-p-1}} = {floor} for {params}"
                )));
            }
            let d_t = (m - 1.0) * ((m - 1.0) * (q + 1.0) * (q + 1.0) - (n - 1.0) * big_q * q);
            if !(d_t > 0.0) || !(t_poly(params, s_bar)? < 0.0) {
                return Err(Error::NoAdmissibleFrame(format!(
                    "CaseIII: T is nonnegative at its vertex (discriminant {d_t:e}) for {params}"
                )));
            }
            let mut l = s_bar / 2.0;
            if (l - 1.0).abs() < 1e-9 {
                let bound = d_t / (big_q * ((n - 1.0) * big_q - 4.0 * (m - 1.0)));
                l += 0.5 * bound.sqrt();
            }
            (s_bar, l)
        }
    };
    finish(params, case, s_bar, l)
}

fn finish(params: &ProblemParams, case: SearchCase, s_bar: f64, l: f64) -> Result<SearchResult> {
    let fail = |what: String| Err(Error::NoAdmissibleFrame(format!("{}: {what} for {params}", case.name())));
    if l == 1.0 {
        return fail("l = 1 leaves lambda undefined".into());
    }
    let frame = BernsteinFrame::from_reduced(params, s_bar, l, 0.0)?;
    let d2 = reduced_discriminant(params, s_bar, l)?;
    if !(d2 < 0.0) {
        return fail(format!("D2 = {d2} is not negative"));
    }
    let alpha = frame.alpha();
    if !(alpha > 0.0 && alpha.is_finite()) {
        return fail(format!("alpha = {alpha} is not positive"));
    }
    let coeffs = coefficients(params, frame.beta, frame.lambda)?;
    let discriminant = discriminant_raw(&coeffs);
    if !(discriminant < 0.0) {
        return fail(format!("raw discriminant {discriminant} is not negative"));
    }
    let eps0 = choose_eps0(&coeffs, discriminant).ok_or_else(|| {
        Error::NoAdmissibleFrame(format!("{}: no positive eps0 keeps the discriminant negative", case.name()))
    })?;
    Ok(SearchResult {
        frame: BernsteinFrame { eps0, ..frame },
        coeffs,
        discriminant,
        d2,
        case_label: case,
        alpha,
        gradient_exponent: gradient_bound_exponent(params, alpha)?,
    })
}

/// Picks eps0 so that `A2^2 - 4 (A6 - eps0)(A1 - eps0)` stays negative.
fn choose_eps0(c: &TrinomialCoeffs, d: f64) -> Option<f64> {
    let mut eps = c.a1.min(c.a6).min(d.abs() / (4.0 * (c.a1 + c.a6))) / 10.0;
    for _ in 0..60 {
        if eps > 0.0 && c.a2 * c.a2 - 4.0 * (c.a6 - eps) * (c.a1 - eps) < 0.0 {
            return Some(eps);
        }
        eps /= 2.0;
    }
    None
}

/// `Q lambda^2 + (m-1) q (lambda+2)^2`, positive for lambda != -2 when Q, q > 0.
pub fn l_bar(params: &ProblemParams, lambda: f64) -> f64 {
    let (m, q) = (params.m(), params.q());
    params.big_q() * lambda * lambda + (m - 1.0) * q * (lambda + 2.0) * (lambda + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(n: u32, m: f64, p: f64, q: f64) -> ProblemParams {
        ProblemParams::new(n, m, p, q).unwrap()
    }

    #[test]
    fn coefficient_spot_values() {
        let c = coefficients(&pp(2, 2.0, 0.0, 2.0), 4.0, -6.0).unwrap();
        assert!((c.a1 - 7.5).abs() < 1e-13);
        assert!((c.a2 + 0.25).abs() < 1e-14);
        assert!((c.a6 - 1.0 / 32.0).abs() < 1e-15);
        assert_eq!((c.a4, c.a5), (0.0, 0.0));
        assert!((discriminant_raw(&c) + 0.875).abs() < 1e-13);

        let c = coefficients(&pp(2, 2.0, 0.0, 2.0), 1.0, -3.0).unwrap();
        assert!(c.a1.abs() < 1e-14);
        assert!((c.a2 - 0.5).abs() < 1e-14);
        assert!((c.a6 - 0.5).abs() < 1e-15);
        assert!((discriminant_raw(&c) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn discriminant_trivial() {
        let c = TrinomialCoeffs { a1: 1.0, a2: 0.0, a3: 0.0, a4: 0.0, a5: 0.0, a6: 1.0, a7: 0.0 };
        assert_eq!(discriminant_raw(&c), -4.0);
    }

    #[test]
    fn coefficient_preconditions() {
        let p = pp(2, 2.0, 0.0, 2.0);
        assert!(coefficients(&p, 0.0, -6.0).is_err());
        assert!(coefficients(&p, 1.0, -2.0).is_err());
        assert!(coefficients(&pp(2, 2.0, 2.5, 2.0), 1.0, -3.0).is_err());
    }

    #[test]
    fn reduced_values() {
        let p = pp(2, 2.0, 0.0, 2.0);
        assert!((reduced_discriminant(&p, 3.0, 1.5).unwrap() + 1.75).abs() < 1e-14);
        assert!((reduced_discriminant(&p, 3.0, 3.0).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(reduced_discriminant(&p, 0.0, 0.0).unwrap(), 2.0);
        assert_eq!(t_poly(&p, 0.0).unwrap(), 2.0);
        let root = (1.0 + 7f64.sqrt()) / 1.5;
        assert!(t_poly(&p, root).unwrap().abs() < 1e-14);
        assert!(t_poly(&pp(3, 3.0, 1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn worked_search() {
        let r = search(&pp(2, 2.0, 0.0, 2.0)).unwrap();
        assert_eq!(r.case_label, SearchCase::CaseI);
        assert_eq!(r.frame.s_bar, 3.0);
        assert_eq!(r.frame.l, 1.5);
        assert!((r.frame.lambda + 6.0).abs() < 1e-12);
        assert!((r.frame.beta - 4.0).abs() < 1e-12);
        assert!((r.alpha - 0.5).abs() < 1e-12);
        assert!((r.d2 + 1.75).abs() < 1e-12);
        assert!((r.gradient_exponent + 2.0).abs() < 1e-12);
        assert!(r.frame.eps0 > 0.0);
    }

    #[test]
    fn search_rejections() {
        assert!(matches!(search(&pp(2, 2.0, 3.5, 0.5)), Err(Error::Domain(_))));
        assert!(matches!(search(&pp(10, 2.0, 0.0, 3.0)), Err(Error::NoAdmissibleFrame(_))));
        assert!(matches!(search(&pp(1, 2.0, 0.0, 3.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn case_iii_frame() {
        // Q above the growth threshold but below the second bound, with q < 1.
        let p = pp(10, 2.0, 0.97, 0.5);
        let r = search(&p).unwrap();
        assert_eq!(r.case_label, SearchCase::CaseIII);
        assert!(r.d2 < 0.0 && r.alpha > 0.0);
    }

    #[test]
    fn case_iii_vertex_at_two_is_perturbed() {
        let p = pp(10, 2.0, 4.0 / 3.0, 0.2);
        let r = search(&p).unwrap();
        assert_eq!(r.case_label, SearchCase::CaseIII);
        assert!((r.frame.s_bar - 2.0).abs() < 1e-12);
        assert!((r.frame.l - 1.0).abs() > 0.1);
        assert!(r.d2 < 0.0);
    }

    #[test]
    fn gradient_exponent_checks() {
        assert_eq!(gradient_bound_exponent(&pp(2, 2.0, 0.0, 2.0), 0.5).unwrap(), -2.0);
        assert!(gradient_bound_exponent(&pp(3, 3.0, 1.0, 1.0), 1.0).is_err());
        let e = gradient_bound_exponent(&pp(2, 2.0, 0.0, 2.0), 1e-9).unwrap();
        assert!((e + 1.0).abs() < 1e-8);
    }
}
