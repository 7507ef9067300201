//! Exponent quadruple, derived exponents and regime classification.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// The quadruple (N, m, p, q) of `-Δ_m u = u^q |∇u|^p` in dimension N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    n: u32,
    m: f64,
    p: f64,
    q: f64,
}

impl ProblemParams {
    pub fn new(n: u32, m: f64, p: f64, q: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain(format!("dimension must satisfy N >= 1 (got N = {n})")));
        }
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::domain(format!("operator index must satisfy m > 1 (got m = {m})")));
        }
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::domain(format!("gradient exponent must satisfy p >= 0 (got p = {p})")));
        }
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::domain(format!("solution exponent must satisfy q >= 0 (got q = {q})")));
        }
        Ok(ProblemParams { n, m, p, q })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dimension as a float.
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Q = p + q - m + 1.
    pub fn big_q(&self) -> f64 {
        self.p + self.q - self.m + 1.0
    }

    /// N(m-1) - q(N-m) - p(N-1).
    pub fn subcritical_margin(&self) -> f64 {
        let n = self.nf();
        n * (self.m - 1.0) - (self.q * (n - self.m) + self.p * (n - 1.0))
    }

    pub fn derived(&self) -> DerivedExponents {
        derive_exponents(self)
    }
}

impl fmt::Display for ProblemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(N={}, m={}, p={}, q={})", self.n, self.m, self.p, self.q)
    }
}

/// Quantities derived from the quadruple. `None` marks a quantity whose
/// defining condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedExponents {
    pub big_q: f64,
    /// (p + mq)/(m - p), when p < m.
    pub alpha1: Option<f64>,
    /// m(N-1)/(N-m), when m < N.
    pub m_star: Option<f64>,
    /// (m - p)/Q, when Q != 0 and p < m.
    pub theta: Option<f64>,
    pub subcritical_margin: f64,
}

pub fn derive_exponents(params: &ProblemParams) -> DerivedExponents {
    let (n, m, p, q) = (params.nf(), params.m, params.p, params.q);
    let big_q = params.big_q();
    let alpha1 = (p < m).then(|| (p + m * q) / (m - p));
    let m_star = (m < n).then(|| m * (n - 1.0) / (n - m));
    let theta = (big_q != 0.0 && p < m).then(|| (m - p) / big_q);
    DerivedExponents { big_q, alpha1, m_star, theta, subcritical_margin: params.subcritical_margin() }
}

/// Constants of the two-sided structure condition on the source `f`:
/// `u^q|η|^p + M1 u^α1 - M2|η|^α2 <= f <= c0 u^q|η|^p + M1 u^α1 + M2|η|^α2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureBounds {
    pub c0: f64,
    pub m1: f64,
    pub m2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl StructureBounds {
    /// Bounds with the natural `alpha1 = (p + mq)/(m - p)`.
    pub fn new(params: &ProblemParams, c0: f64, m1: f64, m2: f64, alpha2: f64) -> Result<Self> {
        let alpha1 = params
            .derived()
            .alpha1
            .ok_or_else(|| Error::domain(format!("alpha1 = (p + mq)/(m - p) needs p < m for {params}")))?;
        Self::with_alpha1(params, c0, m1, m2, alpha1, alpha2)
    }

    pub fn with_alpha1(params: &ProblemParams, c0: f64, m1: f64, m2: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(c0 >= 1.0) {
            return Err(Error::domain(format!("structure constant must satisfy c0 >= 1 (got {c0})")));
        }
        if !(m1 > 0.0 && m1.is_finite()) {
            return Err(Error::domain(format!("structure constant must satisfy M1 > 0 (got {m1})")));
        }
        if !(m2 > 0.0 && m2.is_finite()) {
            return Err(Error::domain(format!("structure constant must satisfy M2 > 0 (got {m2})")));
        }
        if !(alpha1 > 0.0 && alpha1.is_finite()) {
            return Err(Error::domain(format!("alpha1 must be positive (got {alpha1})")));
        }
        let b = StructureBounds { c0, m1, m2, alpha1, alpha2 };
        b.check(params)?;
        Ok(b)
    }

    /// Upper end `alpha1 m/(alpha1 + 1)` of the admissible alpha2 interval.
    pub fn alpha2_max(&self, m: f64) -> f64 {
        self.alpha1 * m / (self.alpha1 + 1.0)
    }

    /// Checks `m - 1 < alpha2 < alpha1 m/(alpha1 + 1)` against `params`.
    pub fn check(&self, params: &ProblemParams) -> Result<()> {
        let m = params.m();
        let hi = self.alpha2_max(m);
        if self.alpha2 > m - 1.0 && self.alpha2 < hi {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "alpha2 must lie in (m-1, alpha1 m/(alpha1+1)) = ({}, {hi}) (got {})",
                m - 1.0,
                self.alpha2
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Comparison {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparison::Lt => lhs < rhs,
            Comparison::Le => lhs <= rhs,
            Comparison::Eq => lhs == rhs,
            Comparison::Ge => lhs >= rhs,
            Comparison::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Eq => "==",
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
        }
    }
}

/// Individual inequalities entering the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    PEqualsM,
    DimensionAtLeastTwo,
    PBelowM,
    QPositive,
    CaseIQLower,
    CaseIQUpper,
    CaseIGrowth,
    CaseIIQUpper,
    CaseIIGrowth,
    MAboveOne,
    MBelowN,
    Subcritical,
    Supercritical,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::PEqualsM => "p = m",
            Condition::DimensionAtLeastTwo => "N >= 2",
            Condition::PBelowM => "p < m",
            Condition::QPositive => "Q > 0",
            Condition::CaseIQLower => "(i) q >= 1",
            Condition::CaseIQUpper => "(i) q < (m-1)(N+3)/(N-1)",
            Condition::CaseIGrowth => "(i) Q < 4(m-1)/(N-1)",
            Condition::CaseIIQUpper => "(ii) q < 1",
            Condition::CaseIIGrowth => "(ii) Q < (m-1)(q+1)^2/(q(N-1))",
            Condition::MAboveOne => "m > 1",
            Condition::MBelowN => "m < N",
            Condition::Subcritical => "q(N-m)+p(N-1) < N(m-1)",
            Condition::Supercritical => "q(N-m)+p(N-1) > N(m-1)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub condition: Condition,
    pub lhs: f64,
    pub rhs: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Certificate {
    fn new(condition: Condition, lhs: f64, comparison: Comparison, rhs: f64) -> Self {
        Certificate { condition, lhs, rhs, comparison, pass: comparison.holds(lhs, rhs) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    LiouvilleAllParamsPEqualsM,
    LiouvilleWeakCaseI,
    LiouvilleWeakCaseII,
    LiouvilleSuperSubcritical,
    SupercriticalBubbleRegime,
    Unclassified,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::LiouvilleAllParamsPEqualsM => "LiouvilleAllParams_pEqualsM",
            Regime::LiouvilleWeakCaseI => "LiouvilleWeak_case_i",
            Regime::LiouvilleWeakCaseII => "LiouvilleWeak_case_ii",
            Regime::LiouvilleSuperSubcritical => "LiouvilleSuper_subcritical",
            Regime::SupercriticalBubbleRegime => "SupercriticalBubbleRegime",
            Regime::Unclassified => "Unclassified",
        }
    }

    /// Classification as a function of the certificate list alone.
    pub fn from_certificates(certs: &[Certificate]) -> Regime {
        let ok = |c: Condition| certs.iter().any(|x| x.condition == c && x.pass);
        use Condition::*;
        if ok(PEqualsM) {
            return Regime::LiouvilleAllParamsPEqualsM;
        }
        if ok(DimensionAtLeastTwo) && ok(PBelowM) && ok(QPositive) {
            if ok(CaseIQLower) && ok(CaseIQUpper) && ok(CaseIGrowth) {
                return Regime::LiouvilleWeakCaseI;
            }
            if ok(CaseIIQUpper) && ok(CaseIIGrowth) {
                return Regime::LiouvilleWeakCaseII;
            }
        }
        if ok(MAboveOne) && ok(MBelowN) {
            if ok(Subcritical) {
                return Regime::LiouvilleSuperSubcritical;
            }
            if ok(Supercritical) {
                return Regime::SupercriticalBubbleRegime;
            }
        }
        Regime::Unclassified
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub classification: Regime,
    pub certificates: Vec<Certificate>,
}

impl RegimeReport {
    pub fn certificate(&self, c: Condition) -> Option<&Certificate> {
        self.certificates.iter().find(|x| x.condition == c)
    }
}

/// Growth threshold 4(m-1)/(N-1) separating the first two search cases.
pub(crate) fn growth_threshold(params: &ProblemParams) -> f64 {
    4.0 * (params.m - 1.0) / (params.nf() - 1.0)
}

pub(crate) fn case_ii_threshold(params: &ProblemParams) -> f64 {
    let q = params.q;
    (params.m - 1.0) * (q + 1.0) * (q + 1.0) / (q * (params.nf() - 1.0))
}

pub fn liouville_certificates(params: &ProblemParams) -> Vec<Certificate> {
    use Comparison::*;
    use Condition::*;
    let (n, m, p, q) = (params.nf(), params.m, params.p, params.q);
    let big_q = params.big_q();
    let lhs_crit = q * (n - m) + p * (n - 1.0);
    let rhs_crit = n * (m - 1.0);
    vec![
        Certificate::new(PEqualsM, p, Eq, m),
        Certificate::new(DimensionAtLeastTwo, n, Ge, 2.0),
        Certificate::new(PBelowM, p, Lt, m),
        Certificate::new(QPositive, big_q, Gt, 0.0),
        Certificate::new(CaseIQLower, q, Ge, 1.0),
        Certificate::new(CaseIQUpper, q, Lt, (m - 1.0) * (n + 3.0) / (n - 1.0)),
        Certificate::new(CaseIGrowth, big_q, Lt, growth_threshold(params)),
        Certificate::new(CaseIIQUpper, q, Lt, 1.0),
        Certificate::new(CaseIIGrowth, big_q, Lt, case_ii_threshold(params)),
        Certificate::new(MAboveOne, m, Gt, 1.0),
        Certificate::new(MBelowN, m, Lt, n),
        Certificate::new(Subcritical, lhs_crit, Lt, rhs_crit),
        Certificate::new(Supercritical, lhs_crit, Gt, rhs_crit),
    ]
}

pub fn classify_liouville(params: &ProblemParams) -> RegimeReport {
    let certificates = liouville_certificates(params);
    RegimeReport { classification: Regime::from_certificates(&certificates), certificates }
}

/// Strict subcriticality q(N-m) + p(N-1) < N(m-1), defined for 1 < m < N.
pub fn subcritical(params: &ProblemParams) -> Result<bool> {
    let (n, m) = (params.nf(), params.m);
    if !(m > 1.0 && m < n) {
        return Err(Error::domain(format!("subcriticality requires 1 < m < N (got m = {m}, N = {n})")));
    }
    Ok(params.q * (n - m) + params.p * (n - 1.0) < n * (m - 1.0))
}

/// Predicates of the structure condition set scanned by [`feasibility_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FPredicate {
    PWindow,
    BlowupExponent,
    Superlinear,
    Subcritical,
    Alpha2Interval,
}

impl FPredicate {
    pub const ALL: [FPredicate; 5] = [
        FPredicate::PWindow,
        FPredicate::BlowupExponent,
        FPredicate::Superlinear,
        FPredicate::Subcritical,
        FPredicate::Alpha2Interval,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            FPredicate::PWindow => "m-1 < p < m",
            FPredicate::BlowupExponent => "m-(p-m+1)N < 0",
            FPredicate::Superlinear => "Q > 0",
            FPredicate::Subcritical => "q(N-m)+p(N-1) < N(m-1)",
            FPredicate::Alpha2Interval => "m-1 < alpha1*m/(alpha1+1)",
        }
    }

    pub fn eval(self, n: f64, m: f64, p: f64, q: f64) -> bool {
        match self {
            FPredicate::PWindow => m - 1.0 < p && p < m,
            FPredicate::BlowupExponent => m - (p - m + 1.0) * n < 0.0,
            FPredicate::Superlinear => p + q - m + 1.0 > 0.0,
            FPredicate::Subcritical => q * (n - m) + p * (n - 1.0) < n * (m - 1.0),
            FPredicate::Alpha2Interval => {
                if p >= m {
                    return false;
                }
                let a1 = (p + m * q) / (m - p);
                m - 1.0 < a1 * m / (a1 + 1.0)
            }
        }
    }
}

impl fmt::Display for FPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub p: f64,
    pub q: f64,
    /// The first failing predicate, paired with the second failing one when present.
    pub first_failing: (FPredicate, Option<FPredicate>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub n: u32,
    pub m: f64,
    pub resolution: usize,
    pub q_max: f64,
    pub enabled: Vec<FPredicate>,
    pub points_evaluated: usize,
    pub feasible: Vec<(f64, f64)>,
    pub failures: Vec<PointFailure>,
    /// `joint[i][j]` counts points where predicates i and j both hold.
    pub joint: [[usize; 5]; 5],
    /// Enabled pairs that never hold simultaneously, in canonical order.
    pub conflicting_pairs: Vec<(FPredicate, FPredicate)>,
    /// Set when the feasible set is empty.
    pub most_frequent_conflict: Option<(FPredicate, FPredicate)>,
}

impl FeasibilityReport {
    pub fn is_empty(&self) -> bool {
        self.feasible.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityScan {
    pub resolution: usize,
    pub q_max: Option<f64>,
    pub excluded: Vec<FPredicate>,
    pub execution: Execution,
}

impl FeasibilityScan {
    pub fn new(resolution: usize) -> Self {
        FeasibilityScan { resolution, q_max: None, excluded: Vec::new(), execution: Execution::default() }
    }

    pub fn exclude(mut self, pred: FPredicate) -> Self {
        self.excluded.push(pred);
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn q_max(mut self, q_max: f64) -> Self {
        self.q_max = Some(q_max);
        self
    }

    /// Samples (p, q) on a uniform `(resolution+1)^2` lattice over
    /// `[m-1, m] x [0, q_max]`.
    pub fn run(&self, n: u32, m: f64) -> Result<FeasibilityReport> {
        let nf = n as f64;
        if !(m > 1.0 && m < nf) {
            return Err(Error::domain(format!("feasibility scan requires 1 < m < N (got m = {m}, N = {n})")));
        }
        if self.resolution < 10 {
            return Err(Error::domain(format!("grid resolution must be at least 10 (got {})", self.resolution)));
        }
        let q_max = self.q_max.unwrap_or(nf * (m - 1.0) / (nf - m) + 1.0);
        if !(q_max > 0.0 && q_max.is_finite()) {
            return Err(Error::domain(format!("q_max must be positive (got {q_max})")));
        }
        let enabled: Vec<FPredicate> = FPredicate::ALL.iter().copied().filter(|p| !self.excluded.contains(p)).collect();
        let res = self.resolution;
        let rows = self.execution.map_range(res + 1, |i| {
            let p = (m - 1.0) + i as f64 / res as f64;
            let mut feasible = Vec::new();
            let mut failures = Vec::new();
            let mut joint = [[0usize; 5]; 5];
            let mut holds = [false; 5];
            for j in 0..=res {
                let q = q_max * j as f64 / res as f64;
                for pred in &enabled {
                    holds[pred.index()] = pred.eval(nf, m, p, q);
                }
                for a in &enabled {
                    for b in &enabled {
                        if holds[a.index()] && holds[b.index()] {
                            joint[a.index()][b.index()] += 1;
                        }
                    }
                }
                let mut failing = enabled.iter().copied().filter(|x| !holds[x.index()]);
                match failing.next() {
                    None => feasible.push((p, q)),
                    Some(first) => failures.push(PointFailure { p, q, first_failing: (first, failing.next()) }),
                }
            }
            (feasible, failures, joint)
        });

        let mut feasible = Vec::new();
        let mut failures = Vec::new();
        let mut joint = [[0usize; 5]; 5];
        for (f, fl, jt) in rows {
            feasible.extend(f);
            failures.extend(fl);
            for a in 0..5 {
                for b in 0..5 {
                    joint[a][b] += jt[a][b];
                }
            }
        }
        let mut conflicting_pairs = Vec::new();
        for (ia, a) in enabled.iter().enumerate() {
            for b in &enabled[ia + 1..] {
                if joint[a.index()][b.index()] == 0 {
                    conflicting_pairs.push((*a, *b));
                }
            }
        }
        // A conflicting pair blocks every point where exactly one member holds;
        // the pair blocking the most points is the most frequent conflict.
        let most_frequent_conflict = if feasible.is_empty() {
            conflicting_pairs.iter().copied().max_by_key(|(a, b)| {
                let (ja, jb) = (joint[a.index()][a.index()], joint[b.index()][b.index()]);
                (ja + jb, std::cmp::Reverse((a.index(), b.index())))
            })
        } else {
            None
        };
        Ok(FeasibilityReport {
            n,
            m,
            resolution: res,
            q_max,
            enabled,
            points_evaluated: (res + 1) * (res + 1),
            feasible,
            failures,
            joint,
            conflicting_pairs,
            most_frequent_conflict,
        })
    }
}

pub fn feasibility_scan(n: u32, m: f64, grid_resolution: usize) -> Result<FeasibilityReport> {
    FeasibilityScan::new(grid_resolution).run(n, m)
}

/// Whether the strong maximum principle applies for absorption `u^alpha`:
/// the integral of `(u^{alpha+1})^{-1/m}` diverges at 0 exactly when alpha > m-1.
pub fn strong_max_applicable(alpha: f64, m: f64) -> bool {
    alpha > m - 1.0
}

/// `min_{t >= 0} (lambda + M1 t^alpha1) / t^{m-1}`.
pub fn nonexistence_rate(lambda: f64, m1: f64, alpha1: f64, m: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::domain(format!("rate requires m > 1 (got {m})")));
    }
    if !(alpha1 > m - 1.0) {
        return Err(Error::domain(format!("rate requires alpha1 > m-1 (got alpha1 = {alpha1}, m-1 = {})", m - 1.0)));
    }
    if !(m1 > 0.0) {
        return Err(Error::domain(format!("rate requires M1 > 0 (got {m1})")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::domain(format!("rate requires lambda >= 0 (got {lambda})")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let t = ((m - 1.0) * lambda / ((alpha1 - m + 1.0) * m1)).powf(1.0 / alpha1);
    Ok((lambda + m1 * t.powf(alpha1)) / t.powf(m - 1.0))
}

/// `sign(b) |b|^e`.
pub(crate) fn spow(b: f64, e: f64) -> f64 {
    b.signum() * b.abs().powf(e)
}

/// Exponent of the gradient power obtained from the substitution `u = v^b`
/// in the supersolution argument.
pub fn supersolution_exponent(params: &ProblemParams, b: f64) -> Result<f64> {
    let (m, p) = (params.m, params.p);
    let big_q = params.big_q();
    if !((b - 1.0) * spow(b, m - 1.0) > 0.0) {
        return Err(Error::domain(format!("substitution requires (b-1) b^(m-1) > 0 (got b = {b})")));
    }
    let den = m - p + b * big_q;
    if den == 0.0 {
        return Err(Error::domain("substitution requires m - p + bQ != 0"));
    }
    Ok((m - p + 2.0 * b * big_q) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupersolutionCase {
    /// Q > 0 and m >= 2, with b = 1 + eps.
    GrowthMAtLeastTwo,
    /// Q > 0 and 1 < m < 2, with b < min{0, A}.
    GrowthMBelowTwo,
    /// Q < 0, with b = -eps.
    Absorption,
    /// Q = 0, exponential substitution.
    Balanced,
}

impl SupersolutionCase {
    pub fn label(self) -> &'static str {
        match self {
            SupersolutionCase::GrowthMAtLeastTwo => "(i) Q > 0, m >= 2",
            SupersolutionCase::GrowthMBelowTwo => "(i') Q > 0, 1 < m < 2",
            SupersolutionCase::Absorption => "(ii) Q < 0",
            SupersolutionCase::Balanced => "(iii) Q = 0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupersolutionWitness {
    Power {
        case: SupersolutionCase,
        b: f64,
        s: f64,
        alpha: f64,
    },
    /// `u = e^v`: any exponent in the open interval is admissible.
    Exponential {
        alpha_lo: f64,
        alpha_hi: f64,
    },
}

/// Finds a substitution exponent b with s > 0 and
/// `min{1, m-1} < alpha < N(m-1)/(N-1)`, following the case split of the
/// supersolution argument.
pub fn admissible_b(params: &ProblemParams) -> Result<SupersolutionWitness> {
    let (n, m, p, q) = (params.nf(), params.m, params.p, params.q);
    let big_q = params.big_q();
    if params.n < 2 {
        return Err(Error::domain("substitution argument requires N >= 2"));
    }
    let alpha_cap = n * (m - 1.0) / (n - 1.0);
    if big_q == 0.0 {
        let hi = m.min(alpha_cap);
        if q < hi {
            return Ok(SupersolutionWitness::Exponential { alpha_lo: q, alpha_hi: hi });
        }
        return Err(Error::domain(format!(
            "no admissible exponent in case {}: interval ({q}, {hi}) is empty",
            SupersolutionCase::Balanced.label()
        )));
    }
    let eps: Vec<f64> = (1..=12).map(|k| 10f64.powi(-k)).collect();
    let (case, candidates): (SupersolutionCase, Vec<f64>) = if big_q > 0.0 && m >= 2.0 {
        (SupersolutionCase::GrowthMAtLeastTwo, eps.iter().map(|e| 1.0 + e).collect())
    } else if big_q > 0.0 {
        let k = 3.0 * n - m * n - 2.0;
        let a = (q * (n - m) + p * k - 3.0 * m * n + m + n + m * m * n) / (big_q * k);
        let top = a.min(0.0);
        // s > 0 bounds b from below when b < 0.
        let floor = -(m - p - 1.0) / big_q;
        let mut c = Vec::new();
        if floor < top {
            for j in 1..200 {
                c.push(top - (top - floor) * j as f64 / 200.0);
            }
        }
        (SupersolutionCase::GrowthMBelowTwo, c)
    } else {
        (SupersolutionCase::Absorption, eps.iter().map(|e| -e).collect())
    };
    let lower = 1f64.min(m - 1.0);
    for b in candidates {
        let s = m - p - 1.0 + b * big_q;
        let Ok(alpha) = supersolution_exponent(params, b) else {
            continue;
        };
        if s > 0.0 && alpha > lower && alpha < alpha_cap {
            return Ok(SupersolutionWitness::Power { case, b, s, alpha });
        }
    }
    Err(Error::domain(format!("no admissible exponent b found in case {}", case.label())))
}
