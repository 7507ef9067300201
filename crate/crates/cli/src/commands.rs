//! Subcommand table and implementations.

use std::path::PathBuf;

use quasilin::bernstein::search;
use quasilin::params::{classify_liouville, FeasibilityScan, ProblemParams, StructureBounds};
use quasilin::radial::{
    blowup_shoot, bubble_profile, fit_explicit_bubble, residual_with, BlowupDomain, BlowupOptions, BubbleOptions,
    RadialGrid, RadialProfile,
};
use quasilin::solver::{
    fixed_point_solve_with, homotopy_solve_with, log_ladder, nonexistence_probe_with, principal_eigenpair_on,
    DirichletProblem, ProbeOptions, SolveOptions, SolveReport, SourceModel, EIGEN_NODES,
};
use quasilin::verify::{
    exponent_identity_gap, harnack_ratio_at, integral_scalings, liouville_probe_with, weak_harnack,
};
use quasilin::verify::{LiouvilleProbeOptions, ScalingFit};
use quasilin::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Settings;
use crate::output::{fs, line_plot, num, to_json, OutDir, Table, F};
use crate::CliError;

/// Run-wide options shared by every subcommand.
pub struct Ctx {
    pub json: bool,
    pub out: Option<OutDir>,
    pub seed: u64,
    pub execution: Execution,
}

type Run = fn(&Settings, &Ctx) -> Result<String, CliError>;

pub struct CommandDef {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [(&'static str, &'static str)],
    pub run: Run,
}

const PARAMS: [(&str, &str); 4] = [
    ("N", "dimension N >= 1"),
    ("m", "operator index m > 1"),
    ("p", "gradient exponent p >= 0"),
    ("q", "solution exponent q >= 0"),
];

macro_rules! keys {
    (params; $($k:literal => $h:literal),* $(,)?) => {
        &[PARAMS[0], PARAMS[1], PARAMS[2], PARAMS[3], $(($k, $h)),*]
    };
    ($($k:literal => $h:literal),* $(,)?) => {
        &[$(($k, $h)),*]
    };
}

pub const COMMANDS: &[CommandDef] = &[
    CommandDef {
        name: "classify",
        about: "Classify the Liouville regime of (N, m, p, q) with certificates",
        keys: keys!(params;),
        run: classify,
    },
    CommandDef {
        name: "bernstein",
        about: "Search for an admissible Bernstein frame",
        keys: keys!(params;),
        run: bernstein,
    },
    CommandDef {
        name: "feasibility",
        about: "Scan the structure condition set over (p, q) for fixed (N, m)",
        keys: keys!(
            "N" => "dimension N",
            "m" => "operator index, 1 < m < N",
            "resolution" => "lattice steps per axis (default 200)",
            "q-max" => "upper end of the q range",
        ),
        run: feasibility,
    },
    CommandDef {
        name: "solve",
        about: "Solve the forced Dirichlet problem on a ball by damped Picard iteration",
        keys: keys!(params;
            "M1" => "coefficient of u^alpha1 (default 1)",
            "M2" => "gradient absorption coefficient (default 0.1)",
            "alpha1" => "exponent of the M1 term (default (p+mq)/(m-p))",
            "alpha2" => "gradient absorption exponent",
            "c0" => "structure constant (default 1)",
            "lambda" => "forcing level >= 0",
            "R" => "ball radius (default 1)",
            "nodes" => "uniform grid cells before boundary grading (default 4096)",
            "omega" => "damping in (0, 1] (default 0.5)",
            "k-max" => "iteration budget (default 500)",
            "source" => "canonical | absorption",
            "homotopy" => "descending t schedule in [0, 1], forcing t*lambda",
        ),
        run: solve,
    },
    CommandDef {
        name: "eigen",
        about: "Principal Dirichlet eigenpair of the m-Laplacian on a ball",
        keys: keys!(
            "N" => "dimension",
            "m" => "operator index m > 1",
            "R" => "ball radius (default 1)",
            "nodes" => "grid nodes (default 2048)",
        ),
        run: eigen,
    },
    CommandDef {
        name: "harnack",
        about: "Harnack ratio (and weak Harnack constant) of a profile CSV",
        keys: keys!(
            "profile" => "profile CSV with columns r,u,du",
            "R" => "ball radius",
            "lambda" => "forcing level",
            "m" => "operator index (default 2)",
            "center" => "ball center on the radial axis (default 0)",
            "N" => "dimension, for the weak Harnack constant",
            "gamma" => "integrability exponent, for the weak Harnack constant",
        ),
        run: harnack,
    },
    CommandDef {
        name: "scalings",
        about: "Fit the ball-integral scaling laws of a profile CSV",
        keys: keys!(params;
            "profile" => "profile CSV with columns r,u,du",
            "gamma" => "power of u",
            "mu" => "power of |u'|",
            "radii" => "ball radii, spanning at least a decade",
            "alpha1" => "growth exponent (default (p+mq)/(m-p))",
        ),
        run: scalings,
    },
    CommandDef {
        name: "bubble",
        about: "Fit C(1+r^2)^(-beta) as a supersolution for m = 2",
        keys: keys!(
            "N" => "dimension",
            "p" => "gradient exponent",
            "q" => "solution exponent",
            "beta-steps" => "grid steps in beta (default 120)",
            "c-steps" => "grid steps in C (default 120)",
            "c-max" => "upper end of the C range (default 10)",
            "r-max" => "sample window [0, r-max] (default 20)",
            "tol" => "feasibility tolerance (default 1e-8)",
        ),
        run: bubble,
    },
    CommandDef {
        name: "blowup",
        about: "Shoot large boundary data and fit the blow-up rate",
        keys: keys!(params;
            "R" => "ball radius (default 1)",
            "ladder" => "ascending boundary values above 1",
            "n-uniform" => "uniform nodes before the boundary cluster (default 400)",
        ),
        run: blowup,
    },
    CommandDef {
        name: "probe-nonexistence",
        about: "Bracket the forcing level above which the iteration stops converging",
        keys: keys!(params;
            "M1" => "coefficient of u^alpha1 (default 1)",
            "M2" => "gradient absorption coefficient (default 0.1)",
            "alpha1" => "exponent of the M1 term (default (p+mq)/(m-p))",
            "alpha2" => "gradient absorption exponent",
            "c0" => "structure constant (default 1)",
            "R" => "ball radius (default 1)",
            "nodes" => "uniform grid cells before boundary grading (default 4096)",
            "source" => "canonical | absorption",
            "ladder" => "explicit forcing ladder (overrides the log ladder)",
            "ladder-lo" => "log ladder start (default 1e-3)",
            "ladder-hi" => "log ladder end (default 1e2)",
            "ladder-n" => "log ladder points (default 21)",
            "margin" => "relative margin of the rate test (default 0.1)",
        ),
        run: probe_nonexistence,
    },
    CommandDef {
        name: "liouville-probe",
        about: "Shoot radial trajectories looking for positive bounded solutions",
        keys: keys!(params;
            "r0" => "shooting radius with u(r0) = 1 (default 1)",
            "slopes" => "initial slopes u'(r0) (default -5..5 step 0.5, no 0)",
            "R-max" => "outer radius (default 100)",
        ),
        run: liouville,
    },
    CommandDef {
        name: "identity-check",
        about: "Check m*gamma/(alpha1-m+1) = theta*gamma on seeded random draws",
        keys: keys!("draws" => "number of draws (default 100)"),
        run: identity_check,
    },
];

fn params(s: &Settings) -> Result<ProblemParams, CliError> {
    Ok(ProblemParams::new(s.u32("N")?, s.f64("m")?, s.f64("p")?, s.f64("q")?)?)
}

#[derive(Serialize)]
struct ParamsJson {
    #[serde(rename = "N")]
    n: u32,
    m: F,
    p: F,
    q: F,
}

impl From<&ProblemParams> for ParamsJson {
    fn from(p: &ProblemParams) -> Self {
        ParamsJson { n: p.n(), m: F(p.m()), p: F(p.p()), q: F(p.q()) }
    }
}

fn params_rows(t: &mut Table, p: &ProblemParams) {
    t.row("N", p.n()).row("m", p.m()).row("p", p.p()).row("q", p.q());
}

fn opt(x: Option<f64>) -> Option<F> {
    x.map(F)
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn finish<T: Serialize>(ctx: &Ctx, json: &T, table: Table) -> Result<String, CliError> {
    if ctx.json {
        to_json(json)
    } else {
        Ok(table.render())
    }
}

fn write_profile(ctx: &Ctx, stem: &str, title: &str, u: &RadialProfile) -> Result<Option<PathBuf>, CliError> {
    let Some(out) = &ctx.out else {
        return Ok(None);
    };
    let path = out.path(&format!("{stem}.csv"));
    u.write_csv(&path)?;
    out.write(&format!("{stem}.svg"), &line_plot(title, "r", &[("u", u.r(), u.u())]))?;
    Ok(Some(path))
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

// ---------------------------------------------------------------- classify

#[derive(Serialize)]
struct CertJson {
    condition: &'static str,
    lhs: F,
    comparison: &'static str,
    rhs: F,
    pass: bool,
}

#[derive(Serialize)]
struct DerivedJson {
    #[serde(rename = "Q")]
    big_q: F,
    alpha1: Option<F>,
    m_star: Option<F>,
    theta: Option<F>,
    subcritical_margin: F,
}

#[derive(Serialize)]
struct ClassifyJson {
    classification: &'static str,
    params: ParamsJson,
    derived: DerivedJson,
    certificates: Vec<CertJson>,
}

fn classify(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let p = params(s)?;
    let rep = classify_liouville(&p);
    let d = p.derived();
    let mut t = Table::new();
    t.row("classification", rep.classification.name());
    params_rows(&mut t, &p);
    t.row("Q", d.big_q).row("alpha1", show(d.alpha1)).row("m*", show(d.m_star)).row("theta", show(d.theta));
    for c in &rep.certificates {
        let mark = if c.pass { "holds" } else { "fails" };
        t.row(format!("[{mark}] {}", c.condition.label()), format!("{} {} {}", c.lhs, c.comparison.symbol(), c.rhs));
    }
    let json = ClassifyJson {
        classification: rep.classification.name(),
        params: (&p).into(),
        derived: DerivedJson {
            big_q: F(d.big_q),
            alpha1: opt(d.alpha1),
            m_star: opt(d.m_star),
            theta: opt(d.theta),
            subcritical_margin: F(d.subcritical_margin),
        },
        certificates: rep
            .certificates
            .iter()
            .map(|c| CertJson {
                condition: c.condition.label(),
                lhs: F(c.lhs),
                comparison: c.comparison.symbol(),
                rhs: F(c.rhs),
                pass: c.pass,
            })
            .collect(),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- bernstein

#[derive(Serialize)]
struct BernsteinJson {
    params: ParamsJson,
    case: &'static str,
    s_bar: F,
    l: F,
    beta: F,
    lambda: F,
    s: F,
    eps0: F,
    alpha: F,
    d2: F,
    discriminant: F,
    gradient_exponent: F,
    coefficients: [F; 7],
}

fn bernstein(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let p = params(s)?;
    let r = search(&p)?;
    let f = &r.frame;
    let c = &r.coeffs;
    let coeffs = [c.a1, c.a2, c.a3, c.a4, c.a5, c.a6, c.a7];
    let mut t = Table::new();
    params_rows(&mut t, &p);
    t.row("case", r.case_label.name())
        .row("s_bar", f.s_bar)
        .row("l", f.l)
        .row("beta", f.beta)
        .row("lambda", f.lambda)
        .row("alpha", r.alpha)
        .row("D2", r.d2)
        .row("discriminant", r.discriminant)
        .row("gradient exponent", r.gradient_exponent)
        .row("eps0", f.eps0);
    for (k, v) in coeffs.iter().enumerate() {
        t.row(format!("A{}", k + 1), v + 0.0);
    }
    let json = BernsteinJson {
        params: (&p).into(),
        case: r.case_label.name(),
        s_bar: F(f.s_bar),
        l: F(f.l),
        beta: F(f.beta),
        lambda: F(f.lambda),
        s: F(f.s),
        eps0: F(f.eps0),
        alpha: F(r.alpha),
        d2: F(r.d2),
        discriminant: F(r.discriminant),
        gradient_exponent: F(r.gradient_exponent),
        coefficients: coeffs.map(F),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- feasibility

#[derive(Serialize)]
struct FeasibilityJson {
    #[serde(rename = "N")]
    n: u32,
    m: F,
    resolution: usize,
    q_max: F,
    points_evaluated: usize,
    empty: bool,
    feasible_points: usize,
    conflicting_pairs: Vec<[&'static str; 2]>,
    most_frequent_conflict: Option<[&'static str; 2]>,
    joint: [[usize; 5]; 5],
}

fn feasibility(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let n = s.u32("N")?;
    let m = s.f64("m")?;
    let mut scan = FeasibilityScan::new(s.usize_or("resolution", 200)?).execution(ctx.execution);
    if let Some(q) = s.f64_opt("q-max")? {
        scan = scan.q_max(q);
    }
    let r = scan.run(n, m)?;
    let pair = |(a, b): (quasilin::params::FPredicate, quasilin::params::FPredicate)| [a.label(), b.label()];
    if let Some(out) = &ctx.out {
        let rows: Vec<Vec<String>> = r.feasible.iter().map(|(p, q)| vec![num(*p), num(*q)]).collect();
        out.write_rows("feasible.csv", &["p", "q"], &rows)?;
        let rows: Vec<Vec<String>> = r
            .failures
            .iter()
            .map(|f| {
                vec![
                    num(f.p),
                    num(f.q),
                    f.first_failing.0.label().to_string(),
                    f.first_failing.1.map_or(String::new(), |x| x.label().to_string()),
                ]
            })
            .collect();
        out.write_rows("failures.csv", &["p", "q", "first_failing", "second_failing"], &rows)?;
    }
    let mut t = Table::new();
    t.row("N", n)
        .row("m", m)
        .row("resolution", r.resolution)
        .row("q range", format!("[0, {}]", r.q_max))
        .row("points evaluated", r.points_evaluated)
        .row("feasible points", r.feasible.len())
        .row("(F) set", if r.is_empty() { "empty" } else { "nonempty" });
    for (a, b) in &r.conflicting_pairs {
        t.row("never jointly hold", format!("{{{a}, {b}}}"));
    }
    if let Some((a, b)) = r.most_frequent_conflict {
        t.row("most frequent conflict", format!("{{{a}, {b}}}"));
    }
    let json = FeasibilityJson {
        n,
        m: F(m),
        resolution: r.resolution,
        q_max: F(r.q_max),
        points_evaluated: r.points_evaluated,
        empty: r.is_empty(),
        feasible_points: r.feasible.len(),
        conflicting_pairs: r.conflicting_pairs.iter().copied().map(pair).collect(),
        most_frequent_conflict: r.most_frequent_conflict.map(pair),
        joint: r.joint,
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- solve

#[derive(Serialize)]
struct ProblemJson {
    #[serde(rename = "N")]
    n: u32,
    m: F,
    p: F,
    q: F,
    #[serde(rename = "M1")]
    m1: F,
    #[serde(rename = "M2")]
    m2: F,
    alpha1: F,
    alpha2: F,
    c0: F,
    #[serde(rename = "R")]
    radius: F,
    source: &'static str,
}

impl From<&DirichletProblem> for ProblemJson {
    fn from(d: &DirichletProblem) -> Self {
        let (p, b) = (&d.params, &d.bounds);
        ProblemJson {
            n: p.n(),
            m: F(p.m()),
            p: F(p.p()),
            q: F(p.q()),
            m1: F(b.m1),
            m2: F(b.m2),
            alpha1: F(b.alpha1),
            alpha2: F(b.alpha2),
            c0: F(b.c0),
            radius: F(d.radius),
            source: source_name(d.source),
        }
    }
}

fn source_name(s: SourceModel) -> &'static str {
    match s {
        SourceModel::Canonical => "canonical",
        SourceModel::WithGradientAbsorption => "absorption",
    }
}

fn problem(s: &Settings, lambda: f64) -> Result<DirichletProblem, CliError> {
    let p = params(s)?;
    let (c0, m1, m2) = (s.f64_or("c0", 1.0)?, s.f64_or("M1", 1.0)?, s.f64_or("M2", 0.1)?);
    let alpha2 = s.f64("alpha2")?;
    let bounds = match s.f64_opt("alpha1")? {
        Some(a1) => StructureBounds::with_alpha1(&p, c0, m1, m2, a1, alpha2)?,
        None => StructureBounds::new(&p, c0, m1, m2, alpha2)?,
    };
    let source = match s.raw("source").unwrap_or("canonical") {
        "canonical" => SourceModel::Canonical,
        "absorption" => SourceModel::WithGradientAbsorption,
        other => return Err(CliError::invalid(format!("--source must be canonical or absorption (got `{other}`)"))),
    };
    Ok(DirichletProblem::new(p, bounds, lambda, s.f64_or("R", 1.0)?)?.with_source(source))
}

#[derive(Serialize)]
struct SolveJson {
    converged: bool,
    iterations: usize,
    residual: F,
    lambda: F,
    params: ProblemJson,
    profile_path: Option<String>,
    l2_residual: F,
    gap: F,
    omega: F,
    min_interior: F,
    trivial: bool,
    harnack_ratio: Option<F>,
    picone_slack: Option<F>,
    degenerate_nodes: usize,
    nodes: usize,
}

fn solve_json(prob: &DirichletProblem, r: &SolveReport, path: Option<String>) -> SolveJson {
    SolveJson {
        converged: r.converged,
        iterations: r.iterations,
        residual: F(r.final_residual),
        lambda: F(r.lambda),
        params: prob.into(),
        profile_path: path,
        l2_residual: F(r.l2_residual),
        gap: F(r.gap),
        omega: F(r.omega),
        min_interior: F(r.min_interior),
        trivial: r.trivial,
        harnack_ratio: opt(r.harnack_ratio),
        picone_slack: opt(r.picone_slack),
        degenerate_nodes: r.degenerate_nodes,
        nodes: r.profile.len(),
    }
}

fn solve_rows(t: &mut Table, prefix: &str, r: &SolveReport) {
    t.row(format!("{prefix}lambda"), r.lambda)
        .row(format!("{prefix}converged"), r.converged)
        .row(format!("{prefix}iterations"), r.iterations)
        .row(format!("{prefix}residual"), format!("{:e}", r.final_residual))
        .row(format!("{prefix}sup u"), format!("{:e}", r.profile.sup()))
        .row(format!("{prefix}min interior u"), format!("{:e}", r.min_interior))
        .row(format!("{prefix}harnack ratio"), show(r.harnack_ratio))
        .row(format!("{prefix}picone slack"), show(r.picone_slack));
}

#[derive(Serialize)]
struct HomotopyJson {
    schedule: Vec<F>,
    lambda0: F,
    stages: Vec<SolveJson>,
}

fn solve(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let lambda = s.f64("lambda")?;
    let prob = problem(s, lambda)?;
    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        omega: s.f64_or("omega", defaults.omega)?,
        k_max: s.usize_or("k-max", defaults.k_max)?,
        nodes: s.usize_or("nodes", defaults.nodes)?,
        ..defaults
    };
    let mut t = Table::new();
    params_rows(&mut t, &prob.params);
    match s.list_opt("homotopy")? {
        None => {
            let u0 = prob.cold_start(prob.grid(opts.nodes)?)?;
            let r = fixed_point_solve_with(&prob, &u0, &opts)?;
            let path = write_profile(ctx, "profile", "solution profile", &r.profile)?;
            solve_rows(&mut t, "", &r);
            finish(ctx, &solve_json(&prob, &r, path_string(&path)), t)
        }
        Some(schedule) => {
            let stages = homotopy_solve_with(&prob, &schedule, lambda, &opts)?;
            let mut json = Vec::with_capacity(stages.len());
            for (k, r) in stages.iter().enumerate() {
                let path =
                    write_profile(ctx, &format!("stage{k}"), &format!("stage {k}, lambda = {}", r.lambda), &r.profile)?;
                solve_rows(&mut t, &format!("stage {k}: "), r);
                json.push(solve_json(&prob.with_lambda(r.lambda)?, r, path_string(&path)));
            }
            finish(ctx, &HomotopyJson { schedule: fs(&schedule), lambda0: F(lambda), stages: json }, t)
        }
    }
}

// ---------------------------------------------------------------- eigen

#[derive(Serialize)]
struct EigenJson {
    #[serde(rename = "N")]
    n: u32,
    m: F,
    #[serde(rename = "R")]
    radius: F,
    lambda1: F,
    rayleigh: F,
    iterations: usize,
    eigen_residual: F,
    nodes: usize,
    profile_path: Option<String>,
}

fn eigen(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let (n, m, radius) = (s.u32("N")?, s.f64("m")?, s.f64_or("R", 1.0)?);
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(CliError::invalid(format!("ball radius must satisfy R > 0 (got {radius})")));
    }
    let nodes = s.usize_or("nodes", EIGEN_NODES)?;
    let e = principal_eigenpair_on(RadialGrid::uniform(0.0, radius, nodes)?, n, m)?;
    let lam = e.lambda1;
    let res = residual_with(&e.phi1, n, m, |_, u, _| lam * u.max(0.0).powf(m - 1.0));
    let rel = res.max_abs_residual / lam;
    let path = write_profile(ctx, "eigenfunction", "principal eigenfunction", &e.phi1)?;
    let mut t = Table::new();
    t.row("N", n)
        .row("m", m)
        .row("R", radius)
        .row("lambda1", lam)
        .row("rayleigh quotient", e.rayleigh)
        .row("iterations", e.iterations)
        .row("eigen residual (relative)", format!("{rel:e}"));
    let json = EigenJson {
        n,
        m: F(m),
        radius: F(radius),
        lambda1: F(lam),
        rayleigh: F(e.rayleigh),
        iterations: e.iterations,
        eigen_residual: F(rel),
        nodes,
        profile_path: path_string(&path),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- harnack

fn read_profile(s: &Settings) -> Result<RadialProfile, CliError> {
    let path = s.raw("profile").ok_or_else(|| CliError::invalid("missing required setting --profile"))?;
    Ok(RadialProfile::read_csv(path)?)
}

#[derive(Serialize)]
struct HarnackJson {
    profile: String,
    center: F,
    #[serde(rename = "R")]
    radius: F,
    lambda: F,
    m: F,
    harnack_ratio: F,
    weak_harnack: Option<F>,
}

fn harnack(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let u = read_profile(s)?;
    let (radius, lambda) = (s.f64("R")?, s.f64("lambda")?);
    let m = s.f64_or("m", 2.0)?;
    let center = s.f64_or("center", 0.0)?;
    let ratio = harnack_ratio_at(&u, center, radius, lambda, m)?;
    let weak = match (s.f64_opt("gamma")?, s.raw("N")) {
        (Some(g), Some(_)) => Some(weak_harnack(&u, s.u32("N")?, m, radius, g)?),
        (None, None) => None,
        _ => return Err(CliError::invalid("the weak Harnack constant needs both --N and --gamma")),
    };
    let mut t = Table::new();
    t.row("center", center).row("R", radius).row("lambda", lambda).row("m", m).row("harnack ratio", ratio);
    if let Some(w) = weak {
        t.row("weak harnack constant", w);
    }
    let json = HarnackJson {
        profile: s.raw("profile").unwrap_or_default().to_string(),
        center: F(center),
        radius: F(radius),
        lambda: F(lambda),
        m: F(m),
        harnack_ratio: F(ratio),
        weak_harnack: opt(weak),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- scalings

#[derive(Serialize)]
struct FitJson {
    fitted_slope: F,
    predicted_slope: F,
    relative_error: F,
    intercept: F,
    r2: F,
    reliable: bool,
    radii: Vec<F>,
    measured: Vec<F>,
}

impl From<&ScalingFit> for FitJson {
    fn from(f: &ScalingFit) -> Self {
        FitJson {
            fitted_slope: F(f.fitted_slope),
            predicted_slope: F(f.predicted_slope),
            relative_error: F(f.relative_slope_error()),
            intercept: F(f.intercept),
            r2: F(f.r2),
            reliable: f.reliable,
            radii: fs(&f.radii),
            measured: fs(&f.measured),
        }
    }
}

#[derive(Serialize)]
struct ScalingsJson {
    params: ParamsJson,
    alpha1: F,
    gamma: F,
    mu: F,
    u_power: FitJson,
    gradient_power: FitJson,
    mixed: FitJson,
}

fn scalings(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let p = params(s)?;
    let u = read_profile(s)?;
    let (gamma, mu) = (s.f64("gamma")?, s.f64("mu")?);
    let radii = s.list("radii")?;
    let alpha1 = match s.f64_opt("alpha1")? {
        Some(a) => a,
        None => p
            .derived()
            .alpha1
            .ok_or_else(|| CliError::invalid(format!("alpha1 = (p+mq)/(m-p) needs p < m; pass --alpha1 for {p}")))?,
    };
    let r = integral_scalings(&u, &p, alpha1, gamma, mu, &radii)?;
    let fits = [("u^gamma", &r.u_power), ("|u'|^mu", &r.gradient_power), ("u^gamma |u'|^mu", &r.mixed)];
    if let Some(out) = &ctx.out {
        let mut rows = Vec::new();
        for (name, f) in &fits {
            for (rad, v) in f.radii.iter().zip(&f.measured) {
                rows.push(vec![name.to_string(), num(*rad), num(*v)]);
            }
        }
        out.write_rows("scalings.csv", &["integral", "radius", "value"], &rows)?;
    }
    let mut t = Table::new();
    params_rows(&mut t, &p);
    t.row("alpha1", alpha1);
    for (name, f) in &fits {
        t.row(
            format!("{name} slope"),
            format!(
                "{:.6} (predicted {:.6}, r2 {:.6}{})",
                f.fitted_slope,
                f.predicted_slope,
                f.r2,
                if f.reliable { "" } else { ", unreliable" }
            ),
        );
    }
    let json = ScalingsJson {
        params: (&p).into(),
        alpha1: F(alpha1),
        gamma: F(gamma),
        mu: F(mu),
        u_power: (&r.u_power).into(),
        gradient_power: (&r.gradient_power).into(),
        mixed: (&r.mixed).into(),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- bubble

#[derive(Serialize)]
struct BubbleJson {
    params: ParamsJson,
    beta: F,
    #[serde(rename = "C")]
    c: F,
    min_residual: F,
    sup_residual: F,
    objective: F,
    refined: bool,
    profile_path: Option<String>,
}

fn bubble(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let p = ProblemParams::new(s.u32("N")?, 2.0, s.f64("p")?, s.f64("q")?)?;
    let d = BubbleOptions::default();
    let opts = BubbleOptions {
        beta_steps: s.usize_or("beta-steps", d.beta_steps)?,
        c_steps: s.usize_or("c-steps", d.c_steps)?,
        c_max: s.f64_or("c-max", d.c_max)?,
        r_max: s.f64_or("r-max", d.r_max)?,
        feasibility_tol: s.f64_or("tol", d.feasibility_tol)?,
        execution: ctx.execution,
        ..d
    };
    if opts.beta_steps == 0 || opts.c_steps == 0 || !(opts.c_max > 0.0) || !(opts.r_max > 0.0) {
        return Err(CliError::invalid("bubble grid needs positive step counts, C range and sample window"));
    }
    let fit = fit_explicit_bubble(&p, &opts)?;
    let u = bubble_profile(fit.beta, fit.c, RadialGrid::uniform(0.0, opts.r_max, opts.samples)?)?;
    let path = write_profile(ctx, "bubble", "fitted bubble", &u)?;
    let mut t = Table::new();
    params_rows(&mut t, &p);
    t.row("beta", fit.beta)
        .row("C", fit.c)
        .row("min residual", format!("{:e}", fit.min_residual))
        .row("sup residual", format!("{:e}", fit.sup_residual))
        .row("refined", fit.refined);
    let json = BubbleJson {
        params: (&p).into(),
        beta: F(fit.beta),
        c: F(fit.c),
        min_residual: F(fit.min_residual),
        sup_residual: F(fit.sup_residual),
        objective: F(fit.objective),
        refined: fit.refined,
        profile_path: path_string(&path),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- blowup

#[derive(Serialize)]
struct BlowupJson {
    params: ParamsJson,
    #[serde(rename = "R")]
    radius: F,
    domain: String,
    fitted_theta: F,
    expected_theta: F,
    relative_error: F,
    fit_r2: F,
    fit_points: usize,
    cauchy_gap: F,
    boundary_values: Vec<F>,
    shooting_parameters: Vec<F>,
    profile_path: Option<String>,
}

fn blowup(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let p = params(s)?;
    let radius = s.f64_or("R", 1.0)?;
    let ladder = s.list_opt("ladder")?.unwrap_or_else(|| vec![1e2, 1e3, 1e4, 1e5, 1e6]);
    let d = BlowupOptions::default();
    let opts = BlowupOptions { n_uniform: s.usize_or("n-uniform", d.n_uniform)?, execution: ctx.execution, ..d };
    let r = blowup_shoot(&p, radius, &ladder, &opts).map_err(|e| match e {
        quasilin::Error::NonConvergence { gap, .. } => CliError::nonconvergence(format!(
            "interior values did not settle along the ladder (relative gap {gap:.3e} between the last two members); \
             extend --ladder to larger boundary values"
        )),
        e => e.into(),
    })?;
    let path = write_profile(ctx, "blowup", "largest ladder member", r.profile())?;
    let domain = match r.domain {
        BlowupDomain::Ball => "ball".to_string(),
        BlowupDomain::Annulus { r_in } => format!("annulus [{r_in}, {radius}]"),
    };
    let mut t = Table::new();
    params_rows(&mut t, &p);
    t.row("domain", &domain)
        .row("fitted theta", r.fitted_theta)
        .row("expected theta", r.expected_theta)
        .row("relative error", format!("{:e}", r.relative_theta_error()))
        .row("fit r2", r.fit_r2)
        .row("fit points", r.fit_points)
        .row("cauchy gap", format!("{:e}", r.cauchy_gap));
    let json = BlowupJson {
        params: (&p).into(),
        radius: F(radius),
        domain,
        fitted_theta: F(r.fitted_theta),
        expected_theta: F(r.expected_theta),
        relative_error: F(r.relative_theta_error()),
        fit_r2: F(r.fit_r2),
        fit_points: r.fit_points,
        cauchy_gap: F(r.cauchy_gap),
        boundary_values: r.ladder.iter().map(|l| F(l.boundary_value)).collect(),
        shooting_parameters: r.ladder.iter().map(|l| F(l.shooting_parameter)).collect(),
        profile_path: path_string(&path),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- probe-nonexistence

#[derive(Serialize)]
struct OutcomeJson {
    lambda: F,
    converged: bool,
    diverged: bool,
    iterations: usize,
    sup: F,
}

#[derive(Serialize)]
struct BracketJson {
    params: ProblemJson,
    lambda_lo: F,
    lambda_hi: F,
    rate_lo: F,
    rate_hi: F,
    lambda1: F,
    rate_exceeds_lambda1: bool,
    monotone: bool,
    outcomes: Vec<OutcomeJson>,
}

fn probe_nonexistence(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let prob = problem(s, 0.0)?;
    let ladder = match s.list_opt("ladder")? {
        Some(l) => l,
        None => {
            let (lo, hi) = (s.f64_or("ladder-lo", 1e-3)?, s.f64_or("ladder-hi", 1e2)?);
            if !(lo > 0.0 && hi > lo) {
                return Err(CliError::invalid(format!("log ladder needs 0 < ladder-lo < ladder-hi (got {lo}, {hi})")));
            }
            log_ladder(lo, hi, s.usize_or("ladder-n", 21)?)
        }
    };
    let d = ProbeOptions::default();
    let opts = ProbeOptions {
        solve: SolveOptions { nodes: s.usize_or("nodes", d.solve.nodes)?, ..d.solve },
        margin: s.f64_or("margin", d.margin)?,
        execution: ctx.execution,
    };
    let b = nonexistence_probe_with(&prob, &ladder, &opts)?;
    if let Some(out) = &ctx.out {
        let rows: Vec<Vec<String>> = b
            .outcomes
            .iter()
            .map(|o| {
                vec![
                    num(o.lambda),
                    o.converged.to_string(),
                    o.diverged.to_string(),
                    o.iterations.to_string(),
                    num(o.sup),
                ]
            })
            .collect();
        out.write_rows("ladder.csv", &["lambda", "converged", "diverged", "iterations", "sup"], &rows)?;
        let lam: Vec<f64> = b.outcomes.iter().map(|o| o.lambda.log10()).collect();
        let sup: Vec<f64> = b.outcomes.iter().map(|o| o.sup.max(1e-300).log10()).collect();
        out.write(
            "ladder.svg",
            &line_plot("log10 sup u along the forcing ladder", "log10 lambda", &[("sup u", &lam, &sup)]),
        )?;
    }
    let mut t = Table::new();
    params_rows(&mut t, &prob.params);
    t.row("bracket", format!("[{}, {}]", b.lambda_lo, b.lambda_hi))
        .row("l(lambda_lo)", b.rate_lo)
        .row("l(lambda_hi)", b.rate_hi)
        .row("lambda1", b.lambda1)
        .row("rate exceeds lambda1", b.rate_exceeds_lambda1)
        .row("monotone ladder", b.monotone);
    for o in &b.outcomes {
        let state = if o.converged {
            "converged"
        } else if o.diverged {
            "diverged"
        } else {
            "stalled"
        };
        t.row(
            format!("lambda {:.6e}", o.lambda),
            format!("{state} after {} iterations, sup {:e}", o.iterations, o.sup),
        );
    }
    let json = BracketJson {
        params: (&prob).into(),
        lambda_lo: F(b.lambda_lo),
        lambda_hi: F(b.lambda_hi),
        rate_lo: F(b.rate_lo),
        rate_hi: F(b.rate_hi),
        lambda1: F(b.lambda1),
        rate_exceeds_lambda1: b.rate_exceeds_lambda1,
        monotone: b.monotone,
        outcomes: b
            .outcomes
            .iter()
            .map(|o| OutcomeJson {
                lambda: F(o.lambda),
                converged: o.converged,
                diverged: o.diverged,
                iterations: o.iterations,
                sup: F(o.sup),
            })
            .collect(),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- liouville-probe

#[derive(Serialize)]
struct TrajectoryJson {
    slope: F,
    outward: &'static str,
    outward_r: F,
    inward: &'static str,
    inward_r: F,
    counterexample: bool,
}

#[derive(Serialize)]
struct LiouvilleJson {
    params: ParamsJson,
    r0: F,
    r_max: F,
    counterexamples: usize,
    trajectories: Vec<TrajectoryJson>,
}

fn liouville(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let p = params(s)?;
    let r0 = s.f64_or("r0", 1.0)?;
    let r_max = s.f64_or("R-max", 100.0)?;
    let slopes =
        s.list_opt("slopes")?.unwrap_or_else(|| (-10..=10).filter(|k| *k != 0).map(|k| 0.5 * k as f64).collect());
    let opts = LiouvilleProbeOptions { execution: ctx.execution, ..LiouvilleProbeOptions::default() };
    let rep = liouville_probe_with(&p, r0, &slopes, r_max, &opts)?;
    if let Some(out) = &ctx.out {
        let rows: Vec<Vec<String>> = rep
            .trajectories
            .iter()
            .map(|t| {
                vec![num(t.slope), t.outward.name().into(), num(t.outward_r), t.inward.name().into(), num(t.inward_r)]
            })
            .collect();
        out.write_rows("trajectories.csv", &["slope", "outward", "outward_r", "inward", "inward_r"], &rows)?;
    }
    let mut t = Table::new();
    params_rows(&mut t, &p);
    t.row("r0", r0).row("R max", r_max).row("counterexamples", rep.counterexamples);
    for tr in &rep.trajectories {
        t.row(
            format!("slope {}", tr.slope),
            format!(
                "outward {} at r = {:.4e}, inward {} at r = {:.4e}",
                tr.outward.name(),
                tr.outward_r,
                tr.inward.name(),
                tr.inward_r
            ),
        );
    }
    let json = LiouvilleJson {
        params: (&p).into(),
        r0: F(r0),
        r_max: F(r_max),
        counterexamples: rep.counterexamples,
        trajectories: rep
            .trajectories
            .iter()
            .map(|t| TrajectoryJson {
                slope: F(t.slope),
                outward: t.outward.name(),
                outward_r: F(t.outward_r),
                inward: t.inward.name(),
                inward_r: F(t.inward_r),
                counterexample: t.is_counterexample(),
            })
            .collect(),
    };
    finish(ctx, &json, t)
}

// ---------------------------------------------------------------- identity-check

#[derive(Serialize)]
struct IdentityJson {
    seed: u64,
    draws: usize,
    max_gap: F,
    tolerance: F,
    pass: bool,
}

const IDENTITY_TOL: f64 = 1e-12;

fn identity_check(s: &Settings, ctx: &Ctx) -> Result<String, CliError> {
    let draws = s.usize_or("draws", 100)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < draws {
        let n = rng.gen_range(2..=10u32);
        let m = rng.gen_range(1.1..4.0);
        let p = rng.gen_range(0.0..0.95 * m);
        let q = rng.gen_range(0.0..6.0);
        let params = ProblemParams::new(n, m, p, q)?;
        if params.big_q() <= 1e-3 {
            continue;
        }
        let gamma = rng.gen_range(1.0..3.0);
        let scale = ((m - p) / params.big_q() * gamma).max(1.0);
        worst = worst.max(exponent_identity_gap(&params, gamma)? / scale);
        done += 1;
    }
    let pass = worst <= IDENTITY_TOL;
    let mut t = Table::new();
    t.row("seed", ctx.seed).row("draws", draws).row("max relative gap", format!("{worst:e}")).row("pass", pass);
    finish(ctx, &IdentityJson { seed: ctx.seed, draws, max_gap: F(worst), tolerance: F(IDENTITY_TOL), pass }, t)
}
