//! The `hurwitz` command line: verb dispatch, reports, exit codes and the
//! result cache. `main.rs` only parses arguments into a [`RunConfig`].

pub mod cache;
pub mod report;

use std::fmt;
use std::path::PathBuf;

use hurwitz_core::boundary::{
    analyze_boundary, euler_characteristic, flatness_check, theta_top, BoundaryAnalysis, ThetaTop,
};
use hurwitz_core::braid::{decompose_components, ComponentDecomposition};
use hurwitz_core::count::{enumerate_marked, hurwitz_number, Ceilings, ConstellationSet, Execution, Options};
use hurwitz_core::dynamics::{
    degree_bounds, inverse_transform, kc_conditions, polynomiality_index, single_valued_band,
    DegreeBoundTable, KcReport,
};
use hurwitz_core::format::{parse_portrait, print_portrait};
use hurwitz_core::portrait::{fully_marked_completion, Portrait, ValidationReport};
use hurwitz_core::root::RootValue;
use num_bigint::BigUint;

use crate::cache::{cache_key, Cache, Lookup};
pub use crate::report::{OutputMode, Report};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    /// Parse errors, validation failures and usage errors.
    pub const INVALID: u8 = 1;
    pub const CAPACITY: u8 = 2;
    pub const MODEL_VIOLATION: u8 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Validate,
    Count,
    Components,
    Pi,
    Bounds,
    ThetaTop,
    Figure,
    Report,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Count => "count",
            Verb::Components => "components",
            Verb::Pi => "pi",
            Verb::Bounds => "bounds",
            Verb::ThetaTop => "theta-top",
            Verb::Figure => "figure",
            Verb::Report => "report",
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Explicit band parameters for `figure`. Any value given overrides the one
/// read from the portrait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FigureParams {
    pub degree: Option<u32>,
    pub points: Option<usize>,
    pub ell0: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub verb: Verb,
    pub input: Option<PathBuf>,
    pub mode: OutputMode,
    /// Adds the per-point bookkeeping behind each number.
    pub ledger: bool,
    pub ceilings: Ceilings,
    pub execution: Execution,
    pub cache_dir: Option<PathBuf>,
    pub figure: FigureParams,
}

impl RunConfig {
    pub fn new(verb: Verb, input: Option<PathBuf>) -> Self {
        RunConfig {
            verb,
            input,
            mode: OutputMode::Human,
            ledger: false,
            ceilings: Ceilings::default(),
            execution: Execution::default(),
            cache_dir: None,
            figure: FigureParams::default(),
        }
    }

    /// Verb-argument compatibility, checked before any computation.
    pub fn check(&self) -> Result<(), CliError> {
        if self.ceilings.max_degree == 0 || self.ceilings.max_tuples == 0 {
            return Err(CliError::Usage("ceilings must be positive".into()));
        }
        let f = self.figure;
        let explicit = f.degree.is_some() && f.points.is_some() && f.ell0.is_some();
        match self.verb {
            Verb::Figure if self.input.is_none() && !explicit => Err(CliError::Usage(
                "figure needs a portrait file or all of --degree, --points and --ell0".into(),
            )),
            Verb::Figure => Ok(()),
            _ if f != FigureParams::default() => Err(CliError::Usage(format!(
                "--degree, --points and --ell0 only apply to figure, not {}",
                self.verb
            ))),
            _ if self.input.is_none() => Err(CliError::Usage(format!("{} needs a portrait file", self.verb))),
            _ => Ok(()),
        }
    }

    fn options(&self) -> Options {
        Options {
            ceilings: self.ceilings,
            execution: self.execution,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hurwitz_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use hurwitz_core::Error as E;
        match self {
            CliError::Core(E::Capacity { .. }) => exit::CAPACITY,
            CliError::Core(E::ModelViolation(_) | E::BoundContradiction(_)) => exit::MODEL_VIOLATION,
            _ => exit::INVALID,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Off,
    Hit,
    Miss,
    Evicted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
    pub cache: CacheStatus,
}

impl Outcome {
    fn failure(e: &CliError) -> Self {
        Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            cache: CacheStatus::Off,
        }
    }
}

/// Runs one verb to completion. Never panics on bad input; every failure
/// maps to an exit status with a message on `stderr`.
pub fn run(cfg: &RunConfig) -> Outcome {
    if let Err(e) = cfg.check() {
        return Outcome::failure(&e);
    }
    let portrait = match load(cfg) {
        Ok(Loaded::Portrait(p)) => Some(p),
        Ok(Loaded::Invalid(report)) => {
            return Outcome {
                code: exit::INVALID,
                stdout: violations(&report).render(cfg.mode),
                stderr: "error: portrait fails validation\n".into(),
                cache: CacheStatus::Off,
            }
        }
        Ok(Loaded::Nothing) => None,
        Err(e) => return Outcome::failure(&e),
    };
    let cache = match cfg.cache_dir.as_ref().map(Cache::open).transpose() {
        Ok(c) => c,
        Err(e) => return Outcome::failure(&e),
    };
    let key = key_for(cfg, portrait.as_ref());
    let mut status = CacheStatus::Off;
    if let Some(cache) = &cache {
        status = match cache.lookup(&key) {
            Lookup::Hit(stdout) => {
                return Outcome {
                    code: exit::OK,
                    stdout,
                    stderr: String::new(),
                    cache: CacheStatus::Hit,
                }
            }
            Lookup::Miss => CacheStatus::Miss,
            Lookup::Evicted => CacheStatus::Evicted,
        };
    }
    match compute(cfg, portrait.as_ref()) {
        Ok(stdout) => {
            let mut stderr = String::new();
            if let Some(cache) = &cache {
                if let Err(e) = cache.store(&key, &stdout) {
                    stderr = format!("warning: could not cache result: {e}\n");
                }
            }
            Outcome {
                code: exit::OK,
                stdout,
                stderr,
                cache: status,
            }
        }
        Err(e) => Outcome {
            cache: status,
            ..Outcome::failure(&e)
        },
    }
}

enum Loaded {
    Portrait(Portrait),
    Invalid(ValidationReport),
    Nothing,
}

fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let Some(path) = &cfg.input else {
        return Ok(Loaded::Nothing);
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let parsed = parse_portrait(&text)?;
    match parsed.portrait {
        Some(p) if parsed.report.ok => Ok(Loaded::Portrait(p)),
        _ => Ok(Loaded::Invalid(parsed.report)),
    }
}

/// Everything that can change the output bytes.
fn key_for(cfg: &RunConfig, portrait: Option<&Portrait>) -> String {
    let text = portrait.map(print_portrait).unwrap_or_default();
    let f = cfg.figure;
    let fields = [
        text,
        cfg.verb.name().to_string(),
        format!("{:?}", cfg.mode),
        cfg.ledger.to_string(),
        format!("{:?}/{:?}/{:?}", f.degree, f.points, f.ell0),
        format!("{}/{}", cfg.ceilings.max_degree, cfg.ceilings.max_tuples),
        VERSION.to_string(),
    ];
    let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
    cache_key(&refs)
}

fn violations(report: &ValidationReport) -> Report {
    let mut r = Report::new();
    r.section("Validation");
    r.field("valid", "valid", report.ok);
    r.field("violations", "violations", report.violations.len());
    for v in &report.violations {
        r.record(
            format!("violation {} {}", v.condition.id(), v.message),
            format!("[{}] {}", v.condition.id(), v.message),
        );
    }
    r
}

fn compute(cfg: &RunConfig, portrait: Option<&Portrait>) -> Result<String, CliError> {
    if cfg.verb == Verb::Figure {
        return figure(cfg, portrait);
    }
    let p = portrait.expect("checked: verb needs input");
    let mut r = Report::new();
    match cfg.verb {
        Verb::Validate => validate(p, &mut r),
        Verb::Count => {
            let set = enumerate_marked(p.data(), &cfg.options())?;
            let full_count = full_count(p, cfg)?;
            counts(p, &set, full_count, &mut r)?;
        }
        Verb::Components => {
            let set = enumerate_marked(p.data(), &cfg.options())?;
            let dec = decompose_components(&set, cfg.execution)?;
            components(&dec, &mut r);
        }
        Verb::Pi => pi(p, &mut r)?,
        Verb::ThetaTop => {
            let analysis = analyze_boundary(p.data(), &cfg.options())?;
            theta(p, &analysis, cfg.ledger, &mut r)?;
        }
        Verb::Bounds => {
            let pipeline = Pipeline::run(p, cfg)?;
            bounds(p, &pipeline, cfg.ledger, &mut r)?;
        }
        Verb::Report => {
            validate(p, &mut r);
            let pipeline = Pipeline::run(p, cfg)?;
            counts(p, pipeline.set(), pipeline.full_count, &mut r)?;
            components(pipeline.components(), &mut r);
            pi(p, &mut r)?;
            if let Some(a) = &pipeline.analysis {
                theta(p, a, cfg.ledger, &mut r)?;
            }
            bounds(p, &pipeline, cfg.ledger, &mut r)?;
        }
        Verb::Figure => unreachable!("handled above"),
    }
    Ok(r.render(cfg.mode))
}

fn full_count(p: &Portrait, cfg: &RunConfig) -> Result<u128, CliError> {
    let completion = fully_marked_completion(p.data())?;
    Ok(hurwitz_number(&completion.full, &cfg.options())?)
}

/// The shared computations of `bounds` and `report`. With four points the
/// boundary analysis carries the constellation set and its components.
struct Pipeline {
    analysis: Option<BoundaryAnalysis>,
    plain: Option<(ConstellationSet, ComponentDecomposition)>,
    full_count: u128,
}

impl Pipeline {
    fn run(p: &Portrait, cfg: &RunConfig) -> Result<Self, CliError> {
        p.require_dynamics()?;
        if p.len() == 4 {
            let a = analyze_boundary(p.data(), &cfg.options())?;
            let full_count = a.full_set.total() as u128;
            return Ok(Pipeline {
                analysis: Some(a),
                plain: None,
                full_count,
            });
        }
        let set = enumerate_marked(p.data(), &cfg.options())?;
        let dec = decompose_components(&set, cfg.execution)?;
        Ok(Pipeline {
            analysis: None,
            plain: Some((set, dec)),
            full_count: full_count(p, cfg)?,
        })
    }

    fn set(&self) -> &ConstellationSet {
        match (&self.analysis, &self.plain) {
            (Some(a), _) => &a.original_set,
            (None, Some((s, _))) => s,
            _ => unreachable!("one of the two is always present"),
        }
    }

    fn components(&self) -> &ComponentDecomposition {
        match (&self.analysis, &self.plain) {
            (Some(a), _) => &a.components,
            (None, Some((_, d))) => d,
            _ => unreachable!("one of the two is always present"),
        }
    }
}

fn validate(p: &Portrait, r: &mut Report) {
    let report = p.validate();
    r.section("Portrait");
    r.field("valid", "valid", report.ok);
    r.field("points", "marked points |P|", p.len());
    r.field("degree", "degree d", p.degree());
    r.field("fully_marked", "fully marked", report.fully_marked);
}

fn counts(p: &Portrait, set: &ConstellationSet, full_count: u128, r: &mut Report) -> Result<(), CliError> {
    let completion = fully_marked_completion(p.data())?;
    r.section("Counts");
    r.field("deg_pi1", "degree of the target map", set.total());
    r.field("deg_nu", "completion factor deg_nu", completion.deg_nu);
    r.field("added_points", "labels added by completion", completion.added());
    r.field("full_count", "fully marked count", full_count);
    Ok(())
}

fn components(dec: &ComponentDecomposition, r: &mut Report) {
    r.section("Components");
    r.field("components", "braid orbits", dec.len());
    let sizes: Vec<String> = dec.size_profile().iter().map(usize::to_string).collect();
    r.field("component_sizes", "orbit sizes", sizes.join(","));
    for o in &dec.orbits {
        let hex = hurwitz_core::perm::canonicalize(&o.representative).to_hex();
        r.record(
            format!("orbit {} size {} rep {hex}", o.id, o.size()),
            format!("orbit {}: {} classes, representative {hex}", o.id, o.size()),
        );
    }
}

fn pi(p: &Portrait, r: &mut Report) -> Result<(), CliError> {
    let report = polynomiality_index(p)?;
    let kc = kc_conditions(p)?;
    r.section("Polynomiality index");
    r.field("pi", "polynomiality index PI", &report.pi);
    r.field("classification", "classification", report.classification);
    r.field("cycles", "periodic cycles", report.cycles.len());
    r.field("ell0", "shortest fully ramified period", opt(report.ell0));
    r.field("kc1", "periodic fully ramified point", kc.kc1);
    r.field("kc2", "remaining critical points periodic", kc.kc2);
    for c in &report.cycles {
        let names: Vec<&str> = c.points.iter().map(|&x| p.points()[x].as_str()).collect();
        r.record(
            format!("cycle {} length {} product {}", names.join(","), c.length, c.product),
            format!("cycle ({}): length {}, product of local degrees {}", names.join(" "), c.length, c.product),
        );
    }
    Ok(())
}

fn opt(x: Option<u32>) -> String {
    x.map_or_else(|| "none".into(), |v| v.to_string())
}

fn theta(p: &Portrait, a: &BoundaryAnalysis, ledger: bool, r: &mut Report) -> Result<ThetaTop, CliError> {
    let whole = theta_top(a, None)?;
    r.section("Top degree");
    r.field("theta_top", "degree of the source map", whole.value);
    for c in 0..a.components.len() {
        let t = theta_top(a, Some(c))?;
        r.field(format!("component{c}_theta_top"), format!("  on component {c}"), t.value);
    }
    let flat = flatness_check(a);
    r.field("flatness", "target map flat over the boundary", if flat.ok() { "ok" } else { "failed" });
    if !flat.ok() {
        return Err(hurwitz_core::Error::ModelViolation("flatness check failed".into()).into());
    }
    if ledger {
        let names = p.points();
        let full = a.full().sources();
        r.section("Ledger");
        for s in &flat.splits {
            let (_, j) = s.split.pair();
            r.field(
                format!("flatness_j{j}"),
                format!("split {}", s.split.describe(names)),
                format!("{}/{}", s.multiplicity_sum, s.expected),
            );
        }
        for l in &whole.ledgers {
            let name = &names[l.p];
            r.record(
                format!(
                    "psi p={name} deg_pi1={} rm={} degE={} deg_pi2_full={}",
                    l.deg_pi1, l.rm_p, l.deg_e, l.deg_pi2
                ),
                format!(
                    "at {name}: deg_pi1 {} = rm {} x (deg_pi2 {} + degE {})",
                    l.deg_pi1, l.rm_p, l.deg_pi2, l.deg_e
                ),
            );
        }
        for c in &whole.contributions {
            let labels: Vec<&str> = c.labels.iter().map(|&x| full[x].as_str()).collect();
            let split = c.split.describe(names);
            r.record(
                format!(
                    "contribution p={} split={split} node={} branch={} order={} side={}",
                    names[c.p],
                    c.node,
                    c.branch,
                    c.order,
                    labels.join(",")
                ),
                format!(
                    "{} gains {} from split {split}, node {}, branch {}, side {{{}}}",
                    names[c.p],
                    c.order,
                    c.node,
                    c.branch,
                    labels.join(",")
                ),
            );
        }
        for c in 0..a.full_components.len() {
            let e = euler_characteristic(a, c)?;
            r.field(format!("euler_full{c}"), format!("Euler characteristic of full component {c}"), e.chi);
        }
    }
    Ok(whole)
}

fn bound_rows(prefix: &str, label: &str, t: &DegreeBoundTable, r: &mut Report) {
    for row in &t.rows {
        let pinned = if row.pinned { " (exact)" } else { "" };
        r.field(
            format!("{prefix}bound_k{}", row.k),
            format!("{label} k={}{pinned}", row.k),
            format!("[{},{}]", row.lower, row.upper),
        );
    }
}

fn bounds(p: &Portrait, pipeline: &Pipeline, ledger: bool, r: &mut Report) -> Result<(), CliError> {
    let pi = polynomiality_index(p)?.pi;
    let kc: KcReport = kc_conditions(p)?;
    let n = p.len();
    let theta0 = BigUint::from(pipeline.set().total());
    let tops: Option<(u64, Vec<u64>)> = match &pipeline.analysis {
        Some(a) => {
            let whole = theta_top(a, None)?.value;
            let per = (0..a.components.len())
                .map(|c| theta_top(a, Some(c)).map(|t| t.value))
                .collect::<Result<Vec<_>, _>>()?;
            Some((whole, per))
        }
        None => None,
    };
    r.section("Dynamical degree bounds");
    r.field("bound_r", "ratio R = PI", &pi);
    r.field("theta_top_known", "top degree known", tops.is_some());
    let whole_top = tops.as_ref().map(|(w, _)| BigUint::from(*w));
    let table = degree_bounds(&theta0, whole_top.as_ref(), &pi, n)?;
    r.field("strictly_decreasing", "degrees strictly decrease", table.strictly_decreasing);
    bound_rows("", "Theta_k", &table, r);
    if ledger {
        let rmax = p.data().ram().iter().copied().max().unwrap_or(1);
        let rv = RootValue::integer(rmax as u64);
        let alt = degree_bounds(&theta0, whole_top.as_ref(), &rv, n)?;
        r.field("bound_rmax", "ratio r = max local degree", &rv);
        bound_rows("rmax_", "Theta_k with r", &alt, r);
    }
    let dec = pipeline.components();
    if dec.len() > 1 {
        for (c, orbit) in dec.orbits.iter().enumerate() {
            let t0 = BigUint::from(orbit.size());
            let top = tops.as_ref().map(|(_, per)| BigUint::from(per[c]));
            let t = degree_bounds(&t0, top.as_ref(), &pi, n)?;
            bound_rows(&format!("component{c}_"), &format!("component {c}: Theta_k"), &t, r);
        }
    }
    if kc.holds() {
        let inv = inverse_transform(&table);
        r.field("inverse_ell0", "inverse: fully ramified period", opt(kc.ell0));
        bound_rows("inverse_", "inverse Theta_k", &inv, r);
    }
    Ok(())
}

/// CSV band for the single-valued inverse, `k,lower_log,upper_log`.
fn figure(cfg: &RunConfig, portrait: Option<&Portrait>) -> Result<String, CliError> {
    let f = cfg.figure;
    let mut warnings = Vec::new();
    let (mut d, mut n, mut ell0) = (f.degree, f.points, f.ell0);
    if let Some(p) = portrait {
        let kc = kc_conditions(p)?;
        d = d.or(Some(p.degree()));
        n = n.or(Some(p.len()));
        if kc.holds() {
            ell0 = ell0.or(kc.ell0);
        } else if ell0.is_some() {
            warnings.push("portrait fails the single-valued hypotheses; band emitted by override".to_string());
        } else {
            return Err(CliError::Usage(
                "portrait fails the single-valued hypotheses; pass --ell0 to override".into(),
            ));
        }
    }
    let (d, n, ell0) = (d.expect("checked"), n.expect("checked"), ell0.expect("checked"));
    let band = single_valued_band(d, n, ell0)?;
    let mut out = String::new();
    out.push_str(&format!("# d={d} ell0={ell0} nP={n}\n"));
    for w in warnings {
        out.push_str(&format!("# warning: {w}\n"));
    }
    out.push_str(&format!("# lyapunov_lower={}\n", band.lyapunov));
    out.push_str(&format!("# entropy_upper={}\n", band.entropy));
    out.push_str("k,lower_log,upper_log\n");
    for row in &band.rows {
        out.push_str(&format!("{},{},{}\n", row.k, row.lower.decimal(), row.upper.decimal()));
    }
    Ok(out)
}
