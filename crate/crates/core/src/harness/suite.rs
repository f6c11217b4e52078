use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{check_window, counterexample_fixture, random_pair};
use crate::bounds::SearchOptions;
use crate::checks::{
    check_ratio_bound, check_gradient_refinements, check_hh_chain, check_norm_chain, check_reverse, check_chord_bound,
    check_weighted_nabla, CheckOptions, InequalityReport, TheoremId,
};
use crate::error::{Error, Result};
use crate::matcore::LoewnerRelation;
use crate::par;
use crate::quad::{QuadratureRule, DEFAULT_FALLBACK_PANELS, DEFAULT_NODES};
use crate::scalarfn::{builtin, grid_min, probe_increasing, ConvexityClass, ScalarFunction, DEFAULT_PROBE_POINTS};

pub const SCHEMA_VERSION: u32 = 1;

const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
const LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub instances_per_checker: usize,
    pub function_names: Vec<String>,
    pub spectrum_window: (f64, f64),
    pub node_count: usize,
    pub tolerance: f64,
    pub restarts: usize,
    pub fallback_panels: usize,
    pub checkers: Vec<TheoremId>,
    /// Per-function spectrum windows.
    pub window_overrides: BTreeMap<String, (f64, f64)>,
    /// Per-checker function lists, used verbatim (no hypothesis filtering).
    pub checker_functions: BTreeMap<TheoremId, Vec<String>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            dims: vec![2, 3, 4, 8],
            instances_per_checker: 500,
            function_names: ["square", "pow1.5", "inv", "cube", "exp"].map(String::from).to_vec(),
            spectrum_window: (0.5, 2.5),
            node_count: DEFAULT_NODES,
            tolerance: 1e-8,
            restarts: 16,
            fallback_panels: DEFAULT_FALLBACK_PANELS,
            checkers: TheoremId::ALL.to_vec(),
            window_overrides: BTreeMap::new(),
            checker_functions: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidArgument("dims must be a nonempty list of positive sizes".into()));
        }
        if self.instances_per_checker == 0 {
            return Err(Error::InvalidArgument("instances_per_checker must be at least 1".into()));
        }
        if self.node_count < 2 {
            return Err(Error::InvalidArgument("node_count must be at least 2".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        check_window(self.spectrum_window)?;
        for w in self.window_overrides.values() {
            check_window(*w)?;
        }
        for name in self.function_names.iter().chain(self.checker_functions.values().flatten()) {
            builtin(name)?;
        }
        Ok(())
    }

    fn options(&self) -> Result<CheckOptions> {
        Ok(CheckOptions {
            rule: QuadratureRule::gauss_legendre(self.node_count)?.with_fallback_panels(self.fallback_panels),
            tol: self.tolerance,
            search: SearchOptions::default().with_restarts(self.restarts).with_seed(self.seed),
        })
    }

    fn window(&self, f: &ScalarFunction) -> (f64, f64) {
        self.window_overrides
            .get(f.name())
            .copied()
            .unwrap_or(self.spectrum_window)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckerSummary {
    pub theorem: TheoremId,
    pub functions: Vec<String>,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// Failures with every hypothesis met.
    pub theorem_violations: usize,
    pub hypotheses_unmet: usize,
    pub worst_defect: f64,
    pub worst_instance: usize,
    /// Smallest `defect / tolerance` over all links and instances.
    pub worst_margin_ratio: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub name: String,
    pub expected_violation: bool,
    pub as_expected: bool,
    pub report: InequalityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
    pub per_checker_ms: BTreeMap<TheoremId, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub config: SuiteConfig,
    pub parallel: bool,
    pub checkers: Vec<CheckerSummary>,
    pub fixtures: Vec<FixtureResult>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl SuiteReport {
    /// JSON with timing removed; equal configs give equal strings.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.timing = None;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }
}

fn eligible(theorem: TheoremId, f: &ScalarFunction, window: (f64, f64)) -> Result<bool> {
    Ok(match theorem {
        TheoremId::Hh | TheoremId::Nabla => f.class() == ConvexityClass::OperatorConvex,
        TheoremId::ChordBound | TheoremId::RatioBound | TheoremId::Reverse => f.class().is_convex(),
        TheoremId::Grad => f.class().is_convex() && f.has_deriv(),
        TheoremId::Norm => {
            let hi = window.1.abs().max(window.0.abs());
            f.class().is_convex()
                && f.domain().contains_interval(0.0, hi)
                && probe_increasing(f, 0.0, hi, DEFAULT_PROBE_POINTS)?
                && grid_min(f, 0.0, hi, DEFAULT_PROBE_POINTS)? >= 0.0
        }
    })
}

fn functions_for(cfg: &SuiteConfig, theorem: TheoremId) -> Result<Vec<ScalarFunction>> {
    if let Some(names) = cfg.checker_functions.get(&theorem) {
        return names.iter().map(|n| builtin(n)).collect();
    }
    let mut out = Vec::new();
    for name in &cfg.function_names {
        let f = builtin(name)?;
        if eligible(theorem, &f, cfg.window(&f))? {
            out.push(f);
        }
    }
    Ok(out)
}

fn run_instance(
    cfg: &SuiteConfig,
    opts: &CheckOptions,
    theorem: TheoremId,
    fns: &[ScalarFunction],
    all: &[ScalarFunction],
    checker_index: usize,
    i: usize,
) -> Result<InequalityReport> {
    // Mixed radix over (f, dim, g, alpha or lambda) so every combination recurs.
    let k = fns.len();
    let f = &fns[i % k];
    let dim = cfg.dims[(i / k) % cfg.dims.len()];
    let rest = i / (k * cfg.dims.len());
    let partners = if theorem == TheoremId::Reverse { all } else { fns };
    let g = &partners[rest % partners.len()];
    let param = rest / partners.len();
    let alpha = ALPHAS[param % ALPHAS.len()];
    let mut window = cfg.window(f);
    if theorem == TheoremId::Norm {
        // Symmetric window around zero.
        let hi = window.1.abs().max(window.0.abs());
        window = (-hi, hi);
    }
    let stream = ((checker_index as u64) << 32) | i as u64;
    let (a, b) = random_pair(dim, window, cfg.seed, stream)?;
    match theorem {
        TheoremId::Hh => check_hh_chain(f, &a, &b, opts),
        TheoremId::ChordBound => check_chord_bound(f, g, alpha, &a, &b, opts),
        TheoremId::RatioBound => check_ratio_bound(f, g, &a, &b, opts),
        TheoremId::Norm => check_norm_chain(f, &a, &b, alpha, opts),
        TheoremId::Nabla => check_weighted_nabla(f, &a, &b, LAMBDAS[rest % LAMBDAS.len()], opts),
        TheoremId::Reverse => check_reverse(f, g, alpha, &a, &b, opts),
        TheoremId::Grad => check_gradient_refinements(f, &a, &b, opts),
    }
}

fn summarize(theorem: TheoremId, fns: &[ScalarFunction], reports: &[InequalityReport]) -> CheckerSummary {
    let mut s = CheckerSummary {
        theorem,
        functions: fns.iter().map(|f| f.name().to_string()).collect(),
        instances: reports.len(),
        passed: 0,
        failed: 0,
        theorem_violations: 0,
        hypotheses_unmet: 0,
        worst_defect: f64::INFINITY,
        worst_instance: 0,
        worst_margin_ratio: f64::INFINITY,
        notes: Vec::new(),
    };
    for (i, r) in reports.iter().enumerate() {
        if r.overall {
            s.passed += 1;
        } else {
            s.failed += 1;
        }
        if r.is_theorem_violation() {
            s.theorem_violations += 1;
        }
        if !r.hypotheses_met {
            s.hypotheses_unmet += 1;
        }
        let d = r.worst_defect();
        if d < s.worst_defect {
            s.worst_defect = d;
            s.worst_instance = i;
        }
        for l in &r.links {
            s.worst_margin_ratio = s.worst_margin_ratio.min(l.min_eig_of_defect / l.tolerance);
        }
    }
    if reports.is_empty() {
        s.worst_defect = 0.0;
        s.worst_margin_ratio = 0.0;
    }
    s
}

fn fixtures(opts: &CheckOptions) -> Result<Vec<FixtureResult>> {
    let (a, b, f) = counterexample_fixture();
    let hh = check_hh_chain(&f, &a, &b, opts)?;
    let incomparable = hh.links.iter().all(|l| l.observed == Some(LoewnerRelation::Incomparable));
    // t³ under the weighted chain: the operator convexity warning must be recorded.
    let nabla = check_weighted_nabla(&f, &a, &b, 0.5, opts)?;
    let warned = !nabla.hypotheses_met && nabla.warnings.iter().any(|w| w.starts_with("hypothesis"));
    Ok(vec![
        FixtureResult {
            name: "counterexample-hh".into(),
            expected_violation: true,
            as_expected: !hh.overall && incomparable,
            report: hh,
        },
        FixtureResult {
            name: "counterexample-nabla".into(),
            expected_violation: false,
            as_expected: warned,
            report: nabla,
        },
    ])
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let opts = config.options()?;
    let all: Vec<ScalarFunction> = config
        .function_names
        .iter()
        .map(|n| builtin(n))
        .collect::<Result<_>>()?;
    let mut checkers = Vec::new();
    let mut per_checker_ms = BTreeMap::new();
    for &theorem in &config.checkers {
        let t0 = Instant::now();
        let checker_index = TheoremId::ALL.iter().position(|t| *t == theorem).expect("listed");
        let fns = functions_for(config, theorem)?;
        if fns.is_empty() || all.is_empty() {
            let mut s = summarize(theorem, &fns, &[]);
            s.notes.push("no eligible functions; checker skipped".into());
            checkers.push(s);
            continue;
        }
        let reports = par::try_map_indexed(config.instances_per_checker, |i| {
            run_instance(config, &opts, theorem, &fns, &all, checker_index, i)
        })?;
        checkers.push(summarize(theorem, &fns, &reports));
        per_checker_ms.insert(theorem, t0.elapsed().as_secs_f64() * 1e3);
    }
    let fixtures = fixtures(&opts)?;
    let passed = checkers.iter().all(|c| c.theorem_violations == 0) && fixtures.iter().all(|f| f.as_expected);
    Ok(SuiteReport {
        schema: SCHEMA_VERSION,
        config: config.clone(),
        parallel: par::is_parallel(),
        checkers,
        fixtures,
        passed,
        timing: Some(Timing {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
            per_checker_ms,
        }),
    })
}

pub fn exit_code(report: &SuiteReport) -> i32 {
    if report.passed {
        0
    } else {
        1
    }
}

/// Writes `seed-<seed>-<unix ms>.json` under `dir`, never overwriting.
pub fn write_report(report: &SuiteReport, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let body = serde_json::to_string_pretty(report)?;
    for n in 0.. {
        let name = if n == 0 {
            format!("seed-{}-{ts}.json", report.config.seed)
        } else {
            format!("seed-{}-{ts}-{n}.json", report.config.seed)
        };
        let path = dir.join(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                file.write_all(body.as_bytes())?;
                file.write_all(b"\n")?;
                return Ok(path);
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!()
}
