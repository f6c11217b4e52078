use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hhlab::bounds::{alpha_constant, beta_constant, delta_refinement_with, xi_refinement_with, SearchOptions};
use hhlab::checks::{
    check_ratio_bound, check_gradient_refinements, check_hh_chain, check_norm_chain, check_reverse, check_chord_bound,
    check_weighted_nabla, CheckOptions, InequalityReport, TheoremId, DEFAULT_TOL,
};
use hhlab::harness::{exit_code, counterexample_fixture, random_pair, run_suite, write_report, SuiteConfig};
use hhlab::matcore::{apply_function, spectral_bounds, SymmetricMatrix};
use hhlab::quad::{segment_integral, QuadratureRule, DEFAULT_NODES};
use hhlab::scalarfn::builtin;
use hhlab::{Error, Result};

#[derive(Parser)]
#[command(name = "hhlab", version, about = "Check operator Hermite-Hadamard inequalities on symmetric matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one checker on given or random matrices.
    Check(CheckArgs),
    /// Compute a single constant.
    Bounds(BoundsArgs),
    /// Print the 2x2 counterexample and its verdicts.
    Counterexample(CommonArgs),
    /// Run the seeded ensemble suite.
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Gauss-Legendre nodes on [0, 1].
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    /// Base tolerance for the defect test.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Random restarts for the sphere searches.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

impl CommonArgs {
    fn options(&self, seed: u64) -> Result<CheckOptions> {
        Ok(CheckOptions {
            rule: QuadratureRule::gauss_legendre(self.nodes)?,
            tol: self.tol,
            search: SearchOptions::default().with_restarts(self.restarts).with_seed(seed),
        })
    }
}

#[derive(Args)]
struct MatrixArgs {
    /// JSON matrix file `{"dim": n, "rows": [...]}`.
    #[arg(long, requires = "b", conflicts_with = "random")]
    a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    b: Option<PathBuf>,
    /// Draw random pairs of this dimension.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Spectrum window for random matrices.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.5, 2.5], allow_hyphen_values = true)]
    window: Vec<f64>,
}

impl MatrixArgs {
    fn pairs(&self) -> Result<Vec<(SymmetricMatrix, SymmetricMatrix)>> {
        match (&self.a, &self.b, self.random) {
            (Some(a), Some(b), _) => Ok(vec![(SymmetricMatrix::read_json(a)?, SymmetricMatrix::read_json(b)?)]),
            (_, _, Some(dim)) => (0..self.count as u64)
                .map(|k| random_pair(dim, (self.window[0], self.window[1]), self.seed, k))
                .collect(),
            _ => Err(Error::InvalidArgument("give --a and --b, or --random <dim>".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Hh,
    #[value(name = "t21")]
    ChordBound,
    #[value(name = "cor22")]
    RatioBound,
    Norm,
    Nabla,
    Reverse,
    Grad,
}

impl From<Theorem> for TheoremId {
    fn from(t: Theorem) -> Self {
        match t {
            Theorem::Hh => TheoremId::Hh,
            Theorem::ChordBound => TheoremId::ChordBound,
            Theorem::RatioBound => TheoremId::RatioBound,
            Theorem::Norm => TheoremId::Norm,
            Theorem::Nabla => TheoremId::Nabla,
            Theorem::Reverse => TheoremId::Reverse,
            Theorem::Grad => TheoremId::Grad,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    theorem: Theorem,
    #[arg(long)]
    f: String,
    /// Second function (t21, cor22, reverse); defaults to f.
    #[arg(long)]
    g: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[command(flatten)]
    matrices: MatrixArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constant {
    Beta,
    Alpha,
    Delta,
    Xi,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    kind: Constant,
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Interval for beta and alpha; otherwise taken from the matrices.
    #[arg(long, allow_hyphen_values = true, requires = "big_m")]
    m: Option<f64>,
    #[arg(long = "M", allow_hyphen_values = true, requires = "m")]
    big_m: Option<f64>,
    #[command(flatten)]
    matrices: MatrixArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory that receives the report.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Print the report without writing it.
    #[arg(long)]
    no_write: bool,
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run_check(args: &CheckArgs) -> Result<u8> {
    let f = builtin(&args.f)?;
    let g = match &args.g {
        Some(n) => builtin(n)?,
        None => f.clone(),
    };
    let opts = args.common.options(args.matrices.seed)?;
    let mut reports: Vec<InequalityReport> = Vec::new();
    for (a, b) in args.matrices.pairs()? {
        let r = match TheoremId::from(args.theorem) {
            TheoremId::Hh => check_hh_chain(&f, &a, &b, &opts),
            TheoremId::ChordBound => check_chord_bound(&f, &g, args.alpha, &a, &b, &opts),
            TheoremId::RatioBound => check_ratio_bound(&f, &g, &a, &b, &opts),
            TheoremId::Norm => check_norm_chain(&f, &a, &b, args.alpha, &opts),
            TheoremId::Nabla => check_weighted_nabla(&f, &a, &b, args.lambda, &opts),
            TheoremId::Reverse => check_reverse(&f, &g, args.alpha, &a, &b, &opts),
            TheoremId::Grad => check_gradient_refinements(&f, &a, &b, &opts),
        }?;
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        reports.push(r);
    }
    if reports.len() == 1 {
        print(&reports[0])?;
    } else {
        print(&reports)?;
    }
    Ok(if reports.iter().all(|r| r.overall) { 0 } else { 1 })
}

fn run_bounds(args: &BoundsArgs) -> Result<u8> {
    let f = builtin(&args.f)?;
    let g = match &args.g {
        Some(n) => builtin(n)?,
        None => f.clone(),
    };
    let opts = args.common.options(args.matrices.seed)?;
    let interval = || -> Result<(f64, f64)> {
        if let (Some(m), Some(big_m)) = (args.m, args.big_m) {
            return Ok((m, big_m));
        }
        let pairs = args.matrices.pairs()?;
        let all: Vec<&SymmetricMatrix> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
        spectral_bounds(&all)
    };
    let value = match args.kind {
        Constant::Beta => {
            let (m, big_m) = interval()?;
            beta_constant(&f, &g, args.alpha, m, big_m)?
        }
        Constant::Alpha => {
            let (m, big_m) = interval()?;
            alpha_constant(&f, &g, m, big_m)?
        }
        Constant::Delta | Constant::Xi => {
            let pairs = args.matrices.pairs()?;
            let (a, b) = pairs
                .first()
                .ok_or_else(|| Error::InvalidArgument("no matrices given".into()))?;
            match args.kind {
                Constant::Delta => delta_refinement_with(&f, a, b, &opts.search)?,
                _ => xi_refinement_with(&f, a, b, &opts.rule, &opts.search)?,
            }
        }
    };
    print(&value)?;
    Ok(0)
}

fn run_counterexample(args: &CommonArgs) -> Result<u8> {
    let (a, b, f) = counterexample_fixture();
    let opts = args.options(0)?;
    let report = check_hh_chain(&f, &a, &b, &opts)?;
    let ends = apply_function(&a, &f)?.lerp(&apply_function(&b, &f)?, 0.5)?;
    print(&json!({
        "A": a,
        "B": b,
        "f": f.name(),
        "f_of_midpoint": apply_function(&a.lerp(&b, 0.5)?, &f)?,
        "segment_integral": segment_integral(&f, &a, &b, &opts.rule)?,
        "endpoint_mean": ends,
        "report": report,
    }))?;
    // The violation is the expected outcome.
    Ok(0)
}

fn run_suite_cmd(args: &SuiteArgs) -> Result<u8> {
    let cfg = match &args.config {
        Some(p) => SuiteConfig::read_json(p)?,
        None => SuiteConfig::default(),
    };
    let report = run_suite(&cfg)?;
    if !args.no_write {
        let path = write_report(&report, &args.out)?;
        eprintln!("report written to {}", path.display());
    }
    print(&report)?;
    Ok(exit_code(&report) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => run_check(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Counterexample(a) => run_counterexample(a),
        Command::Suite(a) => run_suite_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
