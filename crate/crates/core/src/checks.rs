//! One checker per inequality chain. Each assembles both sides, compares
//! them and returns an [`InequalityReport`].
//!
//! Every "≤" link is judged by the minimum eigenvalue of its defect
//! `rhs − lhs` (or the scalar difference for norm links). Unmet hypotheses
//! are recorded as warnings and the checker still runs; only undefined
//! formulas (negative α, nonpositive g under division, missing f′) are errors.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{
    alpha_constant, beta_constant, delta_refinement_with, xi_refinement_with, BoundConstants, SearchOptions,
};
use crate::error::{Error, Result};
use crate::matcore::{
    absolute_value, apply_function, loewner_compare, operator_norm, spectral_bounds, LoewnerRelation, SymmetricMatrix,
};
use crate::quad::{segment_integral, weighted_nabla_integral, QuadratureRule};
use crate::scalarfn::{
    grid_min, probe_convexity, probe_increasing, ConvexityClass, ProbeVerdict, ScalarFunction, DEFAULT_PROBE_POINTS,
};

/// Base tolerance, scaled by `max(1, ‖lhs‖, ‖rhs‖)` for Loewner links and
/// used as-is for scalar links.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Allowed entrywise gap between the λ = 1/2 middle term and the segment integral.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Hh,
    #[serde(rename = "t21")]
    ChordBound,
    #[serde(rename = "cor22")]
    RatioBound,
    Norm,
    Nabla,
    Reverse,
    Grad,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Hh,
        TheoremId::ChordBound,
        TheoremId::RatioBound,
        TheoremId::Norm,
        TheoremId::Nabla,
        TheoremId::Reverse,
        TheoremId::Grad,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Hh => "hh",
            TheoremId::ChordBound => "t21",
            TheoremId::RatioBound => "cor22",
            TheoremId::Norm => "norm",
            TheoremId::Nabla => "nabla",
            TheoremId::Reverse => "reverse",
            TheoremId::Grad => "grad",
        }
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Loewner,
    Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub lhs_label: String,
    pub rhs_label: String,
    pub relation_required: String,
    pub kind: LinkKind,
    /// Observed relation of lhs against rhs (Loewner links only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<LoewnerRelation>,
    pub min_eig_of_defect: f64,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    pub links: Vec<Link>,
    pub constants_used: Vec<BoundConstants>,
    pub inputs_digest: String,
    pub overall: bool,
    pub hypotheses_met: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// λ = 1/2 only: max entrywise gap between the middle term and the segment integral.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_residual: Option<f64>,
}

impl InequalityReport {
    fn new(theorem_id: TheoremId, inputs_digest: String) -> Self {
        InequalityReport {
            theorem_id,
            links: Vec::new(),
            constants_used: Vec::new(),
            inputs_digest,
            overall: true,
            hypotheses_met: true,
            warnings: Vec::new(),
            identity_residual: None,
        }
    }

    fn push(&mut self, link: Link) {
        self.overall &= link.holds;
        self.links.push(link);
    }

    fn hypothesis(&mut self, msg: String) {
        self.hypotheses_met = false;
        self.warnings.push(format!("hypothesis: {msg}"));
    }

    fn finish(mut self) -> Self {
        if self.hypotheses_met && !self.overall {
            self.warnings.push(format!(
                "soundness: `{}` failed beyond tolerance with all hypotheses met; this indicates a numerical defect",
                self.theorem_id.as_str()
            ));
        }
        self
    }

    /// Smallest defect over all links.
    pub fn worst_defect(&self) -> f64 {
        self.links
            .iter()
            .map(|l| l.min_eig_of_defect)
            .fold(f64::INFINITY, f64::min)
    }

    /// A failure that contradicts a proven statement.
    pub fn is_theorem_violation(&self) -> bool {
        self.hypotheses_met && !self.overall
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub rule: QuadratureRule,
    pub tol: f64,
    pub search: SearchOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            rule: QuadratureRule::default(),
            tol: DEFAULT_TOL,
            search: SearchOptions::default(),
        }
    }
}

struct InputDigest(Sha256);

impl InputDigest {
    fn new(theorem: TheoremId) -> Self {
        let mut h = Sha256::new();
        h.update(theorem.as_str().as_bytes());
        InputDigest(h)
    }

    fn function(mut self, f: &ScalarFunction) -> Self {
        self.0.update([0u8]);
        self.0.update(f.name().as_bytes());
        self
    }

    fn scalar(mut self, x: f64) -> Self {
        self.0.update(x.to_le_bytes());
        self
    }

    fn matrix(mut self, m: &SymmetricMatrix) -> Self {
        m.feed_digest(&mut self.0);
        self
    }

    fn options(mut self, opts: &CheckOptions) -> Self {
        for t in opts.rule.nodes() {
            self.0.update(t.to_le_bytes());
        }
        self.0.update(opts.tol.to_le_bytes());
        self.0.update((opts.search.restarts as u64).to_le_bytes());
        self.0.update(opts.search.seed.to_le_bytes());
        self
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

fn loewner_link(lhs_label: &str, rhs_label: &str, lhs: &SymmetricMatrix, rhs: &SymmetricMatrix, base_tol: f64) -> Result<Link> {
    let tol = base_tol * 1f64.max(operator_norm(lhs)?).max(operator_norm(rhs)?);
    let v = loewner_compare(lhs, rhs, tol)?;
    Ok(Link {
        lhs_label: lhs_label.into(),
        rhs_label: rhs_label.into(),
        relation_required: "<=".into(),
        kind: LinkKind::Loewner,
        observed: Some(v.relation),
        min_eig_of_defect: v.min_eig_of_difference,
        tolerance: tol,
        holds: v.min_eig_of_difference >= -tol,
    })
}

fn scalar_link(lhs_label: &str, rhs_label: &str, lhs: f64, rhs: f64, tol: f64) -> Link {
    let defect = rhs - lhs;
    Link {
        lhs_label: lhs_label.into(),
        rhs_label: rhs_label.into(),
        relation_required: "<=".into(),
        kind: LinkKind::Scalar,
        observed: None,
        min_eig_of_defect: defect,
        tolerance: tol,
        holds: defect >= -tol,
    }
}

fn require_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!("alpha must be nonnegative, got {alpha}")))
    }
}

fn probe_convex(report: &mut InequalityReport, f: &ScalarFunction, m: f64, big_m: f64) -> Result<()> {
    let p = probe_convexity(f, m, big_m, DEFAULT_PROBE_POINTS)?;
    if p.verdict == ProbeVerdict::Neither {
        let (x, y) = p.witness.unwrap_or((m, big_m));
        report.hypothesis(format!(
            "`{}` fails midpoint convexity on [{m}, {big_m}] (pair {x}, {y})",
            f.name()
        ));
    }
    Ok(())
}

fn endpoint_mean(f: &ScalarFunction, a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    apply_function(a, f)?.lerp(&apply_function(b, f)?, 0.5)
}

/// `f((A+B)/2) ≤ ∫₀¹ f((1−t)A+tB) dt ≤ (f(A)+f(B))/2`, guaranteed for
/// operator convex `f`.
pub fn check_hh_chain(f: &ScalarFunction, a: &SymmetricMatrix, b: &SymmetricMatrix, opts: &CheckOptions) -> Result<InequalityReport> {
    let digest = InputDigest::new(TheoremId::Hh).function(f).matrix(a).matrix(b).options(opts).finish();
    let mut report = InequalityReport::new(TheoremId::Hh, digest);
    if f.class() != ConvexityClass::OperatorConvex {
        report.hypothesis(format!("`{}` is not marked operator convex", f.name()));
    }
    let mid = apply_function(&a.lerp(b, 0.5)?, f)?;
    let integral = segment_integral(f, a, b, &opts.rule)?;
    let ends = endpoint_mean(f, a, b)?;
    report.push(loewner_link("f((A+B)/2)", "int f((1-t)A+tB) dt", &mid, &integral, opts.tol)?);
    report.push(loewner_link("int f((1-t)A+tB) dt", "(f(A)+f(B))/2", &integral, &ends, opts.tol)?);
    Ok(report.finish())
}

/// `∫ f((1−t)A+tB) dt ≤ β + α (g(A)+g(B))/2` for convex `f`, `g` and `α ≥ 0`.
pub fn check_chord_bound(
    f: &ScalarFunction,
    g: &ScalarFunction,
    alpha: f64,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    require_alpha(alpha)?;
    let digest = InputDigest::new(TheoremId::ChordBound)
        .function(f)
        .function(g)
        .scalar(alpha)
        .matrix(a)
        .matrix(b)
        .options(opts)
        .finish();
    let mut report = InequalityReport::new(TheoremId::ChordBound, digest);
    let (m, big_m) = spectral_bounds(&[a, b])?;
    probe_convex(&mut report, f, m, big_m)?;
    probe_convex(&mut report, g, m, big_m)?;
    let beta = beta_constant(f, g, alpha, m, big_m)?;
    let integral = segment_integral(f, a, b, &opts.rule)?;
    let rhs = endpoint_mean(g, a, b)?.scale(alpha).shift(beta.value);
    report.push(loewner_link("int f((1-t)A+tB) dt", "beta I + alpha (g(A)+g(B))/2", &integral, &rhs, opts.tol)?);
    report.constants_used.push(beta);
    Ok(report.finish())
}

/// Multiplicative `∫ f ≤ α (g(A)+g(B))/2` with the ratio constant α, and the
/// additive `∫ f ≤ β + (g(A)+g(B))/2`; requires `g > 0` on the spectra.
pub fn check_ratio_bound(
    f: &ScalarFunction,
    g: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    let digest = InputDigest::new(TheoremId::RatioBound)
        .function(f)
        .function(g)
        .matrix(a)
        .matrix(b)
        .options(opts)
        .finish();
    let mut report = InequalityReport::new(TheoremId::RatioBound, digest);
    let (m, big_m) = spectral_bounds(&[a, b])?;
    probe_convex(&mut report, f, m, big_m)?;
    probe_convex(&mut report, g, m, big_m)?;
    let alpha = alpha_constant(f, g, m, big_m)?;
    require_alpha(alpha.value)?;
    let beta_at_alpha = beta_constant(f, g, alpha.value, m, big_m)?;
    let beta_one = beta_constant(f, g, 1.0, m, big_m)?;
    if beta_at_alpha.value > DEFAULT_TOL {
        report.warnings.push(format!(
            "beta at the ratio constant is {} > 0; the ratio maximum may be underestimated",
            beta_at_alpha.value
        ));
    }
    let integral = segment_integral(f, a, b, &opts.rule)?;
    let g_mean = endpoint_mean(g, a, b)?;
    report.push(loewner_link("int f((1-t)A+tB) dt", "alpha (g(A)+g(B))/2", &integral, &g_mean.scale(alpha.value), opts.tol)?);
    report.push(loewner_link("int f((1-t)A+tB) dt", "beta I + (g(A)+g(B))/2", &integral, &g_mean.shift(beta_one.value), opts.tol)?);
    report.constants_used.extend([alpha, beta_at_alpha, beta_one]);
    Ok(report.finish())
}

/// Norm chain with `|A|`, `|B|`:
/// `f(‖(A+B)/2‖) ≤ ‖∫ f((1−t)|A|+t|B|) dt‖ ≤ β + α ‖(f(|A|)+f(|B|))/2‖`.
pub fn check_norm_chain(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    alpha: f64,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    require_alpha(alpha)?;
    let digest = InputDigest::new(TheoremId::Norm)
        .function(f)
        .scalar(alpha)
        .matrix(a)
        .matrix(b)
        .options(opts)
        .finish();
    let mut report = InequalityReport::new(TheoremId::Norm, digest);
    let abs_a = absolute_value(a)?;
    let abs_b = absolute_value(b)?;
    let (m, big_m) = spectral_bounds(&[&abs_a, &abs_b])?;
    let mid_norm = operator_norm(&a.lerp(b, 0.5)?)?;
    let lo = m.min(mid_norm);
    probe_convex(&mut report, f, m, big_m)?;
    if !probe_increasing(f, lo, big_m, DEFAULT_PROBE_POINTS)? {
        report.hypothesis(format!("`{}` is not increasing on [{lo}, {big_m}]", f.name()));
    }
    let fmin = grid_min(f, lo, big_m, DEFAULT_PROBE_POINTS)?;
    if fmin < 0.0 {
        report.hypothesis(format!("`{}` takes the negative value {fmin} on [{lo}, {big_m}]", f.name()));
    }
    let beta = beta_constant(f, f, alpha, m, big_m)?;
    let lhs = f.eval(mid_norm)?;
    let integral_norm = operator_norm(&segment_integral(f, &abs_a, &abs_b, &opts.rule)?)?;
    let ends_norm = operator_norm(&endpoint_mean(f, &abs_a, &abs_b)?)?;
    report.push(scalar_link("f(||(A+B)/2||)", "||int f((1-t)|A|+t|B|) dt||", lhs, integral_norm, opts.tol));
    report.push(scalar_link(
        "||int f((1-t)|A|+t|B|) dt||",
        "beta + alpha ||(f(|A|)+f(|B|))/2||",
        integral_norm,
        beta.value + alpha * ends_norm,
        opts.tol,
    ));
    report.constants_used.push(beta);
    Ok(report.finish())
}

/// `f(A∇_λB) ≤ ∫ f(C∇ᵥA)∇_λ f(C∇ᵥB) dv ≤ f(A)∇_λ f(B)` with `C = A∇_λB`,
/// guaranteed for operator convex `f`.
pub fn check_weighted_nabla(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    lambda: f64,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let digest = InputDigest::new(TheoremId::Nabla)
        .function(f)
        .scalar(lambda)
        .matrix(a)
        .matrix(b)
        .options(opts)
        .finish();
    let mut report = InequalityReport::new(TheoremId::Nabla, digest);
    if f.class() != ConvexityClass::OperatorConvex {
        report.hypothesis(format!("`{}` is not marked operator convex", f.name()));
    }
    let lhs = apply_function(&a.lerp(b, lambda)?, f)?;
    let middle = weighted_nabla_integral(f, a, b, lambda, &opts.rule)?;
    let rhs = apply_function(a, f)?.lerp(&apply_function(b, f)?, lambda)?;
    report.push(loewner_link("f(A nabla B)", "int f(C nabla_v A) nabla f(C nabla_v B) dv", &lhs, &middle, opts.tol)?);
    report.push(loewner_link("int f(C nabla_v A) nabla f(C nabla_v B) dv", "f(A) nabla f(B)", &middle, &rhs, opts.tol)?);
    if lambda == 0.5 {
        let seg = segment_integral(f, a, b, &opts.rule)?;
        let residual = middle.max_abs_diff(&seg)?;
        if residual > IDENTITY_TOL * 1f64.max(seg.max_abs()) {
            report.warnings.push(format!("middle term differs from the segment integral by {residual:e}"));
        }
        report.identity_residual = Some(residual);
    }
    Ok(report.finish())
}

/// Reverses `∫ f ≤ β + α g((A+B)/2)` and `(f(A)+f(B))/2 ≤ β + α ∫ g` for
/// convex `f`; `g` is unrestricted.
pub fn check_reverse(
    f: &ScalarFunction,
    g: &ScalarFunction,
    alpha: f64,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    require_alpha(alpha)?;
    let digest = InputDigest::new(TheoremId::Reverse)
        .function(f)
        .function(g)
        .scalar(alpha)
        .matrix(a)
        .matrix(b)
        .options(opts)
        .finish();
    let mut report = InequalityReport::new(TheoremId::Reverse, digest);
    let (m, big_m) = spectral_bounds(&[a, b])?;
    probe_convex(&mut report, f, m, big_m)?;
    if !g.class().is_convex() {
        report
            .warnings
            .push(format!("note: g = `{}` is not convex; only f is required to be convex", g.name()));
    }
    let beta = beta_constant(f, g, alpha, m, big_m)?;
    let f_int = segment_integral(f, a, b, &opts.rule)?;
    let g_int = segment_integral(g, a, b, &opts.rule)?;
    let g_mid = apply_function(&a.lerp(b, 0.5)?, g)?;
    let f_ends = endpoint_mean(f, a, b)?;
    report.push(loewner_link(
        "int f((1-t)A+tB) dt",
        "beta I + alpha g((A+B)/2)",
        &f_int,
        &g_mid.scale(alpha).shift(beta.value),
        opts.tol,
    )?);
    report.push(loewner_link(
        "(f(A)+f(B))/2",
        "beta I + alpha int g((1-t)A+tB) dt",
        &f_ends,
        &g_int.scale(alpha).shift(beta.value),
        opts.tol,
    )?);
    report.constants_used.push(beta);
    Ok(report.finish())
}

/// `f((A+B)/2) ≤ ∫ f + δ` and `∫ f ≤ (f(A)+f(B))/2 + ξ` for convex
/// differentiable `f`.
pub fn check_gradient_refinements(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    opts: &CheckOptions,
) -> Result<InequalityReport> {
    if !f.has_deriv() {
        return Err(Error::MissingDerivative(f.name().to_string()));
    }
    let digest = InputDigest::new(TheoremId::Grad).function(f).matrix(a).matrix(b).options(opts).finish();
    let mut report = InequalityReport::new(TheoremId::Grad, digest);
    let (m, big_m) = spectral_bounds(&[a, b])?;
    probe_convex(&mut report, f, m, big_m)?;
    let delta = delta_refinement_with(f, a, b, &opts.search)?;
    let xi = xi_refinement_with(f, a, b, &opts.rule, &opts.search)?;
    let mid = apply_function(&a.lerp(b, 0.5)?, f)?;
    let integral = segment_integral(f, a, b, &opts.rule)?;
    let ends = endpoint_mean(f, a, b)?;
    report.push(loewner_link("f((A+B)/2)", "int f((1-v)A+vB) dv + delta I", &mid, &integral.shift(delta.value), opts.tol)?);
    report.push(loewner_link("int f((1-v)A+vB) dv", "(f(A)+f(B))/2 + xi I", &integral, &ends.shift(xi.value), opts.tol)?);
    if let Some(upper) = xi.upper_check {
        if xi.value > upper + 1e-9 {
            report
                .warnings
                .push(format!("xi {} exceeds the per-node ceiling {upper}", xi.value));
        }
    }
    report.constants_used.extend([delta, xi]);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarfn::builtin;

    fn m(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn fixture_pair() -> (SymmetricMatrix, SymmetricMatrix) {
        (m(&[&[2.0, 1.0], &[1.0, 1.0]]), m(&[&[1.0, 0.0], &[0.0, 0.0]]))
    }

    fn f(name: &str) -> ScalarFunction {
        builtin(name).unwrap()
    }

    #[test]
    fn counterexample_is_incomparable_on_both_links() {
        let (a, b) = fixture_pair();
        let r = check_hh_chain(&f("cube"), &a, &b, &CheckOptions::default()).unwrap();
        assert!(!r.overall);
        assert!(!r.hypotheses_met);
        assert!(!r.is_theorem_violation());
        for l in &r.links {
            assert_eq!(l.observed, Some(LoewnerRelation::Incomparable));
            assert!(!l.holds);
        }
    }

    #[test]
    fn hh_equal_endpoints() {
        let (a, _) = fixture_pair();
        let r = check_hh_chain(&f("cube"), &a, &a, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        assert!(r.links.iter().all(|l| l.observed == Some(LoewnerRelation::Equal)));
    }

    #[test]
    fn hh_square_holds() {
        let (a, b) = fixture_pair();
        let r = check_hh_chain(&f("square"), &a, &b.shift(-0.7), &CheckOptions::default()).unwrap();
        assert!(r.overall && r.hypotheses_met && r.warnings.is_empty());
    }

    #[test]
    fn chord_bound_on_fixture_pair() {
        let (a, b) = fixture_pair();
        let r = check_chord_bound(&f("cube"), &f("cube"), 1.0, &a, &b, &CheckOptions::default()).unwrap();
        assert!(r.overall, "{r:?}");
        assert!(r.hypotheses_met);
        assert_eq!(r.constants_used.len(), 1);
        assert!(check_chord_bound(&f("cube"), &f("cube"), -1.0, &a, &b, &CheckOptions::default()).is_err());
    }

    #[test]
    fn chord_bound_scalar_multiple_of_identity() {
        let c = SymmetricMatrix::scalar(3, 1.2);
        let r = check_chord_bound(&f("exp"), &f("exp"), 1.0, &c, &c, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        assert_eq!(r.constants_used[0].value, 0.0);
    }

    #[test]
    fn chord_bound_flags_nonconvex_g() {
        let a = SymmetricMatrix::from_diag(&[0.2, 2.5]);
        let b = SymmetricMatrix::from_diag(&[1.0, 3.0]);
        let r = check_chord_bound(&f("square"), &f("sin"), 1.0, &a, &b, &CheckOptions::default()).unwrap();
        assert!(!r.hypotheses_met);
        assert!(r.warnings.iter().any(|w| w.contains("sin")));
    }

    #[test]
    fn ratio_bound_square_on_one_two() {
        let a = SymmetricMatrix::from_diag(&[1.0, 2.0]);
        let b = m(&[&[1.5, 0.5], &[0.5, 1.5]]);
        let r = check_ratio_bound(&f("square"), &f("square"), &a, &b, &CheckOptions::default()).unwrap();
        assert!(r.overall, "{r:?}");
        assert!((r.constants_used[0].value - 9.0 / 8.0).abs() < 1e-8);
        assert!(r.constants_used[1].value <= 1e-8);
    }

    #[test]
    fn ratio_bound_shifted_fixture_pair() {
        let (a, b) = fixture_pair();
        let r = check_ratio_bound(&f("cube"), &f("cube"), &a.shift(1.0), &b.shift(1.0), &CheckOptions::default()).unwrap();
        assert!(r.overall);
    }

    #[test]
    fn ratio_bound_rejects_nonpositive_g() {
        let (a, b) = fixture_pair();
        let err = check_ratio_bound(&f("cube"), &f("identity"), &a, &b.shift(-0.5), &CheckOptions::default());
        assert!(matches!(err, Err(Error::Hypothesis(_)) | Err(Error::Domain { .. })));
    }

    #[test]
    fn norm_chain_diagonal_case() {
        let a = SymmetricMatrix::from_diag(&[1.0, -2.0]);
        let b = SymmetricMatrix::from_diag(&[2.0, 1.0]);
        let r = check_norm_chain(&f("square"), &a, &b, 1.0, &CheckOptions::default()).unwrap();
        assert!(r.overall, "{r:?}");
        // |A| = diag(1,2), |B| = diag(2,1): ∫ = diag(7/3, 7/3); ‖(A+B)/2‖ = 1.5.
        assert!((r.links[0].min_eig_of_defect - (7.0 / 3.0 - 2.25)).abs() < 1e-12);
    }

    #[test]
    fn norm_chain_equal_psd() {
        let (a, _) = fixture_pair();
        let r = check_norm_chain(&f("exp"), &a, &a, 1.0, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        assert!(r.links[0].min_eig_of_defect.abs() < 1e-10);
    }

    #[test]
    fn nabla_endpoints_and_midpoint() {
        let (a, b) = fixture_pair();
        let opts = CheckOptions::default();
        let r = check_weighted_nabla(&f("square"), &a, &b, 0.0, &opts).unwrap();
        assert!(r.overall);
        assert!(r.links.iter().all(|l| l.observed == Some(LoewnerRelation::Equal)));
        let r = check_weighted_nabla(&f("square"), &a, &b, 0.3, &opts).unwrap();
        assert!(r.overall && r.identity_residual.is_none());
        let r = check_weighted_nabla(&f("cube"), &a, &b, 0.5, &opts).unwrap();
        assert!(!r.hypotheses_met);
        assert!(r.identity_residual.unwrap() < 1e-9);
        assert!(check_weighted_nabla(&f("square"), &a, &b, 1.2, &opts).is_err());
    }

    #[test]
    fn reverse_examples() {
        let (a, b) = fixture_pair();
        let r = check_reverse(&f("cube"), &f("cube"), 1.0, &a, &b, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        let id = f("identity");
        let r = check_reverse(&id, &id, 1.0, &a, &b, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        assert!(r.constants_used[0].value.abs() < 1e-12);
        for l in &r.links {
            assert!(l.min_eig_of_defect.abs() < 1e-10);
        }
    }

    #[test]
    fn gradient_refinements() {
        let (a, b) = fixture_pair();
        let r = check_gradient_refinements(&f("cube"), &a, &b, &CheckOptions::default()).unwrap();
        assert!(r.overall, "{r:?}");
        assert!(r.constants_used.iter().all(|c| c.value >= -1e-9));
        let d0 = SymmetricMatrix::from_diag(&[0.0, 1.0]);
        let d1 = SymmetricMatrix::from_diag(&[1.0, 0.0]);
        let r = check_gradient_refinements(&f("square"), &d0, &d1, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        let r = check_gradient_refinements(&f("square"), &a, &a, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        assert!(check_gradient_refinements(&f("abs"), &a, &b, &CheckOptions::default()).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let (a, b) = fixture_pair();
        let opts = CheckOptions::default();
        let r1 = check_gradient_refinements(&f("exp"), &a, &b, &opts).unwrap();
        let r2 = check_gradient_refinements(&f("exp"), &a, &b, &opts).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        let r3 = check_gradient_refinements(&f("exp"), &a, &b.shift(0.1), &opts).unwrap();
        assert_ne!(r1.inputs_digest, r3.inputs_digest);
    }

    #[test]
    fn theorem_ids_parse() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("t99".parse::<TheoremId>().is_err());
    }
}
