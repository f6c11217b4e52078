//! Scalar functions with derivatives, domains and declared convexity class,
//! plus chord (secant line) coefficients and a grid convexity probe.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub const DEFAULT_PROBE_POINTS: usize = 101;
pub const PROBE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexityClass {
    Convex,
    OperatorConvex,
    Concave,
    Neither,
    Unverified,
}

impl ConvexityClass {
    /// True for `Convex` and `OperatorConvex`.
    pub fn is_convex(self) -> bool {
        matches!(self, ConvexityClass::Convex | ConvexityClass::OperatorConvex)
    }
}

/// Real interval with per-endpoint openness. Infinite endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_open: true,
        hi_open: true,
    };
    pub const NONNEGATIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_open: false,
        hi_open: true,
    };
    pub const POSITIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_open: true,
        hi_open: true,
    };

    pub fn closed(lo: f64, hi: f64) -> Domain {
        Domain {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn contains_interval(&self, lo: f64, hi: f64) -> bool {
        self.contains(lo) && self.contains(hi)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// A real function on an interval, optionally with its derivative.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    eval: RealFn,
    deriv: Option<RealFn>,
    domain: Domain,
    class: ConvexityClass,
    smooth: bool,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("class", &self.class)
            .field("has_deriv", &self.deriv.is_some())
            .field("smooth", &self.smooth)
            .finish()
    }
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        class: ConvexityClass,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFunction {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: None,
            domain,
            class,
            smooth: true,
        }
    }

    pub fn with_deriv(mut self, deriv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    /// Marks the function as having kinks; quadrature then uses the
    /// composite midpoint fallback.
    pub fn nonsmooth(mut self) -> Self {
        self.smooth = false;
        self
    }

    pub fn with_class(mut self, class: ConvexityClass) -> Self {
        self.class = class;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn class(&self) -> ConvexityClass {
        self.class
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                function: self.name.clone(),
                value: x,
                domain: self.domain.to_string(),
            })
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok((self.eval)(x))
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        let d = self
            .deriv
            .as_ref()
            .ok_or_else(|| Error::MissingDerivative(self.name.clone()))?;
        self.check_domain(x)?;
        Ok(d(x))
    }

    /// The derivative as a function in its own right, on the same domain.
    pub fn derivative(&self) -> Result<ScalarFunction> {
        let d = self
            .deriv
            .clone()
            .ok_or_else(|| Error::MissingDerivative(self.name.clone()))?;
        Ok(ScalarFunction {
            name: format!("{}'", self.name),
            eval: d,
            deriv: None,
            domain: self.domain,
            class: ConvexityClass::Unverified,
            smooth: true,
        })
    }

    /// `t ↦ t·f'(t)`.
    pub fn times_derivative(&self) -> Result<ScalarFunction> {
        let d = self
            .deriv
            .clone()
            .ok_or_else(|| Error::MissingDerivative(self.name.clone()))?;
        Ok(ScalarFunction {
            name: format!("t*{}'", self.name),
            eval: Arc::new(move |t| t * d(t)),
            deriv: None,
            domain: self.domain,
            class: ConvexityClass::Unverified,
            smooth: true,
        })
    }
}

/// `t ↦ t^p` on `[0, ∞)` (or `(0, ∞)` for `p < 0`), classified by the
/// known operator convexity ranges `p ∈ [−1, 0) ∪ [1, 2]`.
pub fn power(p: f64) -> ScalarFunction {
    let domain = if p < 0.0 {
        Domain::POSITIVE
    } else {
        Domain::NONNEGATIVE
    };
    let class = if (1.0..=2.0).contains(&p) || (-1.0..0.0).contains(&p) {
        ConvexityClass::OperatorConvex
    } else if !(-1.0..=2.0).contains(&p) {
        ConvexityClass::Convex
    } else if p == 0.0 {
        ConvexityClass::OperatorConvex
    } else {
        ConvexityClass::Concave
    };
    ScalarFunction::new(format!("pow{p}"), domain, class, move |t| t.powf(p))
        .with_deriv(move |t| if p == 0.0 { 0.0 } else { p * t.powf(p - 1.0) })
}

/// Polynomial `c0 + c1 t + c2 t² + …` on the whole line.
pub fn polynomial(coeffs: &[f64]) -> Result<ScalarFunction> {
    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(
            "polynomial needs at least one finite coefficient".into(),
        ));
    }
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let class = match c.len() {
        1 | 2 => ConvexityClass::OperatorConvex,
        3 if c[2] > 0.0 => ConvexityClass::OperatorConvex,
        3 => ConvexityClass::Concave,
        _ => ConvexityClass::Unverified,
    };
    let dc: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| k as f64 * v)
        .collect();
    let name = format!(
        "poly[{}]",
        c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    );
    let horner = |cs: &[f64], t: f64| cs.iter().rev().fold(0.0, |acc, v| acc * t + v);
    Ok(
        ScalarFunction::new(name, Domain::REAL_LINE, class, move |t| horner(&c, t))
            .with_deriv(move |t| horner(&dc, t)),
    )
}

/// Names accepted by [`builtin`].
pub const CATALOG_NAMES: &[&str] = &[
    "identity", "one", "square", "pow1.5", "cube", "quartic", "exp", "inv", "abs", "sqrt", "sin",
];

pub fn builtin_catalog() -> Vec<ScalarFunction> {
    CATALOG_NAMES
        .iter()
        .map(|n| builtin(n).expect("catalog names resolve"))
        .collect()
}

/// Resolves a catalog name, a `pow:<p>` power, or a `poly:<c0>,<c1>,…`
/// coefficient list.
pub fn builtin(name: &str) -> Result<ScalarFunction> {
    use ConvexityClass::*;
    let f = match name {
        "identity" | "linear" => {
            ScalarFunction::new("identity", Domain::REAL_LINE, OperatorConvex, |t| t).with_deriv(|_| 1.0)
        }
        "one" => ScalarFunction::new("one", Domain::REAL_LINE, OperatorConvex, |_| 1.0).with_deriv(|_| 0.0),
        "square" | "pow2" => {
            ScalarFunction::new("square", Domain::REAL_LINE, OperatorConvex, |t| t * t).with_deriv(|t| 2.0 * t)
        }
        "pow1.5" => ScalarFunction::new("pow1.5", Domain::NONNEGATIVE, OperatorConvex, |t| t * t.sqrt())
            .with_deriv(|t| 1.5 * t.sqrt()),
        "cube" => ScalarFunction::new("cube", Domain::NONNEGATIVE, Convex, |t| t * t * t)
            .with_deriv(|t| 3.0 * t * t),
        "quartic" => ScalarFunction::new("quartic", Domain::REAL_LINE, Convex, |t| (t * t) * (t * t))
            .with_deriv(|t| 4.0 * t * t * t),
        "exp" => ScalarFunction::new("exp", Domain::REAL_LINE, Convex, f64::exp).with_deriv(f64::exp),
        "inv" => ScalarFunction::new("inv", Domain::POSITIVE, OperatorConvex, |t| 1.0 / t)
            .with_deriv(|t| -1.0 / (t * t)),
        "abs" => ScalarFunction::new("abs", Domain::REAL_LINE, Convex, f64::abs).nonsmooth(),
        "sqrt" => ScalarFunction::new("sqrt", Domain::NONNEGATIVE, Concave, f64::sqrt)
            .with_deriv(|t| 0.5 / t.sqrt()),
        "sin" => ScalarFunction::new("sin", Domain::REAL_LINE, Neither, f64::sin).with_deriv(f64::cos),
        other => {
            if let Some(p) = other.strip_prefix("pow:") {
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::UnknownFunction(other.to_string()))?;
                return Ok(power(p));
            }
            if let Some(list) = other.strip_prefix("poly:") {
                let coeffs = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::UnknownFunction(other.to_string()))?;
                return polynomial(&coeffs);
            }
            return Err(Error::UnknownFunction(other.to_string()));
        }
    };
    Ok(f)
}

/// Secant line of `f` through `(m, f(m))` and `(M, f(M))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordCoefficients {
    pub a_f: f64,
    pub b_f: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl ChordCoefficients {
    pub fn at(&self, x: f64) -> f64 {
        self.a_f * x + self.b_f
    }
}

pub fn chord_coefficients(f: &ScalarFunction, m: f64, big_m: f64) -> Result<ChordCoefficients> {
    if !(m < big_m) {
        return Err(Error::InvalidInterval { lo: m, hi: big_m });
    }
    let fm = f.eval(m)?;
    let fmm = f.eval(big_m)?;
    let width = big_m - m;
    Ok(ChordCoefficients {
        a_f: (fmm - fm) / width,
        b_f: (big_m * fm - m * fmm) / width,
        m,
        big_m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    Convex,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityProbe {
    pub verdict: ProbeVerdict,
    /// Grid pair `(x, y)` with the largest midpoint violation, if any.
    pub witness: Option<(f64, f64)>,
    pub max_violation: f64,
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect()
}

/// Midpoint convexity test over all pairs of a uniform grid on `[m, M]`.
pub fn probe_convexity(f: &ScalarFunction, m: f64, big_m: f64, grid_points: usize) -> Result<ConvexityProbe> {
    if grid_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "convexity probe needs at least 3 grid points, got {grid_points}"
        )));
    }
    if !(m <= big_m) {
        return Err(Error::InvalidInterval { lo: m, hi: big_m });
    }
    let xs = grid(m, big_m, grid_points);
    let fx = xs.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0;
    let mut witness = None;
    for i in 0..xs.len() {
        for j in (i + 2)..xs.len() {
            let mid = f.eval(0.5 * (xs[i] + xs[j]))?;
            let chord_mid = 0.5 * (fx[i] + fx[j]);
            let slack = PROBE_TOL * 1f64.max(chord_mid.abs());
            let violation = mid - chord_mid;
            if violation > slack && violation > worst {
                worst = violation;
                witness = Some((xs[i], xs[j]));
            }
        }
    }
    Ok(ConvexityProbe {
        verdict: if witness.is_some() {
            ProbeVerdict::Neither
        } else {
            ProbeVerdict::Convex
        },
        witness,
        max_violation: worst,
    })
}

/// Whether `f` is nondecreasing on a uniform grid of `[lo, hi]`.
pub fn probe_increasing(f: &ScalarFunction, lo: f64, hi: f64, grid_points: usize) -> Result<bool> {
    if !(lo <= hi) || grid_points < 2 {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let vals = grid(lo, hi, grid_points)
        .into_iter()
        .map(|x| f.eval(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals
        .windows(2)
        .all(|w| w[1] >= w[0] - PROBE_TOL * 1f64.max(w[0].abs())))
}

/// Minimum of `f` over a uniform grid of `[lo, hi]`.
pub fn grid_min(f: &ScalarFunction, lo: f64, hi: f64, grid_points: usize) -> Result<f64> {
    if !(lo <= hi) || grid_points < 2 {
        return Err(Error::InvalidInterval { lo, hi });
    }
    grid(lo, hi, grid_points)
        .into_iter()
        .map(|x| f.eval(x))
        .try_fold(f64::INFINITY, |acc, v| Ok(acc.min(v?)))
}
