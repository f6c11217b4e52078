//! Operator-valued quadrature over the segment `t ↦ (1−t)A + tB`.
//!
//! Every node gets its own spectral decomposition. Node evaluations run
//! through [`crate::par`], and the weighted sum is always accumulated in
//! ascending node order so results do not depend on scheduling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{apply_function, SymmetricMatrix};
use crate::par;
use crate::scalarfn::ScalarFunction;

pub const DEFAULT_NODES: usize = 32;
pub const DEFAULT_FALLBACK_PANELS: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleKind {
    GaussLegendre { nodes: usize },
    CompositeMidpoint { panels: usize },
    Custom,
}

/// Nodes in `(0, 1)` with positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
    fallback_panels: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::gauss_legendre(DEFAULT_NODES).expect("default rule is valid")
    }
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::validated(nodes, weights, RuleKind::Custom)
    }

    fn validated(nodes: Vec<f64>, weights: Vec<f64>, kind: RuleKind) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "rule needs matching nonempty nodes/weights, got {} and {}",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidArgument("rule nodes must lie in (0, 1)".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("rule nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("rule weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("rule weights sum to {total}, not 1")));
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            kind,
            fallback_panels: DEFAULT_FALLBACK_PANELS,
        })
    }

    /// Gauss–Legendre rule with `n` nodes mapped to `(0, 1)`; exact for
    /// polynomials of degree `≤ 2n − 1`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("Gauss-Legendre needs at least one node".into()));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 1..=n {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            nodes.push(0.5 * (1.0 - x));
            weights.push(1.0 / ((1.0 - x * x) * dp * dp));
        }
        Self::validated(nodes, weights, RuleKind::GaussLegendre { nodes: n })
    }

    /// Composite midpoint rule with `panels` equal panels.
    pub fn composite_midpoint(panels: usize) -> Result<Self> {
        if panels < 1 {
            return Err(Error::InvalidArgument("midpoint rule needs at least one panel".into()));
        }
        let h = 1.0 / panels as f64;
        let nodes = (0..panels).map(|i| (i as f64 + 0.5) * h).collect();
        let mut rule = Self::validated(nodes, vec![h; panels], RuleKind::CompositeMidpoint { panels })?;
        rule.fallback_panels = panels;
        Ok(rule)
    }

    pub fn with_fallback_panels(mut self, panels: usize) -> Self {
        self.fallback_panels = panels.max(2);
        self
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn fallback_panels(&self) -> usize {
        self.fallback_panels
    }

    /// The rule actually used for `f`: kinked functions switch to the
    /// midpoint fallback.
    pub fn for_function(&self, f: &ScalarFunction) -> Result<QuadratureRule> {
        match self.kind {
            RuleKind::GaussLegendre { .. } | RuleKind::Custom if !f.is_smooth() => {
                QuadratureRule::composite_midpoint(self.fallback_panels)
            }
            _ => Ok(self.clone()),
        }
    }

    /// `Σ wᵢ g(tᵢ)` for a matrix-valued integrand, summed in node order.
    pub fn integrate<F>(&self, dim: usize, g: F) -> Result<SymmetricMatrix>
    where
        F: Fn(f64) -> Result<SymmetricMatrix> + Sync + Send,
    {
        let values = par::try_map_indexed(self.len(), |i| g(self.nodes[i]))?;
        let mut acc = SymmetricMatrix::zeros(dim);
        for (w, v) in self.weights.iter().zip(&values) {
            acc.add_scaled_assign(*w, v)?;
        }
        Ok(acc)
    }

    /// Scalar counterpart of [`Self::integrate`].
    pub fn integrate_scalar(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .sum()
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral value together with the rule that produced it.
#[derive(Clone, Debug)]
pub struct SegmentIntegral {
    pub value: SymmetricMatrix,
    pub rule_used: RuleKind,
    /// For the midpoint fallback: max entrywise change against half the panels.
    pub error_estimate: Option<f64>,
}

/// `∫₀¹ f((1−t)A + tB) dt`.
pub fn segment_integral(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    rule: &QuadratureRule,
) -> Result<SymmetricMatrix> {
    Ok(segment_integral_detailed(f, a, b, rule)?.value)
}

pub fn segment_integral_detailed(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    rule: &QuadratureRule,
) -> Result<SegmentIntegral> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let used = rule.for_function(f)?;
    let integrand = |t: f64| apply_function(&a.lerp(b, t)?, f);
    let value = used.integrate(a.dim(), integrand)?;
    let error_estimate = match used.kind() {
        RuleKind::CompositeMidpoint { panels } if panels >= 2 => {
            let coarse = QuadratureRule::composite_midpoint((panels / 2).max(1))?;
            let coarse_value = coarse.integrate(a.dim(), integrand)?;
            Some(coarse_value.max_abs_diff(&value)?)
        }
        _ => None,
    };
    Ok(SegmentIntegral {
        value,
        rule_used: used.kind(),
        error_estimate,
    })
}

/// `∫₀¹ f(C∇ᵥA) ∇_λ f(C∇ᵥB) dv` with `C = A∇_λB` and `X∇ᵥY = (1−v)X + vY`.
pub fn weighted_nabla_integral(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    lambda: f64,
    rule: &QuadratureRule,
) -> Result<SymmetricMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let c = a.lerp(b, lambda)?;
    let used = rule.for_function(f)?;
    used.integrate(a.dim(), |v| {
        let mut acc = SymmetricMatrix::zeros(a.dim());
        if lambda < 1.0 {
            acc.add_scaled_assign(1.0 - lambda, &apply_function(&c.lerp(a, v)?, f)?)?;
        }
        if lambda > 0.0 {
            acc.add_scaled_assign(lambda, &apply_function(&c.lerp(b, v)?, f)?)?;
        }
        Ok(acc)
    })
}
