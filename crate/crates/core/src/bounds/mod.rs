//! Bound constants of the chord (Mond–Pečarić) inequalities and the
//! gradient-inequality refinements.
//!
//! * β: `max_{m≤x≤M} a_f x + b_f − α g(x)`
//! * α: `max_{m≤x≤M} (a_f x + b_f) / g(x)`
//! * δ: sup over unit `x` of `⟨Cf'(C)x,x⟩ − ⟨f'(C)x,x⟩⟨Cx,x⟩`, `C = (A+B)/2`
//! * ξ: the same gap integrated along `Tᵥ = (1−v)A + vB` before the sup
//!
//! All reported suprema are best-found values: `value` is the objective at
//! `argmax_witness`, hence always a valid lower bound on the true supremum.

pub mod scalar_search;
pub mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{spectral_decompose, SpectralDecomposition, SymmetricMatrix};
use crate::par;
use crate::quad::QuadratureRule;
use crate::scalarfn::{chord_coefficients, ChordCoefficients, ScalarFunction};

use scalar_search::{golden_section_max, grid_max, grid_refined_max, ScalarMax, REFINE_GRID_POINTS};
use sphere::{maximize, GapObjective, SphereSearch};

pub use sphere::SphereSearch as SearchOptions;

/// Unit vectors within this distance of norm one are accepted.
pub const UNIT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Beta,
    Alpha,
    Delta,
    Xi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Point(f64),
    UnitVector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub kind: BoundKind,
    pub value: f64,
    pub argmax_witness: Witness,
    pub method: String,
    pub certified_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chord: Option<ChordCoefficients>,
    /// ξ only: `Σ wᵥ · sup gap(Tᵥ)`, an independent ceiling for the value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_check: Option<f64>,
}

impl BoundConstants {
    fn scalar(kind: BoundKind, best: ScalarMax, method: &str, chord: Option<ChordCoefficients>) -> Self {
        BoundConstants {
            kind,
            value: best.value,
            argmax_witness: Witness::Point(best.x),
            method: method.to_string(),
            certified_lower: best.value,
            chord,
            upper_check: None,
        }
    }
}

fn check_interval(f: &ScalarFunction, g: &ScalarFunction, m: f64, big_m: f64) -> Result<()> {
    if !(m <= big_m) || !m.is_finite() || !big_m.is_finite() {
        return Err(Error::InvalidInterval { lo: m, hi: big_m });
    }
    for h in [f, g] {
        for x in [m, big_m] {
            h.eval(x)?;
        }
    }
    Ok(())
}

fn eval_or_nan(h: &ScalarFunction, x: f64) -> f64 {
    h.eval(x).unwrap_or(f64::NAN)
}

/// β for the pair `(f, g)` and weight `α ≥ 0` on `[m, M]`.
///
/// Uses golden-section search when `g` is declared convex (the objective is
/// then concave), otherwise a dense grid with local refinement. A degenerate
/// interval `m = M` gives `f(m) − α g(m)`.
pub fn beta_constant(f: &ScalarFunction, g: &ScalarFunction, alpha: f64, m: f64, big_m: f64) -> Result<BoundConstants> {
    if !(alpha >= 0.0) {
        return Err(Error::Hypothesis(format!("alpha must be nonnegative, got {alpha}")));
    }
    check_interval(f, g, m, big_m)?;
    if m == big_m {
        let value = f.eval(m)? - alpha * g.eval(m)?;
        return Ok(BoundConstants::scalar(
            BoundKind::Beta,
            ScalarMax { x: m, value },
            "degenerate-interval",
            None,
        ));
    }
    let chord = chord_coefficients(f, m, big_m)?;
    let h = |x: f64| chord.at(x) - alpha * eval_or_nan(g, x);
    if g.class().is_convex() {
        let best = golden_section_max(h, m, big_m);
        Ok(BoundConstants::scalar(BoundKind::Beta, best, "golden-section", Some(chord)))
    } else {
        let best = grid_refined_max(h, m, big_m);
        Ok(BoundConstants::scalar(BoundKind::Beta, best, "grid+local-refine", Some(chord)))
    }
}

/// β by plain grid search with `points` points, no refinement.
pub fn beta_constant_grid(
    f: &ScalarFunction,
    g: &ScalarFunction,
    alpha: f64,
    m: f64,
    big_m: f64,
    points: usize,
) -> Result<BoundConstants> {
    if !(alpha >= 0.0) {
        return Err(Error::Hypothesis(format!("alpha must be nonnegative, got {alpha}")));
    }
    check_interval(f, g, m, big_m)?;
    if m == big_m || points < 2 {
        return beta_constant(f, g, alpha, m, big_m);
    }
    let chord = chord_coefficients(f, m, big_m)?;
    let (_, best) = grid_max(|x| chord.at(x) - alpha * eval_or_nan(g, x), m, big_m, points);
    Ok(BoundConstants::scalar(BoundKind::Beta, best, &format!("grid-{points}"), Some(chord)))
}

/// α for the pair `(f, g)` on `[m, M]`; requires `g > 0` there.
pub fn alpha_constant(f: &ScalarFunction, g: &ScalarFunction, m: f64, big_m: f64) -> Result<BoundConstants> {
    check_interval(f, g, m, big_m)?;
    if m == big_m {
        let gm = g.eval(m)?;
        if !(gm > 0.0) {
            return Err(Error::Hypothesis(format!("g({m}) = {gm} is not positive")));
        }
        return Ok(BoundConstants::scalar(
            BoundKind::Alpha,
            ScalarMax { x: m, value: f.eval(m)? / gm },
            "degenerate-interval",
            None,
        ));
    }
    let step = (big_m - m) / REFINE_GRID_POINTS as f64;
    for i in 0..=REFINE_GRID_POINTS {
        let x = if i == REFINE_GRID_POINTS { big_m } else { m + step * i as f64 };
        let gx = g.eval(x)?;
        if !(gx > 0.0) {
            return Err(Error::Hypothesis(format!(
                "g = `{}` is not positive at {x} (value {gx})",
                g.name()
            )));
        }
    }
    let chord = chord_coefficients(f, m, big_m)?;
    let best = grid_refined_max(|x| chord.at(x) / eval_or_nan(g, x), m, big_m);
    Ok(BoundConstants::scalar(BoundKind::Alpha, best, "grid+local-refine", Some(chord)))
}

fn derivative_spectra(f: &ScalarFunction, dec: &SpectralDecomposition) -> Result<Vec<f64>> {
    dec.eigenvalues.iter().map(|&l| f.deriv(l)).collect()
}

fn gap_objective(dec: &SpectralDecomposition, d: &[f64]) -> (SymmetricMatrix, SymmetricMatrix, SymmetricMatrix) {
    let lf: Vec<f64> = dec.eigenvalues.iter().zip(d).map(|(l, di)| l * di).collect();
    (dec.reconstruct_with(&lf), dec.reconstruct_with(d), dec.reconstruct())
}

/// Best two-point support of the simplex problem
/// `max_p Σλᵢdᵢpᵢ − (Σdᵢpᵢ)(Σλᵢpᵢ)`: on the edge `(i, j)` the objective is
/// `w(1−w)(λᵢ−λⱼ)(dᵢ−dⱼ)`, maximal at `w = 1/2`. Vertices give zero.
/// Returns `(value, i, j)`; `i == j` means a vertex.
fn best_edge(eigenvalues: &[f64], d: &[f64]) -> (f64, usize, usize) {
    let mut best = (0.0, 0, 0);
    for i in 0..eigenvalues.len() {
        for j in (i + 1)..eigenvalues.len() {
            let v = 0.25 * (eigenvalues[i] - eigenvalues[j]) * (d[i] - d[j]);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    best
}

fn edge_vector(dim: usize, i: usize, j: usize) -> Vec<f64> {
    let mut y = vec![0.0; dim];
    if i == j {
        y[i] = 1.0;
    } else {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        y[i] = s;
        y[j] = s;
    }
    y
}

/// Supremum of the covariance-type gap of `c` via the eigen-simplex:
/// vertices and edges in closed form, then sphere ascent from the best edge
/// plus `search.restarts` random restarts. Witness is in original coordinates.
pub fn gap_supremum(f: &ScalarFunction, c: &SymmetricMatrix, search: &SphereSearch) -> Result<(f64, Vec<f64>, String)> {
    let dec = spectral_decompose(c)?;
    let d = derivative_spectra(f, &dec)?;
    let n = c.dim();
    let (_, i, j) = best_edge(&dec.eigenvalues, &d);
    let edge_y = edge_vector(n, i, j);
    let diag_obj = GapObjective {
        linear: SymmetricMatrix::from_diag(&dec.eigenvalues.iter().zip(&d).map(|(l, di)| l * di).collect::<Vec<_>>()),
        products: vec![(
            1.0,
            SymmetricMatrix::from_diag(&d),
            SymmetricMatrix::from_diag(&dec.eigenvalues),
        )],
    };
    let mut best_value = diag_obj.value(&edge_y);
    let mut best_y = edge_y.clone();
    let mut method = if i == j { "simplex-vertex" } else { "simplex-edge" }.to_string();
    if n > 2 || search.restarts > 0 {
        let opt = maximize(&diag_obj, Some(&edge_y), search);
        if opt.value > best_value {
            best_value = opt.value;
            best_y = opt.x;
            method = format!("{method}+sphere-ascent(start {})", opt.start);
        }
    }
    Ok((best_value, dec.from_eigenbasis(&best_y), method))
}

/// δ for `C = (A + B)/2` with default search options.
pub fn delta_refinement(f: &ScalarFunction, a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<BoundConstants> {
    delta_refinement_with(f, a, b, &SphereSearch::default())
}

pub fn delta_refinement_with(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    search: &SphereSearch,
) -> Result<BoundConstants> {
    if !f.has_deriv() {
        return Err(Error::MissingDerivative(f.name().to_string()));
    }
    let c = a.lerp(b, 0.5)?;
    let (value, x, method) = gap_supremum(f, &c, search)?;
    Ok(BoundConstants {
        kind: BoundKind::Delta,
        value,
        argmax_witness: Witness::UnitVector(x),
        method,
        certified_lower: value,
        chord: None,
        upper_check: None,
    })
}

/// Pieces of the ξ objective along the quadrature nodes.
pub struct XiObjective {
    pub objective: GapObjective,
    pub node_decompositions: Vec<SpectralDecomposition>,
}

pub fn xi_objective(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    rule: &QuadratureRule,
) -> Result<XiObjective> {
    if !f.has_deriv() {
        return Err(Error::MissingDerivative(f.name().to_string()));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let nodes = rule.nodes();
    let pieces = par::try_map_indexed(nodes.len(), |k| -> Result<_> {
        let t = a.lerp(b, nodes[k])?;
        let dec = spectral_decompose(&t)?;
        let d = derivative_spectra(f, &dec)?;
        let (p, q, r) = gap_objective(&dec, &d);
        Ok((dec, p, q, r))
    })?;
    let mut linear = SymmetricMatrix::zeros(a.dim());
    let mut products = Vec::with_capacity(pieces.len());
    let mut decs = Vec::with_capacity(pieces.len());
    for ((dec, p, q, r), &w) in pieces.into_iter().zip(rule.weights()) {
        linear.add_scaled_assign(w, &p)?;
        products.push((w, q, r));
        decs.push(dec);
    }
    Ok(XiObjective {
        objective: GapObjective { linear, products },
        node_decompositions: decs,
    })
}

/// ξ along `Tᵥ = (1−v)A + vB`, discretized by `rule`.
pub fn xi_refinement(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    rule: &QuadratureRule,
    restarts: usize,
) -> Result<BoundConstants> {
    xi_refinement_with(f, a, b, rule, &SphereSearch::default().with_restarts(restarts))
}

pub fn xi_refinement_with(
    f: &ScalarFunction,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    rule: &QuadratureRule,
    search: &SphereSearch,
) -> Result<BoundConstants> {
    if search.restarts < 1 {
        return Err(Error::InvalidArgument("xi search needs at least one restart".into()));
    }
    let xi = xi_objective(f, a, b, rule)?;
    let n = a.dim();

    // Seed: best eigen-axis or two-point combination in the eigenbasis of (A+B)/2.
    let mid = spectral_decompose(&a.lerp(b, 0.5)?)?;
    let mut seed = mid.eigenvector(0);
    let mut seed_value = xi.objective.value(&seed);
    for i in 0..n {
        for j in i..n {
            let x = mid.from_eigenbasis(&edge_vector(n, i, j));
            let v = xi.objective.value(&x);
            if v > seed_value {
                seed_value = v;
                seed = x;
            }
        }
    }
    let opt = maximize(&xi.objective, Some(&seed), search);
    let (value, x) = if opt.value > seed_value {
        (opt.value, opt.x)
    } else {
        (seed_value, seed)
    };

    // Sup of the integral is at most the integral of the per-node sups.
    let per_node = par::try_map_indexed(xi.node_decompositions.len(), |k| -> Result<f64> {
        let dec = &xi.node_decompositions[k];
        let d = derivative_spectra(f, dec)?;
        let (edge, _, _) = best_edge(&dec.eigenvalues, &d);
        if n <= 2 {
            return Ok(edge);
        }
        let (v, _, _) = gap_supremum(f, &dec.reconstruct(), &SphereSearch::default().with_restarts(0))?;
        Ok(v.max(edge))
    })?;
    let upper: f64 = per_node.iter().zip(rule.weights()).map(|(v, w)| v * w).sum();

    Ok(BoundConstants {
        kind: BoundKind::Xi,
        value,
        argmax_witness: Witness::UnitVector(x),
        method: format!("sphere-ascent({} restarts, start {})", search.restarts, opt.start),
        certified_lower: value,
        chord: None,
        upper_check: Some(upper),
    })
}

/// `⟨Af'(A)x,x⟩ − ⟨Ax,x⟩⟨f'(A)x,x⟩` for a unit vector `x`.
pub fn covariance_gap(f: &ScalarFunction, a: &SymmetricMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: x.len(),
        });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!("x must be a unit vector, has norm {norm}")));
    }
    let dec = spectral_decompose(a)?;
    let d = derivative_spectra(f, &dec)?;
    let (p, q, r) = gap_objective(&dec, &d);
    Ok(p.quad_form(x) - r.quad_form(x) * q.quad_form(x))
}
