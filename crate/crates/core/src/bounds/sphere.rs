//! Projected gradient ascent on the unit sphere for the covariance-type gap
//! objectives behind δ and ξ.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::matcore::{dot, SymmetricMatrix};
use crate::par;

pub const DEFAULT_RESTARTS: usize = 16;
pub const GRAD_TOL: f64 = 1e-10;
pub const MAX_ITERS: usize = 500;

/// `F(x) = ⟨Px, x⟩ − Σₖ wₖ ⟨Qₖx, x⟩⟨Rₖx, x⟩` on the unit sphere.
#[derive(Clone, Debug)]
pub struct GapObjective {
    pub linear: SymmetricMatrix,
    pub products: Vec<(f64, SymmetricMatrix, SymmetricMatrix)>,
}

impl GapObjective {
    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.linear.quad_form(x);
        for (w, q, r) in &self.products {
            v -= w * q.quad_form(x) * r.quad_form(x);
        }
        v
    }

    /// Euclidean gradient together with the value.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let px = self.linear.mul_vec(x);
        let mut value = dot(&px, x);
        let mut grad: Vec<f64> = px.iter().map(|v| 2.0 * v).collect();
        for (w, q, r) in &self.products {
            let qx = q.mul_vec(x);
            let rx = r.mul_vec(x);
            let qq = dot(&qx, x);
            let rr = dot(&rx, x);
            value -= w * qq * rr;
            for i in 0..grad.len() {
                grad[i] -= 2.0 * w * (qq * rx[i] + rr * qx[i]);
            }
        }
        (value, grad)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereSearch {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for SphereSearch {
    fn default() -> Self {
        SphereSearch {
            restarts: DEFAULT_RESTARTS,
            seed: 0x5eed,
            max_iters: MAX_ITERS,
            grad_tol: GRAD_TOL,
        }
    }
}

impl SphereSearch {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereOptimum {
    pub value: f64,
    pub x: Vec<f64>,
    /// Index of the start that produced the optimum (0 is the seeded start).
    pub start: usize,
    pub converged: bool,
}

pub(crate) fn normalize(v: &mut [f64]) -> bool {
    let n = dot(v, v).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Random unit vector from restart stream `stream` of the root `seed`.
pub fn random_unit(dim: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        if normalize(&mut v) {
            return v;
        }
    }
}

/// Ascent from one start with backtracking (step halving on failure,
/// doubling on success).
pub fn ascend(obj: &GapObjective, start: &[f64], max_iters: usize, grad_tol: f64) -> SphereOptimum {
    let mut x = start.to_vec();
    if !normalize(&mut x) {
        x = vec![0.0; obj.dim()];
        x[0] = 1.0;
    }
    let (mut fx, mut g) = obj.value_and_gradient(&x);
    let mut step = 1.0;
    let mut converged = false;
    for _ in 0..max_iters {
        let radial = dot(&g, &x);
        let rg: Vec<f64> = g.iter().zip(&x).map(|(gi, xi)| gi - radial * xi).collect();
        if dot(&rg, &rg).sqrt() < grad_tol {
            converged = true;
            break;
        }
        let mut moved = false;
        while step > 1e-14 {
            let mut cand: Vec<f64> = x.iter().zip(&rg).map(|(xi, gi)| xi + step * gi).collect();
            if normalize(&mut cand) {
                let (fc, gc) = obj.value_and_gradient(&cand);
                if fc > fx {
                    x = cand;
                    fx = fc;
                    g = gc;
                    step = (step * 2.0).min(1e6);
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            // No ascent direction left at machine precision.
            converged = true;
            break;
        }
    }
    SphereOptimum {
        value: fx,
        x,
        start: 0,
        converged,
    }
}

/// Runs the ascent from `seeded` (if given) and from `search.restarts`
/// random starts; returns the best. Start `k ≥ 1` always uses random stream
/// `k`, so raising the restart count can only add candidates.
pub fn maximize(obj: &GapObjective, seeded: Option<&[f64]>, search: &SphereSearch) -> SphereOptimum {
    let dim = obj.dim();
    let runs = par::map_indexed(search.restarts + 1, |k| {
        let start = if k == 0 {
            match seeded {
                Some(s) => s.to_vec(),
                None => random_unit(dim, search.seed, 0),
            }
        } else {
            random_unit(dim, search.seed, k as u64)
        };
        let mut opt = ascend(obj, &start, search.max_iters, search.grad_tol);
        opt.start = k;
        opt
    });
    runs.into_iter()
        .reduce(|best, cur| if cur.value > best.value { cur } else { best })
        .expect("at least one start")
}
