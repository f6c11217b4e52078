//! Independent oracles: plain nested-vector arithmetic and sampling, no
//! eigensolver or quadrature from the library.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hhlab::SymmetricMatrix;

pub type Dense = Vec<Vec<f64>>;

pub fn dense(m: &SymmetricMatrix) -> Dense {
    m.rows()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn lin(a: &Dense, x: f64, b: &Dense, y: f64) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(p, q)| x * p + y * q).collect())
        .collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

pub fn quad(a: &Dense, x: &[f64]) -> f64 {
    a.iter()
        .zip(x)
        .map(|(row, xi)| xi * row.iter().zip(x).map(|(r, xj)| r * xj).sum::<f64>())
        .sum()
}

/// `A² + (AD + DA)/2 + D²/3` with `D = B − A`: the expanded integral of
/// `((1−t)A + tB)²` over `[0, 1]`.
pub fn square_segment_closed_form(a: &Dense, b: &Dense) -> Dense {
    let d = lin(b, 1.0, a, -1.0);
    let a2 = mul(a, a);
    let ad = mul(a, &d);
    let da = mul(&d, a);
    let d2 = mul(&d, &d);
    let cross = lin(&ad, 0.5, &da, 0.5);
    lin(&lin(&a2, 1.0, &cross, 1.0), 1.0, &d2, 1.0 / 3.0)
}

/// Matrix powers for the monomial `t^p`, `p ≥ 1`: returns `(C f'(C), f'(C))`.
pub fn monomial_gap_pieces(c: &Dense, p: u32) -> (Dense, Dense) {
    let n = c.len();
    let mut pow: Dense = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..p - 1 {
        pow = mul(&pow, c);
    }
    let fprime = lin(&pow, p as f64, &pow, 0.0);
    (mul(c, &fprime), fprime)
}

/// Largest sampled value of `⟨Cf'(C)x,x⟩ − ⟨Cx,x⟩⟨f'(C)x,x⟩` over uniformly
/// random unit vectors: a lower bound for the supremum.
pub fn sphere_mc_lower_bound(c: &Dense, cfp: &Dense, fp: &Dense, samples: usize, seed: u64) -> f64 {
    let n = c.len();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        // Box–Muller for Gaussian coordinates.
        for xi in x.iter_mut() {
            let u: f64 = 1.0 - rng.random::<f64>();
            let v: f64 = rng.random();
            *xi = (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos();
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        let val = quad(cfp, &x) - quad(c, &x) * quad(fp, &x);
        best = best.max(val);
    }
    best
}

/// Symmetric positive definite `GGᵀ/n + shift·I` with uniform entries.
pub fn random_spd(n: usize, shift: f64, rng: &mut StdRng) -> Dense {
    let g: Dense = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| g[i][k] * g[j][k]).sum::<f64>() / n as f64;
        }
        out[i][i] += shift;
    }
    out
}

pub fn to_matrix(d: &Dense) -> SymmetricMatrix {
    SymmetricMatrix::from_rows(d).unwrap()
}

/// Entrywise equality with a hand-written rational matrix.
pub fn close_to(m: &SymmetricMatrix, expected: &[[f64; 2]; 2], tol: f64) -> bool {
    (0..2).all(|i| (0..2).all(|j| (m.get(i, j) - expected[i][j]).abs() <= tol))
}
