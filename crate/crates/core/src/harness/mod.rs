//! Fixtures, seeded random ensembles and suite orchestration.

mod suite;

pub use suite::{exit_code, run_suite, write_report, CheckerSummary, FixtureResult, SuiteConfig, SuiteReport, Timing};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matcore::SymmetricMatrix;
use crate::scalarfn::{builtin, ScalarFunction};

/// The 2×2 pair and `t³` for which the operator chain breaks.
pub fn counterexample_fixture() -> (SymmetricMatrix, SymmetricMatrix, ScalarFunction) {
    let a = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).expect("fixture");
    let b = SymmetricMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).expect("fixture");
    (a, b, builtin("cube").expect("fixture"))
}

/// ChaCha8 keyed by `root`, positioned on stream `stream`.
pub fn stream_rng(root: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng
}

/// Haar-distributed orthogonal matrix (row-major) from Gram–Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    // Columns are orthonormalized one at a time; redraw on (improbable) collapse.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(x, ci)| *x -= p * ci);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    let mut q = vec![0.0; n * n];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            q[i * n + j] = c[i];
        }
    }
    q
}

/// `Q diag(d) Qᵀ`.
pub fn conjugate(q: &[f64], diag: &[f64]) -> SymmetricMatrix {
    let n = diag.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..n).map(|k| q[i * n + k] * diag[k] * q[j * n + k]).sum();
            out[i * n + j] = s;
            out[j * n + i] = s;
        }
    }
    SymmetricMatrix::new(n, out).expect("conjugate of a finite diagonal")
}

fn check_window(window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidInterval { lo, hi })
    }
}

/// Eigenvalues uniform in `[lo, hi)`, rotated by a Haar orthogonal matrix.
pub fn random_symmetric_with<R: Rng + ?Sized>(dim: usize, window: (f64, f64), rng: &mut R) -> Result<SymmetricMatrix> {
    check_window(window)?;
    if dim == 0 {
        return Err(Error::Shape("dimension must be at least 1".into()));
    }
    let diag: Vec<f64> = (0..dim).map(|_| rng.random_range(window.0..window.1)).collect();
    let q = random_orthogonal(dim, rng);
    Ok(conjugate(&q, &diag))
}

pub fn random_symmetric(dim: usize, window: (f64, f64), seed: u64) -> Result<SymmetricMatrix> {
    random_symmetric_with(dim, window, &mut stream_rng(seed, 0))
}

/// Pair `(A, B)` for instance `stream` of the root `seed`.
pub fn random_pair(dim: usize, window: (f64, f64), seed: u64, stream: u64) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
    let mut rng = stream_rng(seed, stream);
    let a = random_symmetric_with(dim, window, &mut rng)?;
    let b = random_symmetric_with(dim, window, &mut rng)?;
    Ok((a, b))
}
