//! Dense real symmetric matrices: Jacobi eigensolver, functional calculus,
//! Loewner order, operator norm and absolute value.
//!
//! Matrices here stand in for self adjoint operators on a finite-dimensional
//! real Hilbert space. Every matrix is stored full (row-major) and is
//! symmetrized on construction, so all downstream code may assume exact
//! symmetry.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalarfn::ScalarFunction;

/// Asymmetry allowed on input, relative to `max(1, max |a_ij|)`.
pub const ASYMMETRY_TOL: f64 = 1e-8;
/// Jacobi stops once the off-diagonal Frobenius norm is below this times `‖A‖_F`.
pub const JACOBI_REL_THRESHOLD: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Base Loewner slack, scaled by `max(1, ‖A‖, ‖B‖)` in [`default_loewner_tol`].
pub const LOEWNER_BASE_TOL: f64 = 1e-9;

/// Real symmetric `dim × dim` matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

/// On-disk form: `{"dim": n, "rows": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixFile> for SymmetricMatrix {
    type Error = Error;

    fn try_from(file: MatrixFile) -> Result<Self> {
        if file.rows.len() != file.dim {
            return Err(Error::Shape(format!(
                "dim is {} but {} rows were given",
                file.dim,
                file.rows.len()
            )));
        }
        SymmetricMatrix::from_rows(&file.rows)
    }
}

impl From<SymmetricMatrix> for MatrixFile {
    fn from(m: SymmetricMatrix) -> Self {
        MatrixFile {
            dim: m.dim,
            rows: m.rows(),
        }
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricMatrix")
            .field("dim", &self.dim)
            .field("rows", &self.rows())
            .finish()
    }
}

impl SymmetricMatrix {
    /// Builds from row-major entries, rejecting non-finite values and
    /// asymmetry beyond [`ASYMMETRY_TOL`]; the stored matrix is `(Mᵀ + M)/2`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        let scale = entries.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let mut asymmetry = 0.0_f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                asymmetry = asymmetry.max((entries[i * dim + j] - entries[j * dim + i]).abs());
            }
        }
        if asymmetry > ASYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self::symmetrized(dim, entries))
    }

    fn symmetrized(dim: usize, mut entries: Vec<f64>) -> Self {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
                entries[i * dim + j] = avg;
                entries[j * dim + i] = avg;
            }
        }
        SymmetricMatrix { dim, entries }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    dim
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        Self::from_diag(&vec![c; dim])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(SymmetricMatrix {
            dim: self.dim,
            entries,
        })
    }

    /// Weighted mean `(1−t)·self + t·other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Result<Self> {
        self.combine(1.0 - t, other, t)
    }

    pub fn scale(&self, c: f64) -> Self {
        SymmetricMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    /// `self + c·I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] += c;
        }
        m
    }

    /// `self += w·other`, in place.
    pub fn add_scaled_assign(&mut self, w: f64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        for (x, y) in self.entries.iter_mut().zip(&other.entries) {
            *x += w * y;
        }
        Ok(())
    }

    /// Dense product `self · other` (row-major, generally not symmetric).
    pub fn matmul(&self, other: &Self) -> Result<Vec<f64>> {
        self.check_dim(other)?;
        Ok(matmul_raw(self.dim, &self.entries, &other.entries))
    }

    /// Product of two matrices known to commute, symmetrized.
    pub fn commuting_product(&self, other: &Self) -> Result<Self> {
        let prod = self.matmul(other)?;
        Ok(Self::symmetrized(self.dim, prod))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.dim)
            .map(|row| dot(row, x))
            .collect()
    }

    /// `⟨Ax, x⟩`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(&self.mul_vec(x), x)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |acc, (x, y)| acc.max((x - y).abs())))
    }

    /// SHA-256 over the dimension and the little-endian entry bytes.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        self.feed_digest(&mut h);
        hex::encode(h.finalize())
    }

    pub(crate) fn feed_digest(&self, h: &mut Sha256) {
        h.update((self.dim as u64).to_le_bytes());
        for x in &self.entries {
            h.update(x.to_le_bytes());
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json_str(&s)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn matmul_raw(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as
/// the columns of `eigenvectors` (row-major `dim × dim`).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<f64>,
    pub sweeps: usize,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Column `k` of `U`.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.eigenvectors[i * n + k]).collect()
    }

    /// `U diag(values) Uᵀ`.
    pub fn reconstruct_with(&self, values: &[f64]) -> SymmetricMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += u[i * n + k] * values[k] * u[j * n + k];
                }
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        SymmetricMatrix {
            dim: n,
            entries: out,
        }
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// `U g(Λ) Uᵀ` for an infallible scalar map.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.reconstruct_with(&vals)
    }

    /// Coordinates `Uᵀx` of `x` in the eigenbasis.
    pub fn to_eigenbasis(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|k| (0..n).map(|i| self.eigenvectors[i * n + k] * x[i]).sum())
            .collect()
    }

    /// `Uy`.
    pub fn from_eigenbasis(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| dot(&self.eigenvectors[i * n..(i + 1) * n], y))
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Cyclic Jacobi eigensolver with a fixed `(p, q)` sweep order.
pub fn spectral_decompose(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim;
    let mut m = a.entries.clone();
    let mut v = SymmetricMatrix::identity(n).entries;

    let norm = a.frobenius_norm();
    let threshold = JACOBI_REL_THRESHOLD * norm;
    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += m[p * n + q] * m[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&m);
    while off > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                dim: n,
                sweeps,
                residual: off,
                digest: a.digest()[..16].to_string(),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, n, p, q, c, s);
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        off = off_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| m[k * n + k]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[i * n + new_k] = v[i * n + old_k];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

// JᵀMJ for the plane rotation in (p, q).
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = c * mkp - s * mkq;
        m[k * n + q] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[p * n + k];
        let mqk = m[q * n + k];
        m[p * n + k] = c * mpk - s * mqk;
        m[q * n + k] = s * mpk + c * mqk;
    }
}

/// Functional calculus `f(A) = U f(Λ) Uᵀ`.
pub fn apply_function(a: &SymmetricMatrix, f: &ScalarFunction) -> Result<SymmetricMatrix> {
    let dec = spectral_decompose(a)?;
    apply_to_decomposition(&dec, f)
}

pub fn apply_to_decomposition(
    dec: &SpectralDecomposition,
    f: &ScalarFunction,
) -> Result<SymmetricMatrix> {
    let vals = dec
        .eigenvalues
        .iter()
        .map(|&l| f.eval(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(dec.reconstruct_with(&vals))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoewnerRelation {
    LessEqual,
    GreaterEqual,
    Equal,
    Incomparable,
}

/// Outcome of comparing `A` against `B`; the eigenvalue extremes are those
/// of `B − A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub relation: LoewnerRelation,
    pub min_eig_of_difference: f64,
    pub max_eig_of_difference: f64,
    pub tolerance_used: f64,
}

impl LoewnerVerdict {
    /// Whether `A ≤ B` within the tolerance.
    pub fn a_le_b(&self) -> bool {
        matches!(
            self.relation,
            LoewnerRelation::LessEqual | LoewnerRelation::Equal
        )
    }
}

/// `1e-9 · max(1, ‖A‖, ‖B‖)`.
pub fn default_loewner_tol(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    Ok(LOEWNER_BASE_TOL * 1f64.max(operator_norm(a)?).max(operator_norm(b)?))
}

/// Classifies `A` against `B` from the spectrum of `B − A`.
pub fn loewner_compare(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Result<LoewnerVerdict> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let diff = b.sub(a)?;
    let dec = spectral_decompose(&diff)?;
    Ok(classify(dec.min(), dec.max(), tol))
}

pub(crate) fn classify(min: f64, max: f64, tol: f64) -> LoewnerVerdict {
    let b_ge_a = min >= -tol;
    let b_le_a = max <= tol;
    let relation = match (b_ge_a, b_le_a) {
        (true, true) => LoewnerRelation::Equal,
        (true, false) => LoewnerRelation::LessEqual,
        (false, true) => LoewnerRelation::GreaterEqual,
        (false, false) => LoewnerRelation::Incomparable,
    };
    LoewnerVerdict {
        relation,
        min_eig_of_difference: min,
        max_eig_of_difference: max,
        tolerance_used: tol,
    }
}

/// `‖A‖ = max |λ|`.
pub fn operator_norm(a: &SymmetricMatrix) -> Result<f64> {
    let dec = spectral_decompose(a)?;
    Ok(dec.min().abs().max(dec.max().abs()))
}

/// `|A| = U |Λ| Uᵀ`.
pub fn absolute_value(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    Ok(spectral_decompose(a)?.map(f64::abs))
}

/// Smallest and largest eigenvalue over all matrices.
pub fn spectral_bounds(matrices: &[&SymmetricMatrix]) -> Result<(f64, f64)> {
    if matrices.is_empty() {
        return Err(Error::InvalidArgument(
            "spectral_bounds needs at least one matrix".into(),
        ));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in matrices {
        let dec = spectral_decompose(m)?;
        lo = lo.min(dec.min());
        hi = hi.max(dec.max());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarfn::{builtin, ScalarFunction};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn fixture_a() -> SymmetricMatrix {
        m(&[&[2.0, 1.0], &[1.0, 1.0]])
    }

    fn fixture_b() -> SymmetricMatrix {
        m(&[&[1.0, 0.0], &[0.0, 0.0]])
    }

    fn check_decomposition(a: &SymmetricMatrix, dec: &SpectralDecomposition) {
        let n = a.dim();
        let u = &dec.eigenvectors;
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|k| u[k * n + i] * u[k * n + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-10, "UᵀU[{i}][{j}] = {g}");
            }
        }
        assert!(dec.reconstruct().max_abs_diff(a).unwrap() < 1e-10);
        assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn construction_symmetrizes_small_asymmetry() {
        let a = SymmetricMatrix::new(2, vec![1.0, 2.0 + 1e-10, 2.0, 3.0]).unwrap();
        assert_eq!(a.get(0, 1), a.get(1, 0));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            SymmetricMatrix::new(2, vec![1.0, 2.0, 2.1, 3.0]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            SymmetricMatrix::new(2, vec![1.0, f64::NAN, f64::NAN, 3.0]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(SymmetricMatrix::new(2, vec![1.0; 3]).is_err());
        assert!(SymmetricMatrix::new(0, vec![]).is_err());
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let a = fixture_a();
        let s = a.to_json_string();
        assert_eq!(s, r#"{"dim":2,"rows":[[2.0,1.0],[1.0,1.0]]}"#);
        assert_eq!(SymmetricMatrix::from_json_str(&s).unwrap(), a);
        assert!(SymmetricMatrix::from_json_str(r#"{"dim":2,"rows":[[1,2,3],[2,1,0]]}"#).is_err());
        assert!(SymmetricMatrix::from_json_str(r#"{"dim":3,"rows":[[1,0],[0,1]]}"#).is_err());
        assert!(SymmetricMatrix::from_json_str(r#"{"dim":1,"rows":[[1e999]]}"#).is_err());
    }

    #[test]
    fn decompose_diagonal() {
        let a = SymmetricMatrix::from_diag(&[3.0, 1.0]);
        let dec = spectral_decompose(&a).unwrap();
        assert_eq!(dec.eigenvalues, vec![1.0, 3.0]);
        assert_eq!(dec.eigenvector(0).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
        assert_eq!(dec.eigenvector(1).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1.0, 0.0]);
    }

    #[test]
    fn decompose_golden_ratio_matrix() {
        let a = fixture_a();
        let dec = spectral_decompose(&a).unwrap();
        let s5 = 5f64.sqrt();
        assert_abs_diff_eq!(dec.eigenvalues[0], (3.0 - s5) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dec.eigenvalues[1], (3.0 + s5) / 2.0, epsilon = 1e-14);
        check_decomposition(&a, &dec);
    }

    #[test]
    fn decompose_identity() {
        let a = SymmetricMatrix::identity(4);
        let dec = spectral_decompose(&a).unwrap();
        assert_eq!(dec.eigenvalues, vec![1.0; 4]);
        check_decomposition(&a, &dec);
    }

    #[test]
    fn decompose_zero_matrix() {
        let dec = spectral_decompose(&SymmetricMatrix::zeros(3)).unwrap();
        assert_eq!(dec.eigenvalues, vec![0.0; 3]);
        assert_eq!(dec.sweeps, 0);
    }

    #[test]
    fn cube_via_functional_calculus() {
        let cube = builtin("cube").unwrap();
        let r = apply_function(&fixture_a(), &cube).unwrap();
        assert!(r.max_abs_diff(&m(&[&[13.0, 8.0], &[8.0, 5.0]])).unwrap() < 1e-12);
    }

    #[test]
    fn identity_and_constant_functions() {
        let a = fixture_a();
        let id = builtin("identity").unwrap();
        let one = builtin("one").unwrap();
        assert!(apply_function(&a, &id).unwrap().max_abs_diff(&a).unwrap() < 1e-12);
        assert!(apply_function(&a, &one)
            .unwrap()
            .max_abs_diff(&SymmetricMatrix::identity(2))
            .unwrap()
            < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = apply_function(&SymmetricMatrix::from_diag(&[1.0, 4.0]), &builtin("sqrt").unwrap()).unwrap();
        assert!(r.max_abs_diff(&SymmetricMatrix::from_diag(&[1.0, 2.0])).unwrap() < 1e-15);
    }

    #[test]
    fn domain_error_names_eigenvalue() {
        let inv = builtin("inv").unwrap();
        let err = apply_function(&SymmetricMatrix::from_diag(&[-1.0, 2.0]), &inv).unwrap_err();
        match err {
            Error::Domain { value, .. } => assert_eq!(value, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn loewner_examples() {
        let z = SymmetricMatrix::zeros(2);
        let i = SymmetricMatrix::identity(2);
        assert_eq!(loewner_compare(&z, &i, 1e-9).unwrap().relation, LoewnerRelation::LessEqual);
        assert_eq!(loewner_compare(&i, &z, 1e-9).unwrap().relation, LoewnerRelation::GreaterEqual);
        let a = fixture_a();
        assert_eq!(loewner_compare(&a, &a, 1e-9).unwrap().relation, LoewnerRelation::Equal);
        let integral = m(&[&[31.0 / 6.0, 2.5], &[2.5, 4.0 / 3.0]]);
        let endpoint_mean = m(&[&[7.0, 4.0], &[4.0, 2.5]]);
        let v = loewner_compare(&integral, &endpoint_mean, 1e-9).unwrap();
        assert_eq!(v.relation, LoewnerRelation::Incomparable);
        assert!(loewner_compare(&a, &z, -1.0).is_err());
        assert!(loewner_compare(&a, &SymmetricMatrix::zeros(3), 0.0).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(operator_norm(&SymmetricMatrix::from_diag(&[-3.0, 2.0])).unwrap(), 3.0);
        assert_abs_diff_eq!(operator_norm(&fixture_a()).unwrap(), (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_eq!(operator_norm(&SymmetricMatrix::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn absolute_value_examples() {
        let r = absolute_value(&SymmetricMatrix::from_diag(&[-2.0, 1.0])).unwrap();
        assert_eq!(r, SymmetricMatrix::from_diag(&[2.0, 1.0]));
        let a = fixture_a();
        assert!(absolute_value(&a).unwrap().max_abs_diff(&a).unwrap() < 1e-12);
        let swap = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(absolute_value(&swap)
            .unwrap()
            .max_abs_diff(&SymmetricMatrix::identity(2))
            .unwrap()
            < 1e-12);
    }

    #[test]
    fn spectral_bounds_examples() {
        let a = SymmetricMatrix::from_diag(&[1.0, 3.0]);
        let b = SymmetricMatrix::from_diag(&[0.0, 2.0]);
        assert_eq!(spectral_bounds(&[&a, &b]).unwrap(), (0.0, 3.0));
        let (lo, hi) = spectral_bounds(&[&fixture_a(), &fixture_b()]).unwrap();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        let c = SymmetricMatrix::scalar(3, 1.7);
        assert_eq!(spectral_bounds(&[&c]).unwrap(), (1.7, 1.7));
        assert!(spectral_bounds(&[]).is_err());
    }

    fn arb_symmetric(max_dim: usize) -> impl Strategy<Value = SymmetricMatrix> {
        (1..=max_dim).prop_flat_map(|n| {
            proptest::collection::vec(-3.0..3.0f64, n * n).prop_map(move |v| {
                let mut e = v.clone();
                for i in 0..n {
                    for j in 0..n {
                        e[i * n + j] = v[i * n + j] + v[j * n + i];
                    }
                }
                SymmetricMatrix::new(n, e).unwrap()
            })
        })
    }

    fn arb_unit(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0..1.0f64, n).prop_filter_map("nonzero", |v| {
            let nrm = dot(&v, &v).sqrt();
            (nrm > 1e-3).then(|| v.iter().map(|x| x / nrm).collect())
        })
    }

    proptest! {
        #[test]
        fn decomposition_invariants(a in arb_symmetric(9)) {
            let dec = spectral_decompose(&a).unwrap();
            check_decomposition(&a, &dec);
        }

        #[test]
        fn polynomial_calculus_matches_direct_products(a in arb_symmetric(6)) {
            let cube = crate::scalarfn::polynomial(&[0.0, 0.0, 0.0, 1.0]).unwrap();
            let fa = apply_function(&a, &cube).unwrap();
            let a2 = a.matmul(&a).unwrap();
            let a3 = matmul_raw(a.dim(), &a2, a.entries());
            let scale = 1f64.max(operator_norm(&a).unwrap().powi(3));
            for (x, y) in fa.entries().iter().zip(&a3) {
                prop_assert!((x - y).abs() < 1e-9 * scale);
            }
            let fa_a = fa.matmul(&a).unwrap();
            let a_fa = a.matmul(&fa).unwrap();
            for (x, y) in fa_a.iter().zip(&a_fa) {
                prop_assert!((x - y).abs() < 1e-9 * scale);
            }
        }

        #[test]
        fn jensen_trace(a in arb_symmetric(5), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = a.dim();
            let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nrm = dot(&x, &x).sqrt().max(1e-12);
            x.iter_mut().for_each(|v| *v /= nrm);
            for name in ["square", "quartic", "exp", "abs"] {
                let f = builtin(name).unwrap();
                let fa = apply_function(&a, &f).unwrap();
                let lhs = f.eval(a.quad_form(&x)).unwrap();
                let rhs = fa.quad_form(&x);
                prop_assert!(lhs <= rhs + 1e-9 * 1f64.max(rhs.abs()), "{name}: {lhs} > {rhs}");
            }
        }

        #[test]
        fn calculus_preserves_pointwise_order(a in arb_symmetric(5)) {
            // |t| ≥ t and t² + 1 ≥ 2t pointwise.
            let abs = builtin("abs").unwrap();
            let id = builtin("identity").unwrap();
            let fa = apply_function(&a, &abs).unwrap();
            let ga = apply_function(&a, &id).unwrap();
            prop_assert!(loewner_compare(&ga, &fa, 1e-9).unwrap().a_le_b());
            let sq1 = apply_function(&a, &builtin("square").unwrap()).unwrap().shift(1.0);
            prop_assert!(loewner_compare(&a.scale(2.0), &sq1, 1e-9).unwrap().a_le_b());
        }

        #[test]
        fn norm_of_function_is_max_abs_image(a in arb_symmetric(6)) {
            let f = crate::scalarfn::polynomial(&[0.0, 0.0, 0.0, 1.0]).unwrap();
            let dec = spectral_decompose(&a).unwrap();
            let want = dec.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max((l * l * l).abs()));
            let got = operator_norm(&apply_function(&a, &f).unwrap()).unwrap();
            prop_assert!((got - want).abs() < 1e-10 * 1f64.max(want));
        }

        #[test]
        fn absolute_value_properties(a in arb_symmetric(6)) {
            let abs = absolute_value(&a).unwrap();
            prop_assert!(absolute_value(&abs).unwrap().max_abs_diff(&abs).unwrap() < 1e-10);
            prop_assert!(spectral_decompose(&abs).unwrap().min() >= -1e-10);
            let sq = abs.matmul(&abs).unwrap();
            let a2 = a.matmul(&a).unwrap();
            let scale = 1f64.max(operator_norm(&a).unwrap().powi(2));
            for (x, y) in sq.iter().zip(&a2) {
                prop_assert!((x - y).abs() < 1e-9 * scale);
            }
        }

        #[test]
        fn tolerance_monotone(a in arb_symmetric(4), b_seed in arb_symmetric(4), t1 in 0.0..1.0f64, extra in 0.0..1.0f64) {
            if a.dim() == b_seed.dim() {
                let v1 = loewner_compare(&a, &b_seed, t1).unwrap();
                let v2 = loewner_compare(&a, &b_seed, t1 + extra).unwrap();
                if v1.a_le_b() { prop_assert!(v2.a_le_b()); }
            }
        }

        #[test]
        fn quad_form_in_range(a in arb_symmetric(5), x in arb_unit(5)) {
            if a.dim() == x.len() {
                let dec = spectral_decompose(&a).unwrap();
                let q = a.quad_form(&x);
                prop_assert!(q >= dec.min() - 1e-12 && q <= dec.max() + 1e-12);
            }
        }
    }

    #[test]
    fn types_are_send_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ScalarFunction>();
        assert_send_sync::<SymmetricMatrix>();
    }
}
