//! Numerical checks of operator Hermite–Hadamard type inequalities for real
//! symmetric matrices under the Loewner order.
//!
//! Build with `--no-default-features` for a purely sequential build.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod checks;
pub mod error;
pub mod harness;
pub mod matcore;
pub mod par;
pub mod quad;
pub mod scalarfn;

pub use bounds::{
    alpha_constant, beta_constant, delta_refinement, xi_refinement, BoundConstants, BoundKind, SearchOptions, Witness,
};
pub use checks::{CheckOptions, InequalityReport, Link, TheoremId};
pub use error::{Error, Result};
pub use matcore::{apply_function, loewner_compare, spectral_decompose, LoewnerRelation, SymmetricMatrix};
pub use quad::{segment_integral, QuadratureRule};
pub use scalarfn::{builtin, ConvexityClass, ScalarFunction};
