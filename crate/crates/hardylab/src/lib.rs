//! Numerical laboratory for second-order elliptic operators on masked grids:
//! weighted and divergence-form Dirichlet operators, their spectra, boundary
//! decay inequalities, domain-perturbation eigenvalue drift, and heat-kernel /
//! spectral-density strip bounds.

// Parameter guards use the `!(x > 0.0)` form so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

// Link the system BLAS/LAPACK used by the dense eigensolver.
use openblas_src as _;

pub mod error;
pub mod estimates;
pub mod geometry;
pub mod kernels;
pub mod operator;
pub mod perturbation;
pub mod spectral;

pub use error::{Error, Result};
