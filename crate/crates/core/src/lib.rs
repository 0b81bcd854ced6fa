//! Algebraic Hermitian and Kähler curvature tensors on a complex vector space,
//! together with the machinery needed to check sphere-average identities for
//! holomorphic sectional and bisectional curvature three ways: closed form,
//! exact monomial moments, and Monte Carlo.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command-line harness live in the `curvlab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curvature;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod sphere;
pub mod symgroup;

pub use num_complex::Complex64;

pub use curvature::{BlockDecomposition, CurvatureTensor, KahlerTensor, RicciSet, TensorNorms};
pub use error::{Error, Result};
pub use identities::IdentityResult;
pub use linalg::{ComplexMatrix, HermitianForm, MultiIndex};
pub use sphere::{McEstimate, MomentSpec};
pub use symgroup::{PartialTrace, Permutation, TensorEndomorphism, TraceRow};
