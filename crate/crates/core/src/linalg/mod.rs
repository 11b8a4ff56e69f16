//! Small dense complex linear algebra.
//!
//! Everything here works on matrices of dimension at most [`MAX_EIG_DIM`]. All
//! values are immutable once built; operations return new values.

mod eig;
mod matrix;
mod qr;
pub mod random;
mod vector;

pub(crate) use eig::jacobi;
pub use eig::{hermitian_eig, psd_project, EigDecomposition, MAX_EIG_DIM};
pub use matrix::{CMatrix, HermitianOperator, HERMITIAN_TOL};
pub use num_complex::Complex64;
pub use qr::{orthonormality_defect, qr_orthonormalize};
pub use random::{
    derive_seed, haar_random_state, haar_random_state_with, haar_random_unitary, seeded_rng,
};
pub use vector::{gram_magnitudes, CVec, Overlaps, PureState, NORM_TOL, PARSE_NORM_TOL};
