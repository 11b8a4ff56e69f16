//! Seeded sampling of Haar-random states and unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

use super::{qr_orthonormalize, CMatrix, CVec, HermitianOperator, PureState};

/// The RNG used everywhere in the toolkit.
pub type ToolkitRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ToolkitRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 mixing of `(base, stream)` into an independent seed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        ^ stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector: normalized vector of i.i.d. complex Gaussians.
pub fn haar_random_state(dim: usize, seed: u64) -> Result<PureState> {
    haar_random_state_with(dim, &mut seeded_rng(seed))
}

pub fn haar_random_state_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(invalid("state dimension must be positive"));
    }
    loop {
        let v = CVec::from_entries_unchecked((0..dim).map(|_| complex_normal(rng)).collect());
        if v.norm() > 1e-150 {
            return PureState::normalized(v);
        }
    }
}

/// rows × cols matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar-random unitary (QR of a Ginibre matrix with positive R diagonal).
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    loop {
        if let Ok(q) = qr_orthonormalize(&ginibre(dim, dim, rng)) {
            return q;
        }
    }
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scaling).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&ginibre(dim, dim, rng))
}
