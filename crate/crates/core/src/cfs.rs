//! Closed-form projective excludability test for three pure states in three
//! dimensions (the Caves-Fuchs-Schack inequality).
//!
//! With jᵢ the pairwise overlap magnitudes, the states can be perfectly
//! excluded by a projective measurement iff
//!
//! ```text
//! j1² + j2² + j3² + 2·j1·j2·j3 ≤ 1
//! ```
//!
//! The inequality is non-strict: the boundary lhs = 1 is excludable.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{gram_magnitudes, CVec, Complex64, Overlaps, PureState};

/// Overlap magnitudes slightly above one (from rounding) are accepted up to this slack.
pub const OVERLAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfsReport {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub lhs: f64,
    pub excludable: bool,
    /// 1 − lhs
    pub margin: f64,
}

pub fn cfs_lhs(j1: f64, j2: f64, j3: f64) -> Result<f64> {
    for (name, j) in [("j1", j1), ("j2", j2), ("j3", j3)] {
        if !(0.0..=1.0 + OVERLAP_SLACK).contains(&j) {
            return Err(invalid(format!("{name} = {j} is outside [0, 1]")));
        }
    }
    Ok(j1 * j1 + j2 * j2 + j3 * j3 + 2.0 * j1 * j2 * j3)
}

/// Decision from overlap magnitudes alone.
pub fn cfs_from_overlaps(overlaps: Overlaps, eps: f64) -> Result<CfsReport> {
    if !(eps >= 0.0) {
        return Err(invalid(format!("tolerance must be nonnegative, got {eps}")));
    }
    let Overlaps { j1, j2, j3 } = overlaps;
    let lhs = cfs_lhs(j1, j2, j3)?;
    Ok(CfsReport {
        j1,
        j2,
        j3,
        lhs,
        excludable: lhs <= 1.0 + eps,
        margin: 1.0 - lhs,
    })
}

pub fn cfs_excludable(a: &PureState, b: &PureState, c: &PureState, eps: f64) -> Result<CfsReport> {
    let overlaps = gram_magnitudes(a, b, c)?;
    if a.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            dim: a.dim(),
            reason: "the criterion applies to three states in three dimensions",
        });
    }
    cfs_from_overlaps(overlaps, eps)
}

/// Three states in C³ with real nonnegative overlaps ⟨a|b⟩ = j1, ⟨a|c⟩ = j2,
/// ⟨b|c⟩ = j3, via Cholesky factorization of their Gram matrix.
///
/// Fails when the Gram matrix is not positive semidefinite.
pub fn states_with_overlaps(j1: f64, j2: f64, j3: f64) -> Result<[PureState; 3]> {
    cfs_lhs(j1, j2, j3)?;
    let (j1, j2, j3) = (j1.min(1.0), j2.min(1.0), j3.min(1.0));
    let tol = 1e-12;

    let b2_sq = 1.0 - j1 * j1;
    let b2 = b2_sq.max(0.0).sqrt();
    let c2 = if b2 > tol {
        (j3 - j1 * j2) / b2
    } else if (j3 - j2).abs() <= 1e-9 {
        0.0
    } else {
        return Err(invalid("overlaps are not realizable: a = b forces j2 = j3"));
    };
    let c3_sq = 1.0 - j2 * j2 - c2 * c2;
    if c3_sq < -1e-9 {
        return Err(invalid(format!(
            "overlaps ({j1}, {j2}, {j3}) have no Gram realization"
        )));
    }
    let c3 = c3_sq.max(0.0).sqrt();

    let real = |xs: [f64; 3]| -> Result<PureState> {
        PureState::normalized(CVec::new(
            xs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )?)
    };
    Ok([
        real([1.0, 0.0, 0.0])?,
        real([j1, b2, 0.0])?,
        real([j2, c2, c3])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_values() {
        assert_eq!(cfs_lhs(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(cfs_lhs(1.0, 1.0, 1.0).unwrap(), 5.0);
        // 3·0.25 + 2·0.125, every term exact in binary floating point
        assert_eq!(cfs_lhs(0.5, 0.5, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_overlaps() {
        assert!(cfs_lhs(-0.1, 0.0, 0.0).is_err());
        assert!(cfs_lhs(0.0, 1.01, 0.0).is_err());
        assert!(cfs_lhs(0.0, 0.0, f64::NAN).is_err());
        assert!(cfs_lhs(1.0 + 1e-10, 0.0, 0.0).is_ok());
    }

    #[test]
    fn orthonormal_and_identical_triples() {
        let e: Vec<_> = (0..3).map(|i| PureState::basis(3, i).unwrap()).collect();
        let r = cfs_excludable(&e[0], &e[1], &e[2], crate::EPS_ZERO).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.excludable);

        let r = cfs_excludable(&e[1], &e[1], &e[1], crate::EPS_ZERO).unwrap();
        assert_abs_diff_eq!(r.lhs, 5.0, epsilon = 1e-14);
        assert!(!r.excludable);
    }

    #[test]
    fn boundary_triple_is_excludable() {
        let [a, b, c] = states_with_overlaps(0.5, 0.5, 0.5).unwrap();
        let r = cfs_excludable(&a, &b, &c, crate::EPS_ZERO).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-15);
        assert!(r.excludable);
        assert!(
            cfs_from_overlaps(
                Overlaps {
                    j1: 0.5,
                    j2: 0.5,
                    j3: 0.5
                },
                0.0
            )
            .unwrap()
            .excludable
        );
    }

    #[test]
    fn wrong_dimension() {
        let a = PureState::basis(2, 0).unwrap();
        assert!(matches!(
            cfs_excludable(&a, &a, &a, 0.0),
            Err(Error::UnsupportedDimension { dim: 2, .. })
        ));
    }

    #[test]
    fn gram_realization_reproduces_overlaps() {
        for &(j1, j2, j3) in &[
            (0.5, 0.5, 0.5),
            (0.1, 0.7, 0.2),
            (0.0, 0.0, 0.0),
            (1.0, 0.3, 0.3),
        ] {
            let [a, b, c] = states_with_overlaps(j1, j2, j3).unwrap();
            let o = gram_magnitudes(&a, &b, &c).unwrap();
            assert_abs_diff_eq!(o.j1, j1, epsilon = 1e-12);
            assert_abs_diff_eq!(o.j2, j2, epsilon = 1e-12);
            assert_abs_diff_eq!(o.j3, j3, epsilon = 1e-12);
        }
        // j1 = j2 = 0 with j3 = 1 is fine, but j1 = j2 = 0.9 with j3 = 0 is not a Gram matrix.
        assert!(states_with_overlaps(0.9, 0.9, 0.0).is_err());
        assert!(states_with_overlaps(1.0, 0.3, 0.4).is_err());
    }
}
