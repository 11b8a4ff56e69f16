//! Objective, Riemannian gradient and retraction on the manifold of complete
//! orthonormal frames (the unitary group), for f(V) = Σₖ |sₖ* vₖ|².

use crate::error::{Error, Result};
use crate::linalg::{qr_orthonormalize, CMatrix, CVec, Complex64, PureState};

use super::FrameAssignment;

/// The states paired with each outcome, as the columns of a matrix.
#[derive(Debug, Clone)]
pub(crate) struct Targets {
    s: CMatrix,
}

impl Targets {
    pub(crate) fn new(states: &[PureState], assignment: &FrameAssignment) -> Result<Self> {
        let n = assignment.n_outcomes();
        let dim = states.first().map(PureState::dim).unwrap_or(0);
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if dim != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dim,
            });
        }
        if let Some(&bad) = assignment.indices().iter().find(|&&i| i >= states.len()) {
            return Err(Error::Validation(format!(
                "assignment refers to missing state {bad}"
            )));
        }
        let cols: Vec<CVec> = assignment
            .indices()
            .iter()
            .map(|&i| states[i].vec().clone())
            .collect();
        Ok(Self {
            s: CMatrix::from_columns(&cols)?,
        })
    }

    pub(crate) fn dim(&self) -> usize {
        self.s.rows()
    }

    /// sₖ* vₖ for every outcome k.
    fn overlaps(&self, v: &CMatrix) -> Vec<Complex64> {
        let d = self.dim();
        (0..d)
            .map(|k| (0..d).map(|i| self.s[(i, k)].conj() * v[(i, k)]).sum())
            .collect()
    }

    pub(crate) fn objective(&self, v: &CMatrix) -> f64 {
        self.overlaps(v).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean gradient, column k = 2 sₖ (sₖ* vₖ).
    pub(crate) fn euclidean_gradient(&self, v: &CMatrix) -> CMatrix {
        let d = self.dim();
        let ov = self.overlaps(v);
        let mut g = CMatrix::zeros(d, d);
        for k in 0..d {
            for i in 0..d {
                g[(i, k)] = self.s[(i, k)] * ov[k] * 2.0;
            }
        }
        g
    }

    /// Projection of the Euclidean gradient onto the tangent space {VΩ : Ω* = −Ω}.
    pub(crate) fn riemannian_gradient(&self, v: &CMatrix) -> CMatrix {
        let g = self.euclidean_gradient(v);
        tangent_projection(v, &g)
    }
}

/// (Z − V Z* V) / 2, the orthogonal projection of Z onto the tangent space at V.
pub(crate) fn tangent_projection(v: &CMatrix, z: &CMatrix) -> CMatrix {
    let vzv = &(v * &z.adjoint()) * v;
    (z - &vzv).scale(0.5)
}

/// QR retraction: the Q factor of V + ξ.
pub(crate) fn retract(v: &CMatrix, xi: &CMatrix) -> Result<CMatrix> {
    qr_orthonormalize(&(v + xi))
}

/// Objective Σₖ |s_{a(k)}* vₖ|² for arbitrary vectors (no orthonormality check).
pub fn frame_objective(
    states: &[PureState],
    assignment: &FrameAssignment,
    vectors: &[CVec],
) -> Result<f64> {
    if vectors.len() != assignment.n_outcomes() {
        return Err(Error::DimensionMismatch {
            expected: assignment.n_outcomes(),
            found: vectors.len(),
        });
    }
    let mut total = 0.0;
    for (v, &i) in vectors.iter().zip(assignment.indices()) {
        let s = states
            .get(i)
            .ok_or_else(|| Error::Validation(format!("missing state {i}")))?;
        if v.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim(),
                found: v.dim(),
            });
        }
        total += s.vec().inner(v).norm_sqr();
    }
    Ok(total)
}

/// Riemannian gradient of the frame objective at an orthonormal frame, one
/// tangent vector per outcome.
pub fn frame_gradient(
    states: &[PureState],
    assignment: &FrameAssignment,
    frame: &[CVec],
) -> Result<Vec<CVec>> {
    let targets = Targets::new(states, assignment)?;
    let v = CMatrix::from_columns(frame)?;
    if v.rows() != targets.dim() || v.cols() != targets.dim() {
        return Err(Error::DimensionMismatch {
            expected: targets.dim(),
            found: v.cols(),
        });
    }
    Ok(targets.riemannian_gradient(&v).columns())
}
