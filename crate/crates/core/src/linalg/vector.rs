use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::CMatrix;

/// Unit-norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// Input vectors whose norm is within this distance of one are renormalized
/// on parse; anything further off is rejected.
pub const PARSE_NORM_TOL: f64 = 1e-6;

/// Dense complex column vector. Serializes as `[[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct CVec {
    entries: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for CVec {
    type Error = Error;

    fn try_from(entries: Vec<Complex64>) -> Result<Self> {
        CVec::new(entries)
    }
}

impl From<CVec> for Vec<Complex64> {
    fn from(v: CVec) -> Self {
        v.entries
    }
}

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("vector must have at least one entry"));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(invalid("vector entries must be finite"));
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVec) -> Complex64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> CVec {
        CVec {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// |self⟩⟨self|
    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(self, self)
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

/// A unit-norm state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CVec", into = "CVec")]
pub struct PureState {
    vec: CVec,
}

impl TryFrom<CVec> for PureState {
    type Error = Error;

    /// Lenient parse path: renormalizes inputs within [`PARSE_NORM_TOL`].
    fn try_from(vec: CVec) -> Result<Self> {
        let norm = vec.norm();
        if (norm - 1.0).abs() > PARSE_NORM_TOL {
            return Err(invalid(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(Self {
            vec: vec.scale(Complex64::new(1.0 / norm, 0.0)),
        })
    }
}

impl From<PureState> for CVec {
    fn from(s: PureState) -> Self {
        s.vec
    }
}

impl PureState {
    /// Wraps a vector that is already unit norm within [`NORM_TOL`].
    pub fn new(vec: CVec) -> Result<Self> {
        let norm = vec.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(Self { vec })
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(vec: CVec) -> Result<Self> {
        let norm = vec.norm();
        if norm < 1e-300 {
            return Err(invalid("cannot normalize the zero vector"));
        }
        Ok(Self {
            vec: vec.scale(Complex64::new(1.0 / norm, 0.0)),
        })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(CVec::from_real(values)?)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(invalid(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        Ok(Self {
            vec: CVec::basis(dim, index),
        })
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    pub fn vec(&self) -> &CVec {
        &self.vec
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.vec.inner(&other.vec)
    }

    /// Multiplies by a global phase e^{iφ}.
    pub fn with_phase(&self, phi: f64) -> PureState {
        PureState {
            vec: self.vec.scale(Complex64::from_polar(1.0, phi)),
        }
    }

    pub fn projector(&self) -> CMatrix {
        self.vec.projector()
    }
}

/// Pairwise overlap magnitudes of three states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlaps {
    /// |⟨a|b⟩|
    pub j1: f64,
    /// |⟨a|c⟩|
    pub j2: f64,
    /// |⟨b|c⟩|
    pub j3: f64,
}

pub fn gram_magnitudes(a: &PureState, b: &PureState, c: &PureState) -> Result<Overlaps> {
    let d = a.dim();
    for s in [b, c] {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
    }
    Ok(Overlaps {
        j1: a.inner(b).norm(),
        j2: a.inner(c).norm(),
        j3: b.inner(c).norm(),
    })
}
