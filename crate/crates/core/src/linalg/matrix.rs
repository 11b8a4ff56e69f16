use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::CVec;

/// Hermiticity tolerance for [`HermitianOperator`].
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix. Serializes as an array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Complex64>>", into = "Vec<Vec<Complex64>>")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl TryFrom<Vec<Vec<Complex64>>> for CMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        CMatrix::from_rows(rows)
    }
}

impl From<CMatrix> for Vec<Vec<Complex64>> {
    fn from(m: CMatrix) -> Self {
        m.data
            .chunks(m.cols.max(1))
            .map(<[Complex64]>::to_vec)
            .collect()
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(invalid("matrix must have at least one row"));
        }
        let n_cols = rows[0].len();
        if n_cols == 0 || rows.iter().any(|r| r.len() != n_cols) {
            return Err(invalid("matrix rows must be nonempty and of equal length"));
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// |u⟩⟨v|
    pub fn outer(u: &CVec, v: &CVec) -> Self {
        let (r, c) = (u.dim(), v.dim());
        let mut data = Vec::with_capacity(r * c);
        for a in u.entries() {
            for b in v.entries() {
                data.push(a * b.conj());
            }
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVec]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(invalid("need at least one column"));
        }
        let rows = columns[0].dim();
        if let Some(bad) = columns.iter().find(|c| c.dim() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: bad.dim(),
            });
        }
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> CVec {
        CVec::from_entries_unchecked((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn columns(&self) -> Vec<CVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Re tr(self* other), the real Frobenius inner product.
    pub fn real_inner(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let entries = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect();
        CVec::from_entries_unchecked(entries)
    }

    /// ⟨v|self|v⟩ (real part; exact for Hermitian matrices).
    pub fn quadratic_form(&self, v: &CVec) -> f64 {
        v.inner(&self.mul_vec(v)).re
    }

    /// (self + self*) / 2
    pub fn hermitian_part(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in add"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in sub"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction checks Hermiticity within [`HERMITIAN_TOL`] (scaled by the
/// matrix magnitude) and stores the exact Hermitian part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct HermitianOperator {
    m: CMatrix,
}

impl TryFrom<CMatrix> for HermitianOperator {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        HermitianOperator::new(m)
    }
}

impl From<HermitianOperator> for CMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.m
    }
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(invalid(format!(
                "operator must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(invalid(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            m: m.hermitian_part(),
        })
    }

    /// Hermitian part of an arbitrary square matrix, no tolerance check.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self {
            m: m.hermitian_part(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        Self {
            m: CMatrix::diag(values),
        }
    }

    pub fn projector(v: &CVec) -> Self {
        Self::from_hermitian_part(&v.projector())
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    /// ⟨self, other⟩ = tr(self·other), real for Hermitian arguments.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        self.m.real_inner(&other.m)
    }

    pub fn expectation(&self, v: &CVec) -> f64 {
        self.m.quadratic_form(v)
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            m: &self.m + &other.m,
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            m: &self.m - &other.m,
        }
    }

    pub fn scale(&self, factor: f64) -> HermitianOperator {
        Self {
            m: self.m.scale(factor),
        }
    }

    /// U·self·U*
    pub fn conjugate_by(&self, u: &CMatrix) -> HermitianOperator {
        Self::from_hermitian_part(&(&(u * &self.m) * &u.adjoint()))
    }
}

impl Index<(usize, usize)> for HermitianOperator {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.m[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::Validation(_))
        ));
        let rect = CMatrix::zeros(2, 3);
        assert!(HermitianOperator::new(rect).is_err());
    }

    #[test]
    fn serializes_as_rows_of_pairs() {
        let h = HermitianOperator::diag(&[1.0, 0.5]);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]");
        let back: HermitianOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<CMatrix>("[[[1.0,0.0]],[]]").is_err());
    }

    #[test]
    fn products_and_adjoint() {
        let i = Complex64::i();
        let a = CMatrix::from_rows(vec![vec![ONE, i], vec![ZERO, ONE]]).unwrap();
        let p = &a * &a.adjoint();
        assert_eq!(p[(0, 0)], Complex64::new(2.0, 0.0));
        assert_eq!(p[(0, 1)], i);
        assert_eq!(p[(1, 0)], -i);
        assert!(HermitianOperator::new(p).is_ok());
    }
}
