use num_complex::Complex64;

use crate::error::{Error, Result};

use super::CMatrix;

/// Q factor of the thin QR decomposition with positive real diagonal in R.
///
/// Modified Gram-Schmidt with one reorthogonalization pass. Fails if the
/// columns are numerically dependent.
pub fn qr_orthonormalize(m: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols > rows {
        return Err(Error::Validation(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    let mut q = m.clone();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..rows).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..rows {
                    let qik = q[(i, k)];
                    q[(i, j)] -= qik * proj;
                }
            }
        }
        let norm = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return Err(Error::Numerical("columns are linearly dependent".into()));
        }
        for i in 0..rows {
            q[(i, j)] /= norm;
        }
    }
    Ok(q)
}

/// max |(Q*Q − I)ᵢⱼ|
pub fn orthonormality_defect(q: &CMatrix) -> f64 {
    let g = &q.adjoint() * q;
    let mut worst: f64 = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}
