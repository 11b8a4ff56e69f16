//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{CMatrix, CVec, HermitianOperator};

/// Largest dimension accepted by [`hermitian_eig`].
pub const MAX_EIG_DIM: usize = 16;

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition A = Σ λᵢ vᵢvᵢ*, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVec>,
}

impl EigDecomposition {
    /// Σ f(λᵢ) vᵢvᵢ*
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.eigenvalues.len();
        let mut out = CMatrix::zeros(n, n);
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        HermitianOperator::from_hermitian_part(&out)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map_spectrum(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Number of eigenvalues strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&x| x > tol).count()
    }
}

pub fn hermitian_eig(a: &HermitianOperator) -> Result<EigDecomposition> {
    if a.dim() > MAX_EIG_DIM {
        return Err(Error::UnsupportedDimension {
            dim: a.dim(),
            reason: "eigendecomposition is limited to dimension 16",
        });
    }
    Ok(jacobi(a.matrix()))
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues clipped to zero.
pub fn psd_project(a: &HermitianOperator) -> Result<HermitianOperator> {
    let eig = hermitian_eig(a)?;
    Ok(eig.map_spectrum(|x| x.max(0.0)))
}

/// Cyclic Jacobi on the Hermitian part of `m`. No dimension check.
pub(crate) fn jacobi(m: &CMatrix) -> EigDecomposition {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    EigDecomposition {
        eigenvalues: order.iter().map(|&i| a[(i, i)].re).collect(),
        eigenvectors: order.iter().map(|&i| v.column(i)).collect(),
    }
}

/// One unitary rotation J in the (p, q) plane zeroing a[p][q]; A ← J*AJ, V ← VJ.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let n = a.rows();
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = [[c, s], [-s·conj(phase), c·conj(phase)]] on the (p, q) block.
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * s + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * s + aqk * jqq.conj();
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * s + vkq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{haar_random_unitary, random_hermitian};
    use crate::linalg::seeded_rng;
    use approx::assert_abs_diff_eq;

    fn check_contract(a: &HermitianOperator, eig: &EigDecomposition) {
        let err = eig.reconstruct().sub(a).frobenius_norm();
        assert!(
            err <= 1e-10 * a.frobenius_norm().max(1.0),
            "reconstruction error {err}"
        );
        for (i, u) in eig.eigenvectors.iter().enumerate() {
            for (j, w) in eig.eigenvectors.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.inner(w) - Complex64::new(expected, 0.0)).norm() <= 1e-10);
            }
        }
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = eig.eigenvalues.iter().sum();
        assert_abs_diff_eq!(
            sum,
            a.trace(),
            epsilon = 1e-10 * a.frobenius_norm().max(1.0)
        );
    }

    #[test]
    fn identity_spectrum() {
        let eig = hermitian_eig(&HermitianOperator::identity(3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum() {
        let x = 0.5;
        let eig = hermitian_eig(&HermitianOperator::diag(&[0.0, 1.0 - x, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn recovers_planted_spectrum() {
        let mut rng = seeded_rng(7);
        for d in 1..=8 {
            let u = haar_random_unitary(d, &mut rng);
            let planted: Vec<f64> = (0..d).map(|k| k as f64 * 0.37 - 1.1).collect();
            let a = HermitianOperator::diag(&planted).conjugate_by(&u);
            let eig = hermitian_eig(&a).unwrap();
            check_contract(&a, &eig);
            for (got, want) in eig.eigenvalues.iter().zip(&planted) {
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn random_hermitian_contract() {
        let mut rng = seeded_rng(11);
        for d in [2, 3, 5, 10, 16] {
            let a = random_hermitian(d, &mut rng);
            check_contract(&a, &hermitian_eig(&a).unwrap());
        }
    }

    #[test]
    fn degenerate_spectrum_contract() {
        let mut rng = seeded_rng(3);
        let u = haar_random_unitary(4, &mut rng);
        let a = HermitianOperator::diag(&[2.0, 2.0, 2.0, -1.0]).conjugate_by(&u);
        check_contract(&a, &hermitian_eig(&a).unwrap());
    }

    #[test]
    fn rejects_oversized() {
        let a = HermitianOperator::identity(17);
        assert!(matches!(
            hermitian_eig(&a),
            Err(Error::UnsupportedDimension { dim: 17, .. })
        ));
    }

    #[test]
    fn psd_projection_examples() {
        let p = psd_project(&HermitianOperator::diag(&[-1.0, 0.0, 2.0])).unwrap();
        assert!(
            p.sub(&HermitianOperator::diag(&[0.0, 0.0, 2.0]))
                .frobenius_norm()
                <= 1e-14
        );

        let mut rng = seeded_rng(5);
        let b = random_hermitian(3, &mut rng);
        let psd = HermitianOperator::from_hermitian_part(&(b.matrix() * b.matrix()));
        let fixed = psd_project(&psd).unwrap();
        assert!(fixed.sub(&psd).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn psd_projection_is_nearest_among_random_psd() {
        let mut rng = seeded_rng(19);
        for _ in 0..10 {
            let a = random_hermitian(3, &mut rng);
            let p = psd_project(&a).unwrap();
            let best = a.sub(&p).frobenius_norm();
            for _ in 0..100 {
                let g = random_hermitian(3, &mut rng);
                let x = HermitianOperator::from_hermitian_part(&(g.matrix() * g.matrix()));
                assert!(best <= a.sub(&x).frobenius_norm() + 1e-12);
            }
        }
    }
}
