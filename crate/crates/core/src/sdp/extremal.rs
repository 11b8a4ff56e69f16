//! Rank reduction toward an extreme point of the POVM set.
//!
//! If two effects Mᵢ, Mⱼ both have rank ≥ 2 and their ranges share a unit
//! vector u, then {Mᵢ + εuu*, Mⱼ − εuu*} stays a POVM for ε in an interval
//! around zero. Moving ε to the end of that interval (in the direction that
//! does not increase the objective) drops the rank of one effect by one.

use crate::linalg::{jacobi, CMatrix, CVec, EigDecomposition, HermitianOperator};

use super::povm::RANK_TOL;
use super::Povm;

/// Largest eigenvalue of (I − Pᵢ) + (I − Pⱼ) for which the bottom eigenvector
/// is accepted as lying in both ranges.
const INTERSECTION_TOL: f64 = 1e-8;

/// Repeatedly transfers rank-one weight between pairs of effects of rank ≥ 2
/// until no such pair has intersecting ranges. The objective Σ⟨Mᵢ, Cᵢ⟩ never
/// increases.
pub fn reduce_to_extremal(povm: &Povm, costs: &[HermitianOperator]) -> Povm {
    let mut elements = povm.elements.clone();
    let Some(dim) = elements.first().map(HermitianOperator::dim) else {
        return povm.clone();
    };
    let max_steps = elements.len() * dim;

    for _ in 0..max_steps {
        let eigs: Vec<EigDecomposition> = elements.iter().map(|m| jacobi(m.matrix())).collect();
        let Some((i, j, u)) = find_shared_direction(&eigs, dim) else {
            break;
        };
        let delta = costs[i].expectation(&u) - costs[j].expectation(&u);
        // Move weight toward the element whose cost along u is smaller.
        let (gain, lose) = if delta <= 0.0 { (i, j) } else { (j, i) };
        let eps = max_removable(&eigs[lose], &u);
        let uu = HermitianOperator::projector(&u).scale(eps);
        elements[gain] = elements[gain].add(&uu);
        elements[lose] = elements[lose].sub(&uu);
    }
    Povm::new(elements)
}

fn range_projector(eig: &EigDecomposition, dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for (l, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *l > RANK_TOL {
            p = &p + &v.projector();
        }
    }
    p
}

fn find_shared_direction(eigs: &[EigDecomposition], dim: usize) -> Option<(usize, usize, CVec)> {
    let heavy: Vec<usize> = (0..eigs.len())
        .filter(|&k| eigs[k].rank(RANK_TOL) >= 2)
        .collect();
    let id = CMatrix::identity(dim);
    for (a, &i) in heavy.iter().enumerate() {
        for &j in &heavy[a + 1..] {
            let pi = range_projector(&eigs[i], dim);
            let pj = range_projector(&eigs[j], dim);
            let q = &(&(&id - &pi) + &id) - &pj;
            let bottom = jacobi(&q);
            if bottom.min() <= INTERSECTION_TOL {
                return Some((i, j, bottom.eigenvectors[0].clone()));
            }
        }
    }
    None
}

/// Largest ε with M − εuu* ⪰ 0, for u in the range of M: 1 / (u* M⁺ u).
fn max_removable(eig: &EigDecomposition, u: &CVec) -> f64 {
    let weighted: f64 = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l > RANK_TOL)
        .map(|(l, v)| v.inner(u).norm_sqr() / l)
        .sum();
    1.0 / weighted
}
