use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, HermitianOperator};

/// Completeness and positivity tolerance for a valid POVM.
pub const POVM_TOL: f64 = 1e-9;
/// Eigenvalues above this count toward an element's rank.
pub const RANK_TOL: f64 = 1e-7;

/// A measurement given by its effects. Validity is checked by [`validate_povm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    pub elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Self {
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Σᵢ ⟨Mᵢ, Cᵢ⟩
    pub fn objective(&self, costs: &[HermitianOperator]) -> f64 {
        self.elements
            .iter()
            .zip(costs)
            .map(|(m, c)| m.inner(c))
            .sum()
    }

    pub fn sum(&self) -> Option<HermitianOperator> {
        let mut it = self.elements.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.add(m)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// ‖Σ Mᵢ − I‖_F
    pub completeness_residual: f64,
    pub min_eigenvalues: Vec<f64>,
    pub ranks: Vec<usize>,
    /// Set when the elements do not share one dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
}

pub fn validate_povm(povm: &Povm) -> ValidationReport {
    let invalid = |problem: &str| ValidationReport {
        valid: false,
        completeness_residual: f64::INFINITY,
        min_eigenvalues: vec![],
        ranks: vec![],
        problem: Some(problem.to_string()),
    };
    let Some(first) = povm.elements.first() else {
        return invalid("a POVM needs at least one element");
    };
    let dim = first.dim();
    if povm.elements.iter().any(|m| m.dim() != dim) {
        return invalid("elements have different dimensions");
    }

    let mut min_eigenvalues = Vec::with_capacity(povm.len());
    let mut ranks = Vec::with_capacity(povm.len());
    for m in &povm.elements {
        match hermitian_eig(m) {
            Ok(eig) => {
                min_eigenvalues.push(eig.min());
                ranks.push(eig.rank(RANK_TOL));
            }
            Err(e) => return invalid(&e.to_string()),
        }
    }
    let completeness_residual = povm
        .sum()
        .map(|s| s.sub(&HermitianOperator::identity(dim)).frobenius_norm())
        .unwrap_or(f64::INFINITY);
    let valid =
        completeness_residual <= POVM_TOL && min_eigenvalues.iter().all(|&l| l >= -POVM_TOL);
    ValidationReport {
        valid,
        completeness_residual,
        min_eigenvalues,
        ranks,
        problem: None,
    }
}
