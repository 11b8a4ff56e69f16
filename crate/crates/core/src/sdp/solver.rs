//! Splitting solver for the exclusion SDP
//!
//! ```text
//! minimize    Σᵢ pᵢ⟨Mᵢ, ρᵢ⟩
//! subject to  Σᵢ Mᵢ = I,  Mᵢ ⪰ 0
//! ```
//!
//! and its dual `maximize Tr(Y) s.t. Y ⪯ pᵢρᵢ`.
//!
//! The iteration alternates an affine projection onto {Σ Mᵢ = I} with
//! per-element PSD projections (ADMM with over-relaxation). Neither iterate is
//! trusted directly: every few iterations the cone iterate is congruence-scaled
//! into an exactly feasible POVM, and the multiplier-derived Y is shifted by a
//! multiple of the identity into an exactly feasible dual point. The reported
//! gap is the difference of those two certified values.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{jacobi, CMatrix, HermitianOperator};
use crate::EPS_ZERO;

use super::extremal::reduce_to_extremal;
use super::{ExclusionInstance, Povm};

/// Slack allowed below zero for the primal-dual gap before the solve is
/// declared numerically broken.
pub const WEAK_DUALITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub max_iter: usize,
    /// ADMM penalty parameter.
    pub step: f64,
    /// Multiplier applied to `step` when the gap stalls.
    pub restart_factor: f64,
    /// Iterations without gap improvement before a restart.
    pub stall_window: usize,
    pub relaxation: f64,
    pub check_every: usize,
    /// Apply the extremal rank reduction to the returned POVM.
    pub extremal_reduction: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            max_iter: 50_000,
            step: 1.0,
            restart_factor: 0.5,
            stall_window: 500,
            relaxation: 1.6,
            check_every: 10,
            extremal_reduction: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0) || !(self.step > 0.0) {
            return Err(invalid("gap_tol and step must be positive"));
        }
        if !(self.restart_factor > 0.0 && self.restart_factor < 1.0) {
            return Err(invalid("restart_factor must lie in (0, 1)"));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(invalid("relaxation must lie in (0, 2)"));
        }
        if self.max_iter == 0 || self.check_every == 0 || self.stall_window == 0 {
            return Err(invalid("iteration counts must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    InfeasibleNumerics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub povm: Povm,
    pub primal_value: f64,
    pub dual_certificate: HermitianOperator,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub status: SdpStatus,
}

impl SdpSolution {
    /// Perfect-exclusion verdict at tolerance `eps`, or `None` when the
    /// certificates do not settle it.
    pub fn verdict(&self, eps: f64) -> Option<bool> {
        if self.primal_value <= eps && self.dual_value <= eps {
            Some(true)
        } else if self.dual_value > eps {
            Some(false)
        } else if self.status == SdpStatus::Optimal {
            // primal > eps ≥ dual with gap ≤ gap_tol: the optimum sits within
            // the solver tolerance above eps, and the primal value decides.
            Some(false)
        } else {
            None
        }
    }
}

pub fn solve_exclusion_sdp(
    instance: &ExclusionInstance,
    config: &SolverConfig,
) -> Result<SdpSolution> {
    config.validate()?;
    instance.check_sdp_limits()?;
    let costs = instance.costs();
    let dim = instance.dim();

    if costs.len() == 1 {
        // One outcome: M₁ = I is forced, and Y = p₁ρ₁ attains the same value.
        let value = costs[0].trace();
        return Ok(SdpSolution {
            povm: Povm::new(vec![HermitianOperator::identity(dim)]),
            primal_value: value,
            dual_certificate: costs[0].clone(),
            dual_value: value,
            gap: 0.0,
            iterations: 0,
            restarts: 0,
            status: SdpStatus::Optimal,
        });
    }

    let mut admm = Admm::new(&costs, dim, config.step);
    let mut best_primal: Option<(f64, Vec<HermitianOperator>)> = None;
    let mut best_dual = Some(floor_certificate(&costs, dim));
    let mut best_gap = f64::INFINITY;
    let mut last_improvement = 0;
    let mut restarts = 0;
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;

    while iterations < config.max_iter {
        admm.iterate(config.relaxation);
        iterations += 1;
        if iterations % config.check_every != 0 {
            continue;
        }

        if let Some((value, povm)) = admm.primal_certificate() {
            if best_primal.as_ref().is_none_or(|(v, _)| value < *v) {
                best_primal = Some((value, povm));
            }
        }
        let (dual_value, y) = admm.dual_certificate();
        if best_dual.as_ref().is_none_or(|(v, _)| dual_value > *v) {
            best_dual = Some((dual_value, y));
        }

        if let (Some((p, _)), Some((d, _))) = (&best_primal, &best_dual) {
            let gap = p - d;
            if gap < -WEAK_DUALITY_SLACK {
                status = SdpStatus::InfeasibleNumerics;
                break;
            }
            if gap <= config.gap_tol {
                status = SdpStatus::Optimal;
                break;
            }
            if gap < 0.99 * best_gap {
                best_gap = gap;
                last_improvement = iterations;
            }
        }
        if iterations - last_improvement >= config.stall_window {
            admm.rescale(config.restart_factor);
            restarts += 1;
            last_improvement = iterations;
        }
    }

    let Some((_, elements)) = best_primal else {
        return Err(Error::Numerical(
            "no feasible POVM could be recovered from the iterates".into(),
        ));
    };
    let (dual_value, dual_certificate) = best_dual.expect("dual certificate is always available");

    let mut povm = Povm::new(elements);
    if config.extremal_reduction && status == SdpStatus::Optimal {
        povm = reduce_to_extremal(&povm, &costs);
    }
    let primal_value = povm.objective(&costs);
    let gap = primal_value - dual_value;
    if gap < -WEAK_DUALITY_SLACK {
        status = SdpStatus::InfeasibleNumerics;
    }
    Ok(SdpSolution {
        povm,
        primal_value,
        dual_certificate,
        dual_value,
        gap,
        iterations,
        restarts,
        status,
    })
}

/// True when the exclusion SDP certifies a zero optimal value within [`EPS_ZERO`].
pub fn is_povm_excludable(instance: &ExclusionInstance) -> Result<bool> {
    is_povm_excludable_with(instance, &SolverConfig::default(), EPS_ZERO)
}

pub fn is_povm_excludable_with(
    instance: &ExclusionInstance,
    config: &SolverConfig,
    eps: f64,
) -> Result<bool> {
    let sol = solve_exclusion_sdp(instance, config)?;
    sol.verdict(eps).ok_or_else(|| {
        Error::Numerical(format!(
            "solver stopped ({:?}) with primal {:.3e} and dual {:.3e} on both sides of {eps:.1e}",
            sol.status, sol.primal_value, sol.dual_value
        ))
    })
}

/// Y = (minᵢ λ_min(Cᵢ))·I is always dual feasible; for pure states it is Y = 0.
fn floor_certificate(costs: &[HermitianOperator], dim: usize) -> (f64, HermitianOperator) {
    let floor = costs
        .iter()
        .map(|c| jacobi(c.matrix()).min())
        .fold(f64::INFINITY, f64::min);
    let y = HermitianOperator::identity(dim).scale(floor);
    (y.trace(), y)
}

/// Maximum eigenvalue of Y − Cᵢ over all i: the dual infeasibility of Y.
pub fn dual_residual(y: &HermitianOperator, costs: &[HermitianOperator]) -> f64 {
    costs
        .iter()
        .map(|c| jacobi(y.sub(c).matrix()).max())
        .fold(f64::NEG_INFINITY, f64::max)
}

struct Admm<'a> {
    costs: &'a [HermitianOperator],
    dim: usize,
    rho: f64,
    z: Vec<CMatrix>,
    u: Vec<CMatrix>,
}

impl<'a> Admm<'a> {
    fn new(costs: &'a [HermitianOperator], dim: usize, rho: f64) -> Self {
        let n = costs.len();
        let start = CMatrix::identity(dim).scale(1.0 / n as f64);
        Self {
            costs,
            dim,
            rho,
            z: vec![start; n],
            u: vec![CMatrix::zeros(dim, dim); n],
        }
    }

    fn iterate(&mut self, alpha: f64) {
        let n = self.costs.len();
        let inv_rho = 1.0 / self.rho;
        let mut x: Vec<CMatrix> = (0..n)
            .map(|i| &(&self.z[i] - &self.u[i]) - &self.costs[i].matrix().scale(inv_rho))
            .collect();

        // Affine projection onto {Σ Xᵢ = I}.
        let mut excess = x.iter().skip(1).fold(x[0].clone(), |acc, m| &acc + m);
        for k in 0..self.dim {
            excess[(k, k)] -= 1.0;
        }
        let shift = excess.scale(1.0 / n as f64);
        for xi in &mut x {
            *xi = &*xi - &shift;
        }

        for i in 0..n {
            let relaxed = &x[i].scale(alpha) + &self.z[i].scale(1.0 - alpha);
            let z_new = psd_part(&(&relaxed + &self.u[i]));
            self.u[i] = &(&self.u[i] + &relaxed) - &z_new;
            self.z[i] = z_new;
        }
    }

    /// Changes the penalty by `factor`, keeping the unscaled multipliers fixed.
    fn rescale(&mut self, factor: f64) {
        self.rho *= factor;
        for u in &mut self.u {
            *u = u.scale(1.0 / factor);
        }
    }

    /// Congruence-scales the PSD iterate into an exact POVM: Mᵢ = S^{-1/2} Zᵢ S^{-1/2}.
    fn primal_certificate(&self) -> Option<(f64, Vec<HermitianOperator>)> {
        let total = self
            .z
            .iter()
            .skip(1)
            .fold(self.z[0].clone(), |acc, m| &acc + m);
        let eig = jacobi(&total);
        if !(eig.min() > 1e-12) {
            return None;
        }
        let inv_sqrt = eig.map_spectrum(|l| 1.0 / l.sqrt());
        let t = inv_sqrt.matrix();
        let elements: Vec<HermitianOperator> = self
            .z
            .iter()
            .map(|z| HermitianOperator::from_hermitian_part(&(&(t * z) * t)))
            .collect();
        let value = elements
            .iter()
            .zip(self.costs)
            .map(|(m, c)| m.inner(c))
            .sum();
        Some((value, elements))
    }

    /// Y = mean(Cᵢ + ρUᵢ), shifted down by its worst violation of Y ⪯ Cᵢ.
    fn dual_certificate(&self) -> (f64, HermitianOperator) {
        let n = self.costs.len();
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (c, u) in self.costs.iter().zip(&self.u) {
            acc = &acc + &(c.matrix() + &u.scale(self.rho));
        }
        let y = HermitianOperator::from_hermitian_part(&acc.scale(1.0 / n as f64));
        let violation = dual_residual(&y, self.costs);
        let shifted = y.sub(&HermitianOperator::identity(self.dim).scale(violation));
        (shifted.trace(), shifted)
    }
}

fn psd_part(m: &CMatrix) -> CMatrix {
    jacobi(m).map_spectrum(|l| l.max(0.0)).into_matrix()
}
