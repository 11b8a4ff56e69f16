use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    derive_seed, haar_random_unitary, jacobi, orthonormality_defect, qr_orthonormalize, seeded_rng,
    CMatrix, CVec, PureState,
};
use crate::EPS_ZERO;

use super::frame::{retract, Targets};
use super::{enumerate_assignments, FrameAssignment};

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QcqpConfig {
    /// Random initial frames per program.
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop when the Riemannian gradient norm falls below this.
    pub grad_tol: f64,
    pub seed: u64,
    /// Solve programs in closed form when one state fills d − 1 or d slots.
    pub analytic_shortcut: bool,
    /// A converged restart at or below this objective ends the restart loop
    /// early, since no frame can do better than zero.
    pub zero_floor: f64,
}

impl Default for QcqpConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iter: 10_000,
            grad_tol: 1e-8,
            seed: 0,
            analytic_shortcut: true,
            zero_floor: 1e-14,
        }
    }
}

impl QcqpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iter == 0 {
            return Err(invalid("restarts and max_iter must be at least 1"));
        }
        if !(self.grad_tol > 0.0) || !(self.zero_floor >= 0.0) {
            return Err(invalid(
                "grad_tol must be positive and zero_floor nonnegative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Descent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcqpSolution {
    /// vₖ is the projector outcome that must exclude state `assignment[k]`.
    pub frame: Vec<CVec>,
    pub objective: f64,
    pub gradient_norm: f64,
    pub restarts_used: usize,
    pub iterations: usize,
    pub converged: bool,
    pub method: SolveMethod,
}

/// Local minimization of Σₖ |sₖ* vₖ|² over complete orthonormal frames.
pub fn solve_assignment_qcqp(
    states: &[PureState],
    assignment: &FrameAssignment,
    config: &QcqpConfig,
) -> Result<QcqpSolution> {
    config.validate()?;
    let targets = Targets::new(states, assignment)?;
    if config.analytic_shortcut {
        if let Some(sol) = closed_form(states, assignment, &targets)? {
            return Ok(sol);
        }
    }

    let mut rng = seeded_rng(assignment_seed(config.seed, assignment));
    let mut best: Option<QcqpSolution> = None;
    for restart in 0..config.restarts {
        let start = haar_random_unitary(targets.dim(), &mut rng);
        let mut sol = descend(&targets, start, config)?;
        sol.restarts_used = restart + 1;
        let better = match &best {
            None => true,
            Some(b) => {
                (sol.converged && !b.converged)
                    || (sol.converged == b.converged && sol.objective < b.objective)
            }
        };
        if better {
            best = Some(sol);
        }
        let b = best.as_ref().expect("set above");
        if b.converged && b.objective <= config.zero_floor {
            break;
        }
    }
    let mut best = best.expect("at least one restart");
    best.restarts_used = best.restarts_used.max(1);
    Ok(best)
}

/// Single local descent from a given frame.
pub fn descend_from(
    states: &[PureState],
    assignment: &FrameAssignment,
    frame: &[CVec],
    config: &QcqpConfig,
) -> Result<QcqpSolution> {
    config.validate()?;
    let targets = Targets::new(states, assignment)?;
    let v = CMatrix::from_columns(frame)?;
    if orthonormality_defect(&v) > 1e-8 {
        return Err(invalid("initial frame is not orthonormal"));
    }
    let mut sol = descend(&targets, v, config)?;
    sol.restarts_used = 1;
    Ok(sol)
}

/// Riemannian gradient descent with QR retraction and Armijo backtracking.
/// Trial steps start from the Barzilai-Borwein estimate of the previous move.
fn descend(targets: &Targets, mut v: CMatrix, config: &QcqpConfig) -> Result<QcqpSolution> {
    let mut f = targets.objective(&v);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut grad = targets.riemannian_gradient(&v);
    let mut gnorm = grad.frobenius_norm();

    while gnorm > config.grad_tol && iterations < config.max_iter {
        iterations += 1;
        let g2 = gnorm * gnorm;
        let mut accepted = None;
        let mut t = step;
        while t >= MIN_STEP {
            let candidate = retract(&v, &grad.scale(-t))?;
            let fc = targets.objective(&candidate);
            if fc <= f - ARMIJO_C * t * g2 {
                accepted = Some((candidate, fc));
                break;
            }
            t *= 0.5;
        }
        let Some((next, fc)) = accepted else {
            break;
        };
        let next_grad = targets.riemannian_gradient(&next);
        let s = &next - &v;
        let y = &next_grad - &grad;
        let sy = s.real_inner(&y);
        step = if sy > 0.0 {
            (s.real_inner(&s) / sy).clamp(MIN_STEP, MAX_STEP)
        } else {
            (2.0 * t).min(MAX_STEP)
        };
        v = next;
        f = fc;
        grad = next_grad;
        gnorm = grad.frobenius_norm();
    }

    Ok(QcqpSolution {
        frame: v.columns(),
        objective: f,
        gradient_norm: gnorm,
        restarts_used: 0,
        iterations,
        converged: gnorm <= config.grad_tol,
        method: SolveMethod::Descent,
    })
}

/// Exact minimum when one state occupies d or d − 1 of the d outcomes.
///
/// All d slots on state a: Σₖ|a*vₖ|² = ‖a‖² = 1 for every frame.
/// d − 1 slots on a and one on c: the d − 1 vectors span u^⊥ where u is the
/// remaining vector, so the objective is 1 − |a*u|² + |c*u|², minimized by the
/// bottom eigenvector of cc* − aa*.
fn closed_form(
    states: &[PureState],
    assignment: &FrameAssignment,
    targets: &Targets,
) -> Result<Option<QcqpSolution>> {
    let d = assignment.n_outcomes();
    let mult = assignment.multiplicities();
    let (heavy, lone) = match mult.as_slice() {
        [(_, m)] if *m == d => (None, None),
        [(i, m), (j, 1)] if *m == d - 1 => (Some(*i), Some(*j)),
        [(i, 1), (j, m)] if *m == d - 1 => (Some(*j), Some(*i)),
        _ => return Ok(None),
    };

    let v = match (heavy, lone) {
        (Some(a), Some(c)) => {
            let diff = &states[c].projector() - &states[a].projector();
            let u = jacobi(&diff).eigenvectors[0].clone();
            let mut cols = vec![CVec::zeros(d); d];
            let mut rest = complete_basis(&u)?.into_iter();
            for (k, &idx) in assignment.indices().iter().enumerate() {
                cols[k] = if idx == c {
                    u.clone()
                } else {
                    rest.next().expect("d − 1 complement vectors")
                };
            }
            CMatrix::from_columns(&cols)?
        }
        _ => CMatrix::identity(d),
    };
    let grad = targets.riemannian_gradient(&v);
    Ok(Some(QcqpSolution {
        objective: targets.objective(&v),
        gradient_norm: grad.frobenius_norm(),
        frame: v.columns(),
        restarts_used: 0,
        iterations: 0,
        converged: true,
        method: SolveMethod::ClosedForm,
    }))
}

/// Orthonormal basis of u^⊥ (d − 1 vectors).
fn complete_basis(u: &CVec) -> Result<Vec<CVec>> {
    let d = u.dim();
    // Put u first, then the standard basis vectors least aligned with u.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| u[i].norm().total_cmp(&u[j].norm()));
    let mut cols = vec![u.clone()];
    cols.extend(order.into_iter().take(d - 1).map(|i| CVec::basis(d, i)));
    let q = qr_orthonormalize(&CMatrix::from_columns(&cols)?)?;
    Ok(q.columns().into_iter().skip(1).collect())
}

fn assignment_seed(seed: u64, assignment: &FrameAssignment) -> u64 {
    assignment.indices().iter().fold(
        derive_seed(seed, assignment.n_outcomes() as u64),
        |h, &i| derive_seed(h, i as u64 + 1),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentResult {
    pub assignment: FrameAssignment,
    pub objective: f64,
    pub converged: bool,
    pub method: SolveMethod,
}

/// Minimum over a set of programs, with the per-program outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSweep {
    pub value: f64,
    pub assignment: FrameAssignment,
    pub best: QcqpSolution,
    pub per_assignment: Vec<AssignmentResult>,
}

impl ProjectionSweep {
    /// Projective excludability at tolerance `eps`. A minimum above `eps` from
    /// a program whose descent did not converge is not conclusive.
    pub fn verdict(&self, eps: f64) -> Option<bool> {
        if self.value <= eps {
            Some(true)
        } else if self.per_assignment.iter().all(|r| r.converged) {
            Some(false)
        } else {
            None
        }
    }

    pub fn excludable(&self) -> Option<bool> {
        self.verdict(EPS_ZERO)
    }
}

/// Solves every program over all multisets of outcomes and takes the minimum.
pub fn min_over_assignments(states: &[PureState], config: &QcqpConfig) -> Result<ProjectionSweep> {
    let dim = states
        .first()
        .map(PureState::dim)
        .ok_or_else(|| invalid("need at least one state"))?;
    let assignments = enumerate_assignments(states.len(), dim)?;
    min_over_subset(states, &assignments, config)
}

/// Minimum over the given programs only.
pub fn min_over_subset(
    states: &[PureState],
    assignments: &[FrameAssignment],
    config: &QcqpConfig,
) -> Result<ProjectionSweep> {
    if assignments.is_empty() {
        return Err(invalid("need at least one program"));
    }
    let solved: Vec<QcqpSolution> = assignments
        .par_iter()
        .map(|a| solve_assignment_qcqp(states, a, config))
        .collect::<Result<_>>()?;
    let per_assignment = assignments
        .iter()
        .zip(&solved)
        .map(|(a, s)| AssignmentResult {
            assignment: a.clone(),
            objective: s.objective,
            converged: s.converged,
            method: s.method,
        })
        .collect();
    let (k, best) = solved
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.objective.total_cmp(&y.objective))
        .ok_or_else(|| Error::Numerical("no programs solved".into()))?;
    Ok(ProjectionSweep {
        value: best.objective,
        assignment: assignments[k].clone(),
        best: best.clone(),
        per_assignment,
    })
}
