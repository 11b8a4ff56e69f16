//! The canonical extremal POVM family in three dimensions and the states it
//! excludes.
//!
//! Up to a unitary, every extremal 3-outcome POVM on C³ with ranks (2,1,1)
//! excluding a = e₁ with the rank-2 element is
//!
//! ```text
//! M₁ = diag(0, 1 − x, 1),  M₂ = vv*,  M₃ = ww*
//! v = (√r, e^{iθ}√x, 0) / √(r + 1)
//! w = (1, −e^{iθ}√(rx), 0) / √(r + 1)
//! ```
//!
//! with 0 < x < 1, r > 0. The states excluded by M₂ and M₃ are parametrized
//! by their (real) first coordinates b₁, c₁ and the phases ϑ, γ of their third
//! coordinates.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::cfs::{cfs_from_overlaps, CfsReport};
use crate::error::{invalid, Result};
use crate::linalg::{gram_magnitudes, CVec, Complex64, HermitianOperator, PureState};
use crate::sdp::Povm;
use crate::EPS_ZERO;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct FamilyParams {
    pub x: f64,
    pub r: f64,
    pub theta: f64,
}

#[derive(Deserialize)]
struct RawFamily {
    x: f64,
    r: f64,
    #[serde(default)]
    theta: f64,
}

impl TryFrom<RawFamily> for FamilyParams {
    type Error = crate::Error;
    fn try_from(raw: RawFamily) -> Result<Self> {
        Self::new(raw.x, raw.r, raw.theta)
    }
}

impl FamilyParams {
    /// Requires 0 < x < 1, 0 < r < ∞ and 0 ≤ θ < 2π. The boundary values are
    /// degenerate: the family collapses to a projective measurement there.
    pub fn new(x: f64, r: f64, theta: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(invalid(format!("x = {x} must lie in (0, 1)")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("r = {r} must lie in (0, inf)")));
        }
        check_phase("theta", theta)?;
        Ok(Self { x, r, theta })
    }

    /// Supremum of admissible b₁: √(1 / (1 + r/x)).
    pub fn b1_bound(&self) -> f64 {
        (1.0 / (1.0 + self.r / self.x)).sqrt()
    }

    /// Supremum of admissible c₁: √(1 / (1 + 1/(rx))).
    pub fn c1_bound(&self) -> f64 {
        (1.0 / (1.0 + 1.0 / (self.r * self.x))).sqrt()
    }

    fn check_b1(&self, b1: f64) -> Result<()> {
        if !(b1 >= 0.0 && b1 < self.b1_bound()) {
            return Err(invalid(format!(
                "b1 = {b1} must lie in [0, {})",
                self.b1_bound()
            )));
        }
        Ok(())
    }

    fn check_c1(&self, c1: f64) -> Result<()> {
        if !(c1 >= 0.0 && c1 < self.c1_bound()) {
            return Err(invalid(format!(
                "c1 = {c1} must lie in [0, {})",
                self.c1_bound()
            )));
        }
        Ok(())
    }
}

fn check_phase(name: &str, phase: f64) -> Result<()> {
    if !(0.0..TAU).contains(&phase) {
        return Err(invalid(format!("{name} = {phase} must lie in [0, 2pi)")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedPairParams {
    pub b1: f64,
    pub c1: f64,
    pub vartheta: f64,
    pub gamma: f64,
}

impl ExcludedPairParams {
    pub fn new(p: &FamilyParams, b1: f64, c1: f64, vartheta: f64, gamma: f64) -> Result<Self> {
        p.check_b1(b1)?;
        p.check_c1(c1)?;
        check_phase("vartheta", vartheta)?;
        check_phase("gamma", gamma)?;
        Ok(Self {
            b1,
            c1,
            vartheta,
            gamma,
        })
    }

    /// Phases γ = ϑ + π, which maximize |⟨b|c⟩|.
    pub fn worst_case(p: &FamilyParams, b1: f64, c1: f64, vartheta: f64) -> Result<Self> {
        Self::new(p, b1, c1, vartheta, (vartheta + PI).rem_euclid(TAU))
    }
}

/// (v, w) with M₂ = vv*, M₃ = ww*. No range checks.
fn family_vectors(x: f64, r: f64, theta: f64) -> (CVec, CVec) {
    let norm = (r + 1.0).sqrt();
    let phase = Complex64::from_polar(1.0, theta);
    let v = CVec::from_entries_unchecked(vec![
        Complex64::new(r.sqrt() / norm, 0.0),
        phase * (x.sqrt() / norm),
        Complex64::new(0.0, 0.0),
    ]);
    let w = CVec::from_entries_unchecked(vec![
        Complex64::new(1.0 / norm, 0.0),
        -phase * ((r * x).sqrt() / norm),
        Complex64::new(0.0, 0.0),
    ]);
    (v, w)
}

fn family_elements(x: f64, r: f64, theta: f64) -> Vec<HermitianOperator> {
    let (v, w) = family_vectors(x, r, theta);
    vec![
        HermitianOperator::diag(&[0.0, 1.0 - x, 1.0]),
        HermitianOperator::projector(&v),
        HermitianOperator::projector(&w),
    ]
}

pub fn build_family_povm(p: &FamilyParams) -> Povm {
    Povm::new(family_elements(p.x, p.r, p.theta))
}

/// State perfectly excluded by M₂: b = (b₁, −b₁e^{iθ}√(r/x), e^{iϑ}√(1 − b₁²(1 + r/x))).
pub fn excluded_state_b(p: &FamilyParams, b1: f64, vartheta: f64) -> Result<PureState> {
    p.check_b1(b1)?;
    let b3 = (1.0 - b1 * b1 * (1.0 + p.r / p.x)).max(0.0).sqrt();
    let v = CVec::from_entries_unchecked(vec![
        Complex64::new(b1, 0.0),
        -Complex64::from_polar(b1 * (p.r / p.x).sqrt(), p.theta),
        Complex64::from_polar(b3, vartheta),
    ]);
    PureState::new(v)
}

/// State perfectly excluded by M₃: c = (c₁, c₁e^{iθ}/√(rx), e^{iγ}√(1 − c₁²(1 + 1/(rx)))).
pub fn excluded_state_c(p: &FamilyParams, c1: f64, gamma: f64) -> Result<PureState> {
    p.check_c1(c1)?;
    let rx = p.r * p.x;
    let c3 = (1.0 - c1 * c1 * (1.0 + 1.0 / rx)).max(0.0).sqrt();
    let v = CVec::from_entries_unchecked(vec![
        Complex64::new(c1, 0.0),
        Complex64::from_polar(c1 / rx.sqrt(), p.theta),
        Complex64::from_polar(c3, gamma),
    ]);
    PureState::new(v)
}

/// The triple (e₁, b, c) excluded outcome by outcome by the family POVM.
pub fn family_states(p: &FamilyParams, q: &ExcludedPairParams) -> Result<[PureState; 3]> {
    Ok([
        PureState::basis(3, 0)?,
        excluded_state_b(p, q.b1, q.vartheta)?,
        excluded_state_c(p, q.c1, q.gamma)?,
    ])
}

/// max over (ϑ, γ) of |⟨b|c⟩| = √(1 − b₁²(1 + r/x))·√(1 − c₁²(1 + 1/(rx))) + b₁c₁(1/x − 1).
pub fn j3_worst_case(p: &FamilyParams, b1: f64, c1: f64) -> Result<f64> {
    p.check_b1(b1)?;
    p.check_c1(c1)?;
    Ok(j3_formula(p.x, p.r, b1, c1))
}

fn j3_formula(x: f64, r: f64, b1: f64, c1: f64) -> f64 {
    let pb = (1.0 - b1 * b1 * (1.0 + r / x)).max(0.0).sqrt();
    let pc = (1.0 - c1 * c1 * (1.0 + 1.0 / (r * x))).max(0.0).sqrt();
    pb * pc + b1 * c1 * (1.0 / x - 1.0)
}

/// f = j₃² + b₁² + c₁² + 2j₃b₁c₁ at the worst-case j₃; the triple is
/// excludable iff f ≤ 1.
pub fn f_lhs(p: &FamilyParams, b1: f64, c1: f64) -> Result<f64> {
    let j3 = j3_worst_case(p, b1, c1)?;
    Ok(f_formula(j3, b1, c1))
}

fn f_formula(j3: f64, b1: f64, c1: f64) -> f64 {
    j3 * j3 + b1 * b1 + c1 * c1 + 2.0 * j3 * b1 * c1
}

/// f without parameter validation, for dense scans whose grid already
/// respects the open bounds.
pub fn f_lhs_unchecked(x: f64, r: f64, b1: f64, c1: f64) -> f64 {
    f_formula(j3_formula(x, r, b1, c1), b1, c1)
}

/// Terms of the squared form of f ≤ 1, for b₁, c₁ > 0. With B = 1/b₁², C = 1/c₁²,
/// f ≤ 1 holds iff `lhs` ≤ `rhs` where
///
/// ```text
/// lhs = 2 √(B − 1 − r/x) √(C − 1 − 1/(rx))
/// rhs = rC + B/r − (2/x + r + 1/r)
/// ```
///
/// and rhs² − lhs² simplifies to an x-free expression which is a perfect square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// rhs² − lhs², evaluated directly.
    pub squared_difference: f64,
    /// r²(1/c₁⁴ − 2/c₁² + 1) + (1/r²)(1/b₁⁴ − 2/b₁² + 1) + 2(1/c₁² + 1/b₁² − 1/(b₁²c₁²) − 1)
    pub expanded: f64,
    /// (r(1/c₁² − 1) − (1/r)(1/b₁² − 1))²
    pub square: f64,
}

impl SquareIdentity {
    /// rhs − lhs, the slack before squaring; depends on x.
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Largest disagreement among the three evaluations of rhs² − lhs²,
    /// relative to the largest term that enters them.
    pub fn residual(&self) -> f64 {
        let scale = [
            self.lhs * self.lhs,
            self.rhs * self.rhs,
            self.expanded.abs(),
            self.square,
            1.0,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let d1 = (self.squared_difference - self.square).abs();
        let d2 = (self.expanded - self.square).abs();
        d1.max(d2) / scale
    }
}

pub fn verify_square_identity(x: f64, r: f64, b1: f64, c1: f64) -> Result<SquareIdentity> {
    if !(x > 0.0 && x < 1.0) {
        return Err(invalid(format!("x = {x} must lie in (0, 1)")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("r = {r} must be positive")));
    }
    if !(b1 > 0.0 && b1 < 1.0 && c1 > 0.0 && c1 < 1.0) {
        return Err(invalid(
            "b1 and c1 must lie in (0, 1); zero values are the degenerate branch",
        ));
    }
    let big_b = 1.0 / (b1 * b1);
    let big_c = 1.0 / (c1 * c1);
    let rb = big_b - 1.0 - r / x;
    let rc = big_c - 1.0 - 1.0 / (r * x);
    if rb < 0.0 || rc < 0.0 {
        return Err(invalid("b1 or c1 exceeds its bound for this x and r"));
    }
    let lhs = 2.0 * rb.sqrt() * rc.sqrt();
    let rhs = r * big_c + big_b / r - (2.0 / x + r + 1.0 / r);
    let expanded = r * r * (big_c * big_c - 2.0 * big_c + 1.0)
        + (big_b * big_b - 2.0 * big_b + 1.0) / (r * r)
        + 2.0 * (big_c + big_b - big_b * big_c - 1.0);
    let inner = r * (big_c - 1.0) - (big_b - 1.0) / r;
    Ok(SquareIdentity {
        lhs,
        rhs,
        squared_difference: rhs * rhs - lhs * lhs,
        expanded,
        square: inner * inner,
    })
}

/// CFS report for (e₁, b, c) built from the family.
pub fn family_cfs_check(p: &FamilyParams, q: &ExcludedPairParams) -> Result<CfsReport> {
    let [a, b, c] = family_states(p, q)?;
    cfs_from_overlaps(gram_magnitudes(&a, &b, &c)?, EPS_ZERO)
}
