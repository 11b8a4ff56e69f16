//! The exclusion SDP: minimize Σ pᵢ⟨Mᵢ, ρᵢ⟩ over POVMs {Mᵢ}.
//!
//! A zero optimal value means every outcome i rules out state i with
//! certainty, i.e. the ensemble is perfectly excludable.

mod extremal;
mod instance;
mod povm;
mod solver;

pub use extremal::reduce_to_extremal;
pub use instance::{ExclusionInstance, StateSpec, MAX_DIM, MAX_STATES};
pub use povm::{validate_povm, Povm, ValidationReport, POVM_TOL, RANK_TOL};
pub use solver::{
    dual_residual, is_povm_excludable, is_povm_excludable_with, solve_exclusion_sdp, SdpSolution,
    SdpStatus, SolverConfig, WEAK_DUALITY_SLACK,
};
