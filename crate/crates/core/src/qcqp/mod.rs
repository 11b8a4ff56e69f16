//! Projective exclusion as a family of quadratic programs on frames.
//!
//! A rank-one projective measurement {vₖvₖ*} with a complete orthonormal frame
//! V excludes the states iff every outcome k has some state s with s*vₖ = 0.
//! Fixing which state each outcome must exclude gives one program
//! min Σₖ |s_{a(k)}* vₖ|² over unitary V; the states are projectively
//! excludable iff one of these programs has minimum zero.

mod assignment;
mod frame;
mod solver;

pub use assignment::{enumerate_assignments, FrameAssignment};
pub use frame::{frame_gradient, frame_objective};
pub use solver::{
    descend_from, min_over_assignments, min_over_subset, solve_assignment_qcqp, AssignmentResult,
    ProjectionSweep, QcqpConfig, QcqpSolution, SolveMethod,
};
