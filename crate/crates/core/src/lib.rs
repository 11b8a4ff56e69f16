//! Perfect quantum state exclusion for small pure-state ensembles.
//!
//! Three independent deciders live here: the exclusion SDP ([`sdp`]), the
//! closed-form Caves-Fuchs-Schack criterion for three states in three
//! dimensions ([`cfs`]), and the projective QCQP sweep ([`qcqp`]). The
//! [`family`] module builds the extremal POVM family behind the equivalence
//! of the first and last for three states in three dimensions, and
//! [`experiments`] runs the seeded batch comparisons.

pub mod cfs;
pub mod error;
pub mod experiments;
pub mod family;
pub mod linalg;
pub mod qcqp;
pub mod sdp;

pub use error::{Error, Result};

/// Threshold below which an optimal value counts as zero.
pub const EPS_ZERO: f64 = 1e-7;

/// Schema tag carried by every persisted JSON document.
pub const SCHEMA: &str = "exclusion/1";
