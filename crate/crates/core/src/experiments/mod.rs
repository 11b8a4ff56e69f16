//! Randomized and grid experiments with persisted reports.
//!
//! Each run writes `summary.json` (pretty-printed) and `instances.jsonl` (one
//! record per line) into an output directory. Both are a deterministic
//! function of the seed and the configuration.

mod equivalence;
mod family_scan;
mod gap2d;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qcqp::{AssignmentResult, ProjectionSweep, QcqpConfig};
use crate::sdp::{SdpSolution, SdpStatus, SolverConfig};
use crate::EPS_ZERO;

pub use equivalence::{
    run_equivalence_3x3, EquivalenceDiagnostics, EquivalenceReport, Outcome, TripleRecord,
};
pub use family_scan::{run_family_theorem_scan, FamilyScanReport, GridPoint, GridSpec, MarginBin};
pub use gap2d::{run_2d_gap, trine, Gap2dReport, PairRecord, TriangleRecord};

/// Half-width of the boundary band around cfs_lhs = 1, in units of eps_zero.
pub const BAND_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub eps_zero: f64,
    pub sdp: SolverConfig,
    pub qcqp: QcqpConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            eps_zero: EPS_ZERO,
            sdp: SolverConfig::default(),
            qcqp: QcqpConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_zero > 0.0 && self.eps_zero.is_finite()) {
            return Err(invalid("eps_zero must be positive"));
        }
        self.sdp.validate()?;
        self.qcqp.validate()
    }
}

/// Compact view of an SDP solve for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpDiagnostics {
    pub verdict: Option<bool>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub status: SdpStatus,
}

impl SdpDiagnostics {
    pub fn new(sol: &SdpSolution, eps: f64) -> Self {
        Self {
            verdict: sol.verdict(eps),
            primal_value: sol.primal_value,
            dual_value: sol.dual_value,
            gap: sol.gap,
            iterations: sol.iterations,
            restarts: sol.restarts,
            status: sol.status,
        }
    }
}

/// Compact view of a projective sweep for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjDiagnostics {
    pub verdict: Option<bool>,
    pub value: f64,
    pub assignment: String,
    pub all_converged: bool,
    pub gradient_norm: f64,
    pub per_assignment: Vec<AssignmentResult>,
}

impl ProjDiagnostics {
    pub fn new(sweep: &ProjectionSweep, eps: f64) -> Self {
        Self {
            verdict: sweep.verdict(eps),
            value: sweep.value,
            assignment: sweep.assignment.to_string(),
            all_converged: sweep.per_assignment.iter().all(|r| r.converged),
            gradient_norm: sweep.best.gradient_norm,
            per_assignment: sweep.per_assignment.clone(),
        }
    }
}

/// Writes `summary.json` and `instances.jsonl` into `dir`, creating it if needed.
pub fn write_report<S: Serialize, R: Serialize>(
    dir: &Path,
    summary: &S,
    records: &[R],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(dir.join("summary.json"), text)?;
    let mut out = BufWriter::new(File::create(dir.join("instances.jsonl"))?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
