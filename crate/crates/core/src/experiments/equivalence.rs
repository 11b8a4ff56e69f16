use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfs::{cfs_excludable, CfsReport};
use crate::error::{invalid, Result};
use crate::linalg::{derive_seed, haar_random_state_with, seeded_rng, PureState};
use crate::qcqp::{min_over_assignments, QcqpConfig};
use crate::sdp::{solve_exclusion_sdp, ExclusionInstance, SdpStatus};
use crate::SCHEMA;

use super::{ExperimentConfig, ProjDiagnostics, SdpDiagnostics, BAND_FACTOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Agree,
    BoundaryBand,
    Disagree,
}

/// One Haar-random triple with the three verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleRecord {
    pub trial: usize,
    pub instance: ExclusionInstance,
    pub cfs: CfsReport,
    pub sdp: Option<SdpDiagnostics>,
    pub proj: Option<ProjDiagnostics>,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceDiagnostics {
    pub sdp_not_optimal: usize,
    pub sdp_undecided: usize,
    pub proj_not_converged: usize,
    pub max_sdp_iterations: usize,
    /// Largest |cfs_lhs − 1| among disagreements.
    pub max_disagreement_distance: f64,
    /// Smallest |cfs_lhs − 1| among disagreements.
    pub min_disagreement_distance: Option<f64>,
    /// Disagreements where the SDP and projective verdicts coincide and only
    /// the closed-form criterion differs.
    pub solvers_agree_against_cfs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub schema: String,
    pub experiment: String,
    pub trials: usize,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// |cfs_lhs − 1| below this counts as boundary band.
    pub band_halfwidth: f64,
    pub agree: usize,
    pub boundary_band: usize,
    pub cfs_excludable: usize,
    pub disagreements: Vec<TripleRecord>,
    pub diagnostics: EquivalenceDiagnostics,
    /// Every trial, in order; written to instances.jsonl rather than the summary.
    #[serde(skip)]
    pub records: Vec<TripleRecord>,
}

/// Three-way comparison of the closed-form criterion, the exclusion SDP and
/// the projective sweep on `trials` Haar-random triples in C³.
pub fn run_equivalence_3x3(
    trials: usize,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<EquivalenceReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    config.validate()?;
    let band = BAND_FACTOR * config.eps_zero;
    let records: Vec<TripleRecord> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(t, derive_seed(seed, t as u64), config, band))
        .collect::<Result<_>>()?;

    let mut diagnostics = EquivalenceDiagnostics::default();
    for r in &records {
        if let Some(s) = &r.sdp {
            diagnostics.max_sdp_iterations = diagnostics.max_sdp_iterations.max(s.iterations);
            diagnostics.sdp_not_optimal += usize::from(s.status != SdpStatus::Optimal);
            diagnostics.sdp_undecided += usize::from(s.verdict.is_none());
        }
        if let Some(p) = &r.proj {
            diagnostics.proj_not_converged += usize::from(!p.all_converged);
        }
    }
    let disagreements: Vec<TripleRecord> = records
        .iter()
        .filter(|r| r.outcome == Outcome::Disagree)
        .cloned()
        .collect();
    for r in &disagreements {
        let dist = (r.cfs.lhs - 1.0).abs();
        diagnostics.max_disagreement_distance = diagnostics.max_disagreement_distance.max(dist);
        diagnostics.min_disagreement_distance = Some(
            diagnostics
                .min_disagreement_distance
                .map_or(dist, |m: f64| m.min(dist)),
        );
        let sdp = r.sdp.as_ref().and_then(|s| s.verdict);
        let proj = r.proj.as_ref().and_then(|p| p.verdict);
        if sdp.is_some() && sdp == proj {
            diagnostics.solvers_agree_against_cfs += 1;
        }
    }

    Ok(EquivalenceReport {
        schema: SCHEMA.to_string(),
        experiment: "equiv3x3".to_string(),
        trials,
        seed,
        config: config.clone(),
        band_halfwidth: band,
        agree: records
            .iter()
            .filter(|r| r.outcome == Outcome::Agree)
            .count(),
        boundary_band: records
            .iter()
            .filter(|r| r.outcome == Outcome::BoundaryBand)
            .count(),
        cfs_excludable: records.iter().filter(|r| r.cfs.excludable).count(),
        disagreements,
        diagnostics,
        records,
    })
}

fn run_trial(
    trial: usize,
    seed: u64,
    config: &ExperimentConfig,
    band: f64,
) -> Result<TripleRecord> {
    let mut rng = seeded_rng(seed);
    let states: Vec<PureState> = (0..3)
        .map(|_| haar_random_state_with(3, &mut rng))
        .collect::<Result<_>>()?;
    let cfs = cfs_excludable(&states[0], &states[1], &states[2], config.eps_zero)?;
    let instance = ExclusionInstance::pure(states.clone())?;

    let mut errors = Vec::new();
    let sdp = match solve_exclusion_sdp(&instance, &config.sdp) {
        Ok(sol) => Some(SdpDiagnostics::new(&sol, config.eps_zero)),
        Err(e) => {
            errors.push(format!("sdp: {e}"));
            None
        }
    };
    let qcqp = QcqpConfig {
        seed: derive_seed(seed, config.qcqp.seed),
        ..config.qcqp.clone()
    };
    let proj = match min_over_assignments(&states, &qcqp) {
        Ok(sweep) => Some(ProjDiagnostics::new(&sweep, config.eps_zero)),
        Err(e) => {
            errors.push(format!("proj: {e}"));
            None
        }
    };

    let verdicts = [
        Some(cfs.excludable),
        sdp.as_ref().and_then(|s| s.verdict),
        proj.as_ref().and_then(|p| p.verdict),
    ];
    let outcome = if (cfs.lhs - 1.0).abs() < band {
        Outcome::BoundaryBand
    } else if verdicts.iter().all(|v| *v == verdicts[0]) {
        Outcome::Agree
    } else {
        Outcome::Disagree
    };
    Ok(TripleRecord {
        trial,
        instance,
        cfs,
        sdp,
        proj,
        outcome,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    })
}
