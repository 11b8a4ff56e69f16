use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{derive_seed, haar_random_state_with, seeded_rng, CVec, Complex64, PureState};
use crate::qcqp::{min_over_assignments, QcqpConfig};
use crate::sdp::{solve_exclusion_sdp, ExclusionInstance};
use crate::SCHEMA;

use super::{ExperimentConfig, ProjDiagnostics, SdpDiagnostics};

/// Three real qubit states 120° apart: (cos 2πk/3, sin 2πk/3).
pub fn trine() -> Vec<PureState> {
    (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0;
            PureState::from_real(&[t.cos(), t.sin()]).expect("unit vector")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub trial: usize,
    pub instance: ExclusionInstance,
    pub sdp: SdpDiagnostics,
    pub proj: ProjDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub trial: usize,
    pub instance: ExclusionInstance,
    pub overlap: f64,
    pub sdp: SdpDiagnostics,
    pub proj: ProjDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap2dReport {
    pub schema: String,
    pub experiment: String,
    pub trials: usize,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Excludable by a POVM but by no projective measurement.
    pub povm_only: usize,
    pub both: usize,
    pub neither: usize,
    /// Projectively but not POVM excludable; impossible, so nonzero means a bug.
    pub projection_only: usize,
    pub undecided: usize,
    pub trine: TriangleRecord,
    pub pair_trials: usize,
    pub pair_agree: usize,
    pub pair_excludable: usize,
    pub pair_disagreements: Vec<PairRecord>,
    #[serde(skip)]
    pub records: Vec<TriangleRecord>,
}

/// Triples of qubit states (trial 0 is the trine) compared under POVMs and
/// two-outcome projections, plus a control run on `trials` pairs of qubit
/// states where the two must agree. Odd pair trials use orthogonal pairs so
/// that both verdicts occur.
pub fn run_2d_gap(trials: usize, seed: u64, config: &ExperimentConfig) -> Result<Gap2dReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    config.validate()?;
    let records: Vec<TriangleRecord> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, t as u64);
            let states = if t == 0 {
                trine()
            } else {
                random_states(2, 3, s)?
            };
            triangle(t, s, states, config)
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<PairRecord> = (0..trials)
        .into_par_iter()
        .map(|t| {
            pair(
                t,
                derive_seed(derive_seed(seed, u64::MAX), t as u64),
                config,
            )
        })
        .collect::<Result<_>>()?;

    let mut report = Gap2dReport {
        schema: SCHEMA.to_string(),
        experiment: "gap2d".to_string(),
        trials,
        seed,
        config: config.clone(),
        povm_only: 0,
        both: 0,
        neither: 0,
        projection_only: 0,
        undecided: 0,
        trine: records[0].clone(),
        pair_trials: pairs.len(),
        pair_agree: 0,
        pair_excludable: 0,
        pair_disagreements: Vec::new(),
        records: Vec::new(),
    };
    for r in &records {
        match (r.sdp.verdict, r.proj.verdict) {
            (Some(true), Some(false)) => report.povm_only += 1,
            (Some(true), Some(true)) => report.both += 1,
            (Some(false), Some(false)) => report.neither += 1,
            (Some(false), Some(true)) => report.projection_only += 1,
            _ => report.undecided += 1,
        }
    }
    for p in pairs {
        if p.sdp.verdict.is_some() && p.sdp.verdict == p.proj.verdict {
            report.pair_agree += 1;
            report.pair_excludable += usize::from(p.sdp.verdict == Some(true));
        } else {
            report.pair_disagreements.push(p);
        }
    }
    report.records = records;
    Ok(report)
}

fn random_states(dim: usize, n: usize, seed: u64) -> Result<Vec<PureState>> {
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|_| haar_random_state_with(dim, &mut rng))
        .collect()
}

fn solve(
    states: &[PureState],
    seed: u64,
    config: &ExperimentConfig,
) -> Result<(ExclusionInstance, SdpDiagnostics, ProjDiagnostics)> {
    let instance = ExclusionInstance::pure(states.to_vec())?;
    let sdp = solve_exclusion_sdp(&instance, &config.sdp)?;
    let qcqp = QcqpConfig {
        seed: derive_seed(seed, config.qcqp.seed),
        ..config.qcqp.clone()
    };
    let sweep = min_over_assignments(states, &qcqp)?;
    Ok((
        instance,
        SdpDiagnostics::new(&sdp, config.eps_zero),
        ProjDiagnostics::new(&sweep, config.eps_zero),
    ))
}

fn triangle(
    trial: usize,
    seed: u64,
    states: Vec<PureState>,
    config: &ExperimentConfig,
) -> Result<TriangleRecord> {
    let (instance, sdp, proj) = solve(&states, seed, config)?;
    Ok(TriangleRecord {
        trial,
        instance,
        sdp,
        proj,
    })
}

fn pair(trial: usize, seed: u64, config: &ExperimentConfig) -> Result<PairRecord> {
    let mut states = random_states(2, 2, seed)?;
    if trial % 2 == 1 {
        // (−ā₁, ā₀) is orthogonal to (a₀, a₁); keep the random phase of the second draw.
        let a = states[0].vec();
        let phase = states[1].vec()[0].arg();
        let perp =
            CVec::new(vec![-a[1].conj(), a[0].conj()])?.scale(Complex64::from_polar(1.0, phase));
        states[1] = PureState::normalized(perp)?;
    }
    let overlap = states[0].inner(&states[1]).norm();
    let (instance, sdp, proj) = solve(&states, seed, config)?;
    Ok(PairRecord {
        trial,
        instance,
        overlap,
        sdp,
        proj,
    })
}
