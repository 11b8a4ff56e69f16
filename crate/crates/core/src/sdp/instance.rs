use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eig, HermitianOperator, PureState};
use crate::SCHEMA;

/// Largest number of states accepted by the SDP.
pub const MAX_STATES: usize = 10;
/// Largest Hilbert-space dimension accepted by the SDP.
pub const MAX_DIM: usize = 10;

const WEIGHT_SUM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-9;

/// One state to exclude: a state vector or a density operator.
///
/// In JSON a vector is `[[re, im], ...]` and a density operator is a matrix
/// `[[[re, im], ...], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Pure(PureState),
    Mixed(HermitianOperator),
}

impl StateSpec {
    pub fn dim(&self) -> usize {
        match self {
            StateSpec::Pure(s) => s.dim(),
            StateSpec::Mixed(rho) => rho.dim(),
        }
    }

    pub fn density(&self) -> HermitianOperator {
        match self {
            StateSpec::Pure(s) => HermitianOperator::from_hermitian_part(&s.projector()),
            StateSpec::Mixed(rho) => rho.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let StateSpec::Mixed(rho) = self {
            let eig = hermitian_eig(rho)?;
            if eig.min() < -DENSITY_TOL {
                return Err(invalid(format!(
                    "density operator has eigenvalue {}",
                    eig.min()
                )));
            }
            if (rho.trace() - 1.0).abs() > DENSITY_TOL {
                return Err(invalid(format!(
                    "density operator has trace {}",
                    rho.trace()
                )));
            }
        }
        Ok(())
    }
}

impl From<PureState> for StateSpec {
    fn from(s: PureState) -> Self {
        StateSpec::Pure(s)
    }
}

/// The states (and optional prior weights) of one exclusion problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct ExclusionInstance {
    states: Vec<StateSpec>,
    weights: Option<Vec<f64>>,
}

/// On-disk layout: `{"schema": "exclusion/1", "dim": d, "states": [...], "weights": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    states: Vec<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl TryFrom<InstanceFile> for ExclusionInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if let Some(schema) = &file.schema {
            if schema != SCHEMA {
                return Err(invalid(format!(
                    "unsupported schema {schema:?}, expected {SCHEMA:?}"
                )));
            }
        }
        let instance = ExclusionInstance::new(file.states, file.weights)?;
        if let Some(dim) = file.dim {
            if dim != instance.dim() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: instance.dim(),
                });
            }
        }
        Ok(instance)
    }
}

impl From<ExclusionInstance> for InstanceFile {
    fn from(inst: ExclusionInstance) -> Self {
        InstanceFile {
            schema: Some(SCHEMA.to_string()),
            dim: Some(inst.dim()),
            states: inst.states,
            weights: inst.weights,
        }
    }
}

impl ExclusionInstance {
    pub fn new(states: Vec<StateSpec>, weights: Option<Vec<f64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(invalid("an instance needs at least one state"));
        }
        let dim = states[0].dim();
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            s.validate()?;
        }
        if let Some(w) = &weights {
            if w.len() != states.len() {
                return Err(invalid(format!(
                    "{} weights for {} states",
                    w.len(),
                    states.len()
                )));
            }
            if w.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
                return Err(invalid("weights must be positive"));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(invalid(format!("weights sum to {total}, expected 1")));
            }
        }
        Ok(Self { states, weights })
    }

    /// Uniformly weighted pure-state instance.
    pub fn pure(states: Vec<PureState>) -> Result<Self> {
        Self::new(states.into_iter().map(StateSpec::Pure).collect(), None)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[StateSpec] {
        &self.states
    }

    pub fn explicit_weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Prior weights, uniform when none were given.
    pub fn weights(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => w.clone(),
            None => vec![1.0 / self.len() as f64; self.len()],
        }
    }

    /// The objective operators pᵢρᵢ.
    pub fn costs(&self) -> Vec<HermitianOperator> {
        self.states
            .iter()
            .zip(self.weights())
            .map(|(s, p)| s.density().scale(p))
            .collect()
    }

    /// The state vectors, failing if any state is mixed.
    pub fn pure_states(&self) -> Result<Vec<PureState>> {
        self.states
            .iter()
            .map(|s| match s {
                StateSpec::Pure(p) => Ok(p.clone()),
                StateSpec::Mixed(_) => Err(invalid("projective sweeps need pure states")),
            })
            .collect()
    }

    pub(crate) fn check_sdp_limits(&self) -> Result<()> {
        if self.len() > MAX_STATES {
            return Err(invalid(format!(
                "at most {MAX_STATES} states supported, got {}",
                self.len()
            )));
        }
        if self.dim() > MAX_DIM {
            return Err(Error::UnsupportedDimension {
                dim: self.dim(),
                reason: "the exclusion SDP supports dimension at most 10",
            });
        }
        Ok(())
    }
}
