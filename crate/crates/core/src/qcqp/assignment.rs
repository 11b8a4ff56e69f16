use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which state each projector outcome must exclude, as a sorted multiset of
/// state indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameAssignment {
    indices: Vec<usize>,
}

impl FrameAssignment {
    /// Canonicalizes (sorts) `indices` after range-checking against `n_states`.
    pub fn new(mut indices: Vec<usize>, n_states: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(invalid("an assignment needs at least one outcome"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n_states) {
            return Err(invalid(format!(
                "state index {bad} out of range for {n_states} states"
            )));
        }
        indices.sort_unstable();
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n_outcomes(&self) -> usize {
        self.indices.len()
    }

    /// (state index, multiplicity) pairs in index order.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.indices {
            match out.last_mut() {
                Some((j, m)) if *j == i => *m += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }
}

impl fmt::Display for FrameAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Every multiset of `n_outcomes` state indices drawn from `n_states`, in
/// lexicographic order. There are C(n_states + n_outcomes − 1, n_outcomes).
pub fn enumerate_assignments(n_states: usize, n_outcomes: usize) -> Result<Vec<FrameAssignment>> {
    if n_states == 0 || n_outcomes == 0 {
        return Err(invalid("need at least one state and one outcome"));
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; n_outcomes];
    loop {
        out.push(FrameAssignment {
            indices: current.clone(),
        });
        // Advance to the next nondecreasing sequence.
        let Some(pos) = (0..n_outcomes).rev().find(|&k| current[k] + 1 < n_states) else {
            break;
        };
        let next = current[pos] + 1;
        for slot in &mut current[pos..] {
            *slot = next;
        }
    }
    Ok(out)
}
