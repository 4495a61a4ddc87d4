//! Walk steps on the graph whose vertices are computational basis states.

use crate::basis::{hamming_distance, BasisState};
use crate::error::{Error, Result};

/// A forward-direction merge/split instruction: amplitude flows from `z1`
/// (already populated) into `z2` (newly populated). `target`, when set, is the
/// qubit on which the separating rotation acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MergeStep {
    pub z1: BasisState,
    pub z2: BasisState,
    pub target: Option<usize>,
}

impl MergeStep {
    pub fn new(z1: BasisState, z2: BasisState, target: Option<usize>) -> Result<Self> {
        if hamming_distance(&z1, &z2)? == 0 {
            return Err(Error::InvalidWalk(format!("merge of {z1} with itself")));
        }
        if let Some(q) = target {
            if q >= z1.n() {
                return Err(Error::InvalidWalk(format!("target qubit {q} out of range")));
            }
        }
        Ok(Self { z1, z2, target })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WalkStep {
    /// Walk on the single edge `{j, k}` for time `t`.
    Edge {
        j: BasisState,
        k: BasisState,
        t: f64,
    },
    /// Walk on the self-loop at `j` for time `t`.
    SelfLoop {
        j: BasisState,
        t: f64,
    },
    Merge(MergeStep),
}

impl WalkStep {
    pub fn edge(j: BasisState, k: BasisState, t: f64) -> Result<Self> {
        if hamming_distance(&j, &k)? == 0 {
            return Err(Error::InvalidWalk(format!("edge walk from {j} to itself")));
        }
        Ok(WalkStep::Edge { j, k, t })
    }

    pub fn self_loop(j: BasisState, t: f64) -> Self {
        WalkStep::SelfLoop { j, t }
    }

    pub fn n(&self) -> usize {
        match self {
            WalkStep::Edge { j, .. } | WalkStep::SelfLoop { j, .. } => j.n(),
            WalkStep::Merge(m) => m.z1.n(),
        }
    }
}
