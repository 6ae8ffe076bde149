use rand::Rng;
use serde::Serialize;

use super::reference::{state_with_respect_to, ReferenceSystem};
use crate::error::{Error, Result};
use crate::random::trial_rng;
use crate::tensor::{resolve_degenerate_groups, CVector, CompositeSpace, PureState};

/// Eigenvalues below this are dropped from the possible internal states.
pub const DROP_THRESHOLD: f64 = 1e-12;

/// One possible internal state and the probability that it is the actual one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InternalState {
    pub probability: f64,
    pub state: PureState,
}

/// Eigen-decomposition of a subsystem's state with respect to an isolated
/// reference, zero modes removed, probabilities descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PossibleInternalStates {
    #[serde(serialize_with = "serialize_names")]
    subset: CompositeSpace,
    pub entries: Vec<InternalState>,
    /// Set when two retained probabilities coincide; the states inside such
    /// a level were chosen by the canonical rule (or by alignment hints).
    pub degenerate: bool,
}

fn serialize_names<S: serde::Serializer>(space: &CompositeSpace, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(space.names())
}

impl PossibleInternalStates {
    pub fn subset(&self) -> &CompositeSpace {
        &self.subset
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }

    pub fn states(&self) -> Vec<&PureState> {
        self.entries.iter().map(|e| &e.state).collect()
    }

    pub fn get(&self, j: usize) -> Result<&InternalState> {
        self.entries.get(j).ok_or_else(|| {
            Error::Dimension(format!(
                "index {j} out of range: {} has {} possible internal states",
                self.subset,
                self.entries.len()
            ))
        })
    }

    /// Index of the entry whose state matches `state` up to phase, if any.
    pub fn index_of(&self, state: &PureState, tol: f64) -> Option<usize> {
        self.entries.iter().position(|e| e.state.overlap(state).map(|o| o > 1.0 - tol).unwrap_or(false))
    }
}

/// Possible internal states of `a` with respect to the isolated reference `r`.
pub fn possible_internal_states<S: AsRef<str>>(r: &ReferenceSystem, a: &[S]) -> Result<PossibleInternalStates> {
    possible_internal_states_with_hints(r, a, &[])
}

/// As [`possible_internal_states`], but inside degenerate levels the basis is
/// steered towards `hints` (tried in order) before falling back to the
/// computational basis.
pub fn possible_internal_states_with_hints<S: AsRef<str>>(
    r: &ReferenceSystem,
    a: &[S],
    hints: &[PureState],
) -> Result<PossibleInternalStates> {
    r.require_isolated()?;
    let rho = state_with_respect_to(r, a)?;
    let subset = rho.space().clone();
    if subset.len() == r.space().len() {
        return Ok(PossibleInternalStates {
            entries: vec![InternalState { probability: 1.0, state: r.state().reorder(&subset)? }],
            subset,
            degenerate: false,
        });
    }
    let eig = rho.eigensystem()?;
    let keep: Vec<usize> = (0..eig.len()).filter(|&j| eig.values[j] >= DROP_THRESHOLD).collect();
    let values: Vec<f64> = keep.iter().map(|&j| eig.values[j]).collect();
    let mut vectors = eig.vectors.select_columns(&keep);
    let hint_vecs: Vec<CVector> =
        hints.iter().map(|h| h.reorder(&subset).map(|s| s.into_amplitudes())).collect::<Result<_>>()?;
    let degenerate = resolve_degenerate_groups(&values, &mut vectors, &hint_vecs);
    let entries = values
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            Ok(InternalState {
                probability: p,
                state: PureState::normalized(subset.clone(), vectors.column(k).into_owned())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PossibleInternalStates { subset, entries, degenerate })
}

/// Possible internal states aligned with an earlier eigenbasis: inside
/// degenerate levels the previous states are used as hints, so a level
/// that stays degenerate keeps its basis.
pub fn possible_internal_states_aligned<S: AsRef<str>>(
    r: &ReferenceSystem,
    a: &[S],
    previous: &PossibleInternalStates,
) -> Result<PossibleInternalStates> {
    let hints: Vec<PureState> = previous.entries.iter().map(|e| e.state.clone()).collect();
    possible_internal_states_with_hints(r, a, &hints)
}

/// `|⟨aᵢ|bⱼ⟩|` for every pair of entries.
pub fn overlap_matrix(a: &PossibleInternalStates, b: &PossibleInternalStates) -> Result<Vec<Vec<f64>>> {
    a.entries.iter().map(|x| b.entries.iter().map(|y| x.state.overlap(&y.state)).collect()).collect()
}

/// Draws an index with probability `λⱼ`; deterministic in `seed`.
pub fn sample_internal_state(pis: &PossibleInternalStates, seed: u64) -> usize {
    let total: f64 = pis.entries.iter().map(|e| e.probability).sum();
    let u: f64 = trial_rng(seed, 0).random::<f64>() * total;
    let mut acc = 0.0;
    for (j, e) in pis.entries.iter().enumerate() {
        acc += e.probability;
        if u < acc {
            return j;
        }
    }
    pis.entries.len().saturating_sub(1)
}
