use serde::Serialize;

use super::{ScenarioReport, Worst, CHECK_TOL};
use crate::calculus::{possible_internal_states, possible_internal_states_aligned, ReferenceSystem};
use crate::error::Result;
use crate::random::{random_state, random_unitary, trial_rng};
use crate::tensor::{apply_unitary, CompositeSpace, Operator, PureState};

const ANCHOR: &str = "locality: an evolution of B+C factorizes and leaves A's possible states alone";
const ANCHOR_PROBE: &str = "locality: an evolution touching A does change A's possible states";

/// Deviation of `a`'s possible internal states across one evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalityTrial {
    /// Largest probability change, entry by entry.
    pub probability_deviation: f64,
    /// Largest `1 − |⟨before|after⟩|`, entry by entry.
    pub overlap_deviation: f64,
}

impl LocalityTrial {
    pub fn worst(&self) -> f64 {
        self.probability_deviation.max(self.overlap_deviation)
    }
}

/// Possible internal states of `a` before and after applying `u` to `psi`;
/// the later basis is aligned with the earlier one inside degenerate levels.
pub fn locality_trial<S: AsRef<str>>(psi: &PureState, u: &Operator, a: &[S]) -> Result<LocalityTrial> {
    let before = possible_internal_states(&ReferenceSystem::isolated(psi.clone()), a)?;
    let evolved = ReferenceSystem::isolated(apply_unitary(psi, u)?);
    let after = possible_internal_states_aligned(&evolved, a, &before)?;
    if before.len() != after.len() {
        return Ok(LocalityTrial { probability_deviation: 1.0, overlap_deviation: 1.0 });
    }
    let mut p: f64 = 0.0;
    let mut o: f64 = 0.0;
    for (x, y) in before.entries.iter().zip(&after.entries) {
        p = p.max((x.probability - y.probability).abs());
        o = o.max(1.0 - x.state.overlap(&y.state)?);
    }
    Ok(LocalityTrial { probability_deviation: p, overlap_deviation: o })
}

/// Random states `|ψ_{A+B}⟩|ψ_C⟩` evolved by random unitaries on `B+C`;
/// a counter-probe evolves `A+B` instead and must move `A`'s states.
pub fn locality_check(dims: (usize, usize, usize), trials: u64, seed: u64) -> Result<ScenarioReport> {
    let (da, db, dc) = dims;
    let mut report = ScenarioReport::new("locality");
    report.param("dims", format!("{da}x{db}x{dc}"));
    report.param("trials", trials);
    report.param("seed", seed);
    let space = CompositeSpace::from_pairs(&[("A", da), ("B", db), ("C", dc)])?;
    report.systems(space.subsystems());
    let ab = space.subspace(&["A", "B"])?;
    let bc = space.subspace(&["B", "C"])?;
    let c_only = space.subspace(&["C"])?;

    let mut prob = Worst::default();
    let mut over = Worst::default();
    let mut changed = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let psi = random_state(&ab, &mut rng)?.tensor(&random_state(&c_only, &mut rng)?)?;
        let u = random_unitary(&bc, &mut rng)?;
        let trial = locality_trial(&psi, &u, &["A"])?;
        prob.update(trial.probability_deviation, t);
        over.update(trial.overlap_deviation, t);

        let probe = random_unitary(&ab, &mut rng)?;
        if locality_trial(&psi, &probe, &["A"])?.worst() > 1e-6 {
            changed += 1;
        }
    }
    report.check_close("A probabilities unchanged (worst trial)", ANCHOR, 0.0, prob.value, CHECK_TOL);
    report.check_close("A states unchanged (worst trial)", ANCHOR, 0.0, over.value, CHECK_TOL);
    let fraction = if trials > 0 { changed as f64 / trials as f64 } else { 0.0 };
    report.value("counter-probe changed fraction", ANCHOR_PROBE, fraction);
    if trials > 0 && da >= 2 {
        report.check_at_least("counter-probe changes A", ANCHOR_PROBE, 0.5, fraction, 0.0);
    }
    Ok(report)
}
