use serde::Serialize;

use super::{condition, ScenarioReport, Worst, CHECK_TOL};
use crate::calculus::{
    joint_probability_of, possible_internal_states, possible_internal_states_with_hints, ReferenceSystem,
    DROP_THRESHOLD,
};
use crate::dynamics::MeasurementModel;
use crate::error::{Error, Result};
use crate::random::{random_basis, random_state, trial_rng};
use crate::tensor::{CompositeSpace, Operator, PureState, Subsystem};

const ANCHOR_Q: &str = "collapse: given the device reading, Q is the collapsed product state";
const ANCHOR_S: &str = "collapse: S with respect to Q is the measured basis state";
const ANCHOR_P: &str = "collapse: outcome weights equal the squared coefficient norms";

/// Worst agreement between the reference-system picture and the collapse
/// picture over all outcomes of one measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseTrial {
    /// Collapse probabilities `‖(|ξⱼ⟩⟨ξⱼ| ⊗ 1)ψ‖²`, one per basis state.
    pub probabilities: Vec<f64>,
    pub probability_gap: f64,
    /// Largest `1 − fidelity` between the engine's state of `Q` paired with
    /// pointer `j` and the collapsed state.
    pub q_gap: f64,
    /// Largest `1 − fidelity` between the top eigenvector of `ρ_S(Q)` and `|ξⱼ⟩`.
    pub s_gap: f64,
}

/// Measures `s` of `psi` in `basis` with a device `M` of dimension
/// `|basis| + 1` and compares both pictures outcome by outcome.
pub fn collapse_trial<S: AsRef<str>>(psi: &PureState, s: &[S], basis: Vec<PureState>) -> Result<CollapseTrial> {
    let q = psi.space().clone();
    let s_space = q.subspace(s)?;
    let s_names = s_space.names();
    let model = MeasurementModel::new(s_space.clone(), basis.clone(), Subsystem::new("M", basis.len() + 1))?;
    let after = model.measure(psi)?;
    let r = ReferenceSystem::isolated(after.clone());

    let mut hints = Vec::new();
    for j in 0..basis.len() {
        if let Some(h) = condition(&after, &[("M", model.pointer_index(j).expect("outcome"))])? {
            hints.push(h);
        }
    }
    let q_names = q.names();
    let q_states = possible_internal_states_with_hints(&r, &q_names, &hints)?;

    let mut out = CollapseTrial { probabilities: Vec::new(), probability_gap: 0.0, q_gap: 0.0, s_gap: 0.0 };
    for (j, xi) in basis.iter().enumerate() {
        let projector = Operator::new(s_space.clone(), xi.projector().matrix().clone())?;
        let v = projector.apply_to(&q, psi.amplitudes())?;
        let p = v.norm_squared();
        out.probabilities.push(p);
        if p < DROP_THRESHOLD {
            continue;
        }
        let collapsed = PureState::normalized(q.clone(), v)?;
        let pointer = model.pointer_state(j)?;
        let mut best = (0.0, None);
        for (i, e) in q_states.entries.iter().enumerate() {
            let pj = joint_probability_of(&r, &[&e.state, &pointer])?;
            if pj > best.0 {
                best = (pj, Some(i));
            }
        }
        let i = best.1.ok_or_else(|| Error::Numerical(format!("no state of Q is paired with pointer {j}")))?;
        out.probability_gap = out.probability_gap.max((best.0 - p).abs());
        let engine = &q_states.entries[i].state;
        out.q_gap = out.q_gap.max(1.0 - engine.fidelity(&collapsed)?);

        let own = ReferenceSystem::isolated(engine.clone());
        let s_states = possible_internal_states(&own, &s_names)?;
        let top = &s_states.entries[0].state;
        out.s_gap = out.s_gap.max(1.0 - top.fidelity(xi)?);
    }
    Ok(out)
}

/// Random states of `Q = S + Q∖S` measured in random bases of `S`. With
/// `d_rest ≤ 1` the measured system is all of `Q`.
pub fn collapse_correspondence(dims: (usize, usize), trials: u64, seed: u64) -> Result<ScenarioReport> {
    let (ds, d_rest) = dims;
    let mut report = ScenarioReport::new("collapse");
    report.param("dims", format!("{ds}x{d_rest}"));
    report.param("trials", trials);
    report.param("seed", seed);
    let mut pairs = vec![("S", ds)];
    if d_rest > 1 {
        pairs.push(("Q_rest", d_rest));
    }
    let q = CompositeSpace::from_pairs(&pairs)?;
    let s = q.subspace(&["S"])?;
    report.systems(q.subsystems());
    report.systems(&[Subsystem::new("M", ds + 1)]);

    let (mut p, mut qg, mut sg) = (Worst::default(), Worst::default(), Worst::default());
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let psi = random_state(&q, &mut rng)?;
        let basis = random_basis(&s, &mut rng)?;
        let trial = collapse_trial(&psi, &["S"], basis)?;
        p.update(trial.probability_gap, t);
        qg.update(trial.q_gap, t);
        sg.update(trial.s_gap, t);
    }
    report.check_close("outcome probabilities (worst trial)", ANCHOR_P, 0.0, p.value, CHECK_TOL);
    report.check_close("Q given pointer is the collapsed state (worst trial)", ANCHOR_Q, 0.0, qg.value, CHECK_TOL);
    report.check_close("S eigenvector is the measured basis state (worst trial)", ANCHOR_S, 0.0, sg.value, CHECK_TOL);
    Ok(report)
}
