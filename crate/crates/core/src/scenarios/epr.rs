use super::{c, condition, expect_same_states, expect_state, require_unit, ScenarioReport, CHECK_TOL};
use crate::calculus::{
    joint_probability_of, possible_internal_states, possible_internal_states_aligned,
    possible_internal_states_with_hints, ReferenceSystem, DROP_THRESHOLD,
};
use crate::dynamics::{
    epr_euler_angles, epr_partner_state, spin_eigenstates, MeasurementModel, SpinDirection, SpinOutcome,
};
use crate::error::{Error, Result};
use crate::tensor::{tensor_product, CompositeSpace, PureState, Subsystem, C64};

const UP: usize = 0;
const DOWN: usize = 1;
const SUCCESS: usize = 0;
const FAILURE: usize = 1;
const IN: usize = 0;
const OUT: usize = 1;
const READY: usize = 0;

const ANCHOR_BRANCH: &str = "EPR: possible internal states of the two particle system after the measurement";
const ANCHOR_PARTNER: &str = "EPR: state of particle 2 with respect to the two particle system";
const ANCHOR_EULER: &str = "EPR: partner state is a spin eigenstate along the Euler-rotated axis";
const ANCHOR_RECORD: &str = "EPR: branch states are paired with the device pointer";
const ANCHOR_LOCAL: &str = "EPR: measuring particle 1 leaves particle 2's own states unchanged";

/// Pair `a|↑↓⟩ − b|↓↑⟩` made by a preparation device that succeeds with
/// amplitude `prep_success`; on failure the device ends in `|μ_f⟩` and the
/// particles in `|↑↑⟩` on a path that misses the apparatus. Particle 1 is
/// measured along `delta` by a device `M` that only fires on the `in` path.
///
/// Subsystems: `Mp` (success 0, failure 1), `path` (in 0, out 1), `P1`,
/// `P2` and `M` (ready 0, `+` 1, `−` 2). The two particle system is
/// `path + P1 + P2`.
pub fn run_epr(a: C64, b: C64, delta: f64, prep_success: f64) -> Result<ScenarioReport> {
    require_unit("|a|² + |b|²", &[a, b])?;
    if !(prep_success > 0.0 && prep_success <= 1.0) {
        return Err(Error::Normalization(format!("preparation amplitude {prep_success} not in (0, 1]")));
    }
    let mut report = ScenarioReport::new("epr");
    report.param("a", a);
    report.param("b", b);
    report.param("delta", delta);
    report.param("prep_success", prep_success);

    let fail = (1.0 - prep_success * prep_success).max(0.0).sqrt();
    let space = CompositeSpace::from_pairs(&[("Mp", 2), ("path", 2), ("P1", 2), ("P2", 2)])?;
    let psi = PureState::from_terms(
        space,
        &[
            (c(prep_success) * a, &[SUCCESS, IN, UP, DOWN]),
            (-c(prep_success) * b, &[SUCCESS, IN, DOWN, UP]),
            (c(fail), &[FAILURE, OUT, UP, UP]),
        ],
    )?;
    let before = ReferenceSystem::isolated(psi.clone());
    let p2_before = possible_internal_states(&before, &["P2"])?;
    report.table("P2 before", ANCHOR_LOCAL, &p2_before);

    let dir = SpinDirection::new(delta);
    let (up_d, down_d) = spin_eigenstates(dir, "P1")?;
    let p1 = CompositeSpace::from_pairs(&[("P1", 2)])?;
    let model = MeasurementModel::new(p1, vec![up_d.clone(), down_d.clone()], Subsystem::new("M", 3))?;
    let after_state = model.measure_gated(&psi, "path", IN)?;
    report.systems(after_state.space().subsystems());
    let after = ReferenceSystem::isolated(after_state.clone());

    // Hints for degenerate levels: the state of the two particle system
    // relative to each device reading.
    let pair_names = ["path", "P1", "P2"];
    let mut hints = Vec::new();
    for (k, mp) in [(0, SUCCESS), (1, SUCCESS)] {
        let pointer = model.pointer_index(k).expect("two outcomes");
        if let Some(h) = condition(&after_state, &[("Mp", mp), ("M", pointer)])? {
            hints.push(h);
        }
    }
    if let Some(h) = condition(&after_state, &[("Mp", FAILURE), ("M", READY)])? {
        hints.push(h);
    }
    let pair = possible_internal_states_with_hints(&after, &pair_names, &hints)?;
    report.table("two particle system after", ANCHOR_BRANCH, &pair);
    let pair_space = pair.subset().clone();

    let path_in = PureState::basis(CompositeSpace::from_pairs(&[("path", 2)])?, &[IN])?;
    let failed = PureState::basis(pair_space.clone(), &[OUT, UP, UP])?;
    expect_state(&mut report, "failure branch", ANCHOR_BRANCH, &pair, &failed, fail * fail, CHECK_TOL)?;

    let w = prep_success * prep_success;
    for (outcome, p1_state) in [(SpinOutcome::Plus, &up_d), (SpinOutcome::Minus, &down_d)] {
        let tag = outcome.symbol();
        let (sn, cs) = (delta / 2.0).sin_cos();
        let (ma, mb) = (a.norm_sqr(), b.norm_sqr());
        let weight = w * match outcome {
            SpinOutcome::Plus => ma * cs * cs + mb * sn * sn,
            SpinOutcome::Minus => ma * sn * sn + mb * cs * cs,
        };
        report.value(&format!("P(outcome {tag})"), ANCHOR_BRANCH, weight);
        let pointer = model.pointer_state(outcome_index(outcome))?;
        if weight < DROP_THRESHOLD {
            let reading = joint_probability_of(&after, &[&pointer])?;
            report.check_close(&format!("branch {tag}: device never reads it"), ANCHOR_RECORD, 0.0, reading, CHECK_TOL);
            continue;
        }
        let partner = epr_partner_state(a, b, dir, outcome, "P2")?;
        let branch = tensor_product(&tensor_product(&path_in, p1_state)?, &partner)?.reorder(&pair_space)?;
        expect_state(&mut report, &format!("branch {tag}"), ANCHOR_BRANCH, &pair, &branch, weight, CHECK_TOL)?;

        let j = pair
            .index_of(&branch, 1e-8)
            .ok_or_else(|| Error::Numerical(format!("branch {tag} not among the possible states")))?;
        let own = ReferenceSystem::isolated(pair.entries[j].state.clone());
        let rho_p2 = possible_internal_states(&own, &["P2"])?;
        report.table(&format!("P2 w.r.t. two particle system, branch {tag}"), ANCHOR_PARTNER, &rho_p2);
        report.check_close(
            &format!("branch {tag}: P2 pure"),
            ANCHOR_PARTNER,
            1.0,
            rho_p2.entries[0].probability,
            CHECK_TOL,
        );
        let fid = rho_p2.entries[0].state.fidelity(&partner)?;
        report.check_close(&format!("branch {tag}: P2 matches collapse"), ANCHOR_PARTNER, 1.0, fid, CHECK_TOL);

        match epr_euler_angles(a, b, dir, outcome) {
            Ok(angles) => {
                let op = angles.axis_operator();
                let v = rho_p2.entries[0].state.amplitudes();
                let lambda = -0.5 * outcome.sign();
                let residual = (&op * v - v * c(lambda)).norm();
                report.check_close(
                    &format!("branch {tag}: eigenvector residual"),
                    ANCHOR_EULER,
                    0.0,
                    residual,
                    CHECK_TOL,
                );
                report.value(&format!("branch {tag}: alpha"), ANCHOR_EULER, angles.alpha);
                report.value(&format!("branch {tag}: beta"), ANCHOR_EULER, angles.beta);
                report.value(&format!("branch {tag}: gamma"), ANCHOR_EULER, angles.gamma);
            }
            Err(Error::PhaseUndefined(_)) => {}
            Err(e) => return Err(e),
        }

        let joint = joint_probability_of(&after, &[&pair.entries[j].state, &pointer])?;
        report.check_close(&format!("P(branch {tag}, M {tag})"), ANCHOR_RECORD, weight, joint, CHECK_TOL);
    }

    let p2_after = possible_internal_states_aligned(&after, &["P2"], &p2_before)?;
    report.table("P2 after", ANCHOR_LOCAL, &p2_after);
    expect_same_states(&mut report, "P2 unchanged", ANCHOR_LOCAL, &p2_before, &p2_after, CHECK_TOL)?;
    Ok(report)
}

fn outcome_index(outcome: SpinOutcome) -> usize {
    match outcome {
        SpinOutcome::Plus => 0,
        SpinOutcome::Minus => 1,
    }
}
