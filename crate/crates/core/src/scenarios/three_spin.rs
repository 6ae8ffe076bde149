use super::{amplitudes, expect_same_states, expect_state, require_unit, ScenarioReport, CHECK_TOL};
use crate::calculus::{
    overlap_matrix, possible_internal_states, possible_internal_states_aligned, possible_internal_states_with_hints,
    ReferenceSystem,
};
use crate::dynamics::MeasurementModel;
use crate::error::Result;
use crate::tensor::{CompositeSpace, PureState, Subsystem, C64};

const UP: usize = 0;
const DOWN: usize = 1;
// C is written in the eigenbasis of its x spin component.
const PLUS: usize = 0;
const MINUS: usize = 1;

const ANCHOR_R1: &str = "three spins: A+B is one of the two entangled pair states";
const ANCHOR_R2: &str = "three spins: B+C is one of two states correlated with B along z";
const ANCHOR_POST: &str = "three spins: after measuring A+B, B+C is one of four product states";
const ANCHOR_R1_KEPT: &str = "three spins: the nondisturbing measurement leaves A+B unchanged";
const ANCHOR_R2_CHANGED: &str = "three spins: the same measurement changes B+C";

/// Three spins `A`, `B`, `C` in
/// `α(β|↑↓⟩ + γ*|↓↑⟩)|+⟩ + δ(γ|↑↓⟩ − β*|↓↑⟩)|−⟩`, with `R₁ = A+B` and
/// `R₂ = B+C`. A nondisturbing measurement of `R₁` in the pair basis leaves
/// `R₁`'s possible states in place and changes those of `R₂`.
pub fn run_three_spin(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Result<ScenarioReport> {
    require_unit("|α|² + |δ|²", &[alpha, delta])?;
    require_unit("|β|² + |γ|²", &[beta, gamma])?;
    let mut report = ScenarioReport::new("threespin");
    for (name, z) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
        report.param(name, z);
    }
    let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2), ("C", 2)])?;
    let phi = PureState::from_terms(
        space.clone(),
        &[
            (alpha * beta, &[UP, DOWN, PLUS]),
            (alpha * gamma.conj(), &[DOWN, UP, PLUS]),
            (delta * gamma, &[UP, DOWN, MINUS]),
            (-delta * beta.conj(), &[DOWN, UP, MINUS]),
        ],
    )?;
    let r = ReferenceSystem::isolated(phi.clone());

    let pair = CompositeSpace::from_pairs(&[("A", 2), ("B", 2)])?;
    let psi_plus = PureState::from_terms(pair.clone(), &[(beta, &[UP, DOWN]), (gamma.conj(), &[DOWN, UP])])?;
    let psi_minus = PureState::from_terms(pair.clone(), &[(gamma, &[UP, DOWN]), (-beta.conj(), &[DOWN, UP])])?;
    let (wa, wd) = (alpha.norm_sqr(), delta.norm_sqr());
    let (wb, wg) = (beta.norm_sqr(), gamma.norm_sqr());

    // Inside a degenerate level any orthonormal basis is valid; the pair
    // states are offered as hints, and the overlap checks below confirm
    // that they really lie in the level.
    let r1 = possible_internal_states_with_hints(&r, &["A", "B"], &[psi_plus.clone(), psi_minus.clone()])?;
    report.table("R1 before", ANCHOR_R1, &r1);
    expect_state(&mut report, "R1 before, psi+", ANCHOR_R1, &r1, &psi_plus, wa, CHECK_TOL)?;
    expect_state(&mut report, "R1 before, psi-", ANCHOR_R1, &r1, &psi_minus, wd, CHECK_TOL)?;

    let bc = CompositeSpace::from_pairs(&[("B", 2), ("C", 2)])?;
    let w_down = wa * wb + wd * wg;
    let w_up = wa * wg + wd * wb;
    let mut hints = Vec::new();
    if w_down > 0.0 {
        hints.push(PureState::normalized(
            bc.clone(),
            amplitudes(&bc, &[(alpha * beta, &[DOWN, PLUS]), (delta * gamma, &[DOWN, MINUS])])?,
        )?);
    }
    if w_up > 0.0 {
        hints.push(PureState::normalized(
            bc.clone(),
            amplitudes(&bc, &[(alpha * gamma.conj(), &[UP, PLUS]), (-delta * beta.conj(), &[UP, MINUS])])?,
        )?);
    }
    let r2 = possible_internal_states_with_hints(&r, &["B", "C"], &hints)?;
    report.table("R2 before", ANCHOR_R2, &r2);
    let mut k = 0;
    for (label, w) in [("R2 before, B down", w_down), ("R2 before, B up", w_up)] {
        if w > 0.0 {
            expect_state(&mut report, label, ANCHOR_R2, &r2, &hints[k], w, CHECK_TOL)?;
            k += 1;
        }
    }
    let mut levels = r2.probabilities();
    levels.resize(2, 0.0);
    report.value("R2 eigenvalue 1", ANCHOR_R2, levels[0]);
    report.value("R2 eigenvalue 2", ANCHOR_R2, levels[1]);

    let up_up = PureState::basis(pair.clone(), &[UP, UP])?;
    let down_down = PureState::basis(pair.clone(), &[DOWN, DOWN])?;
    let model = MeasurementModel::new(
        pair,
        vec![psi_plus.clone(), psi_minus.clone(), up_up, down_down],
        Subsystem::new("M", 5),
    )?;
    let after = ReferenceSystem::isolated(model.measure(&phi)?);
    report.systems(after.space().subsystems());

    let r1_after = possible_internal_states_aligned(&after, &["A", "B"], &r1)?;
    report.table("R1 after", ANCHOR_R1_KEPT, &r1_after);
    expect_same_states(&mut report, "R1 unchanged", ANCHOR_R1_KEPT, &r1, &r1_after, CHECK_TOL)?;

    // The post-measurement level structure is read without hints: the
    // canonical choice is what has to produce the product states.
    let r2_after = possible_internal_states(&after, &["B", "C"])?;
    report.table("R2 after", ANCHOR_POST, &r2_after);
    for (label, digits, w) in [
        ("R2 after, B down C+", [DOWN, PLUS], wa * wb),
        ("R2 after, B down C-", [DOWN, MINUS], wd * wg),
        ("R2 after, B up C+", [UP, PLUS], wa * wg),
        ("R2 after, B up C-", [UP, MINUS], wd * wb),
    ] {
        let product = PureState::basis(bc.clone(), &digits)?;
        expect_state(&mut report, label, ANCHOR_POST, &r2_after, &product, w, CHECK_TOL)?;
    }

    let overlaps = overlap_matrix(&r2, &r2_after)?;
    let rows: Vec<String> = (0..r2.len()).map(|j| format!("before {j}")).collect();
    let cols: Vec<String> = (0..r2_after.len()).map(|j| format!("after {j}")).collect();
    let rows_ref: Vec<&str> = rows.iter().map(String::as_str).collect();
    let cols_ref: Vec<&str> = cols.iter().map(String::as_str).collect();
    report.joint("R2 overlap before/after", ANCHOR_R2_CHANGED, &rows_ref, &cols_ref, overlaps.clone());
    let best = overlaps.iter().map(|row| row.iter().cloned().fold(0.0, f64::max)).fold(0.0, f64::max);
    report.value("R2 largest overlap before/after", ANCHOR_R2_CHANGED, best);
    if (alpha * beta * gamma * delta).norm() > 1e-6 {
        // Each old state spreads over two new ones.
        report.check_at_most("R2 changed", ANCHOR_R2_CHANGED, 1.0 - 1e-6, best, 0.0);
    }
    Ok(report)
}
