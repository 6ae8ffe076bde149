use super::{expect_state, require_unit, ScenarioReport, CHECK_TOL};
use crate::calculus::{
    joint_probability_nested, joint_probability_of, possible_internal_states, state_with_respect_to, ReferenceSystem,
};
use crate::dynamics::MeasurementModel;
use crate::error::{Error, Result};
use crate::tensor::{CompositeSpace, PureState, Subsystem, C64};

const DEAD: usize = 0;
const ALIVE: usize = 1;
const OBS_DEAD: usize = 1;

const ANCHOR_RHO: &str = "cat: reduced state of the cat contains both states";
const ANCHOR_PIS: &str = "cat: the internal state of the cat is either dead or alive";
const ANCHOR_OBS: &str = "cat: reduced state of the observer";
const ANCHOR_JOINT: &str = "cat: the observer's internal state agrees with the cat's";

/// Nucleus, detector and cat in `α|+⟩|d₊⟩|d⟩ + β|−⟩|d₋⟩|a⟩`. With an
/// observer, the observer looks at the cat through a nondemolition
/// measurement, giving `α|…⟩|d⟩|o_d⟩ + β|…⟩|a⟩|o_a⟩`.
///
/// Subsystems are `nucleus`, `detector`, `cat` (dead 0, alive 1) and
/// `observer` (ready 0, saw dead 1, saw alive 2).
pub fn run_cat(alpha: C64, beta: C64, include_observer: bool) -> Result<ScenarioReport> {
    require_unit("|α|² + |β|²", &[alpha, beta])?;
    let mut report = ScenarioReport::new("cat");
    report.param("alpha", alpha);
    report.param("beta", beta);
    report.param("observer", include_observer);

    let space = CompositeSpace::from_pairs(&[("nucleus", 2), ("detector", 2), ("cat", 2)])?;
    let mut psi = PureState::from_terms(space, &[(alpha, &[0, 0, DEAD]), (beta, &[1, 1, ALIVE])])?;
    let cat_space = psi.space().subspace(&["cat"])?;
    let observer = MeasurementModel::computational(cat_space.clone(), Subsystem::new("observer", 3))?;
    if include_observer {
        psi = observer.measure(&psi)?;
    }
    report.systems(psi.space().subsystems());
    let r = ReferenceSystem::isolated(psi);
    let (pd, pa) = (alpha.norm_sqr(), beta.norm_sqr());

    let rho = state_with_respect_to(&r, &["cat"])?;
    let m = rho.matrix();
    report.check_close("rho_cat dead", ANCHOR_RHO, pd, m[(DEAD, DEAD)].re, CHECK_TOL);
    report.check_close("rho_cat alive", ANCHOR_RHO, pa, m[(ALIVE, ALIVE)].re, CHECK_TOL);
    report.check_close("rho_cat coherence", ANCHOR_RHO, 0.0, m[(DEAD, ALIVE)].norm(), CHECK_TOL);

    let dead = PureState::basis(cat_space.clone(), &[DEAD])?;
    let alive = PureState::basis(cat_space, &[ALIVE])?;
    let pis = possible_internal_states(&r, &["cat"])?;
    report.table("cat", ANCHOR_PIS, &pis);
    expect_state(&mut report, "cat dead", ANCHOR_PIS, &pis, &dead, pd, CHECK_TOL)?;
    expect_state(&mut report, "cat alive", ANCHOR_PIS, &pis, &alive, pa, CHECK_TOL)?;

    if include_observer {
        let o_dead = observer.pointer_state(DEAD)?;
        let o_alive = observer.pointer_state(ALIVE)?;
        let obs = possible_internal_states(&r, &["observer"])?;
        report.table("observer", ANCHOR_OBS, &obs);
        expect_state(&mut report, "observer saw dead", ANCHOR_OBS, &obs, &o_dead, pd, CHECK_TOL)?;
        expect_state(&mut report, "observer saw alive", ANCHOR_OBS, &obs, &o_alive, pa, CHECK_TOL)?;

        let mut cells = vec![vec![0.0; 2]; 2];
        for (i, x) in [&dead, &alive].into_iter().enumerate() {
            for (k, y) in [&o_dead, &o_alive].into_iter().enumerate() {
                cells[i][k] = joint_probability_of(&r, &[x, y])?;
            }
        }
        report.joint("cat x observer", ANCHOR_JOINT, &["d", "a"], &["o_d", "o_a"], cells.clone());
        report.check_close("P(d, o_d)", ANCHOR_JOINT, pd, cells[0][0], CHECK_TOL);
        report.check_close("P(d, o_a)", ANCHOR_JOINT, 0.0, cells[0][1], CHECK_TOL);
        report.check_close("P(a, o_d)", ANCHOR_JOINT, 0.0, cells[1][0], CHECK_TOL);
        report.check_close("P(a, o_a)", ANCHOR_JOINT, pa, cells[1][1], CHECK_TOL);
        report.check_close("P(d, o_d) + P(a, o_a)", ANCHOR_JOINT, 1.0, cells[0][0] + cells[1][1], CHECK_TOL);

        if pd > 0.0 {
            let both = possible_internal_states(&r, &["cat", "observer"])?;
            let dead_seen = PureState::basis(both.subset().clone(), &[DEAD, OBS_DEAD])?;
            let j = both.index_of(&dead_seen, CHECK_TOL);
            let k = obs.index_of(&o_dead, CHECK_TOL);
            let (j, k) = j.zip(k).ok_or_else(|| Error::Numerical("dead branch missing from the tables".into()))?;
            let nested = joint_probability_nested(&r, &["cat", "observer"], j, &["observer"], k)?;
            report.check_close("P(cat+observer dead, observer o_d)", ANCHOR_JOINT, pd, nested, CHECK_TOL);
        }
    }
    Ok(report)
}
