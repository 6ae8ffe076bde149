//! Worked scenarios built from the calculus and dynamics primitives. Each
//! run returns a [`ScenarioReport`] with its tables and checked relations.

mod bell;
mod cat;
mod collapse;
mod epr;
mod locality;
mod report;
mod three_spin;

pub use bell::{
    bell_inequality_scan, bell_joint_formula, bell_report, bell_scan_report, run_bell, BellScan, BellScanRow,
    BellTriple, VIOLATION_TOL,
};
pub use cat::run_cat;
pub use collapse::{collapse_correspondence, collapse_trial, CollapseTrial};
pub use epr::run_epr;
pub use locality::{locality_check, locality_trial, LocalityTrial};
pub use report::{Assertion, JointTable, NamedValue, ReportMark, ScenarioReport, StateTable, Worst};
pub use three_spin::run_three_spin;

use crate::calculus::{PossibleInternalStates, DROP_THRESHOLD};
use crate::error::{Error, Result};
use crate::tensor::{CVector, CompositeSpace, PureState, C64};

/// Tolerance for probabilities and overlaps checked by the scenarios.
pub const CHECK_TOL: f64 = 1e-10;

/// Names of the canned scenarios, in the order the CLI lists them.
pub const SCENARIO_NAMES: [&str; 6] = ["threespin", "cat", "epr", "bell", "locality", "collapse"];

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Amplitude vector with the given basis terms, not normalized.
pub(crate) fn amplitudes(space: &CompositeSpace, terms: &[(C64, &[usize])]) -> Result<CVector> {
    let mut v = CVector::zeros(space.total_dim());
    for (z, digits) in terms {
        v[space.flat_index(digits)?] += *z;
    }
    Ok(v)
}

/// `(⟨fixed| ⊗ 1)|ψ⟩` on the remaining subsystems, normalized; `None` if the
/// conditioned branch has no weight.
pub(crate) fn condition(psi: &PureState, fixed: &[(&str, usize)]) -> Result<Option<PureState>> {
    let space = psi.space();
    let names: Vec<&str> = fixed.iter().map(|(n, _)| *n).collect();
    let rest = space
        .complement(&names)?
        .ok_or_else(|| Error::Subset("conditioning on every subsystem leaves nothing".into()))?;
    let pos_fixed = space.positions(&names)?;
    let pos_rest = space.positions(&rest.names())?;
    let strides = space.strides();
    let base: usize = pos_fixed.iter().zip(fixed).map(|(&p, (_, i))| strides[p] * i).sum();
    for (&p, (n, i)) in pos_fixed.iter().zip(fixed) {
        if *i >= space.dims()[p] {
            return Err(Error::Dimension(format!("index {i} out of range for {n}")));
        }
    }
    let amps = psi.amplitudes();
    let v = CVector::from_iterator(rest.total_dim(), space.offsets(&pos_rest).into_iter().map(|o| amps[base + o]));
    if v.norm() < 1e-12 {
        return Ok(None);
    }
    Ok(Some(PureState::normalized(rest, v)?))
}

pub(crate) fn require_unit(what: &str, pairs: &[C64]) -> Result<()> {
    let n: f64 = pairs.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > 1e-10 || !n.is_finite() {
        return Err(Error::Normalization(format!("{what}: squared norms sum to {n}")));
    }
    Ok(())
}

/// Checks that `expected` occurs among the possible internal states with the
/// given probability; states of vanishing weight must be absent.
pub(crate) fn expect_state(
    report: &mut ScenarioReport,
    label: &str,
    anchor: &str,
    pis: &PossibleInternalStates,
    expected: &PureState,
    weight: f64,
    tol: f64,
) -> Result<()> {
    let mut best = (0.0, None);
    for (j, e) in pis.entries.iter().enumerate() {
        let o = e.state.overlap(expected)?;
        if o > best.0 {
            best = (o, Some(j));
        }
    }
    if weight < DROP_THRESHOLD {
        let present = best.1.map(|j| pis.entries[j].probability).unwrap_or(0.0) * best.0;
        report.check_close(&format!("{label}: absent"), anchor, 0.0, present, tol);
        return Ok(());
    }
    report.check_close(&format!("{label}: overlap"), anchor, 1.0, best.0, tol);
    let p = best.1.map(|j| pis.entries[j].probability).unwrap_or(0.0);
    report.check_close(&format!("{label}: probability"), anchor, weight, p, tol);
    Ok(())
}

/// Checks that two tables list the same states with the same probabilities,
/// entry by entry.
pub(crate) fn expect_same_states(
    report: &mut ScenarioReport,
    label: &str,
    anchor: &str,
    before: &PossibleInternalStates,
    after: &PossibleInternalStates,
    tol: f64,
) -> Result<()> {
    report.check_close(&format!("{label}: number of states"), anchor, before.len() as f64, after.len() as f64, 0.0);
    let mut prob_dev: f64 = 0.0;
    let mut overlap_dev: f64 = 0.0;
    for (x, y) in before.entries.iter().zip(&after.entries) {
        prob_dev = prob_dev.max((x.probability - y.probability).abs());
        overlap_dev = overlap_dev.max(1.0 - x.state.overlap(&y.state)?);
    }
    report.check_close(&format!("{label}: probabilities"), anchor, 0.0, prob_dev, tol);
    report.check_close(&format!("{label}: states"), anchor, 0.0, overlap_dev, tol);
    Ok(())
}
