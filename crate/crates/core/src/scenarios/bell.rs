use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{require_unit, ScenarioReport, CHECK_TOL};
use crate::calculus::{joint_probability_of, ReferenceSystem};
use crate::dynamics::{spin_eigenstates, MeasurementModel, SpinDirection};
use crate::error::Result;
use crate::tensor::{CompositeSpace, PureState, Subsystem, C64};

const UP: usize = 0;
const DOWN: usize = 1;

const ANCHOR_CORRELATED: &str = "Bell: device joint table of the entangled pair violates Bell's inequality";
const ANCHOR_RECORDED: &str = "Bell: with recorders the joint table satisfies Bell's inequality";
const ANCHOR_MIXTURE: &str = "Bell: recorder table as a sum over recorded pair states";
const ANCHOR_MARGINAL: &str = "Bell: single-device distributions are unchanged by the recorders";
const ANCHOR_INEQUALITY: &str = "Bell's inequality P(a+,b+) <= P(a+,g+) + P(g+,b+)";

/// Device joint table for one pair of measurement angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellScanRow {
    pub theta1: f64,
    pub theta2: f64,
    /// True without recorders, where the pair stays entangled up to the
    /// device readings.
    pub correlated: bool,
    /// `table[j][k] = P(M₁,j,M₂,k)`, index 0 for `+`, 1 for `−`.
    pub table: [[f64; 2]; 2],
    pub marginal1: [f64; 2],
    pub marginal2: [f64; 2],
}

impl BellScanRow {
    pub fn total(&self) -> f64 {
        self.table.iter().flatten().sum()
    }
}

/// One inequality test over three angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub p_alpha_beta: f64,
    pub p_alpha_gamma: f64,
    pub p_gamma_beta: f64,
    /// `P(α+,β+) − P(α+,γ+) − P(γ+,β+)`; positive means violated.
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellScan {
    pub with_recorders: bool,
    pub rows: Vec<BellTriple>,
}

/// Margin above which a triple counts as violating the inequality.
pub const VIOLATION_TOL: f64 = 1e-10;

struct BellSetup {
    reference: ReferenceSystem,
    m1: MeasurementModel,
    m2: MeasurementModel,
    recorders: Option<(MeasurementModel, MeasurementModel)>,
}

/// Pair `a|↑↓⟩ − b|↓↑⟩` on `P1`, `P2`; optionally recorders `Mt1`, `Mt2`
/// first note `P1` in `{↑,↓}` and `P2` in `{↓,↑}`; then `M1`, `M2` measure
/// along `theta1`, `theta2`.
fn setup(a: C64, b: C64, theta1: f64, theta2: f64, with_recorders: bool) -> Result<BellSetup> {
    require_unit("|a|² + |b|²", &[a, b])?;
    let space = CompositeSpace::from_pairs(&[("P1", 2), ("P2", 2)])?;
    let mut psi = PureState::from_terms(space, &[(a, &[UP, DOWN]), (-b, &[DOWN, UP])])?;
    let p1 = CompositeSpace::from_pairs(&[("P1", 2)])?;
    let p2 = CompositeSpace::from_pairs(&[("P2", 2)])?;

    let recorders = if with_recorders {
        let basis1 = vec![PureState::basis(p1.clone(), &[UP])?, PureState::basis(p1.clone(), &[DOWN])?];
        let basis2 = vec![PureState::basis(p2.clone(), &[DOWN])?, PureState::basis(p2.clone(), &[UP])?];
        let r1 = MeasurementModel::new(p1.clone(), basis1, Subsystem::new("Mt1", 3))?;
        let r2 = MeasurementModel::new(p2.clone(), basis2, Subsystem::new("Mt2", 3))?;
        psi = r2.measure(&r1.measure(&psi)?)?;
        Some((r1, r2))
    } else {
        None
    };

    let (u1, d1) = spin_eigenstates(SpinDirection::new(theta1), "P1")?;
    let (u2, d2) = spin_eigenstates(SpinDirection::new(theta2), "P2")?;
    let m1 = MeasurementModel::new(p1, vec![u1, d1], Subsystem::new("M1", 3))?;
    let m2 = MeasurementModel::new(p2, vec![u2, d2], Subsystem::new("M2", 3))?;
    psi = m2.measure(&m1.measure(&psi)?)?;
    Ok(BellSetup { reference: ReferenceSystem::isolated(psi), m1, m2, recorders })
}

fn row_from(s: &BellSetup, theta1: f64, theta2: f64) -> Result<BellScanRow> {
    let r = &s.reference;
    let mut table = [[0.0; 2]; 2];
    let mut marginal1 = [0.0; 2];
    let mut marginal2 = [0.0; 2];
    for j in 0..2 {
        let mj = s.m1.pointer_state(j)?;
        marginal1[j] = joint_probability_of(r, &[&mj])?;
        marginal2[j] = joint_probability_of(r, &[&s.m2.pointer_state(j)?])?;
        for k in 0..2 {
            table[j][k] = joint_probability_of(r, &[&mj, &s.m2.pointer_state(k)?])?;
        }
    }
    Ok(BellScanRow { theta1, theta2, correlated: s.recorders.is_none(), table, marginal1, marginal2 })
}

/// Joint table of the two spin measurements, read from the devices'
/// possible internal states after both measurements.
pub fn run_bell(a: C64, b: C64, theta1: f64, theta2: f64, with_recorders: bool) -> Result<BellScanRow> {
    let s = setup(a, b, theta1, theta2, with_recorders)?;
    row_from(&s, theta1, theta2)
}

/// Closed-form device table: the squared sum over pair terms without
/// recorders, the sum of squares with them.
pub fn bell_joint_formula(a: C64, b: C64, theta1: f64, theta2: f64, with_recorders: bool) -> [[f64; 2]; 2] {
    let coeff = [a, -b];
    let d1 = SpinDirection::new(theta1);
    let d2 = SpinDirection::new(theta2);
    let xi1 = [d1.up_spinor(), d1.down_spinor()];
    let xi2 = [d2.up_spinor(), d2.down_spinor()];
    // term l: P1 in state l, P2 in the opposite state
    let p1_index = [UP, DOWN];
    let p2_index = [DOWN, UP];
    let mut out = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let terms: Vec<C64> =
                (0..2).map(|l| coeff[l] * xi1[j][p1_index[l]].conj() * xi2[k][p2_index[l]].conj()).collect();
            out[j][k] = if with_recorders {
                terms.iter().map(|t| t.norm_sqr()).sum()
            } else {
                terms.iter().sum::<C64>().norm_sqr()
            };
        }
    }
    out
}

/// Both paths at one angle pair, checked against the closed forms, the
/// recorder decomposition and the marginal invariance.
pub fn bell_report(a: C64, b: C64, theta1: f64, theta2: f64, with_recorders: bool) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("bell");
    report.param("a", a);
    report.param("b", b);
    report.param("theta1", theta1);
    report.param("theta2", theta2);
    report.param("recorders", with_recorders);

    let plain = setup(a, b, theta1, theta2, false)?;
    let recorded = setup(a, b, theta1, theta2, true)?;
    let main = if with_recorders { &recorded } else { &plain };
    report.systems(main.reference.space().subsystems());
    let row = row_from(main, theta1, theta2)?;
    let other = row_from(if with_recorders { &plain } else { &recorded }, theta1, theta2)?;

    let anchor = if with_recorders { ANCHOR_RECORDED } else { ANCHOR_CORRELATED };
    let cells: Vec<Vec<f64>> = row.table.iter().map(|r| r.to_vec()).collect();
    report.joint("P(M1,j,M2,k)", anchor, &["+", "-"], &["+", "-"], cells);
    let formula = bell_joint_formula(a, b, theta1, theta2, with_recorders);
    for (j, sj) in ["+", "-"].iter().enumerate() {
        for (k, sk) in ["+", "-"].iter().enumerate() {
            report.check_close(&format!("P({sj},{sk})"), anchor, formula[j][k], row.table[j][k], CHECK_TOL);
        }
    }
    report.check_close("table total", anchor, 1.0, row.total(), 1e-9);

    for j in 0..2 {
        let s = ["+", "-"][j];
        report.check_close(
            &format!("P(M1,{s}) both paths"),
            ANCHOR_MARGINAL,
            other.marginal1[j],
            row.marginal1[j],
            CHECK_TOL,
        );
        report.check_close(
            &format!("P(M2,{s}) both paths"),
            ANCHOR_MARGINAL,
            other.marginal2[j],
            row.marginal2[j],
            CHECK_TOL,
        );
        let sum: f64 = row.table[j].iter().sum();
        report.check_close(&format!("P(M1,{s}) from table"), ANCHOR_MARGINAL, row.marginal1[j], sum, CHECK_TOL);
    }

    if let Some((rec1, rec2)) = &recorded.recorders {
        let r = &recorded.reference;
        let table = recorded_table(&recorded)?;
        let mut worst: f64 = 0.0;
        let mut negative: f64 = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                let m1 = recorded.m1.pointer_state(j)?;
                let m2 = recorded.m2.pointer_state(k)?;
                let mut sum = 0.0;
                for l1 in 0..2 {
                    for l2 in 0..2 {
                        let t1 = rec1.pointer_state(l1)?;
                        let t2 = rec2.pointer_state(l2)?;
                        let p = joint_probability_of(r, &[&t1, &t2, &m1, &m2])?;
                        negative = negative.min(p);
                        if l1 != l2 {
                            worst = worst.max(p);
                        }
                        sum += p;
                    }
                }
                worst = worst.max((sum - table[j][k]).abs());
            }
        }
        report.check_close("recorder decomposition residual", ANCHOR_MIXTURE, 0.0, worst, 1e-12);
        report.check_at_least("recorder decomposition summands", ANCHOR_MIXTURE, 0.0, negative, 0.0);
    }
    Ok(report)
}

fn recorded_table(s: &BellSetup) -> Result<[[f64; 2]; 2]> {
    let mut t = [[0.0; 2]; 2];
    for (j, row) in t.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = joint_probability_of(&s.reference, &[&s.m1.pointer_state(j)?, &s.m2.pointer_state(k)?])?;
        }
    }
    Ok(t)
}

/// Inequality margins for each `(α, β, γ)` triple. Each distinct ordered
/// angle pair is simulated once; with `parallel` the pairs are spread over
/// the current rayon pool. Output order follows the input order.
pub fn bell_inequality_scan(
    a: C64,
    b: C64,
    triples: &[(f64, f64, f64)],
    with_recorders: bool,
    parallel: bool,
) -> Result<BellScan> {
    require_unit("|a|² + |b|²", &[a, b])?;
    let key = |x: f64, y: f64| (x.to_bits(), y.to_bits());
    let pairs: BTreeSet<(u64, u64)> =
        triples.iter().flat_map(|&(al, be, ga)| [key(al, be), key(al, ga), key(ga, be)]).collect();
    let pairs: Vec<(u64, u64)> = pairs.into_iter().collect();
    let eval = |&(x, y): &(u64, u64)| -> Result<((u64, u64), f64)> {
        let row = run_bell(a, b, f64::from_bits(x), f64::from_bits(y), with_recorders)?;
        Ok(((x, y), row.table[0][0]))
    };
    let values: Vec<((u64, u64), f64)> = if parallel {
        pairs.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        pairs.iter().map(eval).collect::<Result<_>>()?
    };
    let cache: BTreeMap<(u64, u64), f64> = values.into_iter().collect();
    let rows = triples
        .iter()
        .map(|&(al, be, ga)| {
            let p_ab = cache[&key(al, be)];
            let p_ag = cache[&key(al, ga)];
            let p_gb = cache[&key(ga, be)];
            let margin = p_ab - p_ag - p_gb;
            BellTriple {
                alpha: al,
                beta: be,
                gamma: ga,
                p_alpha_beta: p_ab,
                p_alpha_gamma: p_ag,
                p_gamma_beta: p_gb,
                margin,
                violated: margin > VIOLATION_TOL,
            }
        })
        .collect();
    Ok(BellScan { with_recorders, rows })
}

/// Report for a scan: one margin per triple; with recorders every margin
/// must stay at or below the violation tolerance.
pub fn bell_scan_report(a: C64, b: C64, scan: &BellScan) -> ScenarioReport {
    let mut report = ScenarioReport::new("bell");
    report.param("a", a);
    report.param("b", b);
    report.param("recorders", scan.with_recorders);
    for t in &scan.rows {
        let label = format!("({}, {}, {}) deg", fmt_deg(t.alpha), fmt_deg(t.beta), fmt_deg(t.gamma));
        report.value(&format!("P(a+,b+) {label}"), ANCHOR_INEQUALITY, t.p_alpha_beta);
        report.value(&format!("P(a+,g+) {label}"), ANCHOR_INEQUALITY, t.p_alpha_gamma);
        report.value(&format!("P(g+,b+) {label}"), ANCHOR_INEQUALITY, t.p_gamma_beta);
        report.value(&format!("margin {label}"), ANCHOR_INEQUALITY, t.margin);
        if scan.with_recorders {
            report.check_at_most(&format!("margin {label}"), ANCHOR_RECORDED, 0.0, t.margin, VIOLATION_TOL);
        }
    }
    report
}

fn fmt_deg(x: f64) -> String {
    let d = x.to_degrees();
    let r = d.round();
    if (d - r).abs() < 1e-9 {
        format!("{r}")
    } else {
        format!("{d}")
    }
}
