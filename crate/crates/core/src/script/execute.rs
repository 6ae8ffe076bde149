use thiserror::Error;

use super::ast::*;
use super::check::check;
use super::diagnostics::{Diagnostic, Severity};
use super::eval::Env;
use super::serialize::query_text;
use crate::calculus::{
    joint_probability, joint_probability_of, possible_internal_states, sample_internal_state, state_with_respect_to,
    JointQuery, ReferenceSystem,
};
use crate::dynamics::{rotation, spin_eigenstates, MeasurementModel, SpinDirection};
use crate::error::Error;
use crate::scenarios::{bell_inequality_scan, bell_scan_report, run_bell, ScenarioReport, CHECK_TOL, VIOLATION_TOL};
use crate::tensor::{apply_unitary, CVector, CompositeSpace, Operator, PureState, Subsystem, C64};

/// Largest stray amplitude tolerated on `|up,up>` and `|down,down>` when a
/// script pair is read as `a|up,down> − b|down,up>`.
const PAIR_SLACK: f64 = 1e-6;

/// A failure while running a checked script, located at the statement that
/// caused it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScriptError {
    #[error("{span}: {message}")]
    Invalid { span: SourceSpan, message: String },
    #[error("{span}: {source}")]
    Engine {
        span: SourceSpan,
        #[source]
        source: Error,
    },
}

impl ScriptError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ScriptError::Invalid { span, .. } | ScriptError::Engine { span, .. } => *span,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        let message = match self {
            ScriptError::Invalid { message, .. } => message.clone(),
            ScriptError::Engine { source, .. } => source.to_string(),
        };
        Diagnostic::error(self.span(), message)
    }
}

type XResult<T> = Result<T, ScriptError>;

fn invalid(d: Diagnostic) -> ScriptError {
    ScriptError::Invalid { span: d.span, message: d.message }
}

fn engine(span: SourceSpan) -> impl Fn(Error) -> ScriptError {
    move |source| ScriptError::Engine { span, source }
}

/// Runs the steps and queries of `doc` in order. Every report row produced
/// by a query carries the query's `line:col` as its origin; `seed` drives
/// `sample` queries only.
pub fn execute(doc: &ScriptDocument, seed: u64) -> XResult<ScenarioReport> {
    if let Some(d) = check(doc).into_iter().find(|d| d.severity == Severity::Error) {
        return Err(invalid(d));
    }
    let mut ex = Executor { env: Env::default(), state: None, report: ScenarioReport::new("script"), seed, samples: 0 };
    ex.report.param("seed", seed);
    for s in &doc.statements {
        ex.statement(s)?;
    }
    if let Some(st) = &ex.state {
        ex.report.systems = st.space().subsystems().to_vec();
    }
    Ok(ex.report)
}

struct Executor {
    env: Env,
    state: Option<PureState>,
    report: ScenarioReport,
    seed: u64,
    samples: u64,
}

impl Executor {
    fn state(&self, span: SourceSpan) -> XResult<&PureState> {
        self.state.as_ref().ok_or_else(|| ScriptError::Invalid { span, message: "no root state".into() })
    }

    fn statement(&mut self, s: &Statement) -> XResult<()> {
        match s {
            Statement::System { name, dim, .. } => {
                self.env.systems.push(Subsystem::new(name.name.clone(), *dim));
            }
            Statement::State { name, normalize, expr, .. } => {
                let v = self.env.eval_normalized(expr, *normalize).map_err(invalid)?;
                self.env.states.insert(name.name.clone(), v);
            }
            Statement::Unitary { name, axis, degrees, .. } => {
                self.env.unitaries.insert(name.name.clone(), (*axis, *degrees));
            }
            Statement::Root { name, span, .. } => {
                let (space, v) = self.env.states[&name.name].clone();
                self.state = Some(PureState::normalized(space, v).map_err(engine(*span))?);
            }
            Statement::Measure { target, basis, device, gate, span } => {
                let psi = self.state(*span)?;
                let tspace = self.env.space_of(target).map_err(invalid)?;
                let dev = self.env.system(&device.name).expect("checked device").clone();
                let model = match basis {
                    Basis::Computational => MeasurementModel::computational(tspace, dev),
                    Basis::Spin { degrees } => {
                        let (up, down) = spin_eigenstates(SpinDirection::from_degrees(*degrees), &target[0].name)
                            .map_err(engine(*span))?;
                        MeasurementModel::new(tspace, vec![up, down], dev)
                    }
                    Basis::States(exprs) => {
                        let basis = self.basis_states(&tspace, exprs)?;
                        MeasurementModel::new(tspace, basis, dev)
                    }
                }
                .map_err(engine(*span))?;
                let next = match gate {
                    Some((g, v)) => model.measure_gated(psi, &g.name, *v),
                    None => model.measure(psi),
                }
                .map_err(engine(*span))?;
                self.state = Some(next);
            }
            Statement::Apply { unitary, target, span } => {
                let (axis, degrees) = self.env.unitaries[&unitary.name];
                let space = self.env.space_of(std::slice::from_ref(target)).map_err(invalid)?;
                let u =
                    Operator::unitary(space, rotation(axis.vector(), degrees.to_radians())).map_err(engine(*span))?;
                let next = apply_unitary(self.state(*span)?, &u).map_err(engine(*span))?;
                self.state = Some(next);
            }
            Statement::Query { query, expect, span } => {
                let mark = self.report.mark();
                self.query(query, expect.as_ref(), *span)?;
                self.report.tag_since(mark, &span.to_string());
            }
        }
        Ok(())
    }

    /// Basis states in the target's layout, orthonormalized in the given
    /// order so that decimal truncation within the normalization slack is
    /// accepted.
    fn basis_states(&self, tspace: &CompositeSpace, exprs: &[KetExpr]) -> XResult<Vec<PureState>> {
        let mut out: Vec<CVector> = Vec::with_capacity(exprs.len());
        for e in exprs {
            let (space, v) = self.env.eval_normalized(e, false).map_err(invalid)?;
            let pos = space.positions(&tspace.names()).map_err(engine(e.span))?;
            let mut v = CVector::from_iterator(v.len(), space.offsets(&pos).into_iter().map(|o| v[o]));
            for u in &out {
                let ip = u.dotc(&v);
                v -= u * ip;
            }
            let n = v.norm();
            out.push(v / C64::new(n, 0.0));
        }
        out.into_iter().map(|v| PureState::new(tspace.clone(), v).map_err(engine(exprs[0].span))).collect()
    }

    fn query(&mut self, q: &Query, expect: Option<&Expect>, span: SourceSpan) -> XResult<()> {
        let err = engine(span);
        let r = ReferenceSystem::isolated(self.state(span)?.clone());
        let anchor = query_text(q);
        let names = |v: &[Ident]| v.iter().map(|i| i.name.clone()).collect::<Vec<_>>();
        match q {
            Query::Reduce(v) => {
                let rho = state_with_respect_to(&r, &names(v)).map_err(err)?;
                let space = rho.space();
                let labels: Vec<String> = (0..space.total_dim())
                    .map(|i| space.digits(i).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                let labels: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
                let m = rho.matrix();
                let part = |f: fn(&C64) -> f64| {
                    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
                };
                let who = space.names().join(", ");
                self.report.joint(&format!("rho({who}) real part"), &anchor, &labels, &labels, part(|z| z.re));
                self.report.joint(&format!("rho({who}) imaginary part"), &anchor, &labels, &labels, part(|z| z.im));
                self.report.value(&format!("purity of {who}"), &anchor, rho.purity());
                let diag: Vec<f64> = (0..m.nrows()).map(|i| m[(i, i)].re).collect();
                self.expect_list(expect, &anchor, &diag);
            }
            Query::PossibleStates(v) => {
                let pis = possible_internal_states(&r, &names(v)).map_err(err)?;
                self.report.table(&names(v).join("+"), &anchor, &pis);
                self.expect_list(expect, &anchor, &pis.probabilities());
            }
            Query::Sample(v) => {
                let pis = possible_internal_states(&r, &names(v)).map_err(err)?;
                self.report.table(&names(v).join("+"), &anchor, &pis);
                let j = sample_internal_state(&pis, self.seed.wrapping_add(self.samples));
                self.samples += 1;
                self.value(expect, &anchor, j as f64);
            }
            Query::Joint(terms) => {
                let jq = terms.iter().fold(JointQuery::new(), |jq, (t, j)| jq.term(&names(t), *j));
                let p = joint_probability(&r, &jq).map_err(err)?;
                self.value(expect, &anchor, p);
            }
            Query::Prob(exprs) => {
                let states = exprs
                    .iter()
                    .map(|e| self.env.eval_state(e, false).map_err(invalid))
                    .collect::<XResult<Vec<_>>>()?;
                let refs: Vec<&PureState> = states.iter().collect();
                let p = joint_probability_of(&r, &refs).map_err(err)?;
                self.value(expect, &anchor, p);
            }
            Query::BellScan { pair, degrees, recorders } => {
                let (a, b) = self.singlet_amplitudes(&r, pair, span)?;
                let [al, be, ga] = degrees.map(f64::to_radians);
                let scan = bell_inequality_scan(a, b, &[(al, be, ga)], *recorders, false).map_err(err)?;
                for (x, y, dx, dy) in [
                    (al, be, degrees[0], degrees[1]),
                    (al, ga, degrees[0], degrees[2]),
                    (ga, be, degrees[2], degrees[1]),
                ] {
                    let row = run_bell(a, b, x, y, *recorders).map_err(engine(span))?;
                    let cells = row.table.iter().map(|r| r.to_vec()).collect();
                    self.report.joint(
                        &format!("P(M1,M2) at ({dx}, {dy}) deg"),
                        &anchor,
                        &["+", "-"],
                        &["+", "-"],
                        cells,
                    );
                }
                let mut sub = bell_scan_report(a, b, &scan);
                for v in &mut sub.values {
                    v.anchor = anchor.clone();
                }
                self.report.absorb(sub);
                let margin = scan.rows[0].margin;
                match expect {
                    Some(Expect::Violated(true)) => {
                        self.report.check_at_least(
                            &format!("expect {anchor} violated"),
                            &anchor,
                            VIOLATION_TOL,
                            margin,
                            0.0,
                        );
                    }
                    Some(Expect::Violated(false)) => {
                        self.report.check_at_most(
                            &format!("expect {anchor} satisfied"),
                            &anchor,
                            0.0,
                            margin,
                            VIOLATION_TOL,
                        );
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// `(a, b)` of the pair state `a|up,down> − b|down,up>`, which must be
    /// pure with respect to the root.
    fn singlet_amplitudes(&self, r: &ReferenceSystem, pair: &(Ident, Ident), span: SourceSpan) -> XResult<(C64, C64)> {
        let err = engine(span);
        let names = [pair.0.name.as_str(), pair.1.name.as_str()];
        let pis = possible_internal_states(r, &names).map_err(&err)?;
        let top = &pis.entries[0];
        if 1.0 - top.probability > CHECK_TOL {
            return Err(ScriptError::Invalid {
                span,
                message: format!(
                    "bell_scan needs ({}, {}) in a pure state; it is entangled with the rest (largest weight {:.6})",
                    names[0], names[1], top.probability
                ),
            });
        }
        let order = CompositeSpace::from_pairs(&[(names[0], 2), (names[1], 2)]).map_err(&err)?;
        let v = top.state.reorder(&order).map_err(&err)?.into_amplitudes();
        if v[0].norm() > PAIR_SLACK || v[3].norm() > PAIR_SLACK {
            return Err(ScriptError::Invalid {
                span,
                message: format!("bell_scan needs a|up,down> - b|down,up> on ({}, {})", names[0], names[1]),
            });
        }
        let n = (v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
        Ok((v[1] / n, -v[2] / n))
    }

    fn value(&mut self, expect: Option<&Expect>, anchor: &str, actual: f64) {
        self.report.value(anchor, anchor, actual);
        if let Some(Expect::Value { value, within }) = expect {
            self.report.check_close(&format!("expect {anchor}"), anchor, *value, actual, within.unwrap_or(CHECK_TOL));
        }
    }

    /// Entry-wise comparison; the shorter list is padded with zeros.
    fn expect_list(&mut self, expect: Option<&Expect>, anchor: &str, actual: &[f64]) {
        let Some(Expect::Probabilities { values, within }) = expect else { return };
        let tol = within.unwrap_or(CHECK_TOL);
        for k in 0..values.len().max(actual.len()) {
            let e = values.get(k).copied().unwrap_or(0.0);
            let a = actual.get(k).copied().unwrap_or(0.0);
            self.report.check_close(&format!("expect {anchor} [{k}]"), anchor, e, a, tol);
        }
    }
}
