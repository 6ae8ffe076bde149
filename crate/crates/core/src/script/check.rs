use std::collections::HashMap;

use super::ast::*;
use super::diagnostics::Diagnostic;
use super::eval::{Env, NORM_SLACK};
use crate::tensor::{CVector, CompositeSpace, Subsystem};

/// Words that cannot name a subsystem, state or unitary.
pub const RESERVED: [&str; 27] = [
    "system",
    "state",
    "unitary",
    "root",
    "measure",
    "apply",
    "query",
    "normalize",
    "isolated",
    "in",
    "with",
    "when",
    "to",
    "expect",
    "within",
    "violated",
    "satisfied",
    "computational",
    "spin",
    "rot",
    "up",
    "down",
    "recorders",
    "x",
    "y",
    "z",
    "i",
];

type CResult<T> = Result<T, Diagnostic>;

/// Semantic checks over a parsed document, one diagnostic per bad
/// statement. A document of declarations alone needs no root; every step
/// and query must come after the single `root NAME isolated;`.
pub(crate) fn check(doc: &ScriptDocument) -> Vec<Diagnostic> {
    let mut c = Checker::default();
    for s in &doc.statements {
        if let Err(d) = c.statement(s) {
            c.diags.push(d);
        }
    }
    c.diags
}

#[derive(Default)]
struct Checker {
    env: Env,
    diags: Vec<Diagnostic>,
    declared: HashMap<String, SourceSpan>,
    root: Option<SourceSpan>,
    /// Subsystems of the evolving state: the root's, then attached devices.
    current: Vec<String>,
}

/// First `len` characters of a statement, i.e. its keyword.
fn keyword_span(span: SourceSpan, kw: &str) -> SourceSpan {
    SourceSpan::new(span.line, span.column, kw.len())
}

/// The closing `;` of a single-line statement.
fn last_char(span: SourceSpan) -> SourceSpan {
    SourceSpan::new(span.line, span.column + span.length - 1, 1)
}

impl Checker {
    fn declare(&mut self, id: &Ident) -> CResult<()> {
        if RESERVED.contains(&id.name.as_str()) {
            return Err(Diagnostic::error(id.span, format!("`{}` is a reserved word", id.name)));
        }
        if let Some(prev) = self.declared.get(&id.name) {
            return Err(Diagnostic::error(id.span, format!("`{}` is already declared at {prev}", id.name)));
        }
        self.declared.insert(id.name.clone(), id.span);
        Ok(())
    }

    fn require_root(&self, span: SourceSpan, kw: &str) -> CResult<()> {
        if self.root.is_none() {
            return Err(Diagnostic::error(
                keyword_span(span, kw),
                format!("`{kw}` before the root; declare `root NAME isolated;` first"),
            ));
        }
        Ok(())
    }

    fn current_sub(&self, id: &Ident) -> CResult<Subsystem> {
        let sub = self
            .env
            .system(&id.name)
            .ok_or_else(|| Diagnostic::error(id.span, format!("undeclared subsystem `{}`", id.name)))?;
        if !self.current.contains(&id.name) {
            return Err(Diagnostic::error(
                id.span,
                format!("`{}` is not part of the current system ({})", id.name, self.current.join(", ")),
            ));
        }
        Ok(sub.clone())
    }

    /// Distinct subsystems of the current system, in the given order.
    fn current_space(&self, names: &[Ident]) -> CResult<CompositeSpace> {
        for id in names {
            self.current_sub(id)?;
        }
        self.env.space_of(names)
    }

    fn statement(&mut self, s: &Statement) -> CResult<()> {
        match s {
            Statement::System { name, dim, .. } => {
                self.declare(name)?;
                self.env.systems.push(Subsystem::new(name.name.clone(), *dim));
            }
            Statement::State { name, normalize, expr, .. } => {
                self.declare(name)?;
                let v = self.env.eval_normalized(expr, *normalize)?;
                self.env.states.insert(name.name.clone(), v);
            }
            Statement::Unitary { name, axis, degrees, .. } => {
                self.declare(name)?;
                self.env.unitaries.insert(name.name.clone(), (*axis, *degrees));
            }
            Statement::Root { name, isolated, span } => {
                if let Some(prev) = self.root {
                    return Err(Diagnostic::error(name.span, format!("a second root; the root was set at {prev}")));
                }
                let (space, _) = self.env.states.get(&name.name).ok_or_else(|| {
                    let what = if self.env.system(&name.name).is_some() {
                        "is a subsystem, not a state"
                    } else {
                        "is not a declared state"
                    };
                    Diagnostic::error(name.span, format!("`{}` {what}", name.name))
                })?;
                let names = space.names().iter().map(|s| s.to_string()).collect();
                if !isolated {
                    return Err(Diagnostic::error(
                        last_char(*span),
                        "expected `isolated`: the root must be an isolated system",
                    ));
                }
                self.root = Some(name.span);
                self.current = names;
            }
            Statement::Measure { target, basis, device, gate, span } => {
                self.measure(target, basis, device, gate, *span)?
            }
            Statement::Apply { unitary, target, span } => {
                self.require_root(*span, "apply")?;
                if !self.env.unitaries.contains_key(&unitary.name) {
                    return Err(Diagnostic::error(
                        unitary.span,
                        format!("`{}` is not a declared unitary", unitary.name),
                    ));
                }
                let sub = self.current_sub(target)?;
                if sub.dim != 2 {
                    return Err(Diagnostic::error(
                        target.span,
                        format!("rotations act on two-level subsystems; `{}` has dimension {}", sub.name, sub.dim),
                    ));
                }
            }
            Statement::Query { query, expect, span } => self.query(query, expect.as_ref(), *span)?,
        }
        Ok(())
    }

    fn measure(
        &mut self,
        target: &[Ident],
        basis: &Basis,
        device: &Ident,
        gate: &Option<(Ident, usize)>,
        span: SourceSpan,
    ) -> CResult<()> {
        self.require_root(span, "measure")?;
        let tspace = self.current_space(target)?;
        let n = tspace.total_dim();
        match basis {
            Basis::Computational => {}
            Basis::Spin { .. } => {
                if n != 2 || target.len() != 1 {
                    return Err(Diagnostic::error(
                        target[0].span,
                        format!("a spin basis needs one two-level subsystem, found {tspace}"),
                    ));
                }
            }
            Basis::States(exprs) => {
                let mut vecs: Vec<CVector> = Vec::with_capacity(exprs.len());
                for e in exprs {
                    let (space, v) = self.env.eval_normalized(e, false)?;
                    if !space.same_set(&tspace) {
                        return Err(Diagnostic::error(
                            e.span,
                            format!("basis state acts on {space} but the target is {tspace}"),
                        ));
                    }
                    let pos = space.positions(&tspace.names()).expect("same subsystem set");
                    let v = CVector::from_iterator(n, space.offsets(&pos).into_iter().map(|o| v[o]));
                    for (k, u) in vecs.iter().enumerate() {
                        let ip = u.dotc(&v);
                        if ip.norm() > NORM_SLACK {
                            return Err(Diagnostic::error(
                                e.span,
                                format!(
                                    "basis state {} is not orthogonal to state {} (overlap {:.3e})",
                                    vecs.len() + 1,
                                    k + 1,
                                    ip.norm()
                                ),
                            ));
                        }
                    }
                    vecs.push(v);
                }
                if vecs.len() != n {
                    let last = exprs.last().expect("parser requires one state").span;
                    return Err(Diagnostic::error(
                        last,
                        format!("basis has {} states but {tspace} needs {n}", vecs.len()),
                    ));
                }
            }
        }
        if let Some((g, v)) = gate {
            let sub = self.current_sub(g)?;
            if target.iter().any(|t| t.name == g.name) || g.name == device.name {
                return Err(Diagnostic::error(
                    g.span,
                    format!("gate `{}` must differ from the measured system and the device", g.name),
                ));
            }
            if *v >= sub.dim {
                return Err(Diagnostic::error(
                    g.span,
                    format!("gate index {v} out of range for `{}` of dimension {}", sub.name, sub.dim),
                ));
            }
        }
        let dev = self
            .env
            .system(&device.name)
            .ok_or_else(|| Diagnostic::error(device.span, format!("undeclared device `{}`", device.name)))?
            .clone();
        if target.iter().any(|t| t.name == device.name) {
            return Err(Diagnostic::error(
                device.span,
                format!("device `{}` is part of the measured system", device.name),
            ));
        }
        if dev.dim < n + 1 {
            return Err(Diagnostic::error(
                device.span,
                format!(
                    "device `{}` has dimension {} but needs {} (a ready state and {n} pointer states)",
                    dev.name,
                    dev.dim,
                    n + 1
                ),
            ));
        }
        if !self.current.contains(&dev.name) {
            self.current.push(dev.name);
        }
        Ok(())
    }

    fn query(&mut self, q: &Query, expect: Option<&Expect>, span: SourceSpan) -> CResult<()> {
        self.require_root(span, "query")?;
        let mut reduce_dim = None;
        match q {
            Query::Reduce(v) => reduce_dim = Some(self.current_space(v)?.total_dim()),
            Query::PossibleStates(v) | Query::Sample(v) => {
                self.current_space(v)?;
            }
            Query::Joint(terms) => {
                for (t, _) in terms {
                    self.current_space(t)?;
                }
            }
            Query::Prob(exprs) => {
                for e in exprs {
                    let (space, _) = self.env.eval_normalized(e, false)?;
                    if let Some(name) = space.names().into_iter().find(|n| !self.current.iter().any(|c| c == n)) {
                        return Err(Diagnostic::error(
                            e.span,
                            format!("`{name}` is not part of the current system ({})", self.current.join(", ")),
                        ));
                    }
                }
            }
            Query::BellScan { pair, .. } => {
                for id in [&pair.0, &pair.1] {
                    let sub = self.current_sub(id)?;
                    if sub.dim != 2 {
                        return Err(Diagnostic::error(
                            id.span,
                            format!("bell_scan needs spin-1/2 particles; `{}` has dimension {}", sub.name, sub.dim),
                        ));
                    }
                }
                if pair.0.name == pair.1.name {
                    return Err(Diagnostic::error(pair.1.span, "bell_scan needs two different particles"));
                }
            }
        }
        let Some(e) = expect else { return Ok(()) };
        let fits = match e {
            Expect::Value { .. } => matches!(q, Query::Joint(_) | Query::Prob(_) | Query::Sample(_)),
            Expect::Probabilities { .. } => matches!(q, Query::Reduce(_) | Query::PossibleStates(_)),
            Expect::Violated(_) => matches!(q, Query::BellScan { .. }),
        };
        if !fits {
            let want = match q {
                Query::Joint(_) | Query::Prob(_) | Query::Sample(_) => "a number",
                Query::Reduce(_) | Query::PossibleStates(_) => "a list `[p, ...]`",
                Query::BellScan { .. } => "`violated` or `satisfied`",
            };
            return Err(Diagnostic::error(span, format!("`{}` expects {want}", q.keyword())));
        }
        if let Expect::Value { within: Some(w), .. } | Expect::Probabilities { within: Some(w), .. } = e {
            if *w < 0.0 {
                return Err(Diagnostic::error(span, format!("tolerance must be nonnegative, found {w}")));
            }
        }
        if let (Expect::Probabilities { values, .. }, Some(d)) = (e, reduce_dim) {
            if values.len() != d {
                return Err(Diagnostic::error(
                    span,
                    format!("reduce has {d} diagonal entries, the expectation lists {}", values.len()),
                ));
            }
        }
        Ok(())
    }
}
