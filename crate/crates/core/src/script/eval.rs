use std::collections::HashMap;

use super::ast::{Axis, Factor, Ident, KetExpr, SourceSpan};
use super::diagnostics::Diagnostic;
use crate::tensor::{kron_vec, CVector, CompositeSpace, PureState, Subsystem, C64};

/// States further than this from unit norm need an explicit `normalize`.
pub const NORM_SLACK: f64 = 1e-6;

/// Declared symbols, shared by the checker and the executor.
#[derive(Debug, Clone, Default)]
pub(crate) struct Env {
    pub systems: Vec<Subsystem>,
    /// Normalized amplitudes as written; unlike `PureState` the global phase
    /// is kept, since named states may be combined later.
    pub states: HashMap<String, (CompositeSpace, CVector)>,
    pub unitaries: HashMap<String, (Axis, f64)>,
}

impl Env {
    pub fn system(&self, name: &str) -> Option<&Subsystem> {
        self.systems.iter().find(|s| s.name == name)
    }

    fn declared(&self, id: &Ident, span: SourceSpan) -> Result<Subsystem, Diagnostic> {
        self.system(&id.name)
            .cloned()
            .ok_or_else(|| Diagnostic::error(span, format!("undeclared subsystem `{}`", id.name)))
    }

    /// Space of declared subsystems in the given order.
    pub fn space_of(&self, names: &[Ident]) -> Result<CompositeSpace, Diagnostic> {
        let mut subs = Vec::with_capacity(names.len());
        for (k, id) in names.iter().enumerate() {
            if names[..k].iter().any(|o| o.name == id.name) {
                return Err(Diagnostic::error(id.span, format!("subsystem `{}` listed twice", id.name)));
            }
            subs.push(self.declared(id, id.span)?);
        }
        CompositeSpace::new(subs).map_err(|e| Diagnostic::error(names[0].span, e.to_string()))
    }

    /// Unnormalized amplitudes of a ket expression, laid out in the order
    /// of the first term's subsystems.
    pub fn eval(&self, expr: &KetExpr) -> Result<(CompositeSpace, CVector), Diagnostic> {
        let mut acc: Option<(CompositeSpace, CVector)> = None;
        for term in &expr.terms {
            let mut space: Option<CompositeSpace> = None;
            let mut vec = CVector::from_element(1, C64::new(1.0, 0.0));
            for f in &term.factors {
                let (fs, fv) = self.factor(f)?;
                space = Some(match space {
                    None => fs,
                    Some(s) => s.concat(&fs).map_err(|_| {
                        Diagnostic::error(term.span, "factors of a product must act on different subsystems")
                    })?,
                });
                vec = kron_vec(&vec, &fv);
            }
            let space = space.expect("terms have at least one factor");
            vec *= term.coeff;
            acc = Some(match acc {
                None => (space, vec),
                Some((s0, mut v0)) => {
                    if !s0.same_set(&space) {
                        return Err(Diagnostic::error(
                            term.span,
                            format!("term acts on {space} but the expression started on {s0}"),
                        ));
                    }
                    let pos = space.positions(&s0.names()).expect("same subsystem set");
                    for (i, o) in space.offsets(&pos).into_iter().enumerate() {
                        v0[i] += vec[o];
                    }
                    (s0, v0)
                }
            });
        }
        acc.ok_or_else(|| Diagnostic::error(expr.span, "empty expression"))
    }

    fn factor(&self, f: &Factor) -> Result<(CompositeSpace, CVector), Diagnostic> {
        match f {
            Factor::Ket { indices, target, span, target_span } => {
                let mut subs = Vec::new();
                for id in target {
                    subs.push(self.declared(id, *target_span)?);
                }
                if indices.len() != subs.len() {
                    return Err(Diagnostic::error(
                        *span,
                        format!("ket has {} indices but {} subsystems are named", indices.len(), subs.len()),
                    ));
                }
                for (i, s) in indices.iter().zip(&subs) {
                    if *i >= s.dim {
                        return Err(Diagnostic::error(
                            *span,
                            format!("index {i} out of range for `{}` of dimension {}", s.name, s.dim),
                        ));
                    }
                }
                let space = CompositeSpace::new(subs).map_err(|e| Diagnostic::error(*target_span, e.to_string()))?;
                let mut v = CVector::zeros(space.total_dim());
                let flat = space.flat_index(indices).map_err(|e| Diagnostic::error(*span, e.to_string()))?;
                v[flat] = C64::new(1.0, 0.0);
                Ok((space, v))
            }
            Factor::State(id) => {
                let s = self
                    .states
                    .get(&id.name)
                    .ok_or_else(|| Diagnostic::error(id.span, format!("undeclared state `{}`", id.name)))?;
                Ok(s.clone())
            }
        }
    }

    /// Evaluates and normalizes; a norm off by more than [`NORM_SLACK`] is
    /// an error unless `normalize` is set.
    pub fn eval_state(&self, expr: &KetExpr, normalize: bool) -> Result<PureState, Diagnostic> {
        let (space, v) = self.eval_normalized(expr, normalize)?;
        PureState::normalized(space, v).map_err(|e| Diagnostic::error(expr.span, e.to_string()))
    }

    pub fn eval_normalized(&self, expr: &KetExpr, normalize: bool) -> Result<(CompositeSpace, CVector), Diagnostic> {
        let (space, v) = self.eval(expr)?;
        let n = v.norm();
        if n < 1e-12 {
            return Err(Diagnostic::error(expr.span, "state has zero norm"));
        }
        if (n - 1.0).abs() > NORM_SLACK && !normalize {
            return Err(Diagnostic::error(
                expr.span,
                format!("state is not normalized (norm {n:.9}); write `normalize` after `=` to rescale it"),
            ));
        }
        Ok((space, v / C64::new(n, 0.0)))
    }
}
