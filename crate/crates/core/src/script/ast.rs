use std::fmt;

use serde::Serialize;

use crate::tensor::C64;

/// 1-based source location of a token or construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan { line, column, length: length.max(1) }
    }

    /// Span from the start of `self` to the end of `other`, assuming both lie
    /// on the same line; otherwise `self` is kept.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        if other.line == self.line && other.column + other.length >= self.column {
            SourceSpan::new(self.line, self.column, other.column + other.length - self.column)
        } else {
            self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptDocument {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    System { name: Ident, dim: usize, span: SourceSpan },
    State { name: Ident, normalize: bool, expr: KetExpr, span: SourceSpan },
    Unitary { name: Ident, axis: Axis, degrees: f64, span: SourceSpan },
    Root { name: Ident, isolated: bool, span: SourceSpan },
    Measure { target: Vec<Ident>, basis: Basis, device: Ident, gate: Option<(Ident, usize)>, span: SourceSpan },
    Apply { unitary: Ident, target: Ident, span: SourceSpan },
    Query { query: Query, expect: Option<Expect>, span: SourceSpan },
}

impl Statement {
    pub fn span(&self) -> SourceSpan {
        match self {
            Statement::System { span, .. }
            | Statement::State { span, .. }
            | Statement::Unitary { span, .. }
            | Statement::Root { span, .. }
            | Statement::Measure { span, .. }
            | Statement::Apply { span, .. }
            | Statement::Query { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn vector(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Linear combination of products of kets and named states.
#[derive(Debug, Clone, PartialEq)]
pub struct KetExpr {
    pub terms: Vec<Term>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<Factor>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// `|i,j,…>@(A,B,…)`; `target_span` covers the `@` and the names.
    Ket {
        indices: Vec<usize>,
        target: Vec<Ident>,
        span: SourceSpan,
        target_span: SourceSpan,
    },
    State(Ident),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Computational,
    /// Spin-½ eigenbasis along the direction at this angle from z towards −x.
    Spin {
        degrees: f64,
    },
    States(Vec<KetExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Reduce(Vec<Ident>),
    PossibleStates(Vec<Ident>),
    Joint(Vec<(Vec<Ident>, usize)>),
    Prob(Vec<KetExpr>),
    Sample(Vec<Ident>),
    BellScan { pair: (Ident, Ident), degrees: [f64; 3], recorders: bool },
}

impl Query {
    pub fn keyword(&self) -> &'static str {
        match self {
            Query::Reduce(_) => "reduce",
            Query::PossibleStates(_) => "possible_states",
            Query::Joint(_) => "joint",
            Query::Prob(_) => "prob",
            Query::Sample(_) => "sample",
            Query::BellScan { .. } => "bell_scan",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expect {
    Value { value: f64, within: Option<f64> },
    Probabilities { values: Vec<f64>, within: Option<f64> },
    Violated(bool),
}

impl ScriptDocument {
    /// The same document with every span reset, for comparing documents
    /// that differ only in layout.
    pub fn without_spans(&self) -> ScriptDocument {
        let mut doc = self.clone();
        for s in &mut doc.statements {
            strip_statement(s);
        }
        doc
    }
}

fn strip_ident(i: &mut Ident) {
    i.span = SourceSpan::default();
}

fn strip_expr(e: &mut KetExpr) {
    e.span = SourceSpan::default();
    for t in &mut e.terms {
        t.span = SourceSpan::default();
        for f in &mut t.factors {
            match f {
                Factor::Ket { target, span, target_span, .. } => {
                    *span = SourceSpan::default();
                    *target_span = SourceSpan::default();
                    target.iter_mut().for_each(strip_ident);
                }
                Factor::State(i) => strip_ident(i),
            }
        }
    }
}

fn strip_statement(s: &mut Statement) {
    match s {
        Statement::System { name, span, .. }
        | Statement::Unitary { name, span, .. }
        | Statement::Root { name, span, .. } => {
            strip_ident(name);
            *span = SourceSpan::default();
        }
        Statement::State { name, expr, span, .. } => {
            strip_ident(name);
            strip_expr(expr);
            *span = SourceSpan::default();
        }
        Statement::Measure { target, basis, device, gate, span } => {
            target.iter_mut().for_each(strip_ident);
            if let Basis::States(v) = basis {
                v.iter_mut().for_each(strip_expr);
            }
            strip_ident(device);
            if let Some((g, _)) = gate {
                strip_ident(g);
            }
            *span = SourceSpan::default();
        }
        Statement::Apply { unitary, target, span } => {
            strip_ident(unitary);
            strip_ident(target);
            *span = SourceSpan::default();
        }
        Statement::Query { query, span, .. } => {
            match query {
                Query::Reduce(v) | Query::PossibleStates(v) | Query::Sample(v) => v.iter_mut().for_each(strip_ident),
                Query::Joint(terms) => terms.iter_mut().for_each(|(v, _)| v.iter_mut().for_each(strip_ident)),
                Query::Prob(v) => v.iter_mut().for_each(strip_expr),
                Query::BellScan { pair, .. } => {
                    strip_ident(&mut pair.0);
                    strip_ident(&mut pair.1);
                }
            }
            *span = SourceSpan::default();
        }
    }
}
