//! The `.qrs` scenario format: a line-oriented text description of
//! subsystems, states, measurement steps and queries.
//!
//! ```text
//! system P1 : 2;
//! system P2 : 2;
//! state s = 0.70710678 |up,down>@(P1,P2) - 0.70710678 |down,up>@(P1,P2);
//! root s isolated;
//! query bell_scan(P1, P2, 0, 90, 45) expect violated;
//! ```
//!
//! [`parse`] reports every lexical, syntactic and semantic problem with its
//! source span; [`execute`] runs a checked document and returns a
//! [`ScenarioReport`](crate::scenarios::ScenarioReport) whose rows are tagged
//! with the `line:col` of the query that produced them. The grammar is
//! written out in `docs/script-grammar.md`.

mod ast;
mod check;
mod diagnostics;
mod eval;
mod execute;
mod lexer;
mod parser;
mod serialize;

pub use ast::{Axis, Basis, Expect, Factor, Ident, KetExpr, Query, ScriptDocument, SourceSpan, Statement, Term};
pub use check::RESERVED;
pub use diagnostics::{Diagnostic, Diagnostics, Severity};
pub use eval::NORM_SLACK;
pub use execute::{execute, ScriptError};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_with_diagnostics};
pub use serialize::{expr_text, query_text, serialize, statement_text};

/// Parses and runs `source` in one go.
pub fn run_source(source: &str, seed: u64) -> Result<crate::scenarios::ScenarioReport, RunError> {
    let doc = parse(source)?;
    Ok(execute(&doc, seed)?)
}

/// Either stage of [`run_source`] failing.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] Diagnostics),
    #[error(transparent)]
    Execute(#[from] ScriptError),
}

impl RunError {
    /// All diagnostics, formatted `file:line:col: severity: message`.
    pub fn render(&self, file: &str) -> String {
        match self {
            RunError::Parse(d) => d.render(file),
            RunError::Execute(e) => e.to_diagnostic().render(file),
        }
    }
}
