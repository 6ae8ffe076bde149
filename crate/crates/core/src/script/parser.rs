use super::ast::*;
use super::check::check;
use super::diagnostics::{Diagnostic, Diagnostics, Severity};
use super::lexer::{tokenize, Token, TokenKind};
use crate::tensor::{C64, DEFAULT_MAX_DIM};

/// Parses and validates a script. On failure every diagnostic found is
/// returned, in source order; parsing resumes after each bad statement.
pub fn parse(source: &str) -> Result<ScriptDocument, Diagnostics> {
    let (doc, diags) = parse_with_diagnostics(source);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        Err(Diagnostics(diags))
    } else {
        Ok(doc)
    }
}

/// Parses what it can and returns the document together with all
/// diagnostics (lexical, syntactic and semantic).
pub fn parse_with_diagnostics(source: &str) -> (ScriptDocument, Vec<Diagnostic>) {
    let (tokens, mut diags) = tokenize(source);
    let mut p = Parser { tokens, pos: 0, diags: Vec::new() };
    let statements = p.document();
    diags.extend(p.diags);
    let doc = ScriptDocument { statements };
    diags.extend(check(&doc));
    diags.sort_by_key(|d| d.span);
    (doc, diags)
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(t.span, format!("expected {expected}, found {}", t.kind.describe()))
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Token> {
        if self.at_keyword(kw) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let name = s.clone();
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn integer(&mut self, what: &str) -> PResult<(usize, SourceSpan)> {
        match &self.peek().kind {
            TokenKind::Number(v, text) if text.chars().all(|c| c.is_ascii_digit()) && *v < 1e15 => {
                let v = *v as usize;
                Ok((v, self.bump().span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Optionally signed real number.
    fn real(&mut self, what: &str) -> PResult<(f64, SourceSpan)> {
        let start = self.peek().span;
        let sign = if self.at(&TokenKind::Minus) {
            self.bump();
            -1.0
        } else {
            if self.at(&TokenKind::Plus) {
                self.bump();
            }
            1.0
        };
        match &self.peek().kind {
            TokenKind::Number(v, _) => {
                let v = *v;
                let end = self.bump().span;
                Ok((sign * v, start.to(end)))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn end(&mut self, start: SourceSpan) -> PResult<SourceSpan> {
        let semi = self.expect(TokenKind::Semi, "`;` at the end of the statement")?;
        Ok(start.to(semi.span))
    }

    fn recover(&mut self) {
        while !self.at(&TokenKind::Eof) {
            if self.bump().kind == TokenKind::Semi {
                return;
            }
        }
    }

    fn document(&mut self) -> Vec<Statement> {
        let mut out = Vec::new();
        while !self.at(&TokenKind::Eof) {
            match self.statement() {
                Ok(s) => out.push(s),
                Err(d) => {
                    self.diags.push(d);
                    self.recover();
                }
            }
        }
        out
    }

    fn statement(&mut self) -> PResult<Statement> {
        let start = self.peek().span;
        let kw = match &self.peek().kind {
            TokenKind::Ident(s) => s.clone(),
            _ => {
                return Err(self.unexpected("a statement keyword (system, state, unitary, root, measure, apply, query)"))
            }
        };
        match kw.as_str() {
            "system" => {
                self.bump();
                let name = self.ident("subsystem name")?;
                self.expect(TokenKind::Colon, "`:` before the dimension")?;
                let (dim, dspan) = self.integer("integer dimension")?;
                if !(2..=DEFAULT_MAX_DIM).contains(&dim) {
                    return Err(Diagnostic::error(dspan, format!("dimension must lie in 2..={DEFAULT_MAX_DIM}, found {dim}")));
                }
                Ok(Statement::System { name, dim, span: self.end(start)? })
            }
            "state" => {
                self.bump();
                let name = self.ident("state name")?;
                self.expect(TokenKind::Eq, "`=`")?;
                let normalize = if self.at_keyword("normalize") {
                    self.bump();
                    true
                } else {
                    false
                };
                let expr = self.ket_expr()?;
                Ok(Statement::State { name, normalize, expr, span: self.end(start)? })
            }
            "unitary" => {
                self.bump();
                let name = self.ident("unitary name")?;
                self.expect(TokenKind::Eq, "`=`")?;
                self.keyword("rot")?;
                self.expect(TokenKind::LParen, "`(`")?;
                let axis_id = self.ident("axis x, y or z")?;
                let axis = match axis_id.name.as_str() {
                    "x" => Axis::X,
                    "y" => Axis::Y,
                    "z" => Axis::Z,
                    _ => return Err(Diagnostic::error(axis_id.span, format!("expected axis x, y or z, found `{}`", axis_id.name))),
                };
                self.expect(TokenKind::Comma, "`,`")?;
                let (degrees, _) = self.real("angle in degrees")?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(Statement::Unitary { name, axis, degrees, span: self.end(start)? })
            }
            "root" => {
                self.bump();
                let name = self.ident("state name")?;
                let isolated = if self.at_keyword("isolated") {
                    self.bump();
                    true
                } else {
                    false
                };
                Ok(Statement::Root { name, isolated, span: self.end(start)? })
            }
            "measure" => {
                self.bump();
                let target = self.target("subsystem name or `(`")?;
                self.keyword("in")?;
                let basis = self.basis()?;
                self.keyword("with")?;
                let device = self.ident("device name")?;
                let gate = if self.at_keyword("when") {
                    self.bump();
                    let g = self.ident("gate subsystem name")?;
                    self.expect(TokenKind::Eq, "`=`")?;
                    let (v, _) = self.integer("integer basis index")?;
                    Some((g, v))
                } else {
                    None
                };
                Ok(Statement::Measure { target, basis, device, gate, span: self.end(start)? })
            }
            "apply" => {
                self.bump();
                let unitary = self.ident("unitary name")?;
                self.keyword("to")?;
                let target = self.ident("subsystem name")?;
                Ok(Statement::Apply { unitary, target, span: self.end(start)? })
            }
            "query" => {
                self.bump();
                let query = self.query()?;
                let expect = if self.at_keyword("expect") {
                    self.bump();
                    Some(self.expectation()?)
                } else {
                    None
                };
                Ok(Statement::Query { query, expect, span: self.end(start)? })
            }
            other => Err(Diagnostic::error(
                start,
                format!("expected a statement keyword (system, state, unitary, root, measure, apply, query), found `{other}`"),
            )),
        }
    }

    /// `NAME` or `(NAME, NAME, …)`.
    fn target(&mut self, what: &str) -> PResult<Vec<Ident>> {
        if self.at(&TokenKind::LParen) {
            self.bump();
            let names = self.names()?;
            self.expect(TokenKind::RParen, "`)` or `,`")?;
            Ok(names)
        } else {
            Ok(vec![self.ident(what)?])
        }
    }

    fn names(&mut self) -> PResult<Vec<Ident>> {
        let mut v = vec![self.ident("subsystem name")?];
        while self.at(&TokenKind::Comma) {
            self.bump();
            v.push(self.ident("subsystem name")?);
        }
        Ok(v)
    }

    fn basis(&mut self) -> PResult<Basis> {
        if self.at_keyword("computational") {
            self.bump();
            return Ok(Basis::Computational);
        }
        if self.at_keyword("spin") {
            self.bump();
            self.expect(TokenKind::LParen, "`(`")?;
            let (degrees, _) = self.real("angle in degrees")?;
            self.expect(TokenKind::RParen, "`)`")?;
            return Ok(Basis::Spin { degrees });
        }
        if self.at(&TokenKind::LBrace) {
            self.bump();
            let mut v = vec![self.ket_expr()?];
            while self.at(&TokenKind::Comma) {
                self.bump();
                v.push(self.ket_expr()?);
            }
            self.expect(TokenKind::RBrace, "`}` or `,`")?;
            return Ok(Basis::States(v));
        }
        Err(self.unexpected("a basis (computational, spin(angle) or `{`)"))
    }

    fn query(&mut self) -> PResult<Query> {
        let kw = self.ident("a query (reduce, possible_states, joint, prob, sample, bell_scan)")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let q =
            match kw.name.as_str() {
                "reduce" => Query::Reduce(self.names()?),
                "possible_states" => Query::PossibleStates(self.names()?),
                "sample" => Query::Sample(self.names()?),
                "joint" => {
                    let mut terms = vec![self.joint_term()?];
                    while self.at(&TokenKind::Comma) {
                        self.bump();
                        terms.push(self.joint_term()?);
                    }
                    Query::Joint(terms)
                }
                "prob" => {
                    let mut v = vec![self.ket_expr()?];
                    while self.at(&TokenKind::Comma) {
                        self.bump();
                        v.push(self.ket_expr()?);
                    }
                    Query::Prob(v)
                }
                "bell_scan" => {
                    let a = self.ident("subsystem name")?;
                    self.expect(TokenKind::Comma, "`,`")?;
                    let b = self.ident("subsystem name")?;
                    let mut degrees = [0.0; 3];
                    for d in &mut degrees {
                        self.expect(TokenKind::Comma, "`,`")?;
                        *d = self.real("angle in degrees")?.0;
                    }
                    let recorders = if self.at(&TokenKind::Comma) {
                        self.bump();
                        self.keyword("recorders")?;
                        true
                    } else {
                        false
                    };
                    Query::BellScan { pair: (a, b), degrees, recorders }
                }
                other => return Err(Diagnostic::error(
                    kw.span,
                    format!(
                        "expected a query (reduce, possible_states, joint, prob, sample, bell_scan), found `{other}`"
                    ),
                )),
            };
        self.expect(TokenKind::RParen, "`)` or `,`")?;
        Ok(q)
    }

    fn joint_term(&mut self) -> PResult<(Vec<Ident>, usize)> {
        self.expect(TokenKind::LParen, "`(` opening a (subsystems, index) pair")?;
        let names = self.target("subsystem name or `(`")?;
        self.expect(TokenKind::Comma, "`,`")?;
        let (j, _) = self.integer("integer state index")?;
        self.expect(TokenKind::RParen, "`)`")?;
        Ok((names, j))
    }

    fn expectation(&mut self) -> PResult<Expect> {
        if self.at_keyword("violated") {
            self.bump();
            return Ok(Expect::Violated(true));
        }
        if self.at_keyword("satisfied") {
            self.bump();
            return Ok(Expect::Violated(false));
        }
        if self.at(&TokenKind::LBracket) {
            self.bump();
            let mut values = vec![self.real("probability")?.0];
            while self.at(&TokenKind::Comma) {
                self.bump();
                values.push(self.real("probability")?.0);
            }
            self.expect(TokenKind::RBracket, "`]` or `,`")?;
            let within = self.within()?;
            return Ok(Expect::Probabilities { values, within });
        }
        let (value, _) = self.real("expected value, `[`, `violated` or `satisfied`")?;
        let within = self.within()?;
        Ok(Expect::Value { value, within })
    }

    fn within(&mut self) -> PResult<Option<f64>> {
        if self.at_keyword("within") {
            self.bump();
            Ok(Some(self.real("tolerance")?.0))
        } else {
            Ok(None)
        }
    }

    fn ket_expr(&mut self) -> PResult<KetExpr> {
        let start = self.peek().span;
        let mut terms = Vec::new();
        let mut sign = match self.peek().kind {
            TokenKind::Minus => {
                self.bump();
                -1.0
            }
            TokenKind::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        loop {
            let mut t = self.term()?;
            t.coeff *= sign;
            terms.push(t);
            sign = match self.peek().kind {
                TokenKind::Plus => 1.0,
                TokenKind::Minus => -1.0,
                _ => break,
            };
            self.bump();
        }
        let end = terms.last().map(|t| t.span).unwrap_or(start);
        Ok(KetExpr { terms, span: start.to(end) })
    }

    fn term(&mut self) -> PResult<Term> {
        let start = self.peek().span;
        let coeff = match self.peek().kind.clone() {
            TokenKind::Number(v, _) => {
                self.bump();
                C64::new(v, 0.0)
            }
            TokenKind::Imaginary(v) => {
                self.bump();
                C64::new(0.0, v)
            }
            TokenKind::LParen => {
                self.bump();
                let z = self.complex()?;
                self.expect(TokenKind::RParen, "`)` closing the coefficient")?;
                z
            }
            _ => C64::new(1.0, 0.0),
        };
        let had_coeff = self.peek().span != start;
        if had_coeff && self.at(&TokenKind::Star) {
            self.bump();
        }
        let mut factors = Vec::new();
        loop {
            match self.peek().kind {
                TokenKind::Pipe => factors.push(self.ket()?),
                TokenKind::Ident(_) if !self.at_keyword("expect") && !self.at_keyword("with") => {
                    factors.push(Factor::State(self.ident("state name")?))
                }
                _ => break,
            }
        }
        if factors.is_empty() {
            return Err(self.unexpected("a ket `|…>` or state name"));
        }
        let end = match factors.last() {
            Some(Factor::Ket { span, target_span, .. }) => span.to(*target_span),
            Some(Factor::State(i)) => i.span,
            None => start,
        };
        Ok(Term { coeff, factors, span: start.to(end) })
    }

    /// `[±] part {± part}` where a part is a real or imaginary literal.
    fn complex(&mut self) -> PResult<C64> {
        let mut z = C64::new(0.0, 0.0);
        let mut sign = match self.peek().kind {
            TokenKind::Minus => {
                self.bump();
                -1.0
            }
            TokenKind::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        loop {
            match self.peek().kind {
                TokenKind::Number(v, _) => z += C64::new(sign * v, 0.0),
                TokenKind::Imaginary(v) => z += C64::new(0.0, sign * v),
                _ => return Err(self.unexpected("a real or imaginary number")),
            }
            self.bump();
            sign = match self.peek().kind {
                TokenKind::Plus => 1.0,
                TokenKind::Minus => -1.0,
                _ => return Ok(z),
            };
            self.bump();
        }
    }

    fn ket(&mut self) -> PResult<Factor> {
        let open = self.expect(TokenKind::Pipe, "`|`")?;
        let mut indices = vec![self.ket_index()?];
        while self.at(&TokenKind::Comma) {
            self.bump();
            indices.push(self.ket_index()?);
        }
        let close = self.expect(TokenKind::Gt, "`>` or `,` inside the ket")?;
        let at = self.expect(TokenKind::At, "`@` and the subsystems of the ket")?;
        let target = self.target("subsystem name or `(`")?;
        let last = self.tokens[self.pos - 1].span;
        Ok(Factor::Ket { indices, target, span: open.span.to(close.span), target_span: at.span.to(last) })
    }

    fn ket_index(&mut self) -> PResult<usize> {
        match &self.peek().kind {
            TokenKind::Ident(s) if s == "up" => {
                self.bump();
                Ok(0)
            }
            TokenKind::Ident(s) if s == "down" => {
                self.bump();
                Ok(1)
            }
            _ => Ok(self.integer("basis index (integer, `up` or `down`)")?.0),
        }
    }
}
