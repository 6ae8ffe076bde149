use super::ast::SourceSpan;
use super::diagnostics::Diagnostic;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// Real literal; the source text is kept for messages.
    Number(f64, String),
    /// Imaginary literal such as `0.5i`, or a bare `i`.
    Imaginary(f64),
    Pipe,
    Gt,
    Comma,
    Semi,
    Colon,
    Eq,
    At,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Number(_, s) => format!("number `{s}`"),
            TokenKind::Imaginary(v) => format!("imaginary literal `{v}i`"),
            TokenKind::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            TokenKind::Pipe => "|",
            TokenKind::Gt => ">",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Eq => "=",
            TokenKind::At => "@",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

/// Splits `source` into tokens. Bad characters and malformed numbers are
/// reported and skipped, so lexing always reaches the end.
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let ch = chars[i];
        let start = (line, col);
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '.' || chars[j] == '_') {
                // exponent sign
                if (chars[j] == 'e' || chars[j] == 'E')
                    && matches!(chars.get(j + 1), Some('+') | Some('-'))
                    && chars.get(j + 2).is_some_and(|c| c.is_ascii_digit())
                {
                    j += 2;
                }
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let span = SourceSpan::new(start.0, start.1, j - i);
            let (body, imaginary) = match text.strip_suffix('i') {
                Some(b) if !b.is_empty() => (b, true),
                _ => (text.as_str(), false),
            };
            match body.parse::<f64>() {
                Ok(v) if v.is_finite() && !body.contains(['_', 'x', 'X']) && !body.ends_with(['e', 'E']) => {
                    let kind = if imaginary { TokenKind::Imaginary(v) } else { TokenKind::Number(v, text.clone()) };
                    tokens.push(Token { kind, span });
                }
                _ => diags.push(Diagnostic::error(span, format!("bad number `{text}`"))),
            }
            col += j - i;
            i = j;
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let span = SourceSpan::new(start.0, start.1, j - i);
            let kind = if text == "i" { TokenKind::Imaginary(1.0) } else { TokenKind::Ident(text) };
            tokens.push(Token { kind, span });
            col += j - i;
            i = j;
            continue;
        }
        let kind = match ch {
            '|' => Some(TokenKind::Pipe),
            '>' => Some(TokenKind::Gt),
            ',' => Some(TokenKind::Comma),
            ';' => Some(TokenKind::Semi),
            ':' => Some(TokenKind::Colon),
            '=' => Some(TokenKind::Eq),
            '@' => Some(TokenKind::At),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            _ => None,
        };
        let span = SourceSpan::new(start.0, start.1, 1);
        match kind {
            Some(kind) => tokens.push(Token { kind, span }),
            None => diags.push(Diagnostic::error(span, format!("unexpected character `{ch}`"))),
        }
        i += 1;
        col += 1;
    }
    let eof = tokens
        .last()
        .map(|t| SourceSpan::new(t.span.line, t.span.column + t.span.length, 1))
        .unwrap_or(SourceSpan::new(1, 1, 1));
    tokens.push(Token { kind: TokenKind::Eof, span: eof });
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).0.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn ket_and_numbers() {
        let k = kinds("0.6|0,1>@(A,B) - 2.5e-1i # note");
        assert_eq!(k[0], TokenKind::Number(0.6, "0.6".into()));
        assert_eq!(k[1], TokenKind::Pipe);
        assert_eq!(k[5], TokenKind::Gt);
        assert_eq!(k[12], TokenKind::Minus);
        assert_eq!(k[13], TokenKind::Imaginary(0.25));
        assert_eq!(k.last(), Some(&TokenKind::Eof));
    }

    #[test]
    fn columns_are_one_based() {
        let (t, _) = tokenize("system P:2;\n  state");
        assert_eq!(t[0].span, SourceSpan::new(1, 1, 6));
        assert_eq!(t[1].span, SourceSpan::new(1, 8, 1));
        assert_eq!(t[5].span, SourceSpan::new(2, 3, 5));
    }

    #[test]
    fn bad_tokens_are_reported() {
        let (_, d) = tokenize("1.2.3 $ 2abc");
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].span, SourceSpan::new(1, 1, 5));
        assert_eq!(d[1].span, SourceSpan::new(1, 7, 1));
        assert_eq!(d[2].span, SourceSpan::new(1, 9, 4));
    }
}
