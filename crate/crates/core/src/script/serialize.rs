use std::fmt::Write;

use super::ast::*;
use crate::tensor::C64;

/// Canonical text of a document: one statement per line, no comments.
/// Parsing the output gives back the same document up to spans.
pub fn serialize(doc: &ScriptDocument) -> String {
    let mut out = String::new();
    for s in &doc.statements {
        out.push_str(&statement_text(s));
        out.push('\n');
    }
    out
}

pub fn statement_text(s: &Statement) -> String {
    match s {
        Statement::System { name, dim, .. } => format!("system {} : {dim};", name.name),
        Statement::State { name, normalize, expr, .. } => {
            let n = if *normalize { "normalize " } else { "" };
            format!("state {} = {n}{};", name.name, expr_text(expr))
        }
        Statement::Unitary { name, axis, degrees, .. } => {
            format!("unitary {} = rot({}, {degrees});", name.name, axis.symbol())
        }
        Statement::Root { name, isolated, .. } => {
            let iso = if *isolated { " isolated" } else { "" };
            format!("root {}{iso};", name.name)
        }
        Statement::Measure { target, basis, device, gate, .. } => {
            let mut t = format!("measure {} in {} with {}", target_text(target), basis_text(basis), device.name);
            if let Some((g, v)) = gate {
                let _ = write!(t, " when {} = {v}", g.name);
            }
            t.push(';');
            t
        }
        Statement::Apply { unitary, target, .. } => format!("apply {} to {};", unitary.name, target.name),
        Statement::Query { query, expect, .. } => {
            let mut t = format!("query {}", query_text(query));
            if let Some(e) = expect {
                let _ = write!(t, " expect {}", expect_text(e));
            }
            t.push(';');
            t
        }
    }
}

fn names_text(names: &[Ident]) -> String {
    names.iter().map(|i| i.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn target_text(names: &[Ident]) -> String {
    if names.len() == 1 {
        names[0].name.clone()
    } else {
        format!("({})", names_text(names))
    }
}

fn basis_text(b: &Basis) -> String {
    match b {
        Basis::Computational => "computational".into(),
        Basis::Spin { degrees } => format!("spin({degrees})"),
        Basis::States(v) => format!("{{{}}}", v.iter().map(expr_text).collect::<Vec<_>>().join(", ")),
    }
}

/// Source form of a query, used as the anchor of its report rows.
pub fn query_text(q: &Query) -> String {
    let args = match q {
        Query::Reduce(v) | Query::PossibleStates(v) | Query::Sample(v) => names_text(v),
        Query::Joint(terms) => {
            terms.iter().map(|(t, j)| format!("({}, {j})", target_text(t))).collect::<Vec<_>>().join(", ")
        }
        Query::Prob(v) => v.iter().map(expr_text).collect::<Vec<_>>().join(", "),
        Query::BellScan { pair, degrees, recorders } => {
            let mut t = format!("{}, {}, {}, {}, {}", pair.0.name, pair.1.name, degrees[0], degrees[1], degrees[2]);
            if *recorders {
                t.push_str(", recorders");
            }
            t
        }
    };
    format!("{}({args})", q.keyword())
}

fn expect_text(e: &Expect) -> String {
    let within = |w: &Option<f64>| w.map(|w| format!(" within {w}")).unwrap_or_default();
    match e {
        Expect::Value { value, within: w } => format!("{value}{}", within(w)),
        Expect::Probabilities { values, within: w } => {
            let v: Vec<String> = values.iter().map(|x| x.to_string()).collect();
            format!("[{}]{}", v.join(", "), within(w))
        }
        Expect::Violated(true) => "violated".into(),
        Expect::Violated(false) => "satisfied".into(),
    }
}

pub fn expr_text(e: &KetExpr) -> String {
    e.terms.iter().map(term_text).collect::<Vec<_>>().join(" + ")
}

fn term_text(t: &Term) -> String {
    let factors: Vec<String> = t
        .factors
        .iter()
        .map(|f| match f {
            Factor::Ket { indices, target, .. } => {
                let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
                format!("|{}>@{}", idx.join(","), target_text(target))
            }
            Factor::State(i) => i.name.clone(),
        })
        .collect();
    if t.coeff == C64::new(1.0, 0.0) {
        factors.join(" ")
    } else {
        format!("{} {}", coeff_text(t.coeff), factors.join(" "))
    }
}

/// `(re+imi)`, exact under reparsing since `{}` prints the shortest
/// round-tripping decimal. Negative zeros print as `0`.
fn coeff_text(z: C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("({}{sign}{}i)", z.re + 0.0, z.im.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse;

    #[test]
    fn round_trip_keeps_coefficients() {
        let src = "system A:2; system B:2; system M:5;\n\
                   state s = normalize -(0.1-0.3i)|0,1>@(A,B) + 1e-3|1,0>@(A,B) - i*|1,1>@(A,B);\n\
                   root s isolated;\n\
                   measure A in computational with M when B = 1;\n\
                   query joint((A,0),((B),1)) expect 0.25 within 1e-9;";
        let doc = parse(src).unwrap();
        let text = serialize(&doc);
        let again = parse(&text).unwrap();
        assert_eq!(doc.without_spans(), again.without_spans());
        assert_eq!(serialize(&again), text);
    }

    #[test]
    fn coefficient_forms() {
        assert_eq!(coeff_text(C64::new(-0.5, -0.0)), "(-0.5+0i)");
        assert_eq!(coeff_text(C64::new(-0.0, -1.0)), "(0-1i)");
        assert_eq!(coeff_text(C64::new(0.1, 2.0)), "(0.1+2i)");
    }
}
