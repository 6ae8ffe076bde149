use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::scenarios::{BellTriple, ScenarioReport};
use crate::tensor::PureState;

/// Version of the JSON layout and of the CSV columns.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits of every emitted number.
pub const DIGITS: usize = 12;

/// Columns of a report in CSV form.
pub const REPORT_COLUMNS: [&str; 11] =
    ["section", "label", "origin", "anchor", "row", "column", "value", "expected", "residual", "tolerance", "passed"];

/// Columns of a Bell scan in CSV form.
pub const SCAN_COLUMNS: [&str; 8] =
    ["alpha_deg", "beta_deg", "gamma_deg", "p_alpha_beta", "p_alpha_gamma", "p_gamma_beta", "margin", "violated"];

/// One inequality test, angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub gamma_deg: f64,
    pub p_alpha_beta: f64,
    pub p_alpha_gamma: f64,
    pub p_gamma_beta: f64,
    pub margin: f64,
    pub violated: bool,
}

impl ScanRow {
    pub fn new(degrees: (f64, f64, f64), t: &BellTriple) -> Self {
        ScanRow {
            alpha_deg: degrees.0,
            beta_deg: degrees.1,
            gamma_deg: degrees.2,
            p_alpha_beta: t.p_alpha_beta,
            p_alpha_gamma: t.p_alpha_gamma,
            p_gamma_beta: t.p_gamma_beta,
            margin: t.margin,
            violated: t.violated,
        }
    }
}

/// Everything one CLI invocation emits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recorders: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ScenarioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<Vec<ScanRow>>,
}

/// Rounds to [`DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

/// Plain decimal with [`DIGITS`] significant digits for moderate
/// magnitudes, scientific notation otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let x = round_sig(x);
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        format!("{:.*}", (DIGITS as i32 - 1 - e).max(0) as usize, x)
    } else {
        format!("{:.*e}", DIGITS - 1, x)
    }
}

/// Ket form of a state, omitting amplitudes below `1e-12`.
pub fn ket_text(s: &PureState, precise: bool) -> String {
    let mut parts = Vec::new();
    for (i, z) in s.amplitudes().iter().enumerate() {
        if z.norm() < 1e-12 {
            continue;
        }
        let digits: Vec<String> = s.space().digits(i).iter().map(|d| d.to_string()).collect();
        let amp = if !precise && z.im.abs() < 1e-12 && (z.re - 1.0).abs() < 1e-12 {
            String::new()
        } else if precise {
            format!("({}{}{}i)", fmt_num(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt_num(z.im.abs()))
        } else if z.im.abs() < 1e-12 {
            format!("{:.6}", z.re)
        } else {
            format!("({:.6}{:+.6}i)", z.re, z.im)
        };
        parts.push(format!("{amp}|{}>", digits.join(",")));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn render_json(doc: &Document) -> String {
    let mut v = serde_json::to_value(doc).expect("document serializes");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

pub fn render_csv(doc: &Document) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(rows) = &doc.scan {
        if doc.report.is_none() {
            w.write_record(SCAN_COLUMNS).expect("in-memory write");
            for r in rows {
                w.write_record(scan_record(r)).expect("in-memory write");
            }
            return String::from_utf8(w.into_inner().expect("flush")).expect("utf8");
        }
    }
    w.write_record(REPORT_COLUMNS).expect("in-memory write");
    let mut rec = |fields: [String; 11]| w.write_record(&fields).expect("in-memory write");
    let e = String::new;
    if let Some(rep) = &doc.report {
        for (k, v) in &rep.parameters {
            rec(["parameter".into(), k.clone(), e(), e(), e(), e(), v.clone(), e(), e(), e(), e()]);
        }
        for s in &rep.systems {
            rec(["system".into(), s.name.clone(), e(), e(), e(), e(), s.dim.to_string(), e(), e(), e(), e()]);
        }
        for t in &rep.state_tables {
            let origin = t.origin.clone().unwrap_or_default();
            for (j, en) in t.entries.iter().enumerate() {
                rec([
                    "state".into(),
                    t.label.clone(),
                    origin.clone(),
                    t.anchor.clone(),
                    j.to_string(),
                    ket_text(&en.state, true),
                    fmt_num(en.probability),
                    e(),
                    e(),
                    e(),
                    e(),
                ]);
            }
        }
        for t in &rep.joint_tables {
            let origin = t.origin.clone().unwrap_or_default();
            for (i, row) in t.cells.iter().enumerate() {
                for (k, x) in row.iter().enumerate() {
                    rec([
                        "joint".into(),
                        t.label.clone(),
                        origin.clone(),
                        t.anchor.clone(),
                        t.rows[i].clone(),
                        t.columns[k].clone(),
                        fmt_num(*x),
                        e(),
                        e(),
                        e(),
                        e(),
                    ]);
                }
            }
        }
        for v in &rep.values {
            let origin = v.origin.clone().unwrap_or_default();
            rec([
                "value".into(),
                v.name.clone(),
                origin,
                v.anchor.clone(),
                e(),
                e(),
                fmt_num(v.value),
                e(),
                e(),
                e(),
                e(),
            ]);
        }
        for a in &rep.assertions {
            rec([
                "assertion".into(),
                a.name.clone(),
                a.origin.clone().unwrap_or_default(),
                a.anchor.clone(),
                e(),
                e(),
                fmt_num(a.actual),
                fmt_num(a.expected),
                fmt_num(a.residual),
                fmt_num(a.tolerance),
                a.passed.to_string(),
            ]);
        }
    }
    if let Some(rows) = &doc.scan {
        for r in rows {
            let label = format!("({}, {}, {}) deg", r.alpha_deg, r.beta_deg, r.gamma_deg);
            let verdict = if r.violated { "violated" } else { "satisfied" };
            rec(["scan".into(), label, e(), e(), e(), verdict.into(), fmt_num(r.margin), e(), e(), e(), e()]);
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn scan_record(r: &ScanRow) -> [String; 8] {
    [
        r.alpha_deg.to_string(),
        r.beta_deg.to_string(),
        r.gamma_deg.to_string(),
        fmt_num(r.p_alpha_beta),
        fmt_num(r.p_alpha_gamma),
        fmt_num(r.p_gamma_beta),
        fmt_num(r.margin),
        r.violated.to_string(),
    ]
}

fn origin_suffix(o: &Option<String>) -> String {
    o.as_ref().map(|o| format!("  @{o}")).unwrap_or_default()
}

pub fn render_text(doc: &Document) -> String {
    let mut s = String::new();
    if let Some(rep) = &doc.report {
        let _ = writeln!(s, "scenario {}", rep.scenario);
        if !rep.parameters.is_empty() {
            let p: Vec<String> = rep.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "parameters: {}", p.join(", "));
        }
        if !rep.systems.is_empty() {
            let p: Vec<String> = rep.systems.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "systems: {}", p.join(" "));
        }
        for t in &rep.state_tables {
            let deg = if t.degenerate { " (degenerate)" } else { "" };
            let _ = writeln!(s, "\npossible internal states of {}{deg}{}", t.label, origin_suffix(&t.origin));
            let _ = writeln!(s, "  [{}]", t.anchor);
            for en in &t.entries {
                let _ = writeln!(s, "  {}  {}", fmt_num(en.probability), ket_text(&en.state, false));
            }
        }
        for t in &rep.joint_tables {
            let _ = writeln!(s, "\njoint table {}{}", t.label, origin_suffix(&t.origin));
            let _ = writeln!(s, "  [{}]", t.anchor);
            let w = t.rows.iter().map(|r| r.len()).max().unwrap_or(0).max(2);
            let mut head = format!("  {:w$}", "");
            for c in &t.columns {
                let _ = write!(head, "  {c:>16}");
            }
            let _ = writeln!(s, "{head}");
            for (r, row) in t.rows.iter().zip(&t.cells) {
                let mut line = format!("  {r:w$}");
                for x in row {
                    let _ = write!(line, "  {:>16}", fmt_num(*x));
                }
                let _ = writeln!(s, "{line}");
            }
        }
        if !rep.values.is_empty() {
            let _ = writeln!(s, "\nvalues");
            for v in &rep.values {
                let _ = writeln!(s, "  {} = {}{}", v.name, fmt_num(v.value), origin_suffix(&v.origin));
            }
        }
        if !rep.assertions.is_empty() {
            let _ = writeln!(s, "\nassertions");
            for a in &rep.assertions {
                let _ = writeln!(
                    s,
                    "  {}  {}: actual {} expected {} residual {:.3e} tol {:.1e}{}",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    fmt_num(a.actual),
                    fmt_num(a.expected),
                    a.residual,
                    a.tolerance,
                    origin_suffix(&a.origin)
                );
                let _ = writeln!(s, "        [{}]", a.anchor);
            }
        }
    }
    if let Some(rows) = &doc.scan {
        if doc.report.is_some() {
            s.push('\n');
        }
        let _ = writeln!(s, "Bell scan{}", if doc.recorders == Some(true) { " with recorders" } else { "" });
        for r in rows {
            let _ = writeln!(
                s,
                "  ({}, {}, {}) deg  P(a+,b+)={} P(a+,g+)={} P(g+,b+)={}  margin {:+.*}  {}",
                r.alpha_deg,
                r.beta_deg,
                r.gamma_deg,
                fmt_num(r.p_alpha_beta),
                fmt_num(r.p_alpha_gamma),
                fmt_num(r.p_gamma_beta),
                DIGITS,
                r.margin,
                if r.violated { "VIOLATED" } else { "SATISFIED" }
            );
        }
        let n = rows.iter().filter(|r| r.violated).count();
        let _ = writeln!(s, "{n} of {} triples violate the inequality", rows.len());
    }
    let total = doc.report.as_ref().map(|r| r.assertions.len()).unwrap_or(0);
    let failed = doc.report.as_ref().map(|r| r.failures().len()).unwrap_or(0);
    let _ = writeln!(
        s,
        "\n{}: {} of {total} assertions passed",
        if doc.passed { "PASSED" } else { "FAILED" },
        total - failed
    );
    s
}
