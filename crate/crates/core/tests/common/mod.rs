//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qrs::random::DEFAULT_SEED;
use qrs::script::{parse, run_source, serialize};

pub fn scripts_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/scripts")
}

fn qrs_files(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "qrs"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

/// Valid scripts whose expectations all hold.
pub fn golden_scripts() -> Vec<(String, String)> {
    qrs_files(&scripts_dir())
}

/// A script that must be rejected, with the location its first diagnostic
/// must point at. The first line reads `# error LINE:COL TOKEN`.
pub struct Malformed {
    pub name: String,
    pub source: String,
    pub line: usize,
    pub column: usize,
    pub token: String,
}

pub fn malformed_scripts() -> Vec<Malformed> {
    qrs_files(&scripts_dir().join("malformed"))
        .into_iter()
        .map(|(name, source)| {
            let header = source
                .lines()
                .next()
                .and_then(|l| l.strip_prefix("# error "))
                .unwrap_or_else(|| panic!("{name}: no header"));
            let (loc, token) = header.split_once(' ').unwrap_or_else(|| panic!("{name}: bad header"));
            let (line, column) = loc.split_once(':').unwrap();
            Malformed {
                line: line.parse().unwrap(),
                column: column.parse().unwrap(),
                token: token.to_string(),
                name,
                source,
            }
        })
        .collect()
}

/// Parses deterministically, survives a serialize/parse round trip and runs
/// to the same passing report twice.
pub fn check_golden(name: &str, source: &str) -> Result<(), String> {
    let doc = parse(source).map_err(|d| format!("{name}: {}", d.render(name)))?;
    if parse(source).ok().as_ref() != Some(&doc) {
        return Err(format!("{name}: parsing is not deterministic"));
    }
    let text = serialize(&doc);
    let again = parse(&text).map_err(|d| format!("{name}: serialized form does not parse: {}", d.render(name)))?;
    if again.without_spans() != doc.without_spans() {
        return Err(format!("{name}: round trip changed the document"));
    }
    if serialize(&again) != text {
        return Err(format!("{name}: serialization is not idempotent"));
    }
    let first = run_source(source, DEFAULT_SEED).map_err(|e| format!("{name}: {}", e.render(name)))?;
    let second = run_source(&text, DEFAULT_SEED).map_err(|e| format!("{name}: {}", e.render(name)))?;
    if !first.passed() {
        return Err(format!("{name}: failed assertions {:?}", first.failures()));
    }
    if first.assertions.len() != second.assertions.len()
        || first.assertions.iter().zip(&second.assertions).any(|(a, b)| a.actual != b.actual || a.passed != b.passed)
    {
        return Err(format!("{name}: the round-tripped script gives different results"));
    }
    Ok(())
}

/// The first diagnostic sits at the header's location and the source text
/// there is the offending token.
pub fn check_malformed(m: &Malformed) -> Result<(), String> {
    let diags = match parse(&m.source) {
        Ok(_) => return Err(format!("{}: accepted", m.name)),
        Err(d) => d.0,
    };
    let first = &diags[0];
    if (first.span.line, first.span.column) != (m.line, m.column) {
        return Err(format!("{}: first diagnostic `{first}`, expected at {}:{}", m.name, m.line, m.column));
    }
    let line = m.source.lines().nth(m.line - 1).unwrap_or("");
    let at: String = line.chars().skip(m.column - 1).collect();
    if !at.starts_with(&m.token) {
        return Err(format!("{}: `{}` is not at {}:{} (found `{at}`)", m.name, m.token, m.line, m.column));
    }
    if first.span.length > at.chars().count() {
        return Err(format!("{}: span runs past the end of the line", m.name));
    }
    Ok(())
}

pub fn qrs(args: &[&str]) -> Output {
    qrs_with_env(args, &[])
}

pub fn qrs_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qrs"));
    cmd.args(args).env_remove("QRS_SEED").current_dir(env!("CARGO_MANIFEST_DIR"));
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("qrs runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 output")
}
