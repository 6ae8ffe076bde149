//! The `qrs` command line: `run` a `.qrs` script, `demo` a canned scenario,
//! or `scan` Bell's inequality over an angle grid.
//!
//! Exit status is 0 when every assertion passes, 1 when one fails and 2 on
//! usage, file, parse or script errors. Output is byte-identical for equal
//! arguments and seed, whatever the `--parallel` setting.

mod grid;
mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use grid::{AngleGrid, GridError};
pub use render::{
    fmt_num, ket_text, render_csv, render_json, render_text, round_sig, Document, ScanRow, DIGITS, REPORT_COLUMNS,
    SCAN_COLUMNS, SCHEMA_VERSION,
};

use crate::random::DEFAULT_SEED;
use crate::scenarios::{
    bell_inequality_scan, bell_report, bell_scan_report, collapse_correspondence, locality_check, run_cat, run_epr,
    run_three_spin, ScenarioReport, SCENARIO_NAMES, VIOLATION_TOL,
};
use crate::script::{parse, RunError};
use crate::tensor::C64;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Threespin,
    Cat,
    Epr,
    Bell,
    Locality,
    Collapse,
}

#[derive(Debug, Parser)]
#[command(name = "qrs", version, about = "Quantum reference systems simulator")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Root seed for randomized checks and `sample` queries.
    #[arg(long, env = "QRS_SEED", default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for Bell scans.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..), global = true)]
    pub parallel: u16,
    /// Lower every assertion tolerance to at most this value.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a `.qrs` script.
    Run {
        /// Script path.
        file: PathBuf,
    },
    /// Run a canned scenario.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        /// Angles in degrees: `alpha,beta,gamma` for bell, `delta` for epr.
        #[arg(long)]
        angles: Option<String>,
        /// Bell: let recorders store each particle's state before the devices.
        #[arg(long)]
        recorders: bool,
        /// Number of random trials for locality and collapse.
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Scan Bell's inequality for the singlet over an angle grid.
    Scan {
        /// Grid for alpha, `start:stop:step` or a single angle, in degrees.
        #[arg(long, default_value = "0:180:5")]
        alpha: AngleGrid,
        #[arg(long, default_value = "0:180:5")]
        beta: AngleGrid,
        #[arg(long, default_value = "0:180:5")]
        gamma: AngleGrid,
        /// Use the recorder joint law.
        #[arg(long)]
        recorders: bool,
    },
}

/// Failure that ends a command with exit status 2.
struct Fatal(String);

/// Entry point of the `qrs` binary.
pub fn main() -> ExitCode {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    ExitCode::from(run_with(std::env::args_os(), &mut out, &mut err))
}

/// Runs the command line `args` (program name first), writing the result
/// to `out` (unless `--out` is given) and diagnostics to `err`. Returns the
/// exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(doc) => {
            let text = match cli.config.format {
                Format::Json => render_json(&doc),
                Format::Csv => render_csv(&doc),
                Format::Text => render_text(&doc),
            };
            let written = match &cli.config.out {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|e| format!("{}: error: cannot write: {e}", path.display()))
                }
                None => out.write_all(text.as_bytes()).map_err(|e| format!("error: cannot write output: {e}")),
            };
            if let Err(m) = written {
                let _ = writeln!(err, "{m}");
                return EXIT_ERROR;
            }
            if doc.passed {
                EXIT_PASS
            } else {
                if let Some(rep) = &doc.report {
                    for a in rep.failures() {
                        let _ = writeln!(
                            err,
                            "assertion failed: {} (residual {:.3e} > {:.1e})",
                            a.name, a.residual, a.tolerance
                        );
                    }
                }
                EXIT_FAIL
            }
        }
        Err(Fatal(m)) => {
            let _ = writeln!(err, "{m}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<Document, Fatal> {
    let cfg = &cli.config;
    if let Some(t) = cfg.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Fatal(format!("error: --tol must be a positive number, found {t}")));
        }
    }
    let mut doc = Document {
        schema_version: SCHEMA_VERSION,
        command: String::new(),
        seed: cfg.seed,
        passed: true,
        recorders: None,
        report: None,
        scan: None,
    };
    match &cli.command {
        Command::Run { file } => {
            doc.command = "run".into();
            let mut rep = run_script(file, cfg.seed)?;
            if let Some(stem) = file.file_stem() {
                rep.scenario = stem.to_string_lossy().into_owned();
            }
            doc.report = Some(rep);
        }
        Command::Demo { name, angles, recorders, trials } => {
            doc.command = "demo".into();
            let angles = angles.as_deref().map(parse_angles).transpose()?;
            let (rep, scan) = demo(*name, angles, *recorders, *trials, cfg)?;
            if *name == DemoName::Bell {
                doc.recorders = Some(*recorders);
            }
            doc.report = Some(rep);
            doc.scan = scan;
        }
        Command::Scan { alpha, beta, gamma, recorders } => {
            doc.command = "scan".into();
            doc.recorders = Some(*recorders);
            let rows = scan(*alpha, *beta, *gamma, *recorders, cfg.parallel)?;
            doc.passed = !*recorders || rows.iter().all(|r| r.margin <= VIOLATION_TOL);
            doc.scan = Some(rows);
        }
    }
    if let (Some(rep), Some(t)) = (doc.report.as_mut(), cfg.tol) {
        tighten(rep, t);
    }
    if let Some(rep) = &doc.report {
        doc.passed &= rep.passed();
    }
    Ok(doc)
}

fn run_script(file: &Path, seed: u64) -> Result<ScenarioReport, Fatal> {
    let shown = file.display().to_string();
    let source = std::fs::read_to_string(file).map_err(|e| Fatal(format!("{shown}: error: cannot read file: {e}")))?;
    let doc = parse(&source).map_err(|d| Fatal(RunError::Parse(d).render(&shown)))?;
    crate::script::execute(&doc, seed).map_err(|e| Fatal(RunError::Execute(e).render(&shown)))
}

/// Lowers each assertion's tolerance to `tol` and re-judges it; larger
/// values leave the built-in tolerances alone.
pub fn tighten(rep: &mut ScenarioReport, tol: f64) {
    for a in &mut rep.assertions {
        if tol < a.tolerance {
            a.tolerance = tol;
            a.passed = a.residual <= tol && a.residual.is_finite();
        }
    }
}

fn parse_angles(s: &str) -> Result<Vec<f64>, Fatal> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Fatal(format!("error: bad --angles `{s}`: `{}` is not a number", p.trim())))
        })
        .collect()
}

fn singlet() -> (C64, C64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (C64::new(h, 0.0), C64::new(h, 0.0))
}

fn engine(e: crate::Error) -> Fatal {
    Fatal(format!("error: {e}"))
}

fn pool(threads: u16) -> Result<rayon::ThreadPool, Fatal> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads as usize)
        .build()
        .map_err(|e| Fatal(format!("error: cannot start {threads} worker threads: {e}")))
}

fn demo(
    name: DemoName,
    angles: Option<Vec<f64>>,
    recorders: bool,
    trials: u64,
    cfg: &RunConfig,
) -> Result<(ScenarioReport, Option<Vec<ScanRow>>), Fatal> {
    let label = SCENARIO_NAMES[name as usize];
    let want = match name {
        DemoName::Bell => 3,
        DemoName::Epr => 1,
        _ => 0,
    };
    if let Some(a) = &angles {
        if a.len() != want {
            let msg = match want {
                0 => format!("error: demo {label} takes no --angles"),
                1 => format!("error: demo {label} takes one angle (delta), found {}", a.len()),
                _ => format!("error: demo {label} takes three angles alpha,beta,gamma, found {}", a.len()),
            };
            return Err(Fatal(msg));
        }
    }
    if recorders && name != DemoName::Bell {
        return Err(Fatal(format!("error: --recorders only applies to demo bell, not {label}")));
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let rep = match name {
        DemoName::Threespin => run_three_spin(h, h, h, h).map_err(engine)?,
        DemoName::Cat => run_cat(C64::new(0.3f64.sqrt(), 0.0), C64::new(0.7f64.sqrt(), 0.0), true).map_err(engine)?,
        DemoName::Epr => {
            let delta = angles.map(|a| a[0]).unwrap_or(90.0);
            let (a, b) = singlet();
            run_epr(a, b, delta.to_radians(), 0.9).map_err(engine)?
        }
        DemoName::Locality => locality_check((2, 2, 2), trials, cfg.seed).map_err(engine)?,
        DemoName::Collapse => collapse_correspondence((2, 2), trials, cfg.seed).map_err(engine)?,
        DemoName::Bell => {
            let deg = angles.unwrap_or_else(|| vec![0.0, 90.0, 45.0]);
            let (a, b) = singlet();
            let triple = (deg[0].to_radians(), deg[1].to_radians(), deg[2].to_radians());
            let scan = bell_inequality_scan(a, b, &[triple], recorders, false).map_err(engine)?;
            let mut rep = bell_report(a, b, triple.0, triple.1, recorders).map_err(engine)?;
            rep.absorb(bell_scan_report(a, b, &scan));
            let rows = vec![ScanRow::new((deg[0], deg[1], deg[2]), &scan.rows[0])];
            return Ok((rep, Some(rows)));
        }
    };
    Ok((rep, None))
}

/// Inequality margins over the product grid, rows in lexicographic
/// `(alpha, beta, gamma)` order.
pub fn scan_rows(
    alpha: AngleGrid,
    beta: AngleGrid,
    gamma: AngleGrid,
    recorders: bool,
    parallel: bool,
) -> crate::Result<Vec<ScanRow>> {
    let mut degrees = Vec::new();
    for &x in &alpha.values() {
        for &y in &beta.values() {
            for &z in &gamma.values() {
                degrees.push((x, y, z));
            }
        }
    }
    let triples: Vec<(f64, f64, f64)> =
        degrees.iter().map(|&(x, y, z)| (x.to_radians(), y.to_radians(), z.to_radians())).collect();
    let (a, b) = singlet();
    let scan = bell_inequality_scan(a, b, &triples, recorders, parallel)?;
    Ok(degrees.into_iter().zip(&scan.rows).map(|(d, t)| ScanRow::new(d, t)).collect())
}

fn scan(
    alpha: AngleGrid,
    beta: AngleGrid,
    gamma: AngleGrid,
    recorders: bool,
    threads: u16,
) -> Result<Vec<ScanRow>, Fatal> {
    let rows = if threads > 1 {
        pool(threads)?.install(|| scan_rows(alpha, beta, gamma, recorders, true))
    } else {
        scan_rows(alpha, beta, gamma, recorders, false)
    };
    rows.map_err(engine)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (u8, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("qrs").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn bell_demo_verdicts() {
        let (code, out, _) = run(&["demo", "bell", "--angles", "0,90,45"]);
        assert_eq!(code, 0);
        assert!(out.contains("margin +0.103553390593  VIOLATED"), "{out}");
        let (code, out, _) = run(&["demo", "bell", "--angles", "0,90,45", "--recorders"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("SATISFIED"), "{out}");
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run(&["demo", "dragon"]);
        assert_eq!(code, 2);
        assert!(err.contains("threespin") && err.contains("collapse"), "{err}");
        assert_eq!(run(&["scan", "--alpha", "0:10"]).0, 2);
        assert_eq!(run(&["demo", "cat", "--angles", "1,2,3"]).0, 2);
        assert_eq!(run(&["demo", "bell", "--tol", "-1"]).0, 2);
        let (code, _, err) = run(&["run", "/nonexistent/x.qrs"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("/nonexistent/x.qrs: error: cannot read file"), "{err}");
    }

    #[test]
    fn tolerance_override_only_tightens() {
        let mut rep = ScenarioReport::new("t");
        rep.check_close("x", "", 0.0, 1e-12, 1e-10);
        tighten(&mut rep, 1e-3);
        assert_eq!(rep.assertions[0].tolerance, 1e-10);
        tighten(&mut rep, 1e-13);
        assert!(!rep.passed());
    }

    #[test]
    fn scan_counts_rows_in_order() {
        let rows =
            scan_rows("0:180:45".parse().unwrap(), AngleGrid::single(90.0), AngleGrid::single(45.0), false, false)
                .unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.windows(2).all(|w| w[0].alpha_deg < w[1].alpha_deg));
    }
}
