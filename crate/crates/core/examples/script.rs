//! Runs a `.qrs` scenario file (default: the bundled cat) and prints its
//! assertions.
//!
//! ```text
//! cargo run --example script -- crates/core/examples/singlet_bell.qrs
//! ```

use qrs::random::DEFAULT_SEED;
use qrs::script::run_source;

fn main() {
    let path =
        std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cat.qrs").into());
    let source = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path}: {e}"));
    match run_source(&source, DEFAULT_SEED) {
        Ok(report) => {
            for a in &report.assertions {
                println!("{}  {}  actual {:.12}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.actual);
            }
            println!("passed: {}", report.passed());
        }
        Err(e) => {
            eprint!("{}", e.render(&path));
            std::process::exit(2);
        }
    }
}
