//! Three spins where the state of one pair depends on the reference system
//! it is taken with respect to.

use qrs::scenarios::run_three_spin;
use qrs::tensor::C64;

fn main() -> qrs::Result<()> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let report = run_three_spin(h, h, h, h)?;
    for t in &report.state_tables {
        println!("{} ({} states)", t.label, t.entries.len());
        for e in &t.entries {
            println!("  {:.6}", e.probability);
        }
    }
    println!("{} of {} checks passed", report.assertions.iter().filter(|a| a.passed).count(), report.assertions.len());
    Ok(())
}
