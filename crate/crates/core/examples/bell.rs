//! Device joint tables for a singlet pair, with and without recorders, and
//! a small inequality scan.

use qrs::scenarios::{bell_inequality_scan, run_bell};
use qrs::tensor::C64;

fn main() -> qrs::Result<()> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let deg = f64::to_radians;
    for recorders in [false, true] {
        let row = run_bell(h, h, deg(0.0), deg(45.0), recorders)?;
        println!("recorders {recorders}: P(M1,M2) at (0, 45) deg = {:?}", row.table);
    }
    let triples: Vec<(f64, f64, f64)> = [(0.0, 90.0, 45.0), (0.0, 120.0, 60.0), (30.0, 60.0, 90.0)]
        .iter()
        .map(|&(x, y, z)| (deg(x), deg(y), deg(z)))
        .collect();
    for recorders in [false, true] {
        for t in bell_inequality_scan(h, h, &triples, recorders, false)?.rows {
            println!(
                "recorders {recorders}: ({:.0}, {:.0}, {:.0}) deg margin {:+.6} {}",
                t.alpha.to_degrees(),
                t.beta.to_degrees(),
                t.gamma.to_degrees(),
                t.margin,
                if t.violated { "violated" } else { "satisfied" }
            );
        }
    }
    Ok(())
}
