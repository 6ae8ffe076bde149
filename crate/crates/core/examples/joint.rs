//! Joint probabilities over disjoint subsystems, and their marginals.

use qrs::calculus::{joint_table, possible_internal_states, ReferenceSystem};
use qrs::random::{random_state, trial_rng, DEFAULT_SEED};
use qrs::tensor::CompositeSpace;

fn main() -> qrs::Result<()> {
    let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2), ("C", 3)])?;
    let r = ReferenceSystem::isolated(random_state(&space, &mut trial_rng(DEFAULT_SEED, 0))?);
    let table = joint_table(&r, &["A"], &["B"])?;
    let pa = possible_internal_states(&r, &["A"])?.probabilities();
    for (row, p) in table.iter().zip(pa) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
        println!("[{}]  row sum {:.6}  P(A) {:.6}", cells.join(", "), row.iter().sum::<f64>(), p);
    }
    Ok(())
}
