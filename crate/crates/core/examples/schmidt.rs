//! Schmidt decomposition of a random bipartite state, checked against the
//! possible internal states of each side.

use qrs::calculus::{possible_internal_states, schmidt_decompose, ReferenceSystem};
use qrs::random::{random_state, trial_rng, DEFAULT_SEED};
use qrs::tensor::CompositeSpace;

fn main() -> qrs::Result<()> {
    let space = CompositeSpace::from_pairs(&[("A", 3), ("B", 4)])?;
    let psi = random_state(&space, &mut trial_rng(DEFAULT_SEED, 0))?;
    let s = schmidt_decompose(&psi, &["A"], &["B"])?;
    let pis = possible_internal_states(&ReferenceSystem::isolated(psi.clone()), &["A"])?;
    println!("rank {}", s.rank());
    for (c, p) in s.coefficients.iter().zip(pis.probabilities()) {
        println!("  c^2 = {:.12}  P(A) = {:.12}", c * c, p);
    }
    println!("reconstruction fidelity {:.12}", s.reconstruct()?.fidelity(&psi)?);
    Ok(())
}
