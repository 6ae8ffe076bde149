//! An evolution of `B + C` leaves the possible internal states of `A`
//! untouched; one of `A + B` does not.

use qrs::random::{random_state, random_unitary, trial_rng, DEFAULT_SEED};
use qrs::scenarios::locality_trial;
use qrs::tensor::{CompositeSpace, Operator};

fn main() -> qrs::Result<()> {
    let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 3), ("C", 2)])?;
    let mut rng = trial_rng(DEFAULT_SEED, 0);
    let psi = random_state(&space, &mut rng)?;
    for pair in [["B", "C"], ["A", "B"]] {
        let u: Operator = random_unitary(&space.subspace(&pair)?, &mut rng)?;
        let t = locality_trial(&psi, &u, &["A"])?;
        println!("evolving {}+{}: worst change of A's states {:.3e}", pair[0], pair[1], t.worst());
    }
    Ok(())
}
