//! A measurement with a device, seen from the isolated system plus device,
//! reproduces the weights and post-measurement states of the collapse rule.

use qrs::random::{random_basis, random_state, trial_rng, DEFAULT_SEED};
use qrs::scenarios::collapse_trial;
use qrs::tensor::CompositeSpace;

fn main() -> qrs::Result<()> {
    let q = CompositeSpace::from_pairs(&[("S", 3), ("R", 2)])?;
    let mut rng = trial_rng(DEFAULT_SEED, 0);
    let psi = random_state(&q, &mut rng)?;
    let basis = random_basis(&q.subspace(&["S"])?, &mut rng)?;
    let t = collapse_trial(&psi, &["S"], basis)?;
    println!("outcome weights {:?}", t.probabilities);
    println!("gaps: probability {:.1e}, state of Q {:.1e}, state of S {:.1e}", t.probability_gap, t.q_gap, t.s_gap);
    Ok(())
}
