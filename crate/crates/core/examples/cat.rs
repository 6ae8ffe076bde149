//! An atom in `√0.3|0⟩ + √0.7|1⟩` is read out by a cat. With respect to the
//! isolated atom + cat system the cat has two possible internal states,
//! dead and alive, with the atom's weights.

use qrs::calculus::{joint_table, possible_internal_states, ReferenceSystem};
use qrs::cli::ket_text;
use qrs::dynamics::MeasurementModel;
use qrs::tensor::{CompositeSpace, PureState, Subsystem, C64};

fn main() -> qrs::Result<()> {
    let atom = CompositeSpace::from_pairs(&[("atom", 2)])?;
    let (d, a) = (C64::new(0.3f64.sqrt(), 0.0), C64::new(0.7f64.sqrt(), 0.0));
    let psi = PureState::from_terms(atom.clone(), &[(d, &[0]), (a, &[1])])?;

    // Pointer 0 is the ready state, pointer j + 1 records basis state j.
    let cat = MeasurementModel::computational(atom, Subsystem::new("cat", 3))?;
    let r = ReferenceSystem::isolated(cat.measure(&psi)?);

    for name in ["cat", "atom"] {
        println!("possible internal states of {name}:");
        for e in &possible_internal_states(&r, &[name])?.entries {
            println!("  {:.6}  {}", e.probability, ket_text(&e.state, false));
        }
    }
    println!("P(atom j, cat k): {:?}", joint_table(&r, &["atom"], &["cat"])?);
    Ok(())
}
