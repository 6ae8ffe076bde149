//! After particle 1 of the singlet `a|↑↓⟩ − b|↓↑⟩` is found spin up along a
//! direction in the x–z plane, particle 2 is a spin eigenstate along an axis
//! given by z–y–z Euler angles.

use qrs::dynamics::{epr_euler_angles, epr_partner_state, SpinDirection, SpinOutcome};
use qrs::tensor::{CVector, C64};

fn main() -> qrs::Result<()> {
    let (a, b) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
    for deg in [0.0, 45.0, 90.0, 135.0] {
        let d = SpinDirection::from_degrees(deg);
        for outcome in [SpinOutcome::Plus, SpinOutcome::Minus] {
            let partner = epr_partner_state(a, b, d, outcome, "P2")?;
            let e = epr_euler_angles(a, b, d, outcome)?;
            let v: &CVector = partner.amplitudes();
            let residual = (e.axis_operator() * v - v * C64::new(-0.5 * outcome.sign(), 0.0)).norm();
            println!(
                "delta {deg:>5} outcome {}: alpha {:+.6} beta {:.6} gamma {:+.6}  residual {residual:.1e}",
                outcome.symbol(),
                e.alpha,
                e.beta,
                e.gamma
            );
        }
    }
    Ok(())
}
