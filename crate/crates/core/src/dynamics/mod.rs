//! Measurement dynamics: nondemolition couplings between a measured system
//! and a pointer device, spin directions, and the Euler-angle description of
//! the state left on the partner of a measured entangled spin.

mod euler;
mod measurement;
mod spin;

pub use euler::{epr_euler_angles, epr_partner_state, wrap_angle, EulerAngles, SpinOutcome};
pub use measurement::{
    measurement_outcome_distribution, measurement_outcome_distribution_dynamic, MeasurementModel, Outcome,
};
pub use spin::{rotation, spin_eigenstates, spin_space, sx, sy, sz, SpinDirection};
