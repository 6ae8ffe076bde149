//! States with respect to reference systems, Schmidt canonical form,
//! possible internal states and the joint-probability rules built on them.

mod internal;
mod joint;
mod reference;
mod schmidt;

pub use internal::{
    overlap_matrix, possible_internal_states, possible_internal_states_aligned, possible_internal_states_with_hints,
    sample_internal_state, InternalState, PossibleInternalStates, DROP_THRESHOLD,
};
pub use joint::{
    check_possible_state, conditional_evolution_probability, joint_probability, joint_probability_nested,
    joint_probability_of, joint_table, EigenstateCheck, JointQuery,
};
pub use reference::{state_with_respect_to, ReferenceSystem};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
