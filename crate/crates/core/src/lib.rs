//! Quantum reference systems on finite-dimensional composite Hilbert spaces.
//!
//! States of subsystems are taken with respect to a reference system. The
//! crate computes reduced states, possible internal states (the eigenstates
//! of a reduced state, weighted by their eigenvalues), joint probabilities
//! over disjoint subsystems, and nondemolition measurement dynamics.
//!
//! - [`tensor`]: labeled composite spaces, pure states, density operators,
//!   Hermitian eigensystems.
//! - [`calculus`]: reference systems, Schmidt decomposition, possible
//!   internal states and joint probabilities.
//! - [`dynamics`]: measurement models, spin-½ directions, Euler angles of
//!   the EPR partner state.
//! - [`scenarios`]: the three-spin, cat, EPR, Bell, locality and collapse
//!   scenarios as checked [`scenarios::ScenarioReport`]s.
//! - [`script`]: the `.qrs` scenario format.
//! - [`cli`]: the `qrs` command line.
//!
//! ```
//! use qrs::calculus::{possible_internal_states, ReferenceSystem};
//! use qrs::tensor::{CompositeSpace, PureState, C64};
//!
//! let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2)]).unwrap();
//! let (a, b) = (C64::new(0.6, 0.0), C64::new(0.8, 0.0));
//! let psi = PureState::from_terms(space, &[(a, &[0, 0]), (b, &[1, 1])]).unwrap();
//! let pis = possible_internal_states(&ReferenceSystem::isolated(psi), &["A"]).unwrap();
//! assert!((pis.probabilities()[0] - 0.64).abs() < 1e-12);
//! ```

pub mod calculus;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod random;
pub mod scenarios;
pub mod script;
pub mod tensor;

pub use error::{Error, Result};
