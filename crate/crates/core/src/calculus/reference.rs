use crate::error::{Error, Result};
use crate::tensor::{CompositeSpace, DensityOperator, PureState};

/// A system together with its internal state, used as the frame against
/// which the states of its subsystems are defined.
///
/// Isolation is declared, never inferred: the probability rules refuse
/// references that were not built with [`ReferenceSystem::isolated`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSystem {
    state: PureState,
    isolated: bool,
}

impl ReferenceSystem {
    /// A reference declared isolated (never interacted with anything outside).
    pub fn isolated(state: PureState) -> Self {
        ReferenceSystem { state, isolated: true }
    }

    /// A reference that is closed now but may carry past correlations.
    pub fn closed(state: PureState) -> Self {
        ReferenceSystem { state, isolated: false }
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn space(&self) -> &CompositeSpace {
        self.state.space()
    }

    pub fn is_isolated(&self) -> bool {
        self.isolated
    }

    pub(crate) fn require_isolated(&self) -> Result<()> {
        if self.isolated {
            Ok(())
        } else {
            Err(Error::Isolation)
        }
    }

    /// Reduced state of `a`; the internal-state projector when `a` is the
    /// whole reference.
    pub fn state_of<S: AsRef<str>>(&self, a: &[S]) -> Result<DensityOperator> {
        state_with_respect_to(self, a)
    }
}

/// `ρ_A(R)`: the partial trace of `|ψ_R⟩⟨ψ_R|` onto `a`.
pub fn state_with_respect_to<S: AsRef<str>>(r: &ReferenceSystem, a: &[S]) -> Result<DensityOperator> {
    DensityOperator::reduce_pure(&r.state, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs_diff, tensor_product, C64};

    #[test]
    fn premeasurement_device_is_mixture_of_pointers() {
        // α|↑⟩|m↑⟩ + β|↓⟩|m↓⟩ with pointer indices 1, 2
        let space = CompositeSpace::from_pairs(&[("P", 2), ("M", 3)]).unwrap();
        let (al, be) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let psi = PureState::from_terms(space, &[(al, &[0, 1]), (be, &[1, 2])]).unwrap();
        let r = ReferenceSystem::isolated(psi);
        let rho = state_with_respect_to(&r, &["M"]).unwrap();
        assert!(rho.matrix()[(0, 0)].norm() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - 0.36).abs() < 1e-15);
        assert!((rho.matrix()[(2, 2)].re - 0.64).abs() < 1e-15);
        assert!(rho.matrix()[(1, 2)].norm() < 1e-15);
    }

    #[test]
    fn whole_reference_gives_projector_and_foreign_label_fails() {
        let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2)]).unwrap();
        let psi =
            PureState::from_terms(space, &[(C64::new(1.0, 0.0), &[0, 1]), (C64::new(0.0, 1.0), &[1, 0])]).unwrap();
        let r = ReferenceSystem::isolated(psi.clone());
        let rho = r.state_of(&["B", "A"]).unwrap();
        assert!(max_abs_diff(rho.matrix(), psi.projector().matrix()) < 1e-15);
        assert!(matches!(r.state_of(&["C"]), Err(Error::Subset(_))));
    }

    #[test]
    fn isolated_factor_state_is_independent_of_reference() {
        let a = PureState::from_terms(
            CompositeSpace::from_pairs(&[("A", 2)]).unwrap(),
            &[(C64::new(0.6, 0.0), &[0]), (C64::new(0.0, 0.8), &[1])],
        )
        .unwrap();
        let b = PureState::basis(CompositeSpace::from_pairs(&[("B", 3)]).unwrap(), &[1]).unwrap();
        let r = ReferenceSystem::isolated(tensor_product(&a, &b).unwrap());
        let rho = r.state_of(&["A"]).unwrap();
        assert!(max_abs_diff(rho.matrix(), a.projector().matrix()) < 1e-12);
    }
}
