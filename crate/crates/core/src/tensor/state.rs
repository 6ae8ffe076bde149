use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{kron_vec, CVector, CompositeSpace, DensityOperator, C64, TOL};
use crate::error::{Error, Result};

/// Amplitudes smaller than this are skipped when fixing the global phase.
const PHASE_EPS: f64 = 1e-10;

/// A normalized amplitude vector over a composite space.
///
/// The global phase is fixed so that the first amplitude with modulus above
/// `1e-10` is real and positive; two states describing the same projector
/// therefore compare equal amplitude-by-amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: CompositeSpace,
    amplitudes: CVector,
}

/// Rotate `v` so its first non-negligible entry is real and positive.
/// Returns the phase factor that was divided out.
pub fn phase_normalize(v: &mut CVector) -> C64 {
    match v.iter().find(|z| z.norm() > PHASE_EPS) {
        Some(&z) => {
            let phase = z / z.norm();
            let inv = phase.conj();
            v.iter_mut().for_each(|x| *x *= inv);
            phase
        }
        None => C64::new(1.0, 0.0),
    }
}

impl PureState {
    /// Wraps an amplitude vector whose norm is already 1 within `1e-10`.
    pub fn new(space: CompositeSpace, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::Normalization(format!("state norm is {norm}, expected 1")));
        }
        Self::normalized(space, amplitudes)
    }

    /// Normalizes any nonzero amplitude vector.
    pub fn normalized(space: CompositeSpace, mut amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                space.total_dim()
            )));
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::Normalization("zero or non-finite amplitude vector".into()));
        }
        amplitudes /= C64::new(norm, 0.0);
        phase_normalize(&mut amplitudes);
        Ok(PureState { space, amplitudes })
    }

    /// Skips the norm check; used where the norm is preserved by construction.
    pub(crate) fn from_raw(space: CompositeSpace, mut amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), space.total_dim());
        phase_normalize(&mut amplitudes);
        PureState { space, amplitudes }
    }

    /// Computational basis ket with one digit per subsystem.
    pub fn basis(space: CompositeSpace, digits: &[usize]) -> Result<Self> {
        let idx = space.flat_index(digits)?;
        let mut amps = CVector::zeros(space.total_dim());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(PureState { space, amplitudes: amps })
    }

    /// Normalized linear combination of basis kets.
    pub fn from_terms(space: CompositeSpace, terms: &[(C64, &[usize])]) -> Result<Self> {
        let mut amps = CVector::zeros(space.total_dim());
        for (coef, digits) in terms {
            amps[space.flat_index(digits)?] += coef;
        }
        Self::normalized(space, amps)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.space.flat_index(digits)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// The same state with its amplitudes laid out in `target`'s order.
    ///
    /// `target` must hold exactly the same subsystems as this state's space.
    pub fn reorder(&self, target: &CompositeSpace) -> Result<PureState> {
        if !self.space.same_set(target) {
            return Err(Error::Label(format!("{} and {} differ", self.space, target)));
        }
        if &self.space == target {
            return Ok(self.clone());
        }
        let pos = self.space.positions(&target.names())?;
        let offs = self.space.offsets(&pos);
        let amps = CVector::from_iterator(offs.len(), offs.iter().map(|&o| self.amplitudes[o]));
        Ok(PureState { space: target.clone(), amplitudes: amps })
    }

    /// `⟨self|other⟩`, reordering `other` if its layout differs.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        let other = other.reorder(&self.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `|ψ⟩⟨ψ|` as a density operator.
    pub fn projector(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        tensor_product(self, other)
    }
}

/// Product state over `a.space ++ b.space`.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    let space = a.space.concat(&b.space)?;
    Ok(PureState::from_raw(space, kron_vec(&a.amplitudes, &b.amplitudes)))
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if z.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let digits: Vec<String> = self.space.digits(i).iter().map(|d| d.to_string()).collect();
            write!(f, "({:.6}{:+.6}i)|{}>", z.re, z.im, digits.join(","))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let amps: Vec<[f64; 2]> = self.amplitudes.iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("PureState", 2)?;
        st.serialize_field("subsystems", &self.space.names())?;
        st.serialize_field("amplitudes", &amps)?;
        st.end()
    }
}
