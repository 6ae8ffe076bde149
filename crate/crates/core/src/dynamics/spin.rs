//! Spin-½ operators and eigenstates along directions in the x–z plane.
//!
//! Basis order is `|↑⟩ = 0`, `|↓⟩ = 1`; `Ŝ_z = diag(½, −½)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::tensor::{CMatrix, CVector, CompositeSpace, PureState, C64};

/// Measurement axis tilted from z by `delta` radians, toward −x:
/// `n = (−sin δ, 0, cos δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDirection {
    pub delta: f64,
}

impl SpinDirection {
    pub fn new(delta: f64) -> Self {
        SpinDirection { delta }
    }

    pub fn from_degrees(deg: f64) -> Self {
        SpinDirection { delta: deg.to_radians() }
    }

    /// `Ŝ_{z′}(δ) = cos δ Ŝ_z − sin δ Ŝ_x`.
    pub fn operator(&self) -> CMatrix {
        let (s, c) = self.delta.sin_cos();
        sz() * C64::new(c, 0.0) - sx() * C64::new(s, 0.0)
    }

    /// `cos(δ/2)|↑⟩ − sin(δ/2)|↓⟩`, eigenvalue `+½`, with the spinor sign kept.
    pub fn up_spinor(&self) -> CVector {
        let (s, c) = (self.delta / 2.0).sin_cos();
        CVector::from_vec(vec![C64::new(c, 0.0), C64::new(-s, 0.0)])
    }

    /// `sin(δ/2)|↑⟩ + cos(δ/2)|↓⟩`, eigenvalue `−½`, with the spinor sign kept.
    pub fn down_spinor(&self) -> CVector {
        let (s, c) = (self.delta / 2.0).sin_cos();
        CVector::from_vec(vec![C64::new(s, 0.0), C64::new(c, 0.0)])
    }
}

pub fn sx() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0)])
}

pub fn sy() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -0.5), C64::new(0.0, 0.5), C64::new(0.0, 0.0)])
}

pub fn sz() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.5, 0.0)])
}

/// Spin-½ subsystem named `name`.
pub fn spin_space(name: &str) -> Result<CompositeSpace> {
    CompositeSpace::from_pairs(&[(name, 2)])
}

/// `(|1,δ,↑⟩, |1,δ,↓⟩)` on the spin subsystem `name`, phase-normalized.
pub fn spin_eigenstates(d: SpinDirection, name: &str) -> Result<(PureState, PureState)> {
    let space = spin_space(name)?;
    Ok((PureState::new(space.clone(), d.up_spinor())?, PureState::new(space, d.down_spinor())?))
}

/// `exp(−i θ n·Ŝ)` for a unit axis `n`.
pub fn rotation(axis: [f64; 3], theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let ns = sx() * C64::new(axis[0], 0.0) + sy() * C64::new(axis[1], 0.0) + sz() * C64::new(axis[2], 0.0);
    // n·σ = 2 n·S
    CMatrix::identity(2, 2) * C64::new(c, 0.0) - ns * C64::new(0.0, 2.0 * s)
}
