//! Dense complex linear algebra over composite Hilbert spaces.
//!
//! Everything here is immutable once constructed. States and operators carry
//! the [`CompositeSpace`] they live on, and every subset operation permutes to
//! the canonical (registration) order of that space before touching
//! amplitudes.

mod density;
mod eigen;
mod operator;
mod space;
mod state;

pub use density::DensityOperator;
pub use eigen::{hermitian_eigensystem, resolve_degenerate_groups, EigenSystem};
pub use operator::{apply_unitary, embed_operator, Operator};
pub use space::{CompositeSpace, Subsystem, DEFAULT_MAX_DIM};
pub use state::{phase_normalize, tensor_product, PureState};

use nalgebra::{DMatrix, DVector};

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for invariant checks (norms, Hermiticity, traces, unitarity).
pub const TOL: f64 = 1e-10;
/// Tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of `m - m†`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Kronecker product of two amplitude vectors (`a` is the major index).
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Kronecker product of two matrices (`a` is the major index).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}
