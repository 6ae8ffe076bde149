//! Seeded random states, unitaries and bases for randomized checks.
//!
//! Every trial gets its own ChaCha stream derived from a root seed, so
//! results do not depend on how trials are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::tensor::{CMatrix, CVector, CompositeSpace, Operator, PureState, C64};

/// Default root seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_250_101;

/// Independent stream `trial` of the generator rooted at `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian (independent real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-uniform unit vector in `C^n`.
pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_iterator(n, (0..n).map(|_| complex_gaussian(rng)));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// Haar-uniform pure state on `space`.
pub fn random_state<R: Rng + ?Sized>(space: &CompositeSpace, rng: &mut R) -> Result<PureState> {
    PureState::normalized(space.clone(), random_vector(space.total_dim(), rng))
}

/// Haar-uniform `n x n` unitary (QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= ph;
    }
    q
}

/// Haar-uniform unitary acting on `space`.
pub fn random_unitary<R: Rng + ?Sized>(space: &CompositeSpace, rng: &mut R) -> Result<Operator> {
    Operator::unitary(space.clone(), haar_unitary(space.total_dim(), rng))
}

/// Random orthonormal basis of `space` (columns of a Haar unitary).
pub fn random_basis<R: Rng + ?Sized>(space: &CompositeSpace, rng: &mut R) -> Result<Vec<PureState>> {
    let u = haar_unitary(space.total_dim(), rng);
    (0..u.ncols()).map(|j| PureState::normalized(space.clone(), u.column(j).into_owned())).collect()
}
