//! Hermitian eigensystems by cyclic complex Jacobi rotations.

use std::ops::Range;

use super::density::symmetrize;
use super::{hermiticity_deviation, phase_normalize, CMatrix, CVector, C64, DEGENERACY_TOL, TOL};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and orthonormal eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    /// True when some eigenvalue level has multiplicity above one.
    pub degenerate: bool,
    /// Smallest eigenvalue before clipping of `[-1e-10, 0)` to zero.
    pub min_unclipped: f64,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.vectors.column(j).into_owned()
    }

    /// `Σ λⱼ |vⱼ⟩⟨vⱼ|`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (j, &l) in self.values.iter().enumerate() {
            let v = self.vectors.column(j);
            out += (v * v.adjoint()) * C64::new(l, 0.0);
        }
        out
    }
}

/// Decomposes a Hermitian matrix.
///
/// The input is symmetrized first. Eigenvalues come back descending with
/// values in `[-1e-10, 0)` clipped to zero; each eigenvector has its first
/// non-negligible entry real and positive. Degenerate levels get the
/// canonical basis described in [`resolve_degenerate_groups`].
pub fn hermitian_eigensystem(m: &CMatrix) -> Result<EigenSystem> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    let dev = hermiticity_deviation(m);
    if dev > TOL {
        return Err(Error::Numerical(format!("matrix not Hermitian (deviation {dev:.3e})")));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut a = symmetrize(m.clone());
    let mut v = CMatrix::identity(n, n);
    jacobi(&mut a, &mut v)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let mut values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let min_unclipped = values.last().copied().unwrap_or(0.0);
    for l in values.iter_mut() {
        if *l < 0.0 && *l >= -TOL {
            *l = 0.0;
        }
    }
    let degenerate = resolve_degenerate_groups(&values, &mut vectors, &[]);
    Ok(EigenSystem { values, vectors, degenerate, min_unclipped })
}

fn jacobi(a: &mut CMatrix, v: &mut CMatrix) -> Result<()> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 2 || scale == 0.0 {
        return Ok(());
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for q in 1..n {
            for p in 0..q {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(a, v, p, q);
            }
        }
    }
    Err(Error::Numerical("Jacobi iteration did not converge".into()))
}

/// Annihilates `a[p, q]` with the unitary `G = diag(1, e^{-iφ}) R(θ)` acting
/// on the (p, q) plane: `A ← G†AG`, `V ← VG`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    if r < 1e-18 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Index ranges of consecutive (descending) eigenvalues within
/// `DEGENERACY_TOL` of the first value of their run.
pub fn degenerate_groups(values: &[f64]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[start] - values[i]).abs() > DEGENERACY_TOL {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Replaces the eigenvectors of every degenerate level by a canonical basis
/// of the same subspace, then phase-normalizes every column.
///
/// The basis is built greedily. Hint vectors are tried first, in order, and
/// accepted while their residual inside the level's subspace has norm above
/// `1e-3`; computational basis vectors `e₀, e₁, …` fill the rest. At each
/// step the candidate with the largest residual wins, near-ties going to the
/// earlier candidate. Returns whether any level was degenerate.
pub fn resolve_degenerate_groups(values: &[f64], vectors: &mut CMatrix, hints: &[CVector]) -> bool {
    let mut degenerate = false;
    for group in degenerate_groups(values) {
        if group.len() > 1 {
            degenerate = true;
            canonicalize(vectors, group, hints);
        }
    }
    for j in 0..vectors.ncols() {
        let mut col = vectors.column(j).into_owned();
        phase_normalize(&mut col);
        vectors.set_column(j, &col);
    }
    degenerate
}

fn canonicalize(vectors: &mut CMatrix, group: Range<usize>, hints: &[CVector]) {
    let n = vectors.nrows();
    let g = group.len();
    let basis = vectors.columns(group.start, g).into_owned();
    // Candidate coordinates inside the level's subspace: y = G† c.
    let mut hint_res: Vec<CVector> = hints.iter().map(|h| basis.adjoint() * h).collect();
    let mut unit_res: Vec<CVector> =
        (0..n).map(|i| CVector::from_iterator(g, (0..g).map(|k| basis[(i, k)].conj()))).collect();
    let mut chosen: Vec<CVector> = Vec::with_capacity(g);

    while chosen.len() < g {
        let r = if let Some(i) = pick(&hint_res, 1e-3) {
            &hint_res[i]
        } else if let Some(i) = pick(&unit_res, 1e-14) {
            &unit_res[i]
        } else {
            break;
        };
        let b = r / C64::new(r.norm(), 0.0);
        for r in hint_res.iter_mut().chain(unit_res.iter_mut()) {
            let proj = b.dotc(r);
            *r -= &b * proj;
        }
        chosen.push(b);
    }
    if chosen.len() < g {
        // Only reachable through severe cancellation; keep the solver's basis.
        return;
    }
    for (k, b) in chosen.iter().enumerate() {
        let col = &basis * b;
        vectors.set_column(group.start + k, &col);
    }
}

fn pick(residuals: &[CVector], floor: f64) -> Option<usize> {
    let best = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if best <= floor {
        return None;
    }
    residuals.iter().position(|r| r.norm() >= best * (1.0 - 1e-6))
}
