use crate::error::{Error, Result};
use crate::tensor::{
    kron_vec, phase_normalize, resolve_degenerate_groups, CMatrix, CVector, CompositeSpace, PureState, C64,
};

/// Singular values below this are treated as absent terms.
const SVD_CUTOFF: f64 = 1e-13;

/// `|ψ⟩ = Σⱼ cⱼ e^{iθⱼ} |φ_{A,j}⟩|φ_{B,j}⟩` with `cⱼ` descending.
///
/// Both factor states are phase-normalized, so the relative phase of each
/// term is carried separately in `phases`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub phases: Vec<C64>,
    pub left_states: Vec<PureState>,
    pub right_states: Vec<PureState>,
    /// True when two coefficients coincide and the factor bases were chosen
    /// canonically inside the shared subspace.
    pub degenerate: bool,
    space: CompositeSpace,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuilds the decomposed state in its original layout.
    pub fn reconstruct(&self) -> Result<PureState> {
        let a = self.left_states[0].space().clone();
        let b = self.right_states[0].space().clone();
        let joint = a.concat(&b)?;
        let mut amps = CVector::zeros(joint.total_dim());
        for j in 0..self.rank() {
            let term = kron_vec(self.left_states[j].amplitudes(), self.right_states[j].amplitudes());
            amps += term * (self.phases[j] * self.coefficients[j]);
        }
        PureState::normalized(joint, amps)?.reorder(&self.space)
    }
}

/// Schmidt canonical form of `psi` across the cut `(a, b)`.
///
/// Computed from the singular value decomposition of the amplitude matrix
/// `X[i_A, i_B]`. Left states for degenerate coefficients are chosen with
/// the same canonical rule the eigensystem uses, and the right states are
/// then recovered as `(⟨φ_{A,j}| ⊗ 1)|ψ⟩ / cⱼ`.
pub fn schmidt_decompose<S: AsRef<str>>(psi: &PureState, a: &[S], b: &[S]) -> Result<SchmidtDecomposition> {
    let space = psi.space();
    let partition_err = |m: String| Error::Partition(m);
    let pa = space.positions(a).map_err(|e| partition_err(e.to_string()))?;
    let pb = space.positions(b).map_err(|e| partition_err(e.to_string()))?;
    if pa.is_empty() || pb.is_empty() {
        return Err(Error::Partition("both sides of the cut must be nonempty".into()));
    }
    if pa.iter().any(|p| pb.contains(p)) {
        return Err(Error::Partition("the two sides share a subsystem".into()));
    }
    if pa.len() + pb.len() != space.len() {
        return Err(Error::Partition(format!("the cut does not cover {space}")));
    }
    let space_a = space.subspace(a)?;
    let space_b = space.subspace(b)?;
    let oa = space.offsets(&space.positions(&space_a.names())?);
    let ob = space.offsets(&space.positions(&space_b.names())?);
    let amps = psi.amplitudes();
    let x = CMatrix::from_fn(oa.len(), ob.len(), |i, t| amps[oa[i] + ob[t]]);

    let svd = x.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD did not return left vectors".into()))?;
    let mut order: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&j| svd.singular_values[j] > SVD_CUTOFF).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let sigma: Vec<f64> = order.iter().map(|&j| svd.singular_values[j]).collect();
    let mut left = CMatrix::from_fn(oa.len(), order.len(), |r, c| u[(r, order[c])]);
    let weights: Vec<f64> = sigma.iter().map(|s| s * s).collect();
    let degenerate = resolve_degenerate_groups(&weights, &mut left, &[]);

    let mut coefficients = Vec::with_capacity(sigma.len());
    let mut phases = Vec::with_capacity(sigma.len());
    let mut left_states = Vec::with_capacity(sigma.len());
    let mut right_states = Vec::with_capacity(sigma.len());
    for j in 0..sigma.len() {
        let lj = left.column(j).into_owned();
        // row vector ⟨φ_{A,j}| X
        let mut rj = (lj.adjoint() * &x).transpose();
        let norm = rj.norm();
        rj /= C64::new(norm, 0.0);
        let phase = phase_normalize(&mut rj);
        coefficients.push(norm);
        phases.push(phase);
        left_states.push(PureState::normalized(space_a.clone(), lj)?);
        right_states.push(PureState::normalized(space_b.clone(), rj)?);
    }
    Ok(SchmidtDecomposition { coefficients, phases, left_states, right_states, degenerate, space: space.clone() })
}
