use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{hermitian_eigensystem, hermiticity_deviation, CMatrix, CompositeSpace, EigenSystem, PureState, C64, TOL};
use crate::error::{Error, Result};

/// Hermitian, positive-semidefinite, unit-trace operator over a subsystem set.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: CompositeSpace,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity (all within `1e-10`).
    pub fn new(space: CompositeSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for a space of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > TOL {
            return Err(Error::Numerical(format!("density matrix not Hermitian (deviation {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TOL {
            return Err(Error::Normalization(format!("density matrix trace is {tr}")));
        }
        let rho = DensityOperator { space, matrix };
        let eig = rho.eigensystem()?;
        if eig.min_unclipped < -TOL {
            let low = eig.min_unclipped;
            return Err(Error::Numerical(format!("density matrix has eigenvalue {low:.3e}")));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = state.amplitudes();
        DensityOperator { space: state.space().clone(), matrix: v * v.adjoint() }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`; 1 exactly for projectors.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨v|ρ|v⟩` for a state on the same subsystem set.
    pub fn expectation(&self, v: &PureState) -> Result<C64> {
        let v = v.reorder(&self.space)?;
        let a = v.amplitudes();
        Ok(a.dotc(&(&self.matrix * a)))
    }

    /// Eigen-decomposition with descending eigenvalues.
    pub fn eigensystem(&self) -> Result<EigenSystem> {
        hermitian_eigensystem(&self.matrix)
    }

    /// Reduced operator on `keep`, laid out in this operator's subsystem order.
    ///
    /// Keeping every subsystem returns the operator unchanged.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let kept = self.space.subspace(keep)?;
        if kept.len() == self.space.len() {
            return Ok(self.clone());
        }
        let keep_pos = self.space.positions(&kept.names())?;
        let trace_pos: Vec<usize> = (0..self.space.len()).filter(|p| !keep_pos.contains(p)).collect();
        let ko = self.space.offsets(&keep_pos);
        let to = self.space.offsets(&trace_pos);
        let m = &self.matrix;
        let out = CMatrix::from_fn(ko.len(), ko.len(), |i, j| to.iter().map(|&t| m[(ko[i] + t, ko[j] + t)]).sum());
        Ok(DensityOperator { space: kept, matrix: symmetrize(out) })
    }

    /// Reduced state of a pure state, computed from amplitudes without forming
    /// the full projector.
    pub fn reduce_pure<S: AsRef<str>>(state: &PureState, keep: &[S]) -> Result<DensityOperator> {
        let space = state.space();
        let kept = space.subspace(keep)?;
        if kept.len() == space.len() {
            return Ok(DensityOperator::from_pure(state));
        }
        let keep_pos = space.positions(&kept.names())?;
        let trace_pos: Vec<usize> = (0..space.len()).filter(|p| !keep_pos.contains(p)).collect();
        let ko = space.offsets(&keep_pos);
        let to = space.offsets(&trace_pos);
        let amps = state.amplitudes();
        // reshape to (kept x traced) and form X X†
        let x = CMatrix::from_fn(ko.len(), to.len(), |i, t| amps[ko[i] + to[t]]);
        let out = &x * x.adjoint();
        Ok(DensityOperator { space: kept, matrix: symmetrize(out) })
    }
}

/// `(m + m†) / 2`, removing rounding asymmetry.
pub(crate) fn symmetrize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * C64::new(0.5, 0.0)
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
            .collect();
        let mut st = serializer.serialize_struct("DensityOperator", 2)?;
        st.serialize_field("subsystems", &self.space.names())?;
        st.serialize_field("matrix", &rows)?;
        st.end()
    }
}
