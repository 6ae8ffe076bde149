use super::{max_abs_diff, CMatrix, CVector, CompositeSpace, PureState, TOL};
use crate::error::{Error, Result};

/// A square matrix acting on a subset of subsystems, laid out in the
/// subset's own order.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: CompositeSpace,
    matrix: CMatrix,
    unitary: bool,
}

impl Operator {
    pub fn new(space: CompositeSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "{}x{} operator on a space of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { space, matrix, unitary: false })
    }

    /// Builds an operator flagged unitary; `U U† = 1` is checked to `1e-10`.
    pub fn unitary(space: CompositeSpace, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(space, matrix)?;
        let dev = op.unitarity_deviation();
        if dev > TOL {
            return Err(Error::Unitarity(dev));
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn identity(space: CompositeSpace) -> Self {
        let n = space.total_dim();
        Operator { space, matrix: CMatrix::identity(n, n), unitary: true }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Largest absolute entry of `U U† − 1`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.matrix.nrows();
        max_abs_diff(&(&self.matrix * self.matrix.adjoint()), &CMatrix::identity(n, n))
    }

    /// `self · other` on a common subsystem set (other is reordered to match).
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        let other = other.reorder(&self.space)?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
            unitary: self.unitary && other.unitary,
        })
    }

    /// The same operator laid out in `target`'s order.
    pub fn reorder(&self, target: &CompositeSpace) -> Result<Operator> {
        if !self.space.same_set(target) {
            return Err(Error::Label(format!("{} and {} differ", self.space, target)));
        }
        if &self.space == target {
            return Ok(self.clone());
        }
        let offs = self.space.offsets(&self.space.positions(&target.names())?);
        let m = &self.matrix;
        Ok(Operator {
            space: target.clone(),
            matrix: CMatrix::from_fn(offs.len(), offs.len(), |i, j| m[(offs[i], offs[j])]),
            unitary: self.unitary,
        })
    }

    /// `self ⊗ 1` on `space`, with rows and columns in `space`'s layout.
    pub fn embed(&self, space: &CompositeSpace) -> Result<Operator> {
        embed_operator(self, space)
    }

    /// Applies the operator to an amplitude vector over `space` without
    /// forming the embedded matrix.
    pub fn apply_to(&self, space: &CompositeSpace, amps: &CVector) -> Result<CVector> {
        let (sup, rest) = self.layout(space)?;
        let mut out = CVector::zeros(amps.len());
        let mut local = CVector::zeros(sup.len());
        for &r in &rest {
            for (i, &s) in sup.iter().enumerate() {
                local[i] = amps[s + r];
            }
            let mapped = &self.matrix * &local;
            for (i, &s) in sup.iter().enumerate() {
                out[s + r] = mapped[i];
            }
        }
        Ok(out)
    }

    /// Offsets of the support (in this operator's order) and of the rest.
    fn layout(&self, space: &CompositeSpace) -> Result<(Vec<usize>, Vec<usize>)> {
        let pos = space.positions(&self.space.names())?;
        for (p, s) in pos.iter().zip(self.space.subsystems()) {
            if space.subsystems()[*p].dim != s.dim {
                return Err(Error::Dimension(format!("operator expects {s}, space has {}", space.subsystems()[*p])));
            }
        }
        let rest: Vec<usize> = (0..space.len()).filter(|p| !pos.contains(p)).collect();
        Ok((space.offsets(&pos), space.offsets(&rest)))
    }
}

/// Embeds `op` into `space` as `op ⊗ 1` on the complement.
pub fn embed_operator(op: &Operator, space: &CompositeSpace) -> Result<Operator> {
    let (sup, rest) = op.layout(space)?;
    let n = space.total_dim();
    let mut m = CMatrix::zeros(n, n);
    for &r in &rest {
        for (i, &si) in sup.iter().enumerate() {
            for (j, &sj) in sup.iter().enumerate() {
                m[(si + r, sj + r)] = op.matrix[(i, j)];
            }
        }
    }
    Ok(Operator { space: space.clone(), matrix: m, unitary: op.unitary })
}

/// One discrete evolution step `|ψ⟩ → U|ψ⟩` with `U` acting on a subset.
pub fn apply_unitary(state: &PureState, u: &Operator) -> Result<PureState> {
    if !u.is_unitary() {
        let dev = u.unitarity_deviation();
        if dev > TOL {
            return Err(Error::Unitarity(dev));
        }
    }
    let amps = u.apply_to(state.space(), state.amplitudes())?;
    Ok(PureState::from_raw(state.space().clone(), amps))
}
