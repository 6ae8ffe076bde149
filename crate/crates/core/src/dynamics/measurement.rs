use serde::Serialize;

use crate::calculus::{possible_internal_states, state_with_respect_to, ReferenceSystem};
use crate::error::{Error, Result};
use crate::tensor::{
    apply_unitary, tensor_product, CMatrix, CVector, CompositeSpace, Operator, PureState, Subsystem, C64, TOL,
};

/// A nondemolition measurement of an orthonormal basis `{|φⱼ⟩}` of a target
/// system, recorded in pointer states `|mⱼ⟩` of a device that starts in a
/// ready state `|m₀⟩`.
///
/// Pointer and ready states are computational basis states of the device.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    target: CompositeSpace,
    basis: Vec<PureState>,
    device: Subsystem,
    ready: usize,
    pointers: Vec<usize>,
}

/// One outcome of a measurement and its probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
}

impl MeasurementModel {
    /// Ready state `|0⟩`, pointer `j` at device index `j + 1`.
    ///
    /// The basis must be complete and orthonormal within `1e-10`; it is
    /// re-orthonormalized to working precision.
    pub fn new(target: CompositeSpace, basis: Vec<PureState>, device: Subsystem) -> Result<Self> {
        let n = basis.len();
        Self::with_pointers(target, basis, device, 0, (1..=n).collect())
    }

    pub fn with_pointers(
        target: CompositeSpace,
        basis: Vec<PureState>,
        device: Subsystem,
        ready: usize,
        pointers: Vec<usize>,
    ) -> Result<Self> {
        if target.contains(&device.name) {
            return Err(Error::Disjointness(format!("device {} is part of the measured system", device.name)));
        }
        let d = target.total_dim();
        if basis.len() != d {
            return Err(Error::Dimension(format!("measured basis has {} states, {target} needs {d}", basis.len())));
        }
        let mut vecs: Vec<CVector> = Vec::with_capacity(d);
        for b in &basis {
            vecs.push(b.reorder(&target)?.into_amplitudes());
        }
        for i in 0..d {
            for j in 0..=i {
                let g = vecs[i].dotc(&vecs[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                if (g - C64::new(expect, 0.0)).norm() > TOL {
                    return Err(Error::Numerical(format!("measured basis is not orthonormal (<{j}|{i}> = {g})")));
                }
            }
        }
        // modified Gram-Schmidt to remove the residual drift
        let mut ortho: Vec<CVector> = Vec::with_capacity(d);
        for v in vecs {
            let mut w = v;
            for u in &ortho {
                let p = u.dotc(&w);
                w -= u * p;
            }
            let norm = w.norm();
            ortho.push(w / C64::new(norm, 0.0));
        }
        let basis = ortho.into_iter().map(|v| PureState::normalized(target.clone(), v)).collect::<Result<Vec<_>>>()?;

        if pointers.len() != d {
            return Err(Error::Dimension(format!("{} pointer states for {d} outcomes", pointers.len())));
        }
        if device.dim < d + 1 {
            return Err(Error::Dimension(format!(
                "device {} has dimension {}, needs at least {} (ready state plus one pointer per outcome)",
                device.name,
                device.dim,
                d + 1
            )));
        }
        let mut used = vec![false; device.dim];
        for &p in std::iter::once(&ready).chain(pointers.iter()) {
            if p >= device.dim || used[p] {
                return Err(Error::Dimension(format!("pointer index {p} is out of range or reused")));
            }
            used[p] = true;
        }
        Ok(MeasurementModel { target, basis, device, ready, pointers })
    }

    /// Measures the computational basis of `target`.
    pub fn computational(target: CompositeSpace, device: Subsystem) -> Result<Self> {
        let basis = (0..target.total_dim())
            .map(|i| PureState::basis(target.clone(), &target.digits(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(target, basis, device)
    }

    pub fn target(&self) -> &CompositeSpace {
        &self.target
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn device(&self) -> &Subsystem {
        &self.device
    }

    pub fn device_space(&self) -> CompositeSpace {
        CompositeSpace::new(vec![self.device.clone()]).expect("device dimension validated")
    }

    pub fn outcomes(&self) -> usize {
        self.basis.len()
    }

    pub fn ready_state(&self) -> PureState {
        self.device_basis(self.ready)
    }

    pub fn pointer_state(&self, j: usize) -> Result<PureState> {
        let p = *self.pointers.get(j).ok_or_else(|| Error::Dimension(format!("no outcome {j}")))?;
        Ok(self.device_basis(p))
    }

    pub fn pointer_index(&self, j: usize) -> Option<usize> {
        self.pointers.get(j).copied()
    }

    fn device_basis(&self, i: usize) -> PureState {
        PureState::basis(self.device_space(), &[i]).expect("index validated")
    }

    /// Device index sequence `[ready, p₀, …, p_{n−1}, unused…]`; outcome `j`
    /// shifts along it by `j + 1`.
    fn cycle(&self) -> Vec<usize> {
        let mut c = vec![self.ready];
        c.extend(&self.pointers);
        c.extend((0..self.device.dim).filter(|i| *i != self.ready && !self.pointers.contains(i)));
        c
    }

    /// Device permutation applied for outcome `j`, as `perm[from] = to`.
    fn shift(&self, j: usize) -> Vec<usize> {
        let c = self.cycle();
        let n = c.len();
        let mut perm = vec![0; n];
        for (pos, &from) in c.iter().enumerate() {
            perm[from] = c[(pos + j + 1) % n];
        }
        perm
    }

    /// `U = Σⱼ |φⱼ⟩⟨φⱼ| ⊗ Sʲ⁺¹` on target ⊗ device, where `S` cycles the
    /// device through ready, pointer and spare states. It maps
    /// `|φⱼ⟩|m₀⟩ → |φⱼ⟩|mⱼ⟩` and is unitary by construction.
    pub fn qnd_unitary(&self) -> Result<Operator> {
        let dt = self.target.total_dim();
        let dd = self.device.dim;
        let mut u = CMatrix::zeros(dt * dd, dt * dd);
        for (j, phi) in self.basis.iter().enumerate() {
            let v = phi.amplitudes();
            let perm = self.shift(j);
            for t in 0..dt {
                for tp in 0..dt {
                    let p = v[t] * v[tp].conj();
                    if p == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (from, &to) in perm.iter().enumerate() {
                        u[(t * dd + to, tp * dd + from)] += p;
                    }
                }
            }
        }
        let space = self.target.concat(&self.device_space())?;
        Operator::unitary(space, u)
    }

    /// The measurement switched on only when `gate` is in state `active`;
    /// on every other gate state the target and device are left alone.
    pub fn gated_qnd_unitary(&self, gate: &Subsystem, active: usize) -> Result<Operator> {
        if active >= gate.dim {
            return Err(Error::Dimension(format!("gate state {active} out of range for {gate}")));
        }
        let inner = self.qnd_unitary()?;
        let n = inner.matrix().nrows();
        let g = gate.dim;
        let mut u = CMatrix::zeros(g * n, g * n);
        for s in 0..g {
            for i in 0..n {
                if s == active {
                    for k in 0..n {
                        u[(s * n + i, s * n + k)] = inner.matrix()[(i, k)];
                    }
                } else {
                    u[(s * n + i, s * n + i)] = C64::new(1.0, 0.0);
                }
            }
        }
        let space = CompositeSpace::new(vec![gate.clone()])?.concat(inner.space())?;
        Operator::unitary(space, u)
    }

    /// Attaches the device in its ready state if `state` does not carry it yet.
    pub fn attach_device(&self, state: &PureState) -> Result<PureState> {
        match state.space().get(&self.device.name) {
            Some(sub) if sub == &self.device => Ok(state.clone()),
            Some(sub) => Err(Error::Dimension(format!("state carries {sub}, model expects {}", self.device))),
            None => tensor_product(state, &self.ready_state()),
        }
    }

    /// Runs the measurement on `state`, attaching the device first if needed.
    pub fn measure(&self, state: &PureState) -> Result<PureState> {
        let with_device = self.attach_device(state)?;
        apply_unitary(&with_device, &self.qnd_unitary()?)
    }

    /// Runs the measurement gated on `gate = active`.
    pub fn measure_gated(&self, state: &PureState, gate: &str, active: usize) -> Result<PureState> {
        let with_device = self.attach_device(state)?;
        let g = with_device
            .space()
            .get(gate)
            .ok_or_else(|| Error::Label(format!("gate {gate} is not part of {}", with_device.space())))?
            .clone();
        apply_unitary(&with_device, &self.gated_qnd_unitary(&g, active)?)
    }
}

/// `P(M,k) = ⟨φ_k|ρ_S(I)|φ_k⟩` for every outcome, from the reduced state of
/// the measured system alone.
pub fn measurement_outcome_distribution(r: &ReferenceSystem, model: &MeasurementModel) -> Result<Vec<Outcome>> {
    r.require_isolated()?;
    let names = model.target.names();
    let rho = state_with_respect_to(r, &names)?;
    model
        .basis
        .iter()
        .enumerate()
        .map(|(k, phi)| {
            let v = rho.expectation(phi)?;
            if v.im.abs() > TOL {
                return Err(Error::Numerical(format!("outcome {k} has imaginary weight {:.3e}", v.im)));
            }
            Ok(Outcome { index: k, probability: v.re.clamp(0.0, 1.0) })
        })
        .collect()
}

/// The same distribution obtained dynamically: run the measurement, then
/// read the possible internal states of the device.
pub fn measurement_outcome_distribution_dynamic(r: &ReferenceSystem, model: &MeasurementModel) -> Result<Vec<Outcome>> {
    r.require_isolated()?;
    if r.space().contains(&model.device.name) {
        return Err(Error::Disjointness(format!("device {} is already part of the reference", model.device.name)));
    }
    let after = ReferenceSystem::isolated(model.measure(r.state())?);
    let pis = possible_internal_states(&after, &[model.device.name.as_str()])?;
    let mut out: Vec<Outcome> = (0..model.outcomes()).map(|k| Outcome { index: k, probability: 0.0 }).collect();
    for e in &pis.entries {
        let amps = e.state.amplitudes();
        let idx = (0..amps.len())
            .find(|&i| amps[i].norm() > 1.0 - 1e-9)
            .ok_or_else(|| Error::Numerical("device possible state is not a pointer state".into()))?;
        let k = model
            .pointers
            .iter()
            .position(|&p| p == idx)
            .ok_or_else(|| Error::Numerical(format!("device left in non-pointer state {idx}")))?;
        out[k].probability = e.probability;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::schmidt_decompose;
    use crate::random::{random_basis, random_state, trial_rng};
    use crate::tensor::max_abs_diff;

    fn spin_z(target: &str, device: &str) -> MeasurementModel {
        MeasurementModel::computational(CompositeSpace::from_pairs(&[(target, 2)]).unwrap(), Subsystem::new(device, 3))
            .unwrap()
    }

    #[test]
    fn up_goes_to_up_pointer() {
        let m = spin_z("P", "M");
        let up = PureState::basis(CompositeSpace::from_pairs(&[("P", 2)]).unwrap(), &[0]).unwrap();
        let out = m.measure(&up).unwrap();
        assert!((out.amplitude(&[0, 1]).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn superposition_becomes_entangled_record() {
        let m = spin_z("P", "M");
        let s = PureState::from_terms(
            CompositeSpace::from_pairs(&[("P", 2)]).unwrap(),
            &[(C64::new(0.6, 0.0), &[0]), (C64::new(0.0, 0.8), &[1])],
        )
        .unwrap();
        let out = m.measure(&s).unwrap();
        assert!((out.amplitude(&[0, 1]).unwrap() - C64::new(0.6, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(&[1, 2]).unwrap() - C64::new(0.0, 0.8)).norm() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn undersized_device_is_rejected() {
        let r =
            MeasurementModel::computational(CompositeSpace::from_pairs(&[("P", 2)]).unwrap(), Subsystem::new("M", 2));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn random_models_are_unitary_and_map_ready_rows() {
        for d in 2..=8 {
            let mut rng = trial_rng(21, d as u64);
            let target = CompositeSpace::from_pairs(&[("S", d)]).unwrap();
            let basis = random_basis(&target, &mut rng).unwrap();
            let m = MeasurementModel::new(target, basis.clone(), Subsystem::new("M", d + 1)).unwrap();
            let u = m.qnd_unitary().unwrap();
            assert!(u.unitarity_deviation() < 1e-12);
            for (j, phi) in basis.iter().enumerate() {
                let out = m.measure(phi).unwrap();
                let expect = tensor_product(phi, &m.pointer_state(j).unwrap()).unwrap();
                assert!((out.overlap(&expect).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn arbitrary_basis_on_schmidt_state_gives_double_sum() {
        // Σ_j c_j |φ_{A,j}⟩|φ_{B,j}⟩|m₀⟩ → Σ_k Σ_j c_j ⟨φ_k|φ_{A,j}⟩ |φ_k⟩|φ_{B,j}⟩|m_k⟩
        let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 3)]).unwrap();
        let mut rng = trial_rng(8, 0);
        let psi = random_state(&space, &mut rng).unwrap();
        let target = CompositeSpace::from_pairs(&[("A", 2)]).unwrap();
        let basis = random_basis(&target, &mut rng).unwrap();
        let m = MeasurementModel::new(target, basis.clone(), Subsystem::new("M", 3)).unwrap();
        let out = m.measure(&psi).unwrap();
        let s = schmidt_decompose(&psi, &["A"], &["B"]).unwrap();
        let full = out.space().clone();
        let mut oracle = CVector::zeros(full.total_dim());
        for (k, phi) in basis.iter().enumerate() {
            for j in 0..s.rank() {
                let amp = phi.inner(&s.left_states[j]).unwrap() * s.phases[j] * s.coefficients[j];
                let term =
                    tensor_product(&tensor_product(phi, &s.right_states[j]).unwrap(), &m.pointer_state(k).unwrap())
                        .unwrap()
                        .reorder(&full)
                        .unwrap();
                oracle += term.amplitudes() * amp;
            }
        }
        let oracle = PureState::normalized(full, oracle).unwrap();
        assert!((out.overlap(&oracle).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn static_and_dynamic_distributions_agree() {
        for t in 0..20 {
            let mut rng = trial_rng(31, t);
            let space = CompositeSpace::from_pairs(&[("A", 3), ("B", 2)]).unwrap();
            let r = ReferenceSystem::isolated(random_state(&space, &mut rng).unwrap());
            let target = CompositeSpace::from_pairs(&[("A", 3)]).unwrap();
            let m =
                MeasurementModel::new(target.clone(), random_basis(&target, &mut rng).unwrap(), Subsystem::new("M", 4))
                    .unwrap();
            let a = measurement_outcome_distribution(&r, &m).unwrap();
            let b = measurement_outcome_distribution_dynamic(&r, &m).unwrap();
            let total: f64 = a.iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for (x, y) in a.iter().zip(&b) {
                assert!((x.probability - y.probability).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn measuring_possible_states_leaves_them_unchanged() {
        let mut rng = trial_rng(41, 0);
        let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2)]).unwrap();
        let r = ReferenceSystem::isolated(random_state(&space, &mut rng).unwrap());
        let before = possible_internal_states(&r, &["A"]).unwrap();
        let basis: Vec<PureState> = before.entries.iter().map(|e| e.state.clone()).collect();
        let m = MeasurementModel::new(before.subset().clone(), basis, Subsystem::new("M", 3)).unwrap();
        let after = ReferenceSystem::isolated(m.measure(r.state()).unwrap());
        let pis = possible_internal_states(&after, &["A"]).unwrap();
        for (x, y) in before.entries.iter().zip(&pis.entries) {
            assert!((x.probability - y.probability).abs() < 1e-10);
            assert!((x.state.overlap(&y.state).unwrap() - 1.0).abs() < 1e-10);
        }
        let dist = measurement_outcome_distribution(&r, &m).unwrap();
        for (o, e) in dist.iter().zip(&before.entries) {
            assert!((o.probability - e.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn gated_measurement_is_identity_on_inactive_branch() {
        let m = spin_z("P", "M");
        let gate = Subsystem::new("X", 2);
        let u = m.gated_qnd_unitary(&gate, 0).unwrap();
        let n = 6;
        let inactive = u.matrix().view((n, n), (n, n)).into_owned();
        assert!(max_abs_diff(&inactive, &CMatrix::identity(n, n)) < 1e-15);
    }
}
