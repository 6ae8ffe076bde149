//! Partner-particle states after a spin measurement on one half of an
//! entangled pair, and the Euler rotation that makes them spin eigenstates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::spin::{rotation, spin_space, sz, SpinDirection};
use crate::error::{Error, Result};
use crate::tensor::{CMatrix, CVector, PureState, C64};

const ZERO_AMPLITUDE: f64 = 1e-12;

/// Result of the spin measurement on particle 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinOutcome {
    Plus,
    Minus,
}

impl SpinOutcome {
    pub fn sign(self) -> f64 {
        match self {
            SpinOutcome::Plus => 1.0,
            SpinOutcome::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SpinOutcome::Plus => "+",
            SpinOutcome::Minus => "-",
        }
    }
}

/// z–y–z Euler angles: `D(α,β,γ) = e^{−iγŜ_z} e^{+iβŜ_y} e^{−iαŜ_z}`.
///
/// Canonical branch: `β ∈ [0, π]`, `α, γ ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn rotation(&self) -> CMatrix {
        let z = [0.0, 0.0, 1.0];
        rotation(z, self.gamma) * rotation([0.0, 1.0, 0.0], -self.beta) * rotation(z, self.alpha)
    }

    /// Spin component along the rotated z axis, `D Ŝ_z D†`.
    pub fn axis_operator(&self) -> CMatrix {
        let d = self.rotation();
        &d * sz() * d.adjoint()
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn neg(x: f64) -> f64 {
    if x < 0.0 {
        PI
    } else {
        0.0
    }
}

/// Unnormalized partner amplitudes `(↑, ↓)` of particle 2.
fn partner_spinor(a: C64, b: C64, d: SpinDirection, outcome: SpinOutcome) -> CVector {
    let (s, c) = (d.delta / 2.0).sin_cos();
    match outcome {
        // a cos(δ/2)|↓⟩ + b sin(δ/2)|↑⟩
        SpinOutcome::Plus => CVector::from_vec(vec![b * s, a * c]),
        // a sin(δ/2)|↓⟩ − b cos(δ/2)|↑⟩
        SpinOutcome::Minus => CVector::from_vec(vec![-b * c, a * s]),
    }
}

fn check_pair(a: C64, b: C64) -> Result<()> {
    let n = a.norm_sqr() + b.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(format!("|a|² + |b|² = {n}")));
    }
    Ok(())
}

/// State of particle 2 (subsystem `name`) after particle 1 of
/// `a|↑↓⟩ − b|↓↑⟩` was found with the given outcome along `d`.
pub fn epr_partner_state(a: C64, b: C64, d: SpinDirection, outcome: SpinOutcome, name: &str) -> Result<PureState> {
    check_pair(a, b)?;
    let v = partner_spinor(a, b, d, outcome);
    if v.norm() < ZERO_AMPLITUDE {
        return Err(Error::DegenerateBranch(format!(
            "outcome {} along delta = {} has zero amplitude",
            outcome.symbol(),
            d.delta
        )));
    }
    PureState::normalized(spin_space(name)?, v)
}

/// Euler angles of the axis along which the partner state is a spin
/// eigenstate: eigenvalue `−½` for outcome `+`, `+½` for outcome `−`.
pub fn epr_euler_angles(a: C64, b: C64, d: SpinDirection, outcome: SpinOutcome) -> Result<EulerAngles> {
    check_pair(a, b)?;
    if a.norm() < ZERO_AMPLITUDE || b.norm() < ZERO_AMPLITUDE {
        return Err(Error::PhaseUndefined("the Euler phases need a ≠ 0 and b ≠ 0".into()));
    }
    let (s, c) = (d.delta / 2.0).sin_cos();
    let (pa, pb) = (a.arg(), b.arg());
    let (ma, mb) = (a.norm(), b.norm());
    let angles = match outcome {
        SpinOutcome::Plus => EulerAngles {
            alpha: pa + pb + neg(s) + neg(c),
            beta: 2.0 * (mb * s.abs()).atan2(ma * c.abs()),
            gamma: pa - pb + neg(c) - neg(s),
        },
        SpinOutcome::Minus => {
            let u = pb + PI + neg(c);
            let v = pa + neg(s);
            EulerAngles { alpha: PI - u - v, beta: 2.0 * (ma * s.abs()).atan2(mb * c.abs()), gamma: v - PI - u }
        }
    };
    Ok(EulerAngles { alpha: wrap_angle(angles.alpha), beta: angles.beta, gamma: wrap_angle(angles.gamma) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_vector, trial_rng};
    use rand::Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn zero_angle_plus_gives_down() {
        let a = C64::new(0.6, 0.0);
        let b = C64::new(0.0, 0.8);
        let s = epr_partner_state(a, b, SpinDirection::new(0.0), SpinOutcome::Plus, "P2").unwrap();
        assert!((s.amplitudes()[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let e = epr_euler_angles(a, b, SpinDirection::new(0.0), SpinOutcome::Plus).unwrap();
        assert_eq!(e.beta, 0.0);
        assert!(crate::tensor::max_abs_diff(&e.axis_operator(), &sz()) < 1e-14);
    }

    #[test]
    fn singlet_partner_and_angles() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        for k in 1..10 {
            let delta = 0.3 * k as f64;
            let d = SpinDirection::new(delta);
            let s = epr_partner_state(h, h, d, SpinOutcome::Plus, "P2").unwrap();
            let (sn, cs) = (delta / 2.0).sin_cos();
            assert!((s.amplitudes()[0] - C64::new(sn, 0.0)).norm() < 1e-14);
            assert!((s.amplitudes()[1] - C64::new(cs, 0.0)).norm() < 1e-14);
            let e = epr_euler_angles(h, h, d, SpinOutcome::Plus).unwrap();
            assert!(e.alpha.abs() < 1e-14 && e.gamma.abs() < 1e-14);
            assert!((e.beta - delta).abs() < 1e-12);
            let minus = epr_partner_state(h, h, d, SpinOutcome::Minus, "P2").unwrap();
            assert!(s.inner(&minus).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn closed_forms_hold_inside_the_first_half_turn() {
        // e^{iα} = ab/|ab|, tan(β/2) = (|b|/|a|) tan(δ/2), e^{−iγ} = (b/a)/|b/a|
        let mut rng = trial_rng(12, 0);
        for _ in 0..50 {
            let v = random_vector(2, &mut rng);
            let (a, b) = (v[0], v[1]);
            let delta = rng.random_range(0.01..3.1);
            let e = epr_euler_angles(a, b, SpinDirection::new(delta), SpinOutcome::Plus).unwrap();
            let ab = a * b;
            assert!((C64::from_polar(1.0, e.alpha) - ab / ab.norm()).norm() < 1e-12);
            assert!(((e.beta / 2.0).tan() - b.norm() / a.norm() * (delta / 2.0).tan()).abs() < 1e-9);
            let r = b / a;
            assert!((C64::from_polar(1.0, -e.gamma) - r / r.norm()).norm() < 1e-12);
        }
    }

    #[test]
    fn partner_is_rotated_spin_eigenvector() {
        let mut rng = trial_rng(13, 0);
        for _ in 0..200 {
            let v = random_vector(2, &mut rng);
            let d = SpinDirection::new(rng.random_range(-10.0..10.0));
            for outcome in [SpinOutcome::Plus, SpinOutcome::Minus] {
                let xi = epr_partner_state(v[0], v[1], d, outcome, "P2").unwrap();
                let e = epr_euler_angles(v[0], v[1], d, outcome).unwrap();
                assert!((0.0..=PI).contains(&e.beta));
                assert!(e.alpha > -PI && e.alpha <= PI && e.gamma > -PI && e.gamma <= PI);
                let x = xi.amplitudes();
                let lambda = -0.5 * outcome.sign();
                let res = (e.axis_operator() * x - x * C64::new(lambda, 0.0)).norm();
                assert!(res < 1e-10, "residual {res}");
            }
        }
    }

    #[test]
    fn undefined_cases() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        assert!(matches!(
            epr_euler_angles(one, zero, SpinDirection::new(0.4), SpinOutcome::Plus),
            Err(Error::PhaseUndefined(_))
        ));
        assert!(matches!(
            epr_partner_state(zero, one, SpinDirection::new(0.0), SpinOutcome::Plus, "P2"),
            Err(Error::DegenerateBranch(_))
        ));
        assert!(matches!(
            epr_partner_state(one, one, SpinDirection::new(0.0), SpinOutcome::Plus, "P2"),
            Err(Error::Normalization(_))
        ));
    }
}
