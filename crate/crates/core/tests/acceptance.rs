//! The acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line with its runtime and fails when the criterion or its
//! time budget is missed. Expected values come from closed forms or from an
//! independent computation (nalgebra SVD, hand-built projections), never from
//! the engine path under test.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use qrs::calculus::{joint_table, possible_internal_states, schmidt_decompose, ReferenceSystem};
use qrs::dynamics::{epr_euler_angles, epr_partner_state, MeasurementModel, SpinDirection, SpinOutcome};
use qrs::random::{random_basis, random_state, random_unitary, trial_rng, DEFAULT_SEED};
use qrs::scenarios::{
    bell_inequality_scan, collapse_trial, locality_check, locality_trial, run_bell, run_cat, run_three_spin,
};
use qrs::tensor::{apply_unitary, CMatrix, CVector, CompositeSpace, DensityOperator, PureState, Subsystem, C64};

type Check = Result<String, String>;

/// Runs one criterion, prints its verdict line and fails the test on a
/// miss or an overrun.
fn criterion(n: u32, title: &str, budget_secs: u64, f: impl FnOnce() -> Check) {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let over = elapsed > Duration::from_secs(budget_secs);
    let (verdict, detail) = match (&outcome, over) {
        (Ok(d), false) => ("PASS", d.clone()),
        (Ok(d), true) => ("FAIL", format!("{d}; over the time budget")),
        (Err(e), _) => ("FAIL", e.clone()),
    };
    let line =
        format!("acceptance {n:>2} {verdict}  {title}: {detail} ({:.3} s of {budget_secs} s)\n", elapsed.as_secs_f64());
    // Written past the test harness capture so the verdict always shows.
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert_eq!(verdict, "PASS", "{line}");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Amplitudes of a two-party state as a `dA x dB` matrix.
fn amplitude_matrix(psi: &PureState, da: usize, db: usize) -> CMatrix {
    DMatrix::from_fn(da, db, |i, k| psi.amplitudes()[i * db + k])
}

/// Descending singular values, straight from nalgebra.
fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[test]
fn criterion_01_cat_reduction() {
    criterion(1, "cat reduction", 1, || {
        let space = CompositeSpace::from_pairs(&[("atom", 2), ("cat", 2)]).map_err(|e| e.to_string())?;
        let psi = PureState::from_terms(space, &[(c(0.3f64.sqrt()), &[0, 0]), (c(0.7f64.sqrt()), &[1, 1])])
            .map_err(|e| e.to_string())?;
        let pis = possible_internal_states(&ReferenceSystem::isolated(psi), &["cat"]).map_err(|e| e.to_string())?;
        let cat = CompositeSpace::from_pairs(&[("cat", 2)]).unwrap();
        let dead = PureState::basis(cat.clone(), &[0]).unwrap();
        let alive = PureState::basis(cat, &[1]).unwrap();
        ensure(pis.len() == 2, || format!("{} possible states", pis.len()))?;
        for (entry, (p, s)) in pis.entries.iter().zip([(0.7, &alive), (0.3, &dead)]) {
            let fid = entry.state.fidelity(s).unwrap();
            ensure((entry.probability - p).abs() <= 1e-12 && (1.0 - fid).abs() <= 1e-12, || {
                format!("entry ({}, fidelity {fid}) against {p}", entry.probability)
            })?;
        }
        let rep = run_cat(c(0.3f64.sqrt()), c(0.7f64.sqrt()), true).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("cat scenario failures {:?}", rep.failures()))?;
        let table = rep.state_tables.iter().find(|t| t.label == "cat").ok_or("no cat table")?;
        let p: Vec<f64> = table.entries.iter().map(|e| e.probability).collect();
        ensure((p[0] - 0.7).abs() <= 1e-12 && (p[1] - 0.3).abs() <= 1e-12, || format!("scenario table {p:?}"))?;
        Ok("cat states {(0.3, dead), (0.7, alive)}".into())
    });
}

#[test]
fn criterion_02_isolated_pair_joint_law() {
    criterion(2, "isolated-pair joint law", 10, || {
        let mut worst: f64 = 0.0;
        for t in 0..200u64 {
            let mut rng = trial_rng(DEFAULT_SEED, t);
            let (da, db) = (rng.random_range(2..=8), rng.random_range(2..=8));
            let space = CompositeSpace::from_pairs(&[("A", da), ("B", db)]).unwrap();
            let psi = random_state(&space, &mut rng).unwrap();
            let sv = singular_values(&amplitude_matrix(&psi, da, db));
            let r = ReferenceSystem::isolated(psi);
            let table = joint_table(&r, &["A"], &["B"]).map_err(|e| format!("trial {t}: {e}"))?;
            let rank = sv.iter().filter(|&&s| s * s > 1e-12).count();
            ensure(table.len() == rank && table.iter().all(|r| r.len() == rank), || {
                format!("trial {t} ({da}x{db}): table {}x{}, Schmidt rank {rank}", table.len(), table[0].len())
            })?;
            for (j, row) in table.iter().enumerate() {
                for (k, p) in row.iter().enumerate() {
                    let expected = if j == k { sv[j] * sv[j] } else { 0.0 };
                    worst = worst.max((p - expected).abs());
                }
            }
        }
        ensure(worst <= 1e-10, || format!("largest deviation {worst:.3e}"))?;
        Ok(format!("200 states up to 8x8, largest deviation {worst:.1e}"))
    });
}

#[test]
fn criterion_03_marginalization() {
    criterion(3, "marginalization", 20, || {
        let mut worst: f64 = 0.0;
        for t in 0..200u64 {
            let mut rng = trial_rng(DEFAULT_SEED ^ 3, t);
            let (db, dc) = (rng.random_range(2..=4), rng.random_range(2..=4));
            let space = CompositeSpace::from_pairs(&[("A", 2), ("B", db), ("C", dc)]).unwrap();
            let r = ReferenceSystem::isolated(random_state(&space, &mut rng).unwrap());
            let pa = possible_internal_states(&r, &["A"]).unwrap().probabilities();
            let pb = possible_internal_states(&r, &["B"]).unwrap().probabilities();
            let table = joint_table(&r, &["A"], &["B"]).map_err(|e| format!("trial {t}: {e}"))?;
            for (j, row) in table.iter().enumerate() {
                worst = worst.max((row.iter().sum::<f64>() - pa[j]).abs());
            }
            for (k, p) in pb.iter().enumerate() {
                worst = worst.max((table.iter().map(|row| row[k]).sum::<f64>() - p).abs());
            }
        }
        ensure(worst <= 1e-10, || format!("largest deviation {worst:.3e}"))?;
        Ok(format!("200 states 2x2x2 to 2x4x4, largest deviation {worst:.1e}"))
    });
}

#[test]
fn criterion_04_schmidt_fidelity() {
    criterion(4, "Schmidt fidelity", 10, || {
        let (mut recon, mut agree): (f64, f64) = (0.0, 0.0);
        for t in 0..200u64 {
            let mut rng = trial_rng(DEFAULT_SEED ^ 4, t);
            let (da, db) = (rng.random_range(2..=8), rng.random_range(2..=8));
            let space = CompositeSpace::from_pairs(&[("A", da), ("B", db)]).unwrap();
            let psi = random_state(&space, &mut rng).unwrap();
            let s = schmidt_decompose(&psi, &["A"], &["B"]).map_err(|e| format!("trial {t}: {e}"))?;
            let back = s.reconstruct().unwrap();
            recon = recon.max((back.amplitudes() - psi.amplitudes()).iter().map(|z| z.norm()).fold(0.0, f64::max));

            let svd = amplitude_matrix(&psi, da, db).svd(true, false);
            let u = svd.u.unwrap();
            let order = {
                let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
                idx.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
                idx
            };
            for (j, left) in s.left_states.iter().enumerate() {
                let col: CVector = u.column(order[j]).into_owned();
                let ov = left.amplitudes().dotc(&col).norm();
                agree = agree.max(1.0 - ov);
            }
        }
        ensure(recon < 1e-10, || format!("reconstruction error {recon:.3e}"))?;
        ensure(agree < 1e-10, || format!("left states disagree with SVD by {agree:.3e}"))?;
        Ok(format!("200 states, reconstruction {recon:.1e}, left-state gap {agree:.1e}"))
    });
}

/// `½ sin²((θ₁ − θ₂)/2)` for the singlet without recorders.
fn correlated_pp(t1: f64, t2: f64) -> f64 {
    0.5 * ((t1 - t2) / 2.0).sin().powi(2)
}

/// The same with both spins recorded along z before the devices act.
fn recorded_pp(t1: f64, t2: f64) -> f64 {
    let (s1, c1) = (t1 / 2.0).sin_cos();
    let (s2, c2) = (t2 / 2.0).sin_cos();
    0.5 * (c1 * c1 * s2 * s2 + s1 * s1 * c2 * c2)
}

#[test]
fn criterion_05_bell_violation() {
    criterion(5, "Bell violation", 1, || {
        let h = c(FRAC_1_SQRT_2);
        let deg = f64::to_radians;
        let (al, be, ga) = (deg(0.0), deg(90.0), deg(45.0));
        let scan = bell_inequality_scan(h, h, &[(al, be, ga)], false, false).map_err(|e| e.to_string())?;
        let t = &scan.rows[0];
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-6;
        ensure(close(t.p_alpha_beta, 0.25), || format!("P(0+,90+) = {}", t.p_alpha_beta))?;
        ensure(close(t.p_alpha_gamma, 0.073223) && close(t.p_gamma_beta, 0.073223), || {
            format!("P(0+,45+) = {}, P(45+,90+) = {}", t.p_alpha_gamma, t.p_gamma_beta)
        })?;
        ensure(close(t.margin, 0.103553) && t.violated, || format!("margin {} violated {}", t.margin, t.violated))?;
        for (x, y) in [(al, be), (al, ga), (ga, be)] {
            let p = run_bell(h, h, x, y, false).unwrap().table[0][0];
            ensure((p - correlated_pp(x, y)).abs() <= 1e-12, || format!("closed form mismatch {p}"))?;
        }
        Ok(format!("margin {:+.6}, VIOLATED", t.margin))
    });
}

#[test]
fn criterion_06_recorders_restore_the_inequality() {
    criterion(6, "recorders restore the inequality", 60, || {
        let h = c(FRAC_1_SQRT_2);
        let mut rng = trial_rng(DEFAULT_SEED ^ 6, 0);
        let triples: Vec<(f64, f64, f64)> = (0..1000)
            .map(|_| (rng.random_range(0.0..PI), rng.random_range(0.0..PI), rng.random_range(0.0..PI)))
            .collect();
        let scan = bell_inequality_scan(h, h, &triples, true, true).map_err(|e| e.to_string())?;
        let worst = scan.rows.iter().map(|t| t.margin).fold(f64::NEG_INFINITY, f64::max);
        ensure(worst <= 1e-10, || format!("largest margin {worst:.3e}"))?;
        for t in &scan.rows {
            let expect = recorded_pp(t.alpha, t.beta);
            ensure((t.p_alpha_beta - expect).abs() <= 1e-10, || {
                format!("recorded P(a+,b+) {} against closed form {expect}", t.p_alpha_beta)
            })?;
        }
        let pairs: Vec<(f64, f64)> = triples.iter().flat_map(|&(a, b, g)| [(a, b), (a, g), (g, b)]).collect();
        let gap = pairs
            .par_iter()
            .map(|&(x, y)| -> qrs::Result<f64> {
                let plain = run_bell(h, h, x, y, false)?;
                let rec = run_bell(h, h, x, y, true)?;
                let d1 = (0..2).map(|j| (plain.marginal1[j] - rec.marginal1[j]).abs()).fold(0.0, f64::max);
                let d2 = (0..2).map(|j| (plain.marginal2[j] - rec.marginal2[j]).abs()).fold(0.0, f64::max);
                Ok(d1.max(d2))
            })
            .collect::<qrs::Result<Vec<f64>>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .fold(0.0, f64::max);
        ensure(gap <= 1e-10, || format!("single-device marginals differ by {gap:.3e}"))?;
        Ok(format!("1000 triples, largest margin {worst:+.1e}, marginal gap {gap:.1e}"))
    });
}

#[test]
fn criterion_07_locality_invariance() {
    criterion(7, "locality invariance", 10, || {
        let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let bc = space.subspace(&["B", "C"]).unwrap();
        let mut worst: f64 = 0.0;
        for t in 0..100u64 {
            let mut rng = trial_rng(DEFAULT_SEED ^ 7, t);
            let psi = random_state(&space, &mut rng).unwrap();
            let u = random_unitary(&bc, &mut rng).unwrap();
            let before = possible_internal_states(&ReferenceSystem::isolated(psi.clone()), &["A"]).unwrap();
            let after_state = apply_unitary(&psi, &u).unwrap();
            let after = possible_internal_states(&ReferenceSystem::isolated(after_state), &["A"]).unwrap();
            ensure(before.len() == after.len(), || format!("trial {t}: number of states changed"))?;
            for (x, y) in before.entries.iter().zip(&after.entries) {
                worst = worst.max((x.probability - y.probability).abs());
                worst = worst.max(1.0 - x.state.overlap(&y.state).unwrap());
            }
            worst = worst.max(locality_trial(&psi, &u, &["A"]).unwrap().worst());
        }
        ensure(worst < 1e-10, || format!("largest change {worst:.3e}"))?;
        let rep = locality_check((2, 2, 2), 100, DEFAULT_SEED).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("locality scenario failures {:?}", rep.failures()))?;
        Ok(format!("100 trials, largest change {worst:.1e}"))
    });
}

/// `e^{−iγŜ_z} e^{+iβŜ_y} e^{−iαŜ_z} Ŝ_z (…)†`, built from explicit 2x2 forms.
fn rotated_sz(alpha: f64, beta: f64, gamma: f64) -> CMatrix {
    let rz = |t: f64| {
        CMatrix::from_row_slice(2, 2, &[C64::from_polar(1.0, -t / 2.0), c(0.0), c(0.0), C64::from_polar(1.0, t / 2.0)])
    };
    let (s, co) = (beta / 2.0).sin_cos();
    // e^{+iβŜ_y} = cos(β/2) + i sin(β/2) σ_y
    let ry = CMatrix::from_row_slice(2, 2, &[c(co), c(s), c(-s), c(co)]);
    let d = rz(gamma) * ry * rz(alpha);
    let sz = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(-0.5)]);
    &d * sz * d.adjoint()
}

#[test]
fn criterion_08_epr_euler_angles() {
    criterion(8, "EPR Euler angles", 5, || {
        let mut worst: f64 = 0.0;
        for t in 0..100u64 {
            let mut rng = trial_rng(DEFAULT_SEED ^ 8, t);
            let theta = rng.random_range(0.05..PI / 2.0 - 0.05);
            let a = C64::from_polar(theta.cos(), rng.random_range(-PI..PI));
            let b = C64::from_polar(theta.sin(), rng.random_range(-PI..PI));
            let delta = rng.random_range(0.0..PI);
            let (s, co) = (delta / 2.0).sin_cos();
            for outcome in [SpinOutcome::Plus, SpinOutcome::Minus] {
                // Particle 1 projected onto its outcome along delta.
                let oracle = match outcome {
                    SpinOutcome::Plus => CVector::from_vec(vec![b * s, a * co]),
                    SpinOutcome::Minus => CVector::from_vec(vec![-b * co, a * s]),
                };
                let oracle = &oracle / c(oracle.norm());
                let partner =
                    epr_partner_state(a, b, SpinDirection::new(delta), outcome, "P2").map_err(|e| e.to_string())?;
                worst = worst.max(1.0 - partner.amplitudes().dotc(&oracle).norm());
                let e = epr_euler_angles(a, b, SpinDirection::new(delta), outcome).map_err(|e| e.to_string())?;
                let eigenvalue = c(-0.5 * outcome.sign());
                let v = partner.amplitudes();
                worst = worst.max((rotated_sz(e.alpha, e.beta, e.gamma) * v - v * eigenvalue).norm());
            }
        }
        ensure(worst < 1e-10, || format!("largest residual {worst:.3e}"))?;
        Ok(format!("100 draws, largest residual {worst:.1e}"))
    });
}

#[test]
fn criterion_09_collapse_correspondence() {
    criterion(9, "collapse correspondence", 10, || {
        let q = CompositeSpace::from_pairs(&[("S", 2), ("Q_rest", 2)]).unwrap();
        let s_space = q.subspace(&["S"]).unwrap();
        let mut worst: f64 = 0.0;
        for t in 0..100u64 {
            let mut rng = trial_rng(DEFAULT_SEED ^ 9, t);
            let psi = random_state(&q, &mut rng).unwrap();
            let basis = random_basis(&s_space, &mut rng).unwrap();

            let model = MeasurementModel::new(s_space.clone(), basis.clone(), Subsystem::new("M", 3)).unwrap();
            let r = ReferenceSystem::isolated(model.measure(&psi).unwrap());
            let q_states = possible_internal_states(&r, &["S", "Q_rest"]).unwrap();
            for xi in &basis {
                // (|ξⱼ⟩⟨ξⱼ| ⊗ 1)ψ by hand, S first in the layout.
                let x = xi.amplitudes();
                let psi_a = psi.amplitudes();
                let v = CVector::from_fn(4, |i, _| {
                    let (si, ri) = (i / 2, i % 2);
                    x[si] * (0..2).map(|k| x[k].conj() * psi_a[k * 2 + ri]).sum::<C64>()
                });
                let p = v.norm_squared();
                let collapsed = PureState::normalized(q.clone(), v).unwrap();
                let entry = q_states
                    .entries
                    .iter()
                    .max_by(|a, b| {
                        a.state.fidelity(&collapsed).unwrap().total_cmp(&b.state.fidelity(&collapsed).unwrap())
                    })
                    .unwrap();
                worst = worst.max(1.0 - entry.state.fidelity(&collapsed).unwrap());
                worst = worst.max((entry.probability - p).abs());
                let rho_s = DensityOperator::reduce_pure(&entry.state, &["S"]).unwrap();
                let eig = rho_s.eigensystem().unwrap();
                worst = worst.max(1.0 - eig.vector(0).dotc(x).norm_sqr());
            }
            let trial = collapse_trial(&psi, &["S"], basis).map_err(|e| e.to_string())?;
            worst = worst.max(trial.probability_gap).max(trial.q_gap).max(trial.s_gap);
        }
        ensure(worst < 1e-10, || format!("largest fidelity gap {worst:.3e}"))?;
        Ok(format!("100 trials on 2x2, largest gap {worst:.1e}"))
    });
}

#[test]
fn criterion_10_three_spin_noncomparability() {
    criterion(10, "three-spin noncomparability", 1, || {
        let h = FRAC_1_SQRT_2;
        let space = CompositeSpace::from_pairs(&[("A", 2), ("B", 2), ("C", 2)]).unwrap();
        // C in its x eigenbasis; with all coefficients 1/√2 every term is ½.
        let phi = PureState::from_terms(
            space,
            &[(c(0.5), &[0, 1, 0]), (c(0.5), &[1, 0, 0]), (c(0.5), &[0, 1, 1]), (c(-0.5), &[1, 0, 1])],
        )
        .unwrap();
        let r = ReferenceSystem::isolated(phi.clone());
        let r2 = possible_internal_states(&r, &["B", "C"]).unwrap().probabilities();
        ensure(r2.len() == 2 && r2.iter().all(|p| (p - 0.5).abs() < 1e-10), || format!("R2 before {r2:?}"))?;
        let r1 = possible_internal_states(&r, &["A", "B"]).unwrap();

        let pair = CompositeSpace::from_pairs(&[("A", 2), ("B", 2)]).unwrap();
        let psi_p = PureState::from_terms(pair.clone(), &[(c(h), &[0, 1]), (c(h), &[1, 0])]).unwrap();
        let psi_m = PureState::from_terms(pair.clone(), &[(c(h), &[0, 1]), (c(-h), &[1, 0])]).unwrap();
        let basis = vec![
            psi_p,
            psi_m,
            PureState::basis(pair.clone(), &[0, 0]).unwrap(),
            PureState::basis(pair, &[1, 1]).unwrap(),
        ];
        let model = MeasurementModel::new(r1.subset().clone(), basis, Subsystem::new("M", 5)).unwrap();
        let after = ReferenceSystem::isolated(model.measure(&phi).unwrap());

        let r2_after = possible_internal_states(&after, &["B", "C"]).unwrap();
        let bc = CompositeSpace::from_pairs(&[("B", 2), ("C", 2)]).unwrap();
        for digits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let product = PureState::basis(bc.clone(), &digits).unwrap();
            let best = r2_after.entries.iter().map(|e| e.state.overlap(&product).unwrap()).fold(0.0, f64::max);
            ensure(best > 1.0 - 1e-10, || format!("product state {digits:?} missing (overlap {best})"))?;
        }
        ensure(r2_after.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-10), || {
            format!("R2 after {:?}", r2_after.probabilities())
        })?;
        let r1_after = possible_internal_states(&after, &["A", "B"]).unwrap();
        let same = (r1.probabilities().iter().zip(r1_after.probabilities()).all(|(x, y)| (x - y).abs() < 1e-10))
            && r1_after.len() == 2;
        ensure(same, || format!("R1 changed: {:?} -> {:?}", r1.probabilities(), r1_after.probabilities()))?;

        let rep = run_three_spin(c(h), c(h), c(h), c(h)).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("three-spin scenario failures {:?}", rep.failures()))?;
        Ok("R2 (0.5, 0.5) becomes four product states at 0.25; R1 unchanged".into())
    });
}

#[test]
fn criterion_11_parser_corpus() {
    criterion(11, "parser corpus", 5, || {
        let golden = common::golden_scripts();
        let malformed = common::malformed_scripts();
        ensure(golden.len() >= 10, || format!("{} golden scripts", golden.len()))?;
        for (name, src) in &golden {
            common::check_golden(name, src)?;
        }
        for m in &malformed {
            common::check_malformed(m)?;
        }
        Ok(format!("{} golden scripts, {} malformed fixtures", golden.len(), malformed.len()))
    });
}

#[test]
fn criterion_12_determinism() {
    criterion(12, "determinism", 60, || {
        let mut runs: Vec<Vec<String>> = vec![
            vec!["--format".into(), "csv".into(), "scan".into()],
            vec![
                "--format".into(),
                "json".into(),
                "scan".into(),
                "--recorders".into(),
                "--alpha".into(),
                "0:180:30".into(),
            ],
        ];
        for name in qrs::scenarios::SCENARIO_NAMES {
            for format in ["json", "csv", "text"] {
                runs.push(vec!["--format".into(), format.into(), "demo".into(), name.into()]);
            }
        }
        for (name, _) in common::golden_scripts() {
            runs.push(vec!["--format".into(), "json".into(), "run".into(), format!("tests/scripts/{name}")]);
        }
        let suite = |parallel: &str| -> Vec<Vec<u8>> {
            runs.par_iter()
                .map(|args| {
                    let mut a: Vec<&str> = vec!["--parallel", parallel];
                    a.extend(args.iter().map(String::as_str));
                    common::qrs(&a).stdout
                })
                .collect()
        };
        let first = suite("1");
        let second = suite("4");
        for (i, (x, y)) in first.iter().zip(&second).enumerate() {
            ensure(!x.is_empty(), || format!("`{}` printed nothing", runs[i].join(" ")))?;
            ensure(x == y, || format!("`{}` differs between runs", runs[i].join(" ")))?;
        }
        Ok(format!("{} CLI invocations byte-identical across two runs", runs.len()))
    });
}
