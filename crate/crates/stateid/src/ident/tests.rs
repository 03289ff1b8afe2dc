use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linmat::{ComplexMatrix, DensityMatrix, HermitianMatrix, PureState};

use super::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_pure(rng: &mut ChaCha8Rng, d: usize) -> PureState {
    let amps: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PureState::normalized(amps).unwrap()
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for _ in 0..(2 * d) {
        let v = random_pure(rng, d);
        let w = rng.gen_range(0.05..1.0);
        let outer = HermitianMatrix::outer(v.amplitudes());
        m = m.add(outer.scale(w).matrix());
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(Complex64::new(1.0 / tr, 0.0))).unwrap()
}

fn basis_density(d: usize, k: usize) -> DensityMatrix {
    DensityMatrix::from_pure(&PureState::basis(d, k))
}

// -------------------------------------------------------------------------
// helstrom
// -------------------------------------------------------------------------

#[test]
fn helstrom_orthogonal_pure() {
    let (s, m) = helstrom(&basis_density(2, 0), &basis_density(2, 1)).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
    m.validate(1e-9).unwrap();
}

#[test]
fn helstrom_identical_states() {
    let rho = DensityMatrix::maximally_mixed(3);
    let (s, _) = helstrom(&rho, &rho).unwrap();
    assert!((s - 0.5).abs() < 1e-12);
}

#[test]
fn helstrom_achieved_matches_formula() {
    let mut r = rng(11);
    for _ in 0..20 {
        let a0 = random_density(&mut r, 3);
        let a1 = random_density(&mut r, 3);
        let (s, m) = helstrom(&a0, &a1).unwrap();
        if let PredictorMeasurement::Binary { e0, e1 } = &m {
            let achieved = 0.5 * e0.expectation(&a0) + 0.5 * e1.expectation(&a1);
            assert!((achieved - s).abs() < 1e-9, "{achieved} vs {s}");
        } else {
            panic!("binary expected");
        }
        m.validate(1e-9).unwrap();
    }
}

// -------------------------------------------------------------------------
// conditional_error
// -------------------------------------------------------------------------

#[test]
fn conditional_error_projective_orthogonal() {
    let m = PredictorMeasurement::Binary {
        e0: HermitianMatrix::from_diag(&[1.0, 0.0]),
        e1: HermitianMatrix::from_diag(&[0.0, 1.0]),
    };
    let err = conditional_error(&m, &[basis_density(2, 0), basis_density(2, 1)]).unwrap();
    assert!(err.abs() < 1e-15);
}

#[test]
fn conditional_error_symmetric_guess() {
    let rho = DensityMatrix::maximally_mixed(2);
    let m = PredictorMeasurement::Binary {
        e0: HermitianMatrix::identity(2).scale(0.5),
        e1: HermitianMatrix::identity(2).scale(0.5),
    };
    let err = conditional_error(&m, &[rho.clone(), rho]).unwrap();
    assert!((err - 0.5).abs() < 1e-12);
}

#[test]
fn conditional_error_zero_mass_is_zero() {
    let m = PredictorMeasurement::Binary {
        e0: HermitianMatrix::zeros(2),
        e1: HermitianMatrix::zeros(2),
    };
    let err = conditional_error(&m, &[basis_density(2, 0), basis_density(2, 1)]).unwrap();
    assert_eq!(err, 0.0);
}

fn tilted_quad(delta: f64, eps: f64) -> IdentQuad {
    let (s0, s1) = tilted_pair(delta).unwrap();
    let a0 = DensityMatrix::from_pure(&s0);
    let a1 = DensityMatrix::from_pure(&s1);
    IdentQuad::new(a0.clone(), a1.clone(), a0, a1, eps).unwrap()
}

#[test]
fn quad_counterexample_error_near_quarter() {
    let delta = 0.01;
    let q = tilted_quad(delta, 0.251);
    let m = quad_counterexample_measurement(delta).unwrap();
    m.validate(1e-12).unwrap();
    let err = conditional_error(&m, &q.product_states()).unwrap();
    assert!((err - 0.25).abs() < 0.01, "err {err}");
    assert!(err <= 0.251, "must be a 0.251-predictor, err {err}");
}

// -------------------------------------------------------------------------
// d_eps_single
// -------------------------------------------------------------------------

fn single(a0: DensityMatrix, a1: DensityMatrix, eps: f64) -> (f64, PredictorMeasurement, DualCertificateSingle) {
    d_eps_single(&IdentPair::new(a0, a1, eps).unwrap()).unwrap()
}

#[test]
fn single_orthogonal_states_value_one() {
    for eps in [0.0, 0.25, 0.49] {
        let (v, m, cert) = single(basis_density(2, 0), basis_density(2, 1), eps);
        assert!((v - 1.0).abs() < 1e-6, "eps {eps}: {v}");
        assert!((cert.value - v).abs() < 1e-5);
        m.validate(1e-7).unwrap();
    }
}

#[test]
fn single_identical_states_value_zero() {
    let rho = DensityMatrix::maximally_mixed(2);
    for eps in [0.0, 0.25, 0.4] {
        let (v, _, cert) = single(rho.clone(), rho.clone(), eps);
        assert!(v.abs() < 1e-6, "eps {eps}: {v}");
        assert!(cert.value.abs() < 1e-5);
        assert!(cert.min_slack(&rho, &rho, eps) >= -1e-9);
    }
}

/// The intro family `|a_x> = sqrt(a)|x> + sqrt(1-a)|2>` at a = 1/2 has
/// value exactly 1/2 at eps = 0.
#[test]
fn single_intro_states_half() {
    let a: f64 = 0.5;
    let s0 = PureState::from_reals(&[a.sqrt(), 0.0, (1.0 - a).sqrt()]).unwrap();
    let s1 = PureState::from_reals(&[0.0, a.sqrt(), (1.0 - a).sqrt()]).unwrap();
    let (v, m, cert) = single(DensityMatrix::from_pure(&s0), DensityMatrix::from_pure(&s1), 0.0);
    assert!((v - 0.5).abs() < 1e-5, "{v}");
    assert!((cert.value - 0.5).abs() < 1e-5);
    m.validate(1e-7).unwrap();
}

/// When the always-answer error 1/2 - delta/2 is below eps, abstaining is
/// pointless and the value saturates at 1; below that threshold (delta <
/// 1 - 2 eps) the value collapses to the Theta(delta^2) regime.
#[test]
fn single_tilted_pair_regimes() {
    let delta = 0.1f64;
    let (s0, s1) = tilted_pair(delta).unwrap();
    let a0 = DensityMatrix::from_pure(&s0);
    let a1 = DensityMatrix::from_pure(&s1);
    // delta > 1 - 2 eps: the Helstrom measurement answers always within
    // the error budget (1/2 - delta/2 = 0.45 <= 0.49), so the value is 1.
    let (v, _, cert) = single(a0.clone(), a1.clone(), 0.49);
    assert!((v - 1.0).abs() < 1e-6, "value {v}");
    assert!((cert.value - v).abs() < 1e-5);
    // delta < 1 - 2 eps: must abstain most of the time; the value is of
    // order delta^2, far below 1, yet at least the eps = 0 projective
    // lower bound delta^2 / 2.
    let d2 = delta * delta;
    let (v, _, cert) = single(a0.clone(), a1.clone(), 0.25);
    assert!(v >= d2 / 2.0 - 1e-9 && v <= 10.0 * d2, "value {v} outside bracket");
    assert!((cert.value - v).abs() < 1e-5);
    assert!(cert.min_slack(&a0, &a1, 0.25) >= -1e-9);
}

#[test]
fn single_strong_duality_random() {
    let mut r = rng(23);
    for trial in 0..10 {
        let d = r.gen_range(2..4);
        let a0 = random_density(&mut r, d);
        let a1 = random_density(&mut r, d);
        let eps = [0.0, 0.1, 0.25, 0.4][trial % 4];
        let (v, m, cert) = single(a0.clone(), a1.clone(), eps);
        assert!((cert.value - v).abs() < 1e-5, "trial {trial}");
        assert!(cert.min_slack(&a0, &a1, eps) >= -1e-9, "trial {trial}");
        assert!(cert.z_b >= 0.0);
        m.validate(1e-7).unwrap();
        // Error constraint in absolute form (the conditional ratio is
        // ill-defined when the answer mass vanishes).
        let mass = answer_mass(&m, &[a0.clone(), a1.clone()]).unwrap();
        let err = conditional_error(&m, &[a0, a1]).unwrap();
        assert!(
            err * mass <= eps * mass + 1e-6,
            "trial {trial}: err {err} mass {mass} eps {eps}"
        );
    }
}

#[test]
fn single_monotone_in_eps() {
    let mut r = rng(37);
    let a0 = random_density(&mut r, 3);
    let a1 = random_density(&mut r, 3);
    let mut last = -1.0;
    for eps in [0.0, 0.1, 0.2, 0.3, 0.4, 0.49] {
        let (v, _, _) = single(a0.clone(), a1.clone(), eps);
        assert!(v >= last - 1e-6, "eps {eps}: {v} < {last}");
        last = v;
    }
}

#[test]
fn single_pure_lower_bound() {
    let mut r = rng(41);
    for _ in 0..8 {
        let s0 = random_pure(&mut r, 2);
        let s1 = random_pure(&mut r, 2);
        let c2 = s0.inner(&s1).norm_sqr();
        for eps in [0.0, 0.25] {
            let (v, _, _) = single(
                DensityMatrix::from_pure(&s0),
                DensityMatrix::from_pure(&s1),
                eps,
            );
            assert!(v >= 0.5 * (1.0 - c2) - 1e-6, "{v} vs {}", 0.5 * (1.0 - c2));
        }
    }
}

/// Any feasible dual certificate upper-bounds the answer probability of
/// any feasible measurement; spot check with the optimal measurement
/// scaled down (which keeps the conditional error unchanged).
#[test]
fn certificate_sound_against_scaled_measurements() {
    let mut r = rng(53);
    let a0 = random_density(&mut r, 3);
    let a1 = random_density(&mut r, 3);
    let eps = 0.2;
    let (_, m, cert) = single(a0.clone(), a1.clone(), eps);
    if let PredictorMeasurement::Binary { e0, e1 } = &m {
        for t in [0.1, 0.5, 0.9, 1.0] {
            let scaled = PredictorMeasurement::Binary {
                e0: e0.scale(t),
                e1: e1.scale(t),
            };
            let mass = answer_mass(&scaled, &[a0.clone(), a1.clone()]).unwrap();
            assert!(mass <= cert.value + 1e-5, "t {t}: {mass} > {}", cert.value);
        }
    }
}

// -------------------------------------------------------------------------
// d_eps_quad / d_eps_parity
// -------------------------------------------------------------------------

#[test]
fn quad_orthogonal_registers_value_one() {
    let q = IdentQuad::new(
        basis_density(2, 0),
        basis_density(2, 1),
        basis_density(2, 0),
        basis_density(2, 1),
        0.25,
    )
    .unwrap();
    let (v, m, cert) = d_eps_quad(&q).unwrap();
    assert!((v - 1.0).abs() < 1e-6, "{v}");
    assert!((cert.value - v).abs() < 1e-5);
    m.validate(1e-7).unwrap();
}

#[test]
fn quad_identical_states_value_zero() {
    let rho = DensityMatrix::maximally_mixed(2);
    let q = IdentQuad::new(rho.clone(), rho.clone(), rho.clone(), rho, 0.25).unwrap();
    let (v, _, _) = d_eps_quad(&q).unwrap();
    assert!(v.abs() < 1e-6, "{v}");
}

#[test]
fn quad_counterexample_order_delta_squared() {
    let delta = 0.01;
    let q = tilted_quad(delta, 0.251);
    let (v, _, cert) = d_eps_quad(&q).unwrap();
    assert!(v >= delta * delta / 3.0, "value {v}");
    assert!((cert.value - v).abs() < 1e-5);
    assert!(cert.min_slack(&q) >= -1e-8);
}

#[test]
fn parity_of_orthogonal_registers_is_one() {
    let q = IdentQuad::new(
        basis_density(2, 0),
        basis_density(2, 1),
        basis_density(2, 0),
        basis_density(2, 1),
        0.0,
    )
    .unwrap();
    let (v, m) = d_eps_parity(&q).unwrap();
    assert!((v - 1.0).abs() < 1e-6, "{v}");
    m.validate(1e-7).unwrap();
}

/// With beta0 = beta1 the second bit is uniformly random and independent
/// of the register contents, so the parity is unguessable no matter how
/// distinguishable the alphas are.
#[test]
fn parity_unguessable_when_second_register_carries_nothing() {
    let rho = DensityMatrix::maximally_mixed(2);
    let q = IdentQuad::new(
        basis_density(2, 0),
        basis_density(2, 1),
        rho.clone(),
        rho,
        0.25,
    )
    .unwrap();
    let (v, _) = d_eps_parity(&q).unwrap();
    assert!(v.abs() < 1e-6, "{v}");
}

#[test]
fn parity_identical_states_zero() {
    let rho = DensityMatrix::maximally_mixed(2);
    let q = IdentQuad::new(rho.clone(), rho.clone(), rho.clone(), rho, 0.25).unwrap();
    let (v, _) = d_eps_parity(&q).unwrap();
    assert!(v.abs() < 1e-6, "{v}");
}

#[test]
fn parity_counterexample_order_delta_squared() {
    let delta = 0.05;
    let q = tilted_quad(delta, 0.49);
    let (v, _) = d_eps_parity(&q).unwrap();
    assert!(v >= delta * delta / 5.0, "value {v}");
}

/// Exact success/leak probabilities of the explicit rank-1 parity
/// measurement against independently evaluated closed forms.
#[test]
fn parity_counterexample_closed_forms() {
    for delta in [0.05, 0.1, 0.3] {
        let q = tilted_quad(delta, 0.49);
        let m = parity_counterexample_measurement(delta).unwrap();
        let states = q.product_states();
        if let PredictorMeasurement::Binary { e0, .. } = &m {
            let p_00 = e0.expectation(&states[0]);
            let p_01 = e0.expectation(&states[1]);
            let d2 = delta * delta;
            let want_00 = d2 / (2.0 + d2);
            let want_01 = d2 * ((1.0 - d2).sqrt() - 1.0).powi(2) / (2.0 + d2);
            assert!((p_00 - want_00).abs() < 1e-12, "delta {delta}: {p_00} vs {want_00}");
            assert!((p_01 - want_01).abs() < 1e-12, "delta {delta}: {p_01} vs {want_01}");
        }
    }
}

// -------------------------------------------------------------------------
// dual_single / dual_lift / claim 2
// -------------------------------------------------------------------------

#[test]
fn dual_single_equal_states_hand_certificate() {
    // When beta0 = beta1 = rho the targets collapse to
    // (1/2)(2 - (1 - 2 eps) z_b) rho, so X_b = 0 is feasible exactly when
    // z_b >= 2/(1 - 2 eps). (The smaller multiplier 1/(1 - eps) leaves a
    // strictly positive target and is not feasible.)
    let rho = DensityMatrix::maximally_mixed(3);
    for eps in [0.0, 0.25, 0.4] {
        let cert = DualCertificateSingle {
            x_b: HermitianMatrix::zeros(3),
            z_b: 2.0 / (1.0 - 2.0 * eps),
            value: 0.0,
        };
        assert!(cert.min_slack(&rho, &rho, eps) >= -1e-12, "eps {eps}");
        let short = DualCertificateSingle {
            x_b: HermitianMatrix::zeros(3),
            z_b: 1.0 / (1.0 - eps),
            value: 0.0,
        };
        assert!(short.min_slack(&rho, &rho, eps) < -1e-6, "eps {eps}");
    }
}

#[test]
fn dual_single_matches_primal() {
    let mut r = rng(67);
    for _ in 0..5 {
        let b0 = random_density(&mut r, 3);
        let b1 = random_density(&mut r, 3);
        let cert = dual_single(&b0, &b1, 0.25).unwrap();
        let (v, _, _) = single(b0.clone(), b1.clone(), 0.25);
        assert!((cert.value - v).abs() < 1e-5);
        assert!(cert.min_slack(&b0, &b1, 0.25) >= -1e-9);
    }
}

#[test]
fn lift_z_formula_values() {
    assert_eq!(lift_z(0.0, 0.0), 4.0);
    assert!((lift_z(0.25, 1.0) - 400.0 / 21.0).abs() < 1e-12);
    assert!((lift_z(0.25, 1.0) - (16.0 * 6.0 / 7.0 + 16.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn dual_lift_feasible_with_trace_bound() {
    let mut r = rng(71);
    for trial in 0..9 {
        let a0 = random_pure(&mut r, 2);
        let a1 = random_pure(&mut r, 2);
        let db = r.gen_range(2..5);
        let b0 = random_density(&mut r, db);
        let b1 = random_density(&mut r, db);
        let eps = [0.1, 0.25, 0.4][trial % 3];
        let cert = dual_single(&b0, &b1, eps).unwrap();
        let lifted = dual_lift(&a0, &a1, &b0, &b1, eps, &cert).unwrap();
        let delta_sq = 1.0 - a1.inner(&a0).norm_sqr();
        assert!(
            lifted.value <= 16.0 * delta_sq * cert.value + 1e-8,
            "trial {trial}: {} > {}",
            lifted.value,
            16.0 * delta_sq * cert.value
        );
        let q = IdentQuad::new(
            DensityMatrix::from_pure(&a0),
            DensityMatrix::from_pure(&a1),
            b0,
            b1,
            eps / 2.0,
        )
        .unwrap();
        assert!(lifted.min_slack(&q) >= -1e-8, "trial {trial}");
        // Certificate value upper-bounds p at eps/2 (weak duality).
        let (p, _, _) = d_eps_quad(&q).unwrap();
        assert!(p <= lifted.value + 1e-5, "trial {trial}: {p} > {}", lifted.value);
    }
}

#[test]
fn dual_lift_identical_alphas_zero_certificate() {
    let mut r = rng(79);
    let a = random_pure(&mut r, 2);
    let b0 = random_density(&mut r, 2);
    let b1 = random_density(&mut r, 2);
    let cert = dual_single(&b0, &b1, 0.25).unwrap();
    let lifted = dual_lift(&a, &a, &b0, &b1, 0.25, &cert).unwrap();
    assert_eq!(lifted.value, 0.0);
    assert!(lifted.x.max_abs() == 0.0);
    assert!((lifted.z - lift_z(0.25, cert.z_b)).abs() < 1e-12);
}

#[test]
fn dual_lift_rejects_infeasible_certificate() {
    let mut r = rng(83);
    let a0 = random_pure(&mut r, 2);
    let a1 = random_pure(&mut r, 2);
    let b0 = basis_density(2, 0);
    let b1 = basis_density(2, 1);
    let bad = DualCertificateSingle {
        x_b: HermitianMatrix::zeros(2),
        z_b: 0.0,
        value: 0.0,
    };
    // Zero matrix cannot dominate the strictly positive mixtures here.
    assert!(matches!(
        dual_lift(&a0, &a1, &b0, &b1, 0.25, &bad),
        Err(IdentError::InfeasibleCertificate(_))
    ));
}

#[test]
fn dual_lift_deterministic() {
    let mut r = rng(89);
    let a0 = random_pure(&mut r, 2);
    let a1 = random_pure(&mut r, 2);
    let b0 = random_density(&mut r, 3);
    let b1 = random_density(&mut r, 3);
    let cert = dual_single(&b0, &b1, 0.1).unwrap();
    let l1 = dual_lift(&a0, &a1, &b0, &b1, 0.1, &cert).unwrap();
    let l2 = dual_lift(&a0, &a1, &b0, &b1, 0.1, &cert).unwrap();
    assert_eq!(l1.z.to_bits(), l2.z.to_bits());
    assert_eq!(l1.value.to_bits(), l2.value.to_bits());
    assert_eq!(l1.x.matrix().data(), l2.x.matrix().data());
}

#[test]
fn claim2_identical_rhos() {
    let mut r = rng(97);
    let rho = random_pure(&mut r, 2);
    let s0 = random_density(&mut r, 2);
    let s1 = random_density(&mut r, 2);
    let rep = verify_claim2(&rho, &rho, &s0, &s1, 0.25, 1.0).unwrap();
    assert_eq!(rep.delta_sq, 0.0);
    assert!(rep.all_pass, "{rep:?}");
}

#[test]
fn claim2_half_overlap_random_sigmas() {
    let mut r = rng(101);
    // delta = 0.5: overlap sqrt(3)/2.
    let rho1 = PureState::from_reals(&[1.0, 0.0]).unwrap();
    let rho0 = PureState::from_reals(&[(0.75f64).sqrt(), 0.5]).unwrap();
    let s0 = random_density(&mut r, 3);
    let s1 = random_density(&mut r, 3);
    let rep = verify_claim2(&rho0, &rho1, &s0, &s1, 0.25, 1.0).unwrap();
    assert!((rep.delta_sq - 0.25).abs() < 1e-12);
    assert!(rep.all_pass, "{rep:?}");
}

#[test]
fn claim2_scalar_constant_at_zero_zb() {
    let rho1 = PureState::from_reals(&[1.0, 0.0]).unwrap();
    let rho0 = PureState::from_reals(&[(0.75f64).sqrt(), 0.5]).unwrap();
    let s = DensityMatrix::maximally_mixed(2);
    let eps = 0.4;
    let rep = verify_claim2(&rho0, &rho1, &s, &s, eps, 0.0).unwrap();
    let want = 17.0 - 4.0 / ((1.0 - eps) * (1.0 - eps));
    assert!((rep.first_scalar - want).abs() < 1e-9, "{} vs {want}", rep.first_scalar);
    assert!((want - 5.888888888888889).abs() < 1e-9);
    assert!(rep.all_pass);
}

#[test]
fn claim2_grid() {
    let mut r = rng(103);
    let rho0 = random_pure(&mut r, 2);
    let rho1 = random_pure(&mut r, 2);
    let s0 = random_density(&mut r, 2);
    let s1 = random_density(&mut r, 2);
    for eps in [0.0, 0.1, 0.25, 0.4, 0.49] {
        for z_b in [0.0, 0.1, 1.0, 10.0, 100.0] {
            let rep = verify_claim2(&rho0, &rho1, &s0, &s1, eps, z_b).unwrap();
            assert!(rep.all_pass, "eps {eps} z_b {z_b}: {rep:?}");
        }
    }
}

// -------------------------------------------------------------------------
// direct product reports
// -------------------------------------------------------------------------

#[test]
fn direct_product_orthogonal_alphas_identical_betas() {
    let rho = DensityMatrix::maximally_mixed(2);
    let q = IdentQuad::new(
        basis_density(2, 0),
        basis_density(2, 1),
        rho.clone(),
        rho,
        0.25,
    )
    .unwrap();
    let rep = check_direct_product_pure(&q).unwrap();
    assert!(rep.b.abs() < 1e-6);
    assert!(rep.p.abs() < 1e-6);
    assert!(rep.satisfied, "{rep:?}");
}

#[test]
fn direct_product_identical_alphas() {
    let mut r = rng(107);
    let a = DensityMatrix::from_pure(&random_pure(&mut r, 2));
    let b0 = random_density(&mut r, 2);
    let b1 = random_density(&mut r, 2);
    let q = IdentQuad::new(a.clone(), a, b0, b1, 0.25).unwrap();
    let rep = check_direct_product_pure(&q).unwrap();
    assert!(rep.bound.abs() < 1e-9, "{rep:?}");
    assert!(rep.p <= 1e-6, "{rep:?}");
    assert!(rep.satisfied);
}

#[test]
fn direct_product_random_instances() {
    let mut r = rng(109);
    for trial in 0..6 {
        let a0 = DensityMatrix::from_pure(&random_pure(&mut r, 2));
        let a1 = DensityMatrix::from_pure(&random_pure(&mut r, 2));
        let b0 = random_density(&mut r, 2);
        let b1 = random_density(&mut r, 2);
        let eps = [0.1, 0.25, 0.4][trial % 3];
        let q = IdentQuad::new(a0, a1, b0, b1, eps).unwrap();
        let rep = check_direct_product_pure(&q).unwrap();
        assert!(rep.satisfied, "trial {trial}: {rep:?}");
    }
}

#[test]
fn corollary_identical_alphas() {
    let mut r = rng(113);
    let a = random_density(&mut r, 2);
    let b0 = random_density(&mut r, 2);
    let b1 = random_density(&mut r, 2);
    let q = IdentQuad::new(a.clone(), a, b0, b1, 0.25).unwrap();
    let rep = check_corollary_mixed(&q).unwrap();
    assert!(rep.a_lower.abs() < 1e-9);
    assert!(rep.bound.abs() < 1e-9);
    assert!(rep.p <= 1e-6, "{rep:?}");
    assert!(rep.satisfied);
}

#[test]
fn corollary_pure_alphas_weaker_than_theorem() {
    let mut r = rng(127);
    for _ in 0..4 {
        let a0 = DensityMatrix::from_pure(&random_pure(&mut r, 2));
        let a1 = DensityMatrix::from_pure(&random_pure(&mut r, 2));
        let b0 = random_density(&mut r, 2);
        let b1 = random_density(&mut r, 2);
        let q = IdentQuad::new(a0, a1, b0, b1, 0.25).unwrap();
        let theorem = check_direct_product_pure(&q).unwrap();
        let corollary = check_corollary_mixed(&q).unwrap();
        assert!(theorem.bound <= corollary.bound + 1e-9, "{theorem:?} vs {corollary:?}");
        assert!(corollary.satisfied);
    }
}

// -------------------------------------------------------------------------
// misc
// -------------------------------------------------------------------------

#[test]
fn rejects_bad_eps() {
    let rho = DensityMatrix::maximally_mixed(2);
    assert!(IdentPair::new(rho.clone(), rho.clone(), 0.5).is_err());
    assert!(IdentPair::new(rho.clone(), rho.clone(), -0.1).is_err());
    assert!(IdentPair::new(rho.clone(), rho, 0.49).is_ok());
}

#[test]
fn rejects_dim_mismatch() {
    let a = DensityMatrix::maximally_mixed(2);
    let b = DensityMatrix::maximally_mixed(3);
    assert!(IdentPair::new(a, b, 0.1).is_err());
}

#[test]
fn measurement_residual_of_solver_output_small() {
    let (_, m, _) = single(basis_density(2, 0), basis_density(2, 1), 0.25);
    assert!(measurement_residual(&m) < 1e-7);
}
