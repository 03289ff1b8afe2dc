use super::*;
use crate::ident::{d_eps_single, IdentPair};
use crate::linmat::DensityMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair(p: &[f64], q: &[f64], eps: f64) -> ClassicalPair {
    ClassicalPair::new(p.to_vec(), q.to_vec(), eps).unwrap()
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> ClassicalPair {
    let mut draw = || {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let s: f64 = v.iter().sum();
        for x in &mut v {
            *x /= s;
        }
        v
    };
    let p = draw();
    let q = draw();
    ClassicalPair::new(p, q, eps).unwrap()
}

#[test]
fn disjoint_supports_full_answer() {
    let c = pair(&[1.0, 0.0], &[0.0, 1.0], 0.0);
    let (a, m) = optimal_classical(&c);
    assert!((a - 1.0).abs() < 1e-12);
    assert!(conditional_error_classical(&c, &m) <= 1e-12);
}

#[test]
fn equal_distributions_value_zero() {
    let c = pair(&[0.3, 0.7], &[0.3, 0.7], 0.4);
    let (a, _) = optimal_classical(&c);
    assert!(a.abs() < 1e-12);
    assert!(lp_oracle(&c).unwrap().abs() < 1e-9);
}

#[test]
fn frozen_two_outcome_examples() {
    let c = pair(&[0.8, 0.2], &[0.2, 0.8], 0.25);
    let (a, m) = optimal_classical(&c);
    assert!((a - 1.0).abs() < 1e-12);
    assert!(conditional_error_classical(&c, &m) <= 0.25 + 1e-12);

    // Every outcome has conditional error exactly 0.2, so a budget of 0.1
    // admits no answer at all.
    let c = pair(&[0.8, 0.2], &[0.2, 0.8], 0.1);
    let (a, _) = optimal_classical(&c);
    assert!(a.abs() < 1e-12);
}

#[test]
fn frozen_three_outcome_example() {
    let c = pair(&[0.5, 0.5, 0.0], &[0.1, 0.1, 0.8], 0.1);
    let (a, m) = optimal_classical(&c);
    assert!((a - 1.0).abs() < 1e-12);
    let err = conditional_error_classical(&c, &m);
    assert!((err - 0.1).abs() < 1e-12);
}

#[test]
fn lp_matches_frozen_examples() {
    for (p, q, eps, want) in [
        (vec![1.0, 0.0], vec![0.0, 1.0], 0.0, 1.0),
        (vec![0.8, 0.2], vec![0.2, 0.8], 0.25, 1.0),
        (vec![0.8, 0.2], vec![0.2, 0.8], 0.1, 0.0),
        (vec![0.5, 0.5, 0.0], vec![0.1, 0.1, 0.8], 0.1, 1.0),
    ] {
        let c = ClassicalPair::new(p, q, eps).unwrap();
        let lp = lp_oracle(&c).unwrap();
        assert!(
            (lp - want).abs() < 1e-7,
            "lp {lp} want {want} at eps {eps}"
        );
    }
}

#[test]
fn greedy_matches_lp_on_random_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut count = 0;
    while count < 500 {
        let n = rng.gen_range(2..=8);
        let eps = 0.05 * rng.gen_range(0..10) as f64;
        let c = random_pair(&mut rng, n, eps);
        let (a, _) = optimal_classical(&c);
        let lp = lp_oracle(&c).unwrap();
        assert!(
            (a - lp).abs() < 1e-9,
            "greedy {a} vs lp {lp} on n={n} eps={eps}"
        );
        count += 1;
    }
}

#[test]
fn diagonal_embedding_matches_quantum_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..12 {
        let n = rng.gen_range(2..=4);
        let eps = [0.0, 0.1, 0.2, 0.3, 0.4][rng.gen_range(0..5)];
        let c = random_pair(&mut rng, n, eps);
        let (a, _) = optimal_classical(&c);
        let alpha0 = DensityMatrix::from_probabilities(&c.p).unwrap();
        let alpha1 = DensityMatrix::from_probabilities(&c.q).unwrap();
        let ip = IdentPair::new(alpha0, alpha1, eps).unwrap();
        let (value, _, _) = d_eps_single(&ip).unwrap();
        assert!(
            (a - value).abs() < 1e-6,
            "classical {a} vs quantum {value} on n={n} eps={eps}"
        );
    }
}

#[test]
fn monotone_in_eps_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let base = random_pair(&mut rng, n, 0.0);
        let mut prev = -1.0;
        for k in 0..10 {
            let eps = 0.049 * k as f64;
            let c = ClassicalPair::new(base.p.clone(), base.q.clone(), eps).unwrap();
            let (a, _) = optimal_classical(&c);
            assert!((0.0..=1.0 + 1e-12).contains(&a));
            assert!(a >= prev - 1e-12, "value decreased in eps");
            prev = a;
        }
    }
}

#[test]
fn permutation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let eps = rng.gen_range(0.0..0.5);
        let c = random_pair(&mut rng, n, eps);
        let (a, _) = optimal_classical(&c);
        let mut idx: Vec<usize> = (0..n).collect();
        // Fisher-Yates with the test generator.
        for i in (1..n).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        let p: Vec<f64> = idx.iter().map(|&i| c.p[i]).collect();
        let q: Vec<f64> = idx.iter().map(|&i| c.q[i]).collect();
        let perm = ClassicalPair::new(p, q, eps).unwrap();
        let (b, _) = optimal_classical(&perm);
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn conditional_error_evaluations() {
    let c = pair(&[0.8, 0.2], &[0.2, 0.8], 0.25);
    let majority = ClassicalMeasurement {
        guesses: vec![0, 1],
        fractions: vec![1.0, 1.0],
    };
    assert!((conditional_error_classical(&c, &majority) - 0.2).abs() < 1e-12);

    let silent = ClassicalMeasurement {
        guesses: vec![0, 1],
        fractions: vec![0.0, 0.0],
    };
    assert_eq!(conditional_error_classical(&c, &silent), 0.0);
}

#[test]
fn greedy_measurement_respects_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..50 {
        let n = rng.gen_range(2..=8);
        let eps = rng.gen_range(0.0..0.5);
        let c = random_pair(&mut rng, n, eps);
        let (a, m) = optimal_classical(&c);
        assert!(m.fractions.iter().all(|t| (0.0..=1.0).contains(t)));
        assert!(conditional_error_classical(&c, &m) <= eps + 1e-12);
        let mass: f64 = (0..n)
            .map(|i| 0.5 * m.fractions[i] * (c.p[i] + c.q[i]))
            .sum();
        assert!((mass - a).abs() < 1e-12);
    }
}

#[test]
fn rejects_malformed_pairs() {
    assert!(ClassicalPair::new(vec![0.5, 0.6], vec![0.5, 0.5], 0.1).is_err());
    assert!(ClassicalPair::new(vec![0.5, 0.5], vec![0.5, 0.5], 0.5).is_err());
    assert!(ClassicalPair::new(vec![0.5, 0.5], vec![0.5], 0.1).is_err());
    assert!(ClassicalPair::new(vec![1.5, -0.5], vec![0.5, 0.5], 0.1).is_err());
}

/// A frozen two-register diagonal instance where the optimal joint
/// measurement strictly beats every product-of-singles strategy. Both
/// registers hold (0.7, 0.3) against (0, 1) at eps = 0.2: the joint optimum
/// is 8841/14080 ~ 0.62791 (it can pair the error-free outcome of one
/// register with the errorful outcomes of the other), while the best
/// product strategy, maximized over every split of the error budget
/// (1 - e1)(1 - e2) >= 1 - eps, reaches only ~0.46974.
#[test]
fn joint_measurement_beats_best_product_strategy() {
    let eps = 0.2;
    let p = vec![0.7, 0.3];
    let q = vec![0.0, 1.0];
    let single = |e: f64| {
        let c = ClassicalPair::new(p.clone(), q.clone(), e).unwrap();
        optimal_classical(&c).0
    };

    // Best product value over a dense budget grid (the factors are
    // monotone, and every greedy breakpoint is well inside the grid).
    let mut product_best: f64 = 0.0;
    let n_grid = 20_000;
    for k in 0..=n_grid {
        let e1 = eps * k as f64 / n_grid as f64;
        let e2 = (1.0 - (1.0 - eps) / (1.0 - e1)).max(0.0);
        product_best = product_best.max(single(e1) * single(e2));
    }
    assert!(
        (product_best - 0.4697368421052632).abs() < 1e-6,
        "product best {product_best}"
    );

    let alpha0 = DensityMatrix::from_probabilities(&p).unwrap();
    let alpha1 = DensityMatrix::from_probabilities(&q).unwrap();
    let quad = crate::ident::IdentQuad::new(
        alpha0.clone(),
        alpha1.clone(),
        alpha0,
        alpha1,
        eps,
    )
    .unwrap();
    let (joint, _, _) = crate::ident::d_eps_quad(&quad).unwrap();
    assert!(
        (joint - 8841.0 / 14080.0).abs() < 1e-5,
        "joint value {joint}"
    );
    assert!(joint - product_best >= 1e-3, "strict gap required");
}
