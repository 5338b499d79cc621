use bingham_core::bounds::comparison_crossover;
use bingham_core::oracle::{kummer_partial_sum, random_symmetric};
use bingham_core::zonal::{a_k_closed_exact, a_k_multisum_exact};
use bingham_core::{
    a_k_closed, a_k_multisum, bound_comparison, enumerate_partitions, exact, fd_gradient,
    frobenius_norm, grad_psi_truncated, grad_remainder_bound, kummer_scalar, materialize,
    pochhammer_ratio, power_sums, psi_remainder_bound, psi_truncated, regime_check, threshold_psi,
    BoundOrdering, ExactRational, GrowthRegime, SymmetricMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn psi_of(m: u32) -> impl Fn(&SymmetricMatrix) -> bingham_core::Result<f64> {
    move |s| psi_truncated(&power_sums(s, m as usize)?, m)
}

fn rising(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + f64::from(i)))
}

#[test]
fn scalar_identity_within_bound() {
    for &theta in &[-0.5f64, 0.1, 0.5] {
        for &d in &[10usize, 100] {
            let s = SymmetricMatrix::scaled_identity(d, theta).unwrap();
            let norm = frobenius_norm(&s);
            let ps = power_sums(&s, 10).unwrap();
            for &r in &[0.0, 0.5] {
                let regime = GrowthRegime::new(norm / (d as f64).powf(r / 2.0), r).unwrap();
                if (d as f64) < threshold_psi(&regime) {
                    continue;
                }
                assert!(regime_check(&s, &regime));
                for m in [3, 6, 10] {
                    let err = (psi_truncated(&ps, m).unwrap() - theta.exp()).abs();
                    assert!(err <= psi_remainder_bound(m, d as f64, &regime).unwrap());
                }
            }
        }
    }
}

#[test]
fn rank_one_matches_kummer() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let theta = rng.random_range(-2.0..2.0);
        let d = rng.random_range(2..=200usize);
        let m = rng.random_range(1..=15u32);
        let mut diag = vec![0.0; d];
        diag[0] = theta;
        let ps = power_sums(&SymmetricMatrix::from_diagonal(diag).unwrap(), 15).unwrap();
        let a = psi_truncated(&ps, m).unwrap();
        let b = kummer_partial_sum(d as f64 / 2.0, theta, m);
        assert!(
            (a - b).abs() <= 1e-12 * b.abs(),
            "theta={theta} d={d} m={m}"
        );
    }
}

#[test]
fn rank_one_limit_is_kummer_function() {
    for &d in &[4usize, 10, 50] {
        for &theta in &[-2.0, -0.7, 0.3, 2.0] {
            let mut diag = vec![0.0; d];
            diag[0] = theta;
            let ps = power_sums(&SymmetricMatrix::from_diagonal(diag).unwrap(), 29).unwrap();
            let a = psi_truncated(&ps, 30).unwrap();
            assert!((a - kummer_scalar(d as f64 / 2.0, theta).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for d in 2..=8usize {
        for m in 2..=8u32 {
            let s = random_symmetric(d, &mut rng).scaled(0.4);
            let ps = power_sums(&s, m as usize).unwrap();
            let g = materialize(&grad_psi_truncated(&ps, m).unwrap(), &s).unwrap();
            let fd = fd_gradient(psi_of(m), &s, 1e-4).unwrap();
            for i in 0..d {
                for j in 0..d {
                    let (a, b) = (g.get(i, j), fd.get(i, j));
                    assert!(
                        (a - b).abs() <= 1e-6 * b.abs() + 1e-10,
                        "d={d} m={m} ({i},{j}): {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn trace_gradient_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let d = rng.random_range(2..=6);
        let s = random_symmetric(d, &mut rng).scaled(0.5);
        let h = random_symmetric(d, &mut rng).scaled(0.5);
        let hm = h.to_dmatrix();

        let exp_tr = |x: &SymmetricMatrix| Ok((x.to_dmatrix() * &hm).trace().exp());
        let fd = fd_gradient(exp_tr, &s, 1e-4).unwrap();
        let expect = h.scaled((s.to_dmatrix() * &hm).trace().exp());
        assert!(fd.max_abs_diff(&expect) <= 1e-5 * frobenius_norm(&expect));

        for k in 1..=4i32 {
            let tr_pow = |x: &SymmetricMatrix| Ok(x.trace().powi(k));
            let fd = fd_gradient(tr_pow, &s, 1e-4).unwrap();
            let expect =
                SymmetricMatrix::scaled_identity(d, f64::from(k) * s.trace().powi(k - 1)).unwrap();
            assert!(fd.max_abs_diff(&expect) <= 1e-5 * frobenius_norm(&expect).max(1e-3));

            let pow_tr = |x: &SymmetricMatrix| Ok(x.to_dmatrix().pow(k as u32).trace());
            let fd = fd_gradient(pow_tr, &s, 1e-4).unwrap();
            let expect =
                SymmetricMatrix::new(s.to_dmatrix().pow(k as u32 - 1) * f64::from(k)).unwrap();
            assert!(fd.max_abs_diff(&expect) <= 1e-5 * frobenius_norm(&expect));
        }
    }
}

fn random_in_regime(rng: &mut ChaCha8Rng) -> (SymmetricMatrix, GrowthRegime) {
    let d = rng.random_range(2..=50usize);
    let r = if rng.random_bool(0.5) { 0.0 } else { 0.5 };
    let df = d as f64;
    // largest gamma0 for which d clears the threshold, then back off
    let g0_max = (df.powf(1.0 - r) / 2.0).sqrt() / bingham_core::bounds::gamma1();
    let regime = GrowthRegime::new(0.9 * g0_max.min(1.5), r).unwrap();
    let norm = rng.random_range(0.0..1.0) * regime.norm_limit(df);
    let s = if rng.random_bool(0.5) {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        SymmetricMatrix::from_diagonal(v).unwrap()
    } else {
        random_symmetric(d, rng)
    };
    let s = s.scaled(norm / frobenius_norm(&s));
    (s, regime)
}

#[test]
fn bounds_are_empirically_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..200 {
        let (s, regime) = random_in_regime(&mut rng);
        let d = s.dim() as f64;
        assert!(regime_check(&s, &regime));
        let ps = power_sums(&s, 30).unwrap();
        let reference = psi_truncated(&ps, 30).unwrap();
        let grad_ref = materialize(&grad_psi_truncated(&ps, 30).unwrap(), &s).unwrap();
        for m in [3, 6, 10] {
            let err = (psi_truncated(&ps, m).unwrap() - reference).abs();
            assert!(err <= psi_remainder_bound(m, d, &regime).unwrap());
            let g = materialize(&grad_psi_truncated(&ps, m).unwrap(), &s).unwrap();
            let diff = SymmetricMatrix::new(g.to_dmatrix() - grad_ref.to_dmatrix()).unwrap();
            assert!(frobenius_norm(&diff) <= grad_remainder_bound(m, d, &regime).unwrap());
        }
    }
}

#[test]
fn refinement_step_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..100 {
        let (s, regime) = random_in_regime(&mut rng);
        let ps = power_sums(&s, 12).unwrap();
        for m in 1..12 {
            let step = (psi_truncated(&ps, m + 1).unwrap() - psi_truncated(&ps, m).unwrap()).abs();
            assert!(step <= psi_remainder_bound(m, s.dim() as f64, &regime).unwrap());
        }
    }
}

#[test]
fn bounds_monotone_in_parameters() {
    let ds = [200.0, 1000.0, 5000.0];
    let ms = [3u32, 6, 10];
    let g0s = [0.5, 0.75, 1.0];
    let rs = [0.25, 0.5, 0.75];
    let psi = |m, d, g0, r| psi_remainder_bound(m, d, &GrowthRegime::new(g0, r).unwrap()).unwrap();
    let grad =
        |m, d, g0, r| grad_remainder_bound(m, d, &GrowthRegime::new(g0, r).unwrap()).unwrap();
    for f in [&psi as &dyn Fn(u32, f64, f64, f64) -> f64, &grad] {
        for &r in &rs {
            for w in ds.windows(2) {
                for &m in &ms {
                    for &g in &g0s {
                        assert!(f(m, w[1], g, r) < f(m, w[0], g, r));
                    }
                }
            }
            for w in ms.windows(2) {
                for &d in &ds {
                    for &g in &g0s {
                        assert!(f(w[1], d, g, r) < f(w[0], d, g, r));
                    }
                }
            }
            for w in g0s.windows(2) {
                for &d in &ds {
                    for &m in &ms {
                        assert!(f(m, d, w[1], r) > f(m, d, w[0], r));
                    }
                }
            }
        }
        for w in rs.windows(2) {
            for &d in &ds {
                for &m in &ms {
                    assert!(f(m, d, 1.0, w[1]) > f(m, d, 1.0, w[0]));
                }
            }
        }
    }
}

#[test]
fn pochhammer_ratio_decay() {
    let g1 = bingham_core::bounds::gamma1();
    for k in 1..=30u32 {
        for &d in &[1.0f64, 2.0, 4.0, 10.0, 100.0, 1e4] {
            let lhs = rising(d.sqrt() / 2.0, k) / rising(d / 2.0, k);
            let rhs = g1.powi(k as i32 - 1)
                * exact::factorial_f64(k - 1).sqrt()
                * d.powf(-f64::from(k) / 2.0);
            assert!(lhs <= rhs * (1.0 + 1e-12), "k={k} d={d}");
        }
    }
    assert_eq!(pochhammer_ratio(5, 1.0), 1.0);
}

#[test]
fn a_k_forms_agree() {
    for root in [
        ExactRational::from_integer(2.into()),
        exact::ratio(7, 3),
        exact::ratio(10, 1),
    ] {
        for k in 0..=12 {
            assert_eq!(
                a_k_multisum_exact(k, &root).unwrap(),
                a_k_closed_exact(k, &root).unwrap()
            );
        }
    }
    for &d in &[2.0f64, 4.0, 9.0, 20.0, 100.0] {
        for k in 0..=20 {
            let a = a_k_multisum(k, d).unwrap();
            let b = a_k_closed(k, d).unwrap();
            assert!((a - b).abs() <= 1e-12 * b);
            let cap = rising(d.sqrt() / 2.0, k) / exact::factorial_f64(k);
            assert!(b <= cap + 1e-12);
        }
    }
}

#[test]
fn reznick_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let parts: Vec<_> = (1..=8)
        .flat_map(|k| enumerate_partitions(k).unwrap())
        .collect();
    for _ in 0..1000 {
        let d = rng.random_range(1..=30usize);
        let lam: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p2: f64 = lam.iter().map(|x| x * x).sum();
        for pm in &parts {
            for (j, i) in pm.nonzero() {
                let pj: f64 = lam.iter().map(|x| x.abs().powi(j as i32)).sum();
                let lhs = pj.powi(i as i32) / p2.powf((j * i as usize) as f64 / 2.0);
                let exponent = (0.0f64).max((2.0 - j as f64) * f64::from(i) / 2.0);
                assert!(lhs <= (d as f64).powf(exponent) * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn comparison_matches_direct_evaluation() {
    for (g0, r, ds) in [
        (1.0, 0.5, vec![20.0, 50.0, 100.0, 110.0, 111.0, 1000.0]),
        (1.0, 0.75, vec![200.0, 1000.0, 62501.0]),
    ] {
        let regime = GrowthRegime::new(g0, r).unwrap();
        for &d in &ds {
            for m in 2..=12 {
                let p = psi_remainder_bound(m, d, &regime).unwrap();
                let g = grad_remainder_bound(m, d, &regime).unwrap();
                let direct = if p > g {
                    BoundOrdering::PsiLarger
                } else {
                    BoundOrdering::GradLarger
                };
                assert_eq!(
                    bound_comparison(m, d, &regime).unwrap(),
                    direct,
                    "m={m} d={d}"
                );
            }
        }
    }
    let c = comparison_crossover(6, &GrowthRegime::new(1.0, 0.5).unwrap()).unwrap();
    assert!(110.0 < c && c < 111.0);
}
