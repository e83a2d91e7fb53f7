mod common;

use anomind::stats::{f_variance_test, ks_statistic, ks_two_sample, mann_whitney_u, TestKind};
use common::*;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn mwu_matches_enumeration_up_to_eight() {
    let mut r = rng(11);
    for n1 in 2..=8 {
        for n2 in 2..=8 {
            for _ in 0..20 {
                let a = normals(&mut r, n1);
                let b: Vec<f64> = normals(&mut r, n2).iter().map(|v| v + r.random_range(-1.0..1.0)).collect();
                let ours = mann_whitney_u(&a, &b).unwrap().p_value;
                assert_eq!(ours, mwu_p_by_enumeration(&a, &b), "n1={n1} n2={n2}");
            }
        }
    }
}

#[test]
fn mwu_normal_approximation_close_to_enumeration() {
    // Just past the exact-distribution cutoff the normal approximation takes
    // over; it must stay near the exact answer.
    let mut r = rng(12);
    let mut worst: f64 = 0.0;
    for (n1, n2) in [(8, 9), (9, 9), (10, 8), (9, 10)] {
        for _ in 0..40 {
            let a = normals(&mut r, n1);
            let b: Vec<f64> = normals(&mut r, n2).iter().map(|v| v + 0.7).collect();
            let ours = mann_whitney_u(&a, &b).unwrap().p_value;
            worst = worst.max((ours - mwu_p_by_enumeration(&a, &b)).abs());
        }
    }
    assert!(worst <= 0.02, "largest gap {worst}");
}

#[test]
fn ks_statistic_matches_brute_force() {
    let mut r = rng(13);
    for i in 0..1000 {
        let (n1, n2) = (r.random_range(2..60), r.random_range(2..60));
        let (a, b) = if i % 3 == 0 {
            // Rounded values to exercise ties within and across samples.
            let round = |v: Vec<f64>| v.into_iter().map(|x| (x * 2.0).round() / 2.0).collect::<Vec<_>>();
            (round(normals(&mut r, n1)), round(normals(&mut r, n2)))
        } else {
            (normals(&mut r, n1), normals(&mut r, n2))
        };
        let d = ks_statistic(&a, &b);
        assert!((d - ks_d_brute(&a, &b)).abs() <= 1e-12, "case {i}");
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, d);
    }
}

#[test]
fn f_statistic_matches_brute_force() {
    let mut r = rng(14);
    for i in 0..1000 {
        let (n1, n2) = (r.random_range(2..60), r.random_range(2..60));
        let scale = r.random_range(0.2..4.0);
        let a = normals(&mut r, n1);
        let b: Vec<f64> = normals(&mut r, n2).iter().map(|v| v * scale + 3.0).collect();
        let f = f_variance_test(&a, &b).unwrap().statistic;
        let want = f_stat_brute(&a, &b);
        assert!((f - want).abs() <= 1e-12 * want.max(1.0), "case {i}: {f} vs {want}");
    }
}

#[test]
fn mwu_and_f_null_calibration() {
    let trials = 4000;
    for test in [TestKind::Mwu, TestKind::FVar] {
        for &half in &CALIBRATION_SIZES {
            let rates = null_rejection(test, half, trials, 100 + half as u64);
            for (rate, &lvl) in rates.iter().zip(&LEVELS) {
                let tol = three_se(lvl, trials);
                assert!((rate - lvl).abs() <= tol, "{test:?} half={half} level={lvl}: rate {rate}");
            }
        }
    }
}

#[test]
fn tests_invariant_to_sample_order() {
    let mut r = rng(15);
    for _ in 0..200 {
        let mut a = normals(&mut r, 25);
        let mut b = normals(&mut r, 25);
        let before: Vec<f64> = TestKind::ALL.iter().map(|t| t.p_value_or_one(&a, &b).unwrap()).collect();
        a.shuffle(&mut r);
        b.shuffle(&mut r);
        let after: Vec<f64> = TestKind::ALL.iter().map(|t| t.p_value_or_one(&a, &b).unwrap()).collect();
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
