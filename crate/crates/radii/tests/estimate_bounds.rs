use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use radii::estimates::{
    alpha, alpha_tail_sharper, chi, gamma, psi_oracle, q_star, sharp_conv_const, AlphaTable, EstimateParams,
    GammaBranch,
};
use radii::interval::Interval;
use radii::seqspace::conv;
use std::time::Instant;

const BIG_M: usize = 199;

#[test]
fn alpha_dominates_brute_force_sums() {
    let start = Instant::now();
    for q in [1.2, 1.5, 1.9, 2.0, 3.0] {
        let ep = EstimateParams::new(q, 10_000, BIG_M).unwrap();
        for n in [0, 1, 5, BIG_M, 2 * BIG_M, 10 * BIG_M] {
            let psi = psi_oracle(n, q, 1_000_000);
            let a = alpha(n, &ep).unwrap();
            assert!(psi <= a.lo(), "q = {q}, n = {n}: Ψ ≈ {psi} but α = {a}");
        }
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn zero_mode_alpha_is_the_literal_formula() {
    let ep = EstimateParams::new(2.0, 10_000, 10).unwrap();
    let a = alpha(0, &ep).unwrap();
    let s: f64 = (1..=10_000).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    let want = 1.0 + 2.0 * s + 2.0 / 10_000.0;
    assert!(a.lo() <= want * (1.0 + 1e-12) && a.hi() >= want * (1.0 - 1e-12));
}

#[test]
fn oracle_partial_sums_increase() {
    for (n, q) in [(0, 1.5), (3, 2.0), (40, 1.3)] {
        let mut prev = 0.0;
        for terms in [10, 100, 1000, 10_000] {
            let v = psi_oracle(n, q, terms);
            assert!(v >= prev);
            prev = v;
        }
    }
}

#[test]
fn q_star_behaviour() {
    let q100 = q_star(100).unwrap();
    assert!(q100.lo() - 5e-4 <= 1.4730 && 1.4730 <= q100.hi() + 5e-4);
    let mut prev = 1.0;
    for m in [6, 20, 100, 500, 10_000] {
        let q = q_star(m).unwrap();
        assert!(q.width() <= 1e-6);
        assert!(q.mid() >= prev, "q*({m}) = {q} fell below {prev}");
        prev = q.mid();
    }
    assert!(q_star(10_000).unwrap().hi() < 1.48);
}

#[test]
fn chi_increases_in_q() {
    for m in [6, 50, 199] {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..40 {
            let q = 1.0 + i as f64 / 40.0;
            let v = chi(m, Interval::point(q)).unwrap();
            assert!(v.mid() > prev, "χ_{m} not increasing at q = {q}");
            prev = v.mid();
        }
    }
}

#[test]
fn tail_branch_switches_at_q_star() {
    let qs = q_star(BIG_M).unwrap();
    let below = EstimateParams::new(qs.lo() - 1e-3, 10_000, BIG_M).unwrap();
    let above = EstimateParams::new(qs.hi() + 1e-3, 10_000, BIG_M).unwrap();
    let (gb, bb) = gamma(&below).unwrap();
    let (ga, ba) = gamma(&above).unwrap();
    assert_eq!(bb, GammaBranch::BelowQStar);
    assert_eq!(ba, GammaBranch::AboveQStar);
    // The added 2χ_M is nonnegative and small this close to q*.
    assert!(ga.hi() <= gb.hi());
    assert!((ga.mid() - gb.mid()).abs() < 0.1);
    let (_, large) = gamma(&EstimateParams::new(2.0, 10_000, BIG_M).unwrap()).unwrap();
    assert_eq!(large, GammaBranch::Large);
}

#[test]
fn sharp_constants_are_no_worse_than_alpha() {
    for q in [1.5, 2.0] {
        let ep = EstimateParams::new(q, 10_000, 30).unwrap();
        for n in 0..30 {
            let c = sharp_conv_const(n, &ep).unwrap();
            let a = alpha(n, &ep).unwrap();
            assert!(c.hi() <= a.hi(), "q = {q}, n = {n}: {c} vs {a}");
        }
    }
    let ep = EstimateParams::new(2.0, 100, 10).unwrap();
    assert!(sharp_conv_const(ep.k_sharp, &ep).is_err());
}

#[test]
fn refined_tail_is_sharper() {
    for q in [1.8, 1.9] {
        let ep = EstimateParams::new(q, 10_000, BIG_M).unwrap();
        let plain = alpha(BIG_M, &ep).unwrap();
        let sharp = alpha_tail_sharper(&ep, 0.1, 200_000).unwrap();
        assert!(sharp.hi() <= plain.hi(), "q = {q}: {sharp} vs {plain}");
        if q == 1.9 {
            assert!(sharp.hi() < plain.lo() - 0.1, "{sharp} vs {plain}");
        }
        // Still an upper bound.
        for n in [BIG_M, 2 * BIG_M, 5 * BIG_M] {
            assert!(psi_oracle(n, q, 200_000) <= sharp.lo());
        }
    }
    let ep = EstimateParams::new(1.9, 10_000, BIG_M).unwrap();
    assert!(alpha_tail_sharper(&ep, 1e-9, 1000).is_err());
    let huge = alpha_tail_sharper(&ep, 1e9, 1000).unwrap();
    assert!(huge.is_finite());
    let two = EstimateParams::new(2.0, 10_000, BIG_M).unwrap();
    assert!(alpha_tail_sharper(&two, 0.1, 1000).is_err());
}

#[test]
fn weighted_products_obey_the_bounds() {
    let mut rng = StdRng::seed_from_u64(23);
    let big_m = 8;
    for q in [1.3, 2.0, 2.7] {
        let ep = EstimateParams::new(q, 10_000, big_m).unwrap();
        let table = AlphaTable::new(&ep).unwrap();
        let w = |n: usize| if n <= 1 { 1.0 } else { (n as f64).powf(q) };
        for _ in 0..200 {
            let len = rng.gen_range(1..=12);
            // Entries of modulus at most 1/ω_k give ‖x‖_q ≤ 1.
            let x: Vec<f64> = (0..len).map(|k| rng.gen_range(-1.0..1.0) / w(k)).collect();
            let y: Vec<f64> = (0..len).map(|k| rng.gen_range(-1.0..1.0) / w(k)).collect();
            for n in 0..2 * len {
                let v = conv(&x, &y, n).abs() * w(n);
                let a = if n < big_m { table.alpha[n] } else { table.tail() };
                assert!(v <= 0.5 * a.hi() * (1.0 + 1e-12), "q = {q}, n = {n}");
                if n < big_m {
                    assert!(v <= 0.5 * table.cq[n].hi() * w(n) * (1.0 + 1e-12));
                }
            }
        }
    }
}
