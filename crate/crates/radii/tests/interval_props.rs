use proptest::prelude::*;
use radii::interval::{iv_arith, ArithOp, Interval};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Is the exact real `s + e` (with `|e|` tiny next to `s`) inside `iv`?
fn holds_exact(iv: Interval, s: f64, e: f64) -> bool {
    let above_lo = iv.lo() < s || (iv.lo() == s && e >= 0.0);
    let below_hi = iv.hi() > s || (iv.hi() == s && e <= 0.0);
    above_lo && below_hi
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        -1.0..1.0f64,
        (-300i32..300).prop_map(|e| 2f64.powi(e) * 1.2345),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (real(), 0.0..1.0f64).prop_map(|(a, w)| Interval::new(a, a + w * a.abs().max(1.0)).unwrap())
}

fn sample(iv: Interval, t: f64) -> f64 {
    (iv.lo() + t * (iv.hi() - iv.lo())).clamp(iv.lo(), iv.hi())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn sums_contain_the_exact_sum(x in real(), y in real()) {
        let iv = Interval::point(x) + Interval::point(y);
        let (s, e) = two_sum(x, y);
        prop_assert!(holds_exact(iv, s, e), "{x:e} + {y:e} -> {iv}");
        let iv = Interval::point(x) - Interval::point(y);
        let (s, e) = two_sum(x, -y);
        prop_assert!(holds_exact(iv, s, e));
    }

    #[test]
    fn products_contain_the_exact_product(x in real(), y in real()) {
        let iv = Interval::point(x) * Interval::point(y);
        let p = x * y;
        prop_assume!(p.abs() > 1e-250 || p == 0.0);
        let e = x.mul_add(y, -p);
        prop_assert!(holds_exact(iv, p, e), "{x:e} * {y:e} -> {iv}");
    }

    #[test]
    fn quotients_contain_the_exact_quotient(x in real(), y in real()) {
        prop_assume!(y != 0.0);
        let iv = Interval::point(x).try_div(Interval::point(y)).unwrap();
        let q = x / y;
        prop_assume!(q.abs() > 1e-250 || q == 0.0);
        // x − q·y exactly; its sign relative to y tells where x/y lies.
        let rem = (-q).mul_add(y, x);
        let e = rem / y;
        prop_assert!(holds_exact(iv, q, e), "{x:e} / {y:e} -> {iv}");
    }

    #[test]
    fn sampled_points_stay_inside(a in interval(), b in interval(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let (x, y) = (sample(a, s), sample(b, t));
        for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div] {
            let Ok(iv) = iv_arith(a, b, op) else {
                prop_assert!(op == ArithOp::Div && b.contains_zero());
                continue;
            };
            let v = match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
                ArithOp::Div => x / y,
            };
            prop_assert!(iv.contains(v), "{op:?} {a} {b} at ({x:e}, {y:e}) gave {iv}");
        }
    }

    #[test]
    fn operations_are_inclusion_monotone(
        a in interval(), b in interval(),
        s0 in 0.0..1.0f64, s1 in 0.0..1.0f64, t0 in 0.0..1.0f64, t1 in 0.0..1.0f64,
    ) {
        let sub = |iv: Interval, u: f64, v: f64| {
            let (p, q) = (sample(iv, u.min(v)), sample(iv, u.max(v)));
            Interval::new(p, q).unwrap()
        };
        let (a2, b2) = (sub(a, s0, s1), sub(b, t0, t1));
        for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div] {
            if let (Ok(big), Ok(small)) = (iv_arith(a, b, op), iv_arith(a2, b2, op)) {
                prop_assert!(small.is_subset_of(big), "{op:?}: {small} not in {big}");
            }
        }
        prop_assert!(a2.square().is_subset_of(a.square()));
        prop_assert!(a2.abs().is_subset_of(a.abs()));
    }

    #[test]
    fn dyadic_expression_trees_are_enclosed(
        leaves in prop::collection::vec(-64i32..64, 8),
        ops in prop::collection::vec(0u8..3, 7),
    ) {
        // Eighths in [-8, 8] combined three levels deep stay exact in f64,
        // so the float value is the true value.
        let mut vals: Vec<f64> = leaves.iter().map(|&k| k as f64 / 8.0).collect();
        let mut ivs: Vec<Interval> = vals.iter().map(|&v| Interval::point(v)).collect();
        let mut k = 0;
        while vals.len() > 1 {
            let mut nv = Vec::new();
            let mut ni = Vec::new();
            for pair in 0..vals.len() / 2 {
                let (x, y) = (vals[2 * pair], vals[2 * pair + 1]);
                let (p, q) = (ivs[2 * pair], ivs[2 * pair + 1]);
                let (v, i) = match ops[k] {
                    0 => (x + y, p + q),
                    1 => (x - y, p - q),
                    _ => (x * y, p * q),
                };
                nv.push(v);
                ni.push(i);
                k += 1;
            }
            vals = nv;
            ivs = ni;
        }
        prop_assert!(ivs[0].contains(vals[0]));
        prop_assert_eq!(ivs[0].lo(), vals[0]);
        prop_assert_eq!(ivs[0].hi(), vals[0]);
    }

    #[test]
    fn real_powers_agree_with_integer_powers(x in 0.01..50.0f64, w in 0.0..0.1f64, k in 2u32..7) {
        let base = Interval::new(x, x * (1.0 + w)).unwrap();
        let by_int = base.pow_int(k);
        // Nudge the exponent off the integer so the exp/ln path is taken.
        let q = Interval::new((k as f64).next_down(), (k as f64).next_up()).unwrap();
        let by_real = base.pow_real(q).unwrap();
        prop_assert!(by_int.intersect(by_real).is_some());
        prop_assert!(by_real.contains(x.powi(k as i32)) || by_int.contains(x.powi(k as i32)));
        prop_assert!(by_real.lo() <= by_int.lo() * (1.0 + 1e-12));
        prop_assert!(by_real.hi() >= by_int.hi() * (1.0 - 1e-12));
    }

    #[test]
    fn sqrt_and_ln_exp_round_trip(x in 1e-3..1e3f64) {
        let p = Interval::point(x);
        prop_assert!(p.sqrt().unwrap().square().contains(x));
        prop_assert!(p.ln().unwrap().exp().unwrap().contains(x));
    }
}
