mod common;

use common::{big_ratio, loop_pool, loops_at, oracle};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use qfrac::cert::{Certificate, Method};
use qfrac::continuant::{p2_is_loop, p2_is_path, p2_weight_sq};
use qfrac::family::rescale_loop;
use qfrac::fraction::{compose, eval, inverse, is_proper, loop_difference, zero_skip};
use qfrac::numeric::eval_numeric;
use qfrac::search::{brute_force_enum, diophantine_search, SearchBudget};
use qfrac::{Conductor, Path};

fn conductor() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=15, 1i64..=12).prop_filter("reduced", |(a, b)| num_integer::gcd(*a, *b) == 1)
}

fn entries(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-7i64..=7, 1..=max_len)
}

fn pool_index() -> impl Strategy<Value = usize> {
    0..loop_pool().len()
}

fn weight(q: &Conductor, m: &Path) -> BigRational {
    eval(q, m).weight_sq.expect("path").value().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn eval_matches_oracle((a, b) in conductor(), m in entries(7)) {
        let e = eval(&Conductor::ratio(a, b), &Path::from_i64s(&m));
        match oracle(a, b, &m) {
            Some((v, w2)) => {
                prop_assert_eq!(e.value(), Some(&big_ratio(&v)));
                prop_assert_eq!(e.weight_sq.as_ref().unwrap().value(), &big_ratio(&w2));
            }
            None => prop_assert!(!e.is_path()),
        }
    }

    #[test]
    fn continuants_agree_with_recurrence((a, b) in conductor(), m in entries(7)) {
        let q = Conductor::ratio(a, b);
        let m = Path::from_i64s(&m);
        let e = eval(&q, &m);
        prop_assert_eq!(p2_is_path(&q, &m), e.is_path());
        prop_assert_eq!(p2_is_loop(&q, &m), e.is_loop());
        prop_assert_eq!(p2_weight_sq(&q, &m), e.weight_sq);
    }

    #[test]
    fn numeric_within_error_bound((a, b) in conductor(), m in entries(7)) {
        let q = Conductor::ratio(a, b);
        let m = Path::from_i64s(&m);
        let exact = eval(&q, &m);
        let qf = a as f64 / b as f64;
        let num = eval_numeric(qf, qf * f64::EPSILON, &m);
        if let (Some(v), Some(x)) = (num.value(), exact.value()) {
            let x: f64 = x.numer().to_string().parse::<f64>().unwrap() / x.denom().to_string().parse::<f64>().unwrap();
            prop_assert!((v - x).abs() <= num.error_bound() * (1.0 + 1e-9) + 1e-300, "{v} vs {x}");
        }
        if !exact.is_path() {
            prop_assert!(num.value().is_none());
        }
    }

    #[test]
    fn zero_skip_keeps_value_and_weight((a, b) in conductor(), m in entries(6), at in 1usize..6) {
        let q = Conductor::ratio(a, b);
        let mut v = m.clone();
        if v.len() < 2 {
            v.push(1);
        }
        let at = 1 + at % (v.len() - 1);
        v.insert(at, 0);
        let with_zero = Path::from_i64s(&v);
        let skipped = zero_skip(&with_zero);
        let (e1, e2) = (eval(&q, &with_zero), eval(&q, &skipped));
        if e1.is_path() && e2.is_path() {
            prop_assert_eq!(e1.value(), e2.value());
            prop_assert_eq!(e1.weight_sq, e2.weight_sq);
        }
    }

    #[test]
    fn composition_multiplies_weights(i in pool_index(), j in pool_index()) {
        let (q, m) = &loop_pool()[i];
        let others = loops_at(q);
        let n = &others[j % others.len()];
        let mn = zero_skip(&compose(m, n));
        let e = eval(q, &mn);
        if e.is_path() {
            prop_assert!(e.is_loop());
            prop_assert_eq!(e.weight_sq.as_ref().unwrap().value(), &(weight(q, m) * weight(q, n)));
        }
    }

    #[test]
    fn inverse_inverts_weight(i in pool_index()) {
        let (q, m) = &loop_pool()[i];
        let inv = inverse(m);
        prop_assert!(eval(q, &inv).is_loop());
        prop_assert_eq!(weight(q, &inv), weight(q, m).recip());
        prop_assert_eq!(zero_skip(&compose(m, &inv)), Path::trivial());
        prop_assert_eq!(inverse(&inv), m.clone());
    }

    #[test]
    fn composition_is_associative(i in pool_index(), j in pool_index(), k in pool_index()) {
        let (a, b, c) = (&loop_pool()[i].1, &loop_pool()[j].1, &loop_pool()[k].1);
        prop_assert_eq!(compose(&compose(a, b), c), compose(a, &compose(b, c)));
        prop_assert_eq!(compose(a, &Path::trivial()), a.clone());
        prop_assert_eq!(compose(&Path::trivial(), a), a.clone());
    }

    #[test]
    fn loop_difference_reconstructs(i in pool_index(), n in entries(4)) {
        let (q, l) = &loop_pool()[i];
        let n = Path::from_i64s(&n);
        let m = zero_skip(&compose(l, &n));
        let (em, en) = (eval(q, &m), eval(q, &n));
        prop_assume!(em.is_path() && en.is_path() && is_proper(&m) && is_proper(&n));
        prop_assert_eq!(em.value(), en.value());
        let u = loop_difference(q, &m, &n).unwrap();
        prop_assert!(eval(q, &u).is_loop());
        prop_assert_eq!(zero_skip(&compose(&u, &n)), m.clone());
        prop_assert_eq!(weight(q, &u), weight(q, &m) / weight(q, &n));
    }

    #[test]
    fn rescale_round_trip(i in pool_index(), r in 1i64..=4, r2 in 1i64..=4, neg in any::<bool>()) {
        let (q, m) = &loop_pool()[i];
        let s = if neg { -1 } else { 1 };
        let (r, r2) = (BigRational::from_integer((s * r).into()), BigRational::from_integer((s * r2).into()));
        let up = rescale_loop(q, m, &r, &r2).unwrap();
        let e = eval(&up.q, &up.path);
        prop_assert!(e.is_loop());
        prop_assert_eq!(e.weight_sq.unwrap(), up.weight_sq.clone());
        let back = rescale_loop(&up.q, &up.path, &r.recip(), &r2.recip()).unwrap();
        prop_assert_eq!(&back.q, q);
        prop_assert_eq!(&back.path, m);
        prop_assert_eq!(back.weight_sq.value(), &weight(q, m));
    }

    #[test]
    fn no_small_values_from_four_up(b in 1i64..=5, extra in 0i64..=12, m in entries(7)) {
        // every entry non-zero, the last one included
        prop_assume!(m.iter().all(|&x| x != 0));
        let q = Conductor::ratio(4 * b + extra, b);
        let m = Path::from_i64s(&m);
        let e = eval(&q, &m);
        if e.is_path() {
            prop_assert!(e.value().unwrap().abs() > BigRational::new(1.into(), 2.into()));
        }
    }

    #[test]
    fn certificate_lines_round_trip(i in pool_index()) {
        let (q, m) = &loop_pool()[i];
        if let Ok(c) = Certificate::for_loop(q, m, Method::Diophantine) {
            let back = Certificate::from_line(&c.to_line()).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert!(back.verify_standalone().is_ok());
        }
    }
}

#[test]
fn no_loops_from_four_up() {
    for (a, b) in [(4, 1), (9, 2), (13, 3), (17, 4), (5, 1), (21, 5)] {
        let out = brute_force_enum(&Conductor::ratio(a, b), 4, 8);
        assert!(out.loops_found.is_empty(), "{a}/{b}: {:?}", out.loops_found);
    }
}

#[test]
fn odd_lengths_empty_for_non_unit_numerator() {
    let budget = SearchBudget::default().with_entry_bound(6);
    for (a, b) in [(2, 3), (3, 2), (5, 4), (7, 3), (3, 8), (9, 7)] {
        let q = Conductor::ratio(a, b);
        let brute = brute_force_enum(&q, 5, 6);
        assert!(brute.loops_found.iter().all(|l| l.path.length() % 2 == 0), "{a}/{b}");
        for k in [1, 3, 5] {
            let out = diophantine_search(a, b, k, &budget).unwrap();
            assert!(out.exhaustive && out.loops_found.is_empty(), "{a}/{b} k={k}");
        }
    }
    // With a = 1 odd loops exist: (b, -1).
    let unit = brute_force_enum(&Conductor::ratio(1, 3), 1, 3);
    assert!(!unit.loops_found.is_empty());
}

#[test]
fn weight_is_one_on_trivial_loop() {
    let e = eval(&Conductor::ratio(2, 3), &Path::trivial());
    assert!(e.is_loop());
    assert!(e.weight_sq.as_ref().unwrap().value().is_one());
    assert_eq!(Path::trivial().entries(), &[BigInt::zero()]);
}
