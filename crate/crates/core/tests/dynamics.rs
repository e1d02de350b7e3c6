mod common;

use hurwitz_core::corpus;
use hurwitz_core::count::{enumerate_marked, Ceilings, Options};
use hurwitz_core::dynamics::{
    composite_fiber_count, degree_bounds, inverse_transform, iterate_cycle_report, iterate_counts,
    kc_conditions, polynomiality_index, single_valued_band, Classification,
};
use hurwitz_core::portrait::{relabel_target, validate_branching, Portrait};
use hurwitz_core::root::{BoundValue, RootValue};
use hurwitz_core::Error;
use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn small_portraits() -> Vec<Portrait> {
    let mut out = Vec::new();
    for d in 1..=3 {
        out.extend(corpus::portraits(d, 4));
    }
    out.extend(corpus::portraits(2, 5));
    out
}

/// Largest geometric mean of local degrees over periodic points, by walking
/// each point forward until it returns.
fn float_index(p: &Portrait) -> f64 {
    let data = p.data();
    let n = p.len();
    let mut best = 0.0f64;
    for x in 0..n {
        let mut y = x;
        let mut log_sum = 0.0;
        for len in 1..=n {
            log_sum += (data.ramification(y) as f64).ln();
            y = data.image(y);
            if y == x {
                best = best.max(log_sum / len as f64);
                break;
            }
        }
    }
    best
}

#[test]
fn index_matches_floating_point_oracle() {
    for p in small_portraits() {
        let r = polynomiality_index(&p).unwrap();
        assert!((r.pi.ln() - float_index(&p)).abs() < 1e-12, "{p:?}");
        assert!(r.cycles.iter().any(|c| RootValue::new(c.product.clone(), c.length).unwrap() == r.pi));
        let d = p.degree() as u64;
        let expected = if r.pi.is_one() {
            Classification::NoPeriodicCritical
        } else if r.pi.is_integer(d) {
            Classification::TopologicalPolynomialLike
        } else {
            Classification::Intermediate
        };
        assert_eq!(r.classification, expected);
    }
}

#[test]
fn index_is_invariant_under_renaming_points() {
    let mut rng = common::rng(21);
    for p in small_portraits() {
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.shuffle(&mut rng);
        let q = p.reorder_points(&order).unwrap();
        assert_eq!(polynomiality_index(&q).unwrap().pi, polynomiality_index(&p).unwrap().pi);
    }
}

#[test]
fn iterate_index_is_a_power() {
    for p in small_portraits() {
        let pi = polynomiality_index(&p).unwrap().pi;
        for n in 1..=4 {
            assert_eq!(iterate_cycle_report(&p, n).unwrap().pi, pi.pow(n), "{p:?}");
        }
    }
}

#[test]
fn index_extremes() {
    // PI = d exactly when some periodic point is fully ramified along a cycle
    // of length one, or the product over the cycle is d^len
    for p in small_portraits() {
        let r = polynomiality_index(&p).unwrap();
        let periodic_critical = r
            .cycles
            .iter()
            .any(|c| c.points.iter().any(|&x| p.data().ramification(x) > 1));
        assert_eq!(r.pi.is_one(), !periodic_critical, "{p:?}");
        let d = BigUint::from(p.degree());
        assert!(r.pi <= RootValue::new(d, 1).unwrap());
    }
}

/// The transposition swapping `p` and `F(p)` as an image list.
fn swap(n: usize, a: usize, b: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..n).collect();
    s.swap(a, b);
    s
}

#[test]
fn relabeling_fixes_a_maximal_point() {
    for p in small_portraits() {
        let data = p.data();
        let rmax = *data.ram().iter().max().unwrap();
        let x = (0..p.len()).find(|&a| data.ramification(a) == rmax).unwrap();
        let q = relabel_target(&p, &swap(p.len(), x, data.image(x))).unwrap();
        assert!(validate_branching(q.data()).ok);
        assert_eq!(q.data().image(x), x);
        assert_eq!(q.degree(), p.degree());
        let pi = polynomiality_index(&q).unwrap().pi;
        assert!(pi >= RootValue::integer(rmax as u64), "{p:?}");
    }
}

#[test]
fn relabeling_composes_right_to_left() {
    let mut rng = common::rng(22);
    for p in small_portraits().into_iter().take(200) {
        let n = p.len();
        let mut s: Vec<usize> = (0..n).collect();
        let mut t: Vec<usize> = (0..n).collect();
        s.shuffle(&mut rng);
        t.shuffle(&mut rng);
        let st: Vec<usize> = (0..n).map(|x| s[t[x]]).collect();
        let once = relabel_target(&p, &st).unwrap();
        let twice = relabel_target(&relabel_target(&p, &s).unwrap(), &t).unwrap();
        assert_eq!(once, twice);
        let id: Vec<usize> = (0..n).collect();
        assert_eq!(relabel_target(&p, &id).unwrap(), p);
    }
    assert!(relabel_target(&common::rabbit(), &[0, 0, 1, 2]).is_err());
}

#[test]
fn rabbit_relabeling_example() {
    let rabbit = common::rabbit();
    // swap 0 and c1 so that 0 becomes fixed
    let q = relabel_target(&rabbit, &[0, 2, 1, 3]).unwrap();
    assert_eq!(q.data().image(1), 1);
    assert_eq!(polynomiality_index(&q).unwrap().pi, RootValue::integer(2));
}

#[test]
fn three_point_portraits_are_rejected() {
    for p in corpus::portraits(2, 3) {
        assert!(p.validate().ok);
        assert!(matches!(polynomiality_index(&p), Err(Error::TooFewPoints(3))));
        assert!(kc_conditions(&p).is_err());
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn rat(n: i64, m: i64) -> BigRational {
    BigRational::new(n.into(), m.into())
}

proptest! {
    #[test]
    fn scaled_bound_rows_decrease(
        top in 1u64..50,
        extra in 0u64..5000,
        m in 1u64..40,
        l in 1u32..4,
        n in 4usize..8,
        pin in any::<bool>(),
    ) {
        let r = RootValue::new(m, l).unwrap();
        // theta0 = top * ceil(R^(n-3)) + extra satisfies the chain exactly
        let power = big(m).pow(n as u32 - 3);
        let mut root = power.nth_root(l);
        if root.pow(l) < power {
            root += 1u32;
        }
        let theta0 = big(top) * root + big(extra);
        let theta_top = big(top);
        let t = degree_bounds(&theta0, pin.then_some(&theta_top), &r, n).unwrap();
        prop_assert_eq!(t.rows.len(), n - 2);
        prop_assert_eq!(t.rows[0].pinned, true);
        prop_assert_eq!(t.rows[n - 3].pinned, pin);
        for row in &t.rows {
            prop_assert!(row.lower <= row.upper, "{:?}", row);
        }
        // row k times R^k
        let scaled = |b: &BoundValue, k: usize| {
            if b.root.is_one() {
                BoundValue::new(b.coeff.clone(), r.clone(), k as i64)
            } else {
                BoundValue::new(b.coeff.clone(), b.root.clone(), b.exponent + k as i64)
            }
        };
        for w in t.rows.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            prop_assert!(scaled(&b.upper, b.k) <= scaled(&a.upper, a.k));
            prop_assert!(b.upper <= a.upper);
            prop_assert!(b.lower <= a.lower);
        }
        let inv = inverse_transform(&t);
        prop_assert_eq!(inverse_transform(&inv), t);
    }
}

#[test]
fn contradictory_endpoints_are_reported() {
    let r = RootValue::integer(2);
    assert!(matches!(
        degree_bounds(&big(3), Some(&big(2)), &r, 4),
        Err(Error::BoundContradiction(_))
    ));
    assert!(degree_bounds(&big(4), Some(&big(2)), &r, 4).is_ok());
    assert!(matches!(degree_bounds(&big(4), None, &r, 3), Err(Error::TooFewPoints(3))));
}

#[test]
fn iterate_rows() {
    let rows = iterate_counts(&big(2), &big(1), 3);
    assert_eq!(rows, vec![(1, big(2), big(1)), (2, big(4), big(1)), (3, big(8), big(1))]);
    for (n, a, b) in iterate_counts(&big(6), &big(3), 5) {
        assert_eq!(a.nth_root(n), big(6));
        assert_eq!(b.nth_root(n), big(3));
    }
    assert!(iterate_counts(&big(1), &big(1), 5).iter().all(|(_, a, b)| *a == big(1) && *b == big(1)));
}

#[test]
fn rabbit_composite_matches_square() {
    let data = common::rabbit().data().clone();
    let set = enumerate_marked(&data, &Options::serial()).unwrap();
    let two = composite_fiber_count(&set, 2, &Ceilings::default()).unwrap();
    assert_eq!(two, big(4));
    assert_eq!(iterate_counts(&big(2), &big(1), 2)[1].1, two);
    let tight = Ceilings {
        max_tuples: 3,
        ..Ceilings::default()
    };
    assert!(matches!(composite_fiber_count(&set, 2, &tight), Err(Error::Capacity { .. })));
}

#[test]
fn kc_conditions_on_fixtures() {
    let rabbit = kc_conditions(&common::rabbit()).unwrap();
    assert!(rabbit.holds());
    assert_eq!(rabbit.ell0, Some(1));
    let zi = kc_conditions(&common::z2_plus_i()).unwrap();
    assert!(zi.holds());
    let id = kc_conditions(&common::identity_portrait()).unwrap();
    assert!(!id.kc1);
}

#[test]
fn band_rows() {
    let b = single_valued_band(2, 4, 1).unwrap();
    assert_eq!(b.rows.len(), 2);
    for row in &b.rows {
        assert_eq!(row.lower, row.upper);
    }
    assert_eq!(b.rows[1].upper.coeff, rat(1, 1));
    let b = single_valued_band(2, 5, 2).unwrap();
    assert_eq!(b.rows[1].lower.coeff, rat(1, 2));
    assert_eq!(b.rows[1].upper.coeff, rat(1, 1));
    assert!((b.rows[1].lower.to_f64() - 0.5 * 2f64.ln()).abs() < 1e-12);
    let b = single_valued_band(3, 4, 1).unwrap();
    assert_eq!(b.lyapunov.coeff, rat(1, 2));
    assert_eq!(b.lyapunov.d, 3);
    assert!(single_valued_band(2, 4, 0).is_err());
    assert!(single_valued_band(1, 4, 1).is_err());
}
