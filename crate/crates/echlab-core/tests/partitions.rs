use echlab_core::rotation::{cz_index, partition_negative, partition_positive, partition_properties};
use echlab_core::Rotation;
use proptest::prelude::*;

/// Column tops (upper) or bottoms (lower) for θ = u/v, by integer arithmetic.
/// Elliptic rationals (v ∉ {1, 2}) exclude on-line points from the upper side.
fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn exact_columns(u: i64, v: i64, m: i64, upper: bool) -> Vec<i64> {
    let g = gcd(u, v);
    let (u, v) = (u / g, v / g);
    let elliptic = v > 2;
    (0..=m)
        .map(|x| {
            let t = u.rem_euclid(v) * x;
            if x == 0 {
                0
            } else if upper {
                let f = t.div_euclid(v);
                if elliptic && t % v == 0 {
                    f - 1
                } else {
                    f
                }
            } else {
                (t + v - 1).div_euclid(v)
            }
        })
        .collect()
}

fn real_columns(theta: f64, m: i64, upper: bool) -> Vec<i64> {
    let t = theta - theta.floor();
    (0..=m).map(|x| if upper { (t * x as f64).floor() as i64 } else { (t * x as f64).ceil() as i64 }).collect()
}

/// O(m³) staircase oracle: a column point is on the boundary unless some chord
/// between two other column points passes strictly beyond it.
fn staircase(ys: &[i64], upper: bool) -> Vec<u32> {
    let m = ys.len() - 1;
    let mut on = vec![true; m + 1];
    for x in 1..m {
        'outer: for i in 0..x {
            for j in x + 1..=m {
                // compare (ys[x] − ys[i])·(j − i) with (ys[j] − ys[i])·(x − i)
                let lhs = (ys[x] - ys[i]) as i128 * (j - i) as i128;
                let rhs = (ys[j] - ys[i]) as i128 * (x - i) as i128;
                if (upper && lhs < rhs) || (!upper && lhs > rhs) {
                    on[x] = false;
                    break 'outer;
                }
            }
        }
    }
    let xs: Vec<usize> = (0..=m).filter(|&x| on[x]).collect();
    let mut parts: Vec<u32> = xs.windows(2).map(|w| (w[1] - w[0]) as u32).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

#[test]
fn hull_matches_staircase_on_rationals() {
    for v in 1..=12i64 {
        for u in -v..=2 * v {
            let th = Rotation::exact(u, v);
            for m in 1..=30i64 {
                let pp = partition_positive(&th, m as u64).unwrap();
                let pm = partition_negative(&th, m as u64).unwrap();
                assert_eq!(pp.parts(), staircase(&exact_columns(u, v, m, true), true).as_slice(), "p+ {u}/{v} m={m}");
                assert_eq!(pm.parts(), staircase(&exact_columns(u, v, m, false), false).as_slice(), "p- {u}/{v} m={m}");
            }
        }
    }
}

#[test]
fn spec_examples() {
    let p = |u, v, m| partition_positive(&Rotation::exact(u, v), m).unwrap().parts().to_vec();
    let n = |u, v, m| partition_negative(&Rotation::exact(u, v), m).unwrap().parts().to_vec();
    assert_eq!(p(1, 5, 4), vec![1, 1, 1, 1]);
    assert_eq!(p(7, 10, 2), vec![2]);
    assert_eq!(n(0, 1, 4), vec![1, 1, 1, 1]);
    assert_eq!(n(1, 2, 4), vec![2, 2]);
    assert_eq!(n(1, 5, 4), vec![4]);
    for m in 1..=9 {
        assert_eq!(p(3, 7, 1), vec![1]);
        assert_eq!(p(5, 1, m), vec![1; m as usize]);
    }
    let r = partition_properties(&Rotation::exact(1, 5), 4).unwrap();
    assert!(r.all_hold());
    assert_eq!(cz_index(&Rotation::exact(3, 10), 1), Ok(1));
    assert_eq!(cz_index(&Rotation::exact(0, 1), 5), Ok(0));
    assert_eq!(cz_index(&Rotation::exact(2, 3), 3), Ok(4));
}

#[test]
fn hyperbolic_clauses() {
    for k in -3..=3i64 {
        for m in 1..=40u64 {
            let ones = vec![1u32; m as usize];
            assert_eq!(partition_positive(&Rotation::exact(k, 1), m).unwrap().parts(), ones.as_slice());
            assert_eq!(partition_negative(&Rotation::exact(k, 1), m).unwrap().parts(), ones.as_slice());
            let mut twos = vec![2u32; m as usize / 2];
            if m % 2 == 1 {
                twos.push(1);
            }
            let half = Rotation::exact(2 * k + 1, 2);
            assert_eq!(partition_positive(&half, m).unwrap().parts(), twos.as_slice());
            assert_eq!(partition_negative(&half, m).unwrap().parts(), twos.as_slice());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn irrational_hull_matches_staircase(theta in -3.0f64..3.0, m in 1i64..40) {
        let th = Rotation::real(theta);
        if let (Ok(pp), Ok(pm)) = (partition_positive(&th, m as u64), partition_negative(&th, m as u64)) {
            prop_assert_eq!(pp.parts().to_vec(), staircase(&real_columns(theta, m, true), true));
            prop_assert_eq!(pm.parts().to_vec(), staircase(&real_columns(theta, m, false), false));
            prop_assert_eq!(pp.total() as i64, m);
            prop_assert_eq!(pm.total() as i64, m);
        }
    }

    #[test]
    fn partrev_on_irrationals(theta in -3.0f64..3.0, m in 2u64..50) {
        if let Ok(r) = partition_properties(&Rotation::real(theta), m) {
            prop_assert!(r.all_hold(), "{:?}", r);
        }
    }

    #[test]
    fn partrev_on_elliptic_rationals(v in 3i64..=12, u in -36i64..36, m in 2u64..=50) {
        prop_assume!(v / gcd(u, v) > 2);
        let r = partition_properties(&Rotation::exact(u, v), m).unwrap();
        prop_assert!(r.all_hold(), "{:?}", r);
    }

    #[test]
    fn elliptic_clause(m in 1u64..60, frac in 0.0f64..1.0, k in -2i64..3) {
        let theta = k as f64 + frac / m as f64;
        if let Ok(p) = partition_positive(&Rotation::real(theta), m) {
            prop_assert_eq!(p.parts().to_vec(), vec![1u32; m as usize]);
        }
    }

    #[test]
    fn cz_parity_and_growth(u in -60i64..60, v in 1i64..=12, m in 1u64..=50) {
        let cz = cz_index(&Rotation::exact(u, v), m).unwrap();
        let integral = (u * m as i64) % v == 0;
        prop_assert_eq!(cz.rem_euclid(2) == 1, !integral);
        let theta = u as f64 / v as f64;
        prop_assert!((cz as f64 / (2.0 * m as f64) - theta).abs() <= 1.0 / m as f64);
    }
}
