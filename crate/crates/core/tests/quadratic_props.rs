use proptest::prelude::*;
use rug::Integer;
use superspecial::quadratic::{class_number, eichler_symbol, is_square_mod, kronecker_i, quad_order_data};

fn brute_square(a: i64, m: i64) -> bool {
    (0..m).any(|x| (x * x - a).rem_euclid(m) == 0)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

proptest! {
    #[test]
    fn square_mod_is_multiplicative_over_crt(a in -5000i64..5000, m1 in 1i64..60, m2 in 1i64..60) {
        prop_assume!(gcd(m1, m2) == 1);
        let sq = |m: i64| is_square_mod(&Integer::from(a), &Integer::from(m));
        prop_assert_eq!(sq(m1 * m2), sq(m1) && sq(m2));
        prop_assert_eq!(sq(m1 * m2), brute_square(a, m1 * m2));
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_top(a in -300i64..300, b in -300i64..300, n in 1i64..500) {
        prop_assert_eq!(kronecker_i(a * b, n), kronecker_i(a, n) * kronecker_i(b, n));
    }
}

#[test]
fn kronecker_matches_exhaustive_squares() {
    for p in (3..200i64).filter(|&p| (2..p).all(|k| p % k != 0)) {
        for a in -199..200i64 {
            let want = if a.rem_euclid(p) == 0 {
                0
            } else if brute_square(a, p) {
                1
            } else {
                -1
            };
            assert_eq!(kronecker_i(a, p), want, "({a}/{p})");
        }
    }
}

#[test]
fn one_is_always_a_square() {
    for m in 1..500 {
        assert!(is_square_mod(&Integer::from(1), &Integer::from(m)));
    }
}

#[test]
fn class_numbers_count_reduced_forms() {
    // Count reduced forms directly: |b| ≤ a ≤ c, b ≥ 0 on the boundary.
    for d in (-2000i64..=-3).filter(|d| d.rem_euclid(4) <= 1) {
        let mut h = 0;
        let mut a = 1;
        while 3 * a * a <= -d {
            for b in -a + 1..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || (c == a && b < 0) || gcd(gcd(a, b), c) != 1 {
                    continue;
                }
                h += 1;
            }
            a += 1;
        }
        assert_eq!(class_number(d).0, h, "D = {d}");
    }
}

#[test]
fn cm_points_vanish_exactly_at_split_or_conductor_primes() {
    for d in (-3000i64..=-3).filter(|d| d.rem_euclid(4) <= 1) {
        let q = quad_order_data(d).unwrap();
        let blocked = eichler_symbol(d, 2) == 1 || eichler_symbol(d, 3) == 1;
        assert_eq!(q.s == 0, blocked, "D = {d}");
    }
}
