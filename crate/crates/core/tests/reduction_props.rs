use proptest::prelude::*;
use rug::{Integer, Rational};
use superspecial::poly::{sign, QPoly};
use superspecial::reduction::{local_intersection, ProjPoint};

fn point() -> impl Strategy<Value = ProjPoint> {
    prop_oneof![
        1 => Just(ProjPoint::Infinity),
        9 => (-500i64..500, 1i64..500).prop_map(|(n, d)| ProjPoint::Finite(Rational::from((n, d)))),
    ]
}

fn roots() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-60i64..60, 1i64..20), 1..5)
}

fn from_roots(rs: &[(i64, i64)]) -> (QPoly, Vec<Rational>) {
    let rs: Vec<Rational> = rs.iter().map(|&(n, d)| Rational::from((n, d))).collect();
    let f = rs.iter().fold(QPoly::constant(Rational::from(1)), |f, r| {
        f.mul(&QPoly::linear(Rational::from(1), Rational::from(-r)))
    });
    (f, rs)
}

proptest! {
    #[test]
    fn intersection_is_symmetric(x in point(), y in point(), p in prop::sample::select(vec![2u64, 3, 5, 7, 13])) {
        prop_assume!(x != y);
        prop_assert_eq!(local_intersection(&x, &y, p).unwrap(), local_intersection(&y, &x, p).unwrap());
    }

    #[test]
    fn newton_polygon_matches_root_valuations(rs in roots(), p in prop::sample::select(vec![2u64, 3, 5])) {
        prop_assume!(rs.iter().all(|&(n, _)| n != 0));
        let (f, rs) = from_roots(&rs);
        let pz = Integer::from(p);
        let mut want: Vec<Rational> = rs
            .iter()
            .map(|r| Rational::from(superspecial::arith::rational_valuation(r, &pz).unwrap()))
            .collect();
        let mut got: Vec<Rational> = f
            .newton_polygon(&pz)
            .into_iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s.unwrap(), m))
            .collect();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn resultant_sign_is_product_over_real_roots(rs in roots(), g in prop::collection::vec(-20i64..20, 2..5)) {
        let (f, rs) = from_roots(&rs);
        let g = QPoly::from_ints(&g);
        prop_assume!(!g.is_zero());
        let res = f.resultant(&g);
        let direct: Rational = rs.iter().map(|r| g.eval(r)).product();
        prop_assert_eq!(sign(&res), sign(&direct));
        prop_assert_eq!(res, direct);
    }
}

#[test]
fn resultant_sign_ignores_complex_pairs() {
    // f = (x² + 1)(x − 2): the conjugate pair contributes |g(i)|² > 0.
    let f = QPoly::from_ints(&[1, 0, 1]).mul(&QPoly::from_ints(&[-2, 1]));
    let g = QPoly::from_ints(&[-5, 1]);
    assert_eq!(sign(&f.resultant(&g)), sign(&g.eval(&Rational::from(2))));
}
