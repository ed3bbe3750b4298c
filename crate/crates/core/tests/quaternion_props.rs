use proptest::prelude::*;
use rug::Rational;
use superspecial::quaternion::{build_maximal_order, Order, Quaternion};

fn order() -> &'static Order {
    static O: std::sync::OnceLock<Order> = std::sync::OnceLock::new();
    O.get_or_init(|| build_maximal_order().unwrap())
}

fn elt() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-30i128..=30).prop_map(|c| order().element(&c))
}

fn rational_quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4((-50i64..=50, 1i64..=12)).prop_map(|c| {
        Quaternion::from_coords(c.map(|(n, d)| Rational::from((n, d))))
    })
}

proptest! {
    #[test]
    fn nrd_is_multiplicative(a in rational_quat(), b in rational_quat()) {
        prop_assert_eq!((&a * &b).nrd(), a.nrd() * b.nrd());
    }

    #[test]
    fn conjugation_reverses_products(a in rational_quat(), b in rational_quat()) {
        prop_assert_eq!((&a * &b).conj(), &b.conj() * &a.conj());
    }

    #[test]
    fn order_is_closed(a in elt(), b in elt()) {
        prop_assert!(order().contains(&(&a * &b)));
        prop_assert!(order().contains(&a.conj()));
    }

    #[test]
    fn rosati_is_adjoint(a in elt(), x in elt(), y in elt()) {
        let o = order();
        let lhs = o.riemann_form(&(&a * &x), &y);
        let rhs = o.riemann_form(&x, &(&o.involution_prime(&a) * &y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rosati_is_positive(a in elt()) {
        prop_assume!(!a.is_zero());
        let o = order();
        prop_assert!((&a * &o.involution_prime(&a)).trd() > 0);
    }

    #[test]
    fn riemann_form_is_alternating_and_integral(a in elt(), b in elt()) {
        let o = order();
        prop_assert_eq!(o.riemann_form(&a, &a), 0);
        prop_assert_eq!(o.riemann_form(&a, &b), -o.riemann_form(&b, &a));
        prop_assert_eq!(o.riemann_form(&a, &b).denom().to_u32(), Some(1));
    }
}

#[test]
fn atkin_lehner_elements_normalise() {
    let o = order();
    for d in [2u32, 3, 6] {
        let chi = o.chi(d).unwrap();
        assert_eq!(chi.nrd(), d);
        assert!(o.normalizes(chi), "χ_{d} = {chi}");
    }
    assert_eq!(o.reduced_discriminant(), 6);
}
