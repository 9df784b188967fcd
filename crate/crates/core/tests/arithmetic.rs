//! Properties of the nearest-integer and standard expansions.

use attractor_lab::arithmetic::{
    expand_nearest_integer, expand_nearest_integer_partial, expand_standard, index_map_c,
    verify_expansion_relations, NearestIntegerExpansion, QuadSurd, RotationNumber, Sign,
};
use attractor_lab::Error;
use proptest::prelude::*;

fn surd() -> impl Strategy<Value = QuadSurd> {
    (-60i64..60, prop_oneof![-12i64..0, 1i64..12], 2i64..300, 1i64..80)
        .prop_filter_map("perfect square radicand", |(p, q, d, r)| QuadSurd::from_i64(p, q, d, r).ok())
}

/// Decimal literals with 40 to 70 significant digits.
fn decimal() -> impl Strategy<Value = String> {
    (-3i64..3, proptest::collection::vec(0u8..10, 40..70)).prop_map(|(int, digits)| {
        let frac: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        format!("{int}.{frac}7")
    })
}

fn check_levels(e: &NearestIntegerExpansion) -> Result<(), TestCaseError> {
    for (n, l) in e.levels.iter().enumerate() {
        prop_assert!(l.alpha_f64 > 0.0 && l.alpha_f64 < 0.5, "alpha_{} = {}", n, l.alpha_f64);
        let a = l.digit.to_f64();
        prop_assert!(a >= 2.0, "a_{} = {}", n, a);
        prop_assert!(l.beta_f64 <= 0.5f64.powi(n as i32 + 1) * (1.0 + 1e-12));
        if let Some(next) = e.levels.get(n + 1) {
            let rest = 1.0 / l.alpha_f64 - a;
            let eps = l.sign_next.as_f64();
            prop_assert!((rest - eps * next.alpha_f64).abs() <= 1e-12 / l.alpha_f64);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn surd_levels_satisfy_the_recursion_exactly(s in surd()) {
        let e = expand_nearest_integer(&RotationNumber::surd(s), 30).unwrap();
        check_levels(&e)?;
        for pair in e.levels.windows(2) {
            let a = pair[0].digit.int().unwrap();
            let rest = pair[0].exact.as_ref().unwrap().recip().sub_int(a);
            prop_assert_eq!(&rest.abs(), pair[1].exact.as_ref().unwrap());
            prop_assert_eq!(rest.is_positive(), pair[0].sign_next == Sign::Plus);
        }
    }

    #[test]
    fn decimal_levels_satisfy_the_recursion(lit in decimal()) {
        match expand_nearest_integer_partial(&RotationNumber::decimal(&lit, 192).unwrap(), 60) {
            Ok(e) => {
                prop_assert!(e.certified_depth() < 60);
                check_levels(&e)?;
            }
            Err(Error::RationalDetected { .. }) => {}
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        }
    }

    #[test]
    fn expansion_is_deterministic(s in surd()) {
        let a = RotationNumber::surd(s);
        let e1 = expand_nearest_integer(&a, 20).unwrap();
        let e2 = expand_nearest_integer(&a, 20).unwrap();
        prop_assert_eq!(e1.digits(), e2.digits());
        for (x, y) in e1.levels.iter().zip(&e2.levels) {
            prop_assert_eq!(format!("{:?}", x.alpha), format!("{:?}", y.alpha));
            prop_assert_eq!(x.beta_f64.to_bits(), y.beta_f64.to_bits());
        }
    }

    #[test]
    fn integer_shift_only_moves_the_leading_digit(s in surd(), k in -20i64..20) {
        let e = expand_nearest_integer(&RotationNumber::surd(s.clone()), 15).unwrap();
        let f = expand_nearest_integer(&RotationNumber::surd(s.add_int(&k.into())), 15).unwrap();
        prop_assert_eq!(&f.a_minus1 - &e.a_minus1, k.into());
        prop_assert_eq!(f.eps0, e.eps0);
        prop_assert_eq!(f.digits(), e.digits());
        let g = e.plus_int(k);
        prop_assert_eq!(&g.a_minus1, &f.a_minus1);
    }

    #[test]
    fn negation_flips_the_leading_data(s in surd()) {
        let e = expand_nearest_integer(&RotationNumber::surd(s.clone()), 15).unwrap();
        let f = expand_nearest_integer(&RotationNumber::surd(s.neg()), 15).unwrap();
        let g = e.negated();
        prop_assert_eq!(&g.a_minus1, &f.a_minus1);
        prop_assert_eq!(g.eps0, f.eps0);
        prop_assert_eq!(g.digits(), f.digits());
    }

    #[test]
    fn cross_expansion_identities(s in surd()) {
        let a = RotationNumber::surd(s);
        let depth = 20;
        let e = expand_nearest_integer(&a, depth).unwrap();
        let c = index_map_c(&e, depth as i64 - 1).unwrap();
        let se = expand_standard(&a, c as usize + 2).unwrap();
        let bound = 2f64.powi(-(a.bits() as i32) / 2);
        for n in -1..depth as i64 - 2 {
            let rep = verify_expansion_relations(&e, &se, n).unwrap();
            prop_assert!(rep.max_residual() <= bound, "level {}: {:?}", n, rep);
            prop_assert_ne!(rep.exact_i, Some(false));
        }
    }
}

#[test]
fn rationals_and_budgets_are_reported() {
    let r = RotationNumber::decimal("0.375", 128).unwrap();
    assert!(matches!(expand_nearest_integer(&r, 10), Err(Error::RationalDetected { .. })));
    let d = RotationNumber::decimal("0.41421356237309504880168872420969807856967187537694", 128).unwrap();
    assert!(matches!(expand_nearest_integer(&d, 200), Err(Error::PrecisionExhausted { .. })));
    let e = expand_nearest_integer_partial(&d, 200).unwrap();
    assert!(e.is_truncated() && e.certified_depth() > 10);
}
