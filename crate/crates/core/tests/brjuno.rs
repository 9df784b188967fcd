//! Properties of `h_r`, the Brjuno series and the classifier.

use attractor_lab::arithmetic::{
    expand_nearest_integer, expand_standard, index_map_c, Generator, QuadSurd, RotationNumber,
};
use attractor_lab::brjuno::{
    brjuno_partial, brjuno_standard_partial, classify, h, h_inv, ArithmeticClass, ClassifyConfig,
};
use proptest::prelude::*;
use std::f64::consts::E;

fn surd() -> impl Strategy<Value = QuadSurd> {
    (-60i64..60, 1i64..12, 2i64..300, 1i64..80)
        .prop_filter_map("perfect square radicand", |(p, q, d, r)| QuadSurd::from_i64(p, q, d, r).ok())
}

/// `alpha_0` of a surd, itself a surd in `(0, 1/2)`.
fn reduced(s: &QuadSurd) -> QuadSurd {
    let e = expand_nearest_integer(&RotationNumber::surd(s.clone()), 1).unwrap();
    e.levels[0].exact.clone().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn h_between_affine_and_exponential(r in 1e-12..0.999f64, y in -30.0..600.0f64) {
        let v = h(r, y);
        prop_assert!(v >= (y + 1.0) * (1.0 - 1e-12) - 1e-12);
        prop_assert!(v <= y.exp() * (1.0 + 1e-12));
    }

    #[test]
    fn h_slope_at_least_one(r in 1e-12..0.999f64, y in 0.0..600.0f64, d in -6.0..-2.0f64) {
        let d = 10f64.powf(d) * (1.0 + y);
        let slope = (h(r, y + d) - h(r, y)) / d;
        prop_assert!(slope >= 1.0 - 1e-6, "slope {} at y = {}", slope, y);
    }

    #[test]
    fn h_inverse_round_trip(r in 1e-12..0.999f64, y in 0.0..600.0f64) {
        let x = h_inv(r, h(r, y)).unwrap();
        prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y));
    }

    #[test]
    fn block_comparison(r1 in 0.5001..0.9999f64, y in 2.0..25.0f64) {
        let y = E.powf(y);
        let r2 = 1.0 / r1 - 1.0;
        let d = (h_inv(r1 * r2, y).unwrap() - h_inv(r1, h_inv(r2, y).unwrap()).unwrap()).abs();
        prop_assert!(d <= 1.0 + (-1.0f64).exp(), "difference {}", d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cocycle_at_matched_truncation(s in surd()) {
        let a = reduced(&s);
        let n = 30;
        let e = expand_nearest_integer(&RotationNumber::surd(a.clone()), n).unwrap();
        let f = expand_nearest_integer(&RotationNumber::surd(a.recip()), n - 1).unwrap();
        let alpha = a.to_f64();
        let lhs = brjuno_partial(&e, n).unwrap().sum();
        let rhs = alpha * brjuno_partial(&f, n - 1).unwrap().sum() + (1.0 / alpha).ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn partial_sums_increase(s in surd()) {
        let e = expand_nearest_integer(&RotationNumber::surd(s), 30).unwrap();
        let b = brjuno_partial(&e, 30).unwrap();
        prop_assert!(b.terms.iter().all(|t| *t > 0.0));
        // Strict growth wherever the term is visible at double precision.
        for (w, t) in b.partial_sums.windows(2).zip(&b.terms[1..]) {
            prop_assert!(w[1] >= w[0]);
            if *t > 4.0 * f64::EPSILON * w[0] {
                prop_assert!(w[1] > w[0]);
            }
        }
    }

    #[test]
    fn modified_and_standard_series_stay_close(s in surd()) {
        let a = RotationNumber::surd(s);
        let n = 30;
        let e = expand_nearest_integer(&a, n).unwrap();
        let c = index_map_c(&e, n as i64 - 1).unwrap() as usize;
        let se = expand_standard(&a, c + 1).unwrap();
        let b = brjuno_partial(&e, n).unwrap().sum();
        let bs = brjuno_standard_partial(&se, c + 1).unwrap().sum();
        // The tails beyond both truncations are below 1e-6 for surds.
        prop_assert!((b - bs).abs() <= 29.0 + 1e-6, "|{} - {}|", b, bs);
    }
}

fn classes_at(a: &RotationNumber, depths: &[usize]) -> Vec<ArithmeticClass> {
    depths
        .iter()
        .map(|&d| {
            let cfg = ClassifyConfig {
                depth: d,
                ..ClassifyConfig::default()
            };
            classify(a, &cfg).class
        })
        .collect()
}

#[test]
fn classification_never_jumps_between_extremes() {
    use ArithmeticClass::*;
    let mut alphas: Vec<RotationNumber> = ["golden", "sqrt2", "tower-nonbrjuno", "std-tower-BnotH"]
        .iter()
        .map(|g| RotationNumber::generator(Generator::parse(g).unwrap()))
        .collect();
    alphas.push(RotationNumber::surd(QuadSurd::from_i64(3, 1, 7, 11).unwrap()));
    for a in &alphas {
        let classes = classes_at(a, &[8, 16, 32, 64]);
        for w in classes.windows(2) {
            let jump = matches!((w[0], w[1]), (Herman, NonBrjuno) | (NonBrjuno, Herman));
            assert!(!jump, "{}: {:?}", a.desc(), classes);
            if w[0] != Undetermined {
                assert!(w[1] == w[0] || w[0] == BrjunoNotHerman, "{}: {:?}", a.desc(), classes);
            }
        }
    }
}
