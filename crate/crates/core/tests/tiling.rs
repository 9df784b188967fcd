//! Properties of the height profiles.

use attractor_lab::arithmetic::{expand_nearest_integer, QuadSurd, RotationNumber};
use attractor_lab::brjuno::brjuno_partial;
use attractor_lab::tiling::{limit_profile, profile_at_depth, ProfileKind, DEFAULT_DEPTH, DEFAULT_RESOLUTION};
use proptest::prelude::*;
use std::f64::consts::PI;

fn surd() -> impl Strategy<Value = QuadSurd> {
    (-60i64..60, 1i64..12, 2i64..300, 1i64..80)
        .prop_filter_map("perfect square radicand", |(p, q, d, r)| QuadSurd::from_i64(p, q, d, r).ok())
}

#[test]
fn floors_are_lower_semicontinuous_on_the_grid() {
    for a in [
        RotationNumber::golden(),
        RotationNumber::sqrt2(),
        RotationNumber::surd(QuadSurd::from_i64(3, 1, 7, 11).unwrap()),
    ] {
        let e = expand_nearest_integer(&a, 64).unwrap();
        let b = limit_profile(ProfileKind::FloorB, -1, &e, 1e-8, DEFAULT_DEPTH, DEFAULT_RESOLUTION).unwrap();
        let slack = b.liminf_slack(8);
        assert_eq!(b.liminf_violations(8, slack), 0, "{}", a.desc());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sup_of_floor_tracks_the_brjuno_sum(s in surd(), j in 1usize..14) {
        let e = expand_nearest_integer(&RotationNumber::surd(s), 64).unwrap();
        let b = profile_at_depth(ProfileKind::FloorB, -1, &e, j, 1024).unwrap();
        let d = (2.0 * PI * b.max() - brjuno_partial(&e, j).unwrap().sum()).abs();
        prop_assert!(d <= 8.0 + 2.0 * PI, "depth {}: {}", j, d);
    }

    #[test]
    fn negation_mirrors_the_floor(s in surd(), j in 1usize..14) {
        let e = expand_nearest_integer(&RotationNumber::surd(s), 64).unwrap();
        let m = 1024;
        let b = profile_at_depth(ProfileKind::FloorB, -1, &e, j, m).unwrap();
        let c = profile_at_depth(ProfileKind::FloorB, -1, &e.negated(), j, m).unwrap();
        for k in 0..m {
            let (u, v) = (c.samples[k], b.samples[(m - k) % m]);
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()), "k = {}: {} vs {}", k, u, v);
        }
    }

    #[test]
    fn floor_never_exceeds_ceiling(s in surd(), j in 1usize..14) {
        let e = expand_nearest_integer(&RotationNumber::surd(s), 64).unwrap();
        let b = profile_at_depth(ProfileKind::FloorB, -1, &e, j, 512).unwrap();
        let p = profile_at_depth(ProfileKind::CeilingP, -1, &e, j, 512).unwrap();
        prop_assert!(b.samples.iter().zip(&p.samples).all(|(x, y)| x <= y));
    }
}
