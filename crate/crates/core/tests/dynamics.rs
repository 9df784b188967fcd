//! Properties of the model map on the attractor.

use attractor_lab::arithmetic::{expand_nearest_integer, NearestIntegerExpansion, QuadSurd, RotationNumber};
use attractor_lab::coords::HalfPlanePoint;
use attractor_lab::dynamics::{orbit, t_lift, t_map, ModelPoint, DEFAULT_DEPTH_CAP};
use attractor_lab::tiling::{limit_profile, shifted_floor_limit, HeightProfile, ProfileKind};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn golden() -> &'static NearestIntegerExpansion {
    static E: OnceLock<NearestIntegerExpansion> = OnceLock::new();
    E.get_or_init(|| expand_nearest_integer(&RotationNumber::golden(), 64).unwrap())
}

fn golden_floor() -> &'static HeightProfile {
    static F: OnceLock<HeightProfile> = OnceLock::new();
    F.get_or_init(|| limit_profile(ProfileKind::FloorB, -1, golden(), 1e-10, 25, 4096).unwrap())
}

fn expansion(s: &QuadSurd) -> NearestIntegerExpansion {
    expand_nearest_integer(&RotationNumber::surd(s.clone()), 64).unwrap()
}

fn surd() -> impl Strategy<Value = QuadSurd> {
    (-60i64..60, 1i64..12, 2i64..300, 1i64..80)
        .prop_filter_map("perfect square radicand", |(p, q, d, r)| QuadSurd::from_i64(p, q, d, r).ok())
}

/// Angular distance on the unit circle of abscissas.
fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubling_the_depth_cap_moves_little(s in surd(), x in 0.0..1.0f64, lift in 0.0..3.0f64) {
        let e = expansion(&s);
        let floor = limit_profile(ProfileKind::FloorB, -1, &e, 1e-8, 12, 512).unwrap();
        let w = HalfPlanePoint::new(x, floor.eval(x) + lift);
        for cap in [5, 10] {
            let a = t_lift(w, &e, cap).unwrap();
            let b = t_lift(w, &e, 2 * cap).unwrap();
            let d = circle_dist(a.x, b.x).hypot(a.y - b.y);
            prop_assert!(d <= 30.0 * 0.9f64.powi(cap as i32), "cap {}: {}", cap, d);
        }
    }

    #[test]
    fn lift_is_rotation_in_the_abscissa(s in surd(), x in 0.0..1.0f64, lift in 0.0..3.0f64) {
        let e = expansion(&s);
        let floor = limit_profile(ProfileKind::FloorB, -1, &e, 1e-8, 12, 512).unwrap();
        let alpha = RotationNumber::surd(s).value_f64();
        let w = HalfPlanePoint::new(x, floor.eval(x) + lift);
        let v = t_lift(w, &e, DEFAULT_DEPTH_CAP).unwrap();
        prop_assert!(circle_dist(v.x, x - alpha) < 1e-9);
    }
}

#[test]
fn distinct_points_have_distinct_images() {
    let e = golden();
    let floor = golden_floor();
    let points: Vec<ModelPoint> = (0..400)
        .map(|i| {
            let x = (i as f64 + 0.5) / 400.0;
            let y = floor.eval(x) + 0.01 * (i % 7) as f64;
            ModelPoint::from_lift(HalfPlanePoint::new(x, y))
        })
        .collect();
    let images: Vec<ModelPoint> = points.iter().map(|&z| t_map(z, e, DEFAULT_DEPTH_CAP).unwrap()).collect();
    let mut min = f64::INFINITY;
    for i in 0..images.len() {
        for j in 0..i {
            min = min.min(images[i].dist(&images[j]));
        }
    }
    assert!(min > 0.0);
}

#[test]
fn floor_is_mapped_into_itself() {
    let e = golden();
    let floor = golden_floor();
    let tol = floor.liminf_slack(1);
    let mut worst: f64 = 0.0;
    for i in 0..256 {
        let x = (i as f64 + 0.25) / 256.0;
        let v = t_lift(HalfPlanePoint::new(x, floor.eval(x)), e, DEFAULT_DEPTH_CAP).unwrap();
        worst = worst.max((v.y - floor.eval(v.x)).abs());
    }
    assert!(worst <= tol, "max height mismatch {worst:.3e} against {tol:.3e}");
}

#[test]
fn shifted_floor_is_mapped_into_itself() {
    let e = golden();
    let y0 = (1.0f64 / 0.8).ln() / (2.0 * PI);
    let floor = shifted_floor_limit(y0, e, 1e-10, 25, 4096).unwrap();
    let tol = floor.liminf_slack(1);
    let mut worst: f64 = 0.0;
    for i in 0..256 {
        let x = (i as f64 + 0.25) / 256.0;
        let v = t_lift(HalfPlanePoint::new(x, floor.eval(x)), e, DEFAULT_DEPTH_CAP).unwrap();
        worst = worst.max((v.y - floor.eval(v.x)).abs());
    }
    assert!(worst <= tol, "max height mismatch {worst:.3e} against {tol:.3e}");
}

#[test]
fn orbit_of_one_fills_the_circle_along_the_floor() {
    let n = 20_000;
    let e = golden();
    let floor = golden_floor();
    let pts = orbit(ModelPoint { theta: 0.0, rho: 1.0 }, n, e, DEFAULT_DEPTH_CAP).unwrap();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.lift().x).collect();
    xs.sort_by(f64::total_cmp);
    let max_gap = xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(1.0 - xs[xs.len() - 1] + xs[0], f64::max);
    // Three-gap theorem: a golden rotation leaves gaps below 3/N.
    assert!(max_gap <= 3.0 / n as f64, "largest gap {max_gap:.3e}");
    let tol = floor.liminf_slack(1);
    let worst = pts
        .iter()
        .map(|p| {
            let w = p.lift();
            (w.y - floor.eval(w.x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= tol, "orbit leaves the floor by {worst:.3e} (tolerance {tol:.3e})");
}
