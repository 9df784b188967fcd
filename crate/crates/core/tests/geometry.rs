//! Properties of the polar geometry, its exports and the Hausdorff distance.

use attractor_lab::arithmetic::{QuadSurd, RotationNumber};
use attractor_lab::brjuno::ArithmeticClass;
use attractor_lab::geometry::{
    attractor_geometry, attractor_geometry_for, geometry_expansion, hausdorff_distance, parse_csv, render_ppm,
    theta_of, to_csv, AttractorGeometry, GeometryMeta, PolarRecord, RasterConfig, RasterMode,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn surd() -> impl Strategy<Value = QuadSurd> {
    (-60i64..60, 1i64..12, 2i64..300, 1i64..80)
        .prop_filter_map("perfect square radicand", |(p, q, d, r)| QuadSurd::from_i64(p, q, d, r).ok())
}

fn synthetic(radii: Vec<(f64, f64)>) -> AttractorGeometry {
    let k = radii.len();
    AttractorGeometry {
        alpha_desc: "synthetic".into(),
        depth: 1,
        grid: 2,
        class: ArithmeticClass::BrjunoNotHerman,
        r_alpha: 0.0,
        sup_b: 0.0,
        partial_brjuno: 0.0,
        converged: true,
        invariant_t: None,
        records: radii
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| PolarRecord {
                theta: theta_of(i as f64 / k as f64),
                r_inner: a.min(b),
                r_outer: a.max(b),
            })
            .collect(),
    }
}

fn radii(k: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), k)
}

fn geometry_of(s: &QuadSurd, depth: usize) -> AttractorGeometry {
    let nie = geometry_expansion(&RotationNumber::surd(s.clone()), depth).unwrap();
    attractor_geometry_for(&nie, ArithmeticClass::Herman, depth, 256, 512).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_angle_carries_one_segment(s in surd()) {
        let g = geometry_of(&s, 10);
        for (i, r) in g.records.iter().enumerate() {
            prop_assert_eq!(r.theta, theta_of(i as f64 / 256.0));
            prop_assert!(0.0 <= r.r_inner && r.r_inner <= r.r_outer, "{:?}", r);
        }
    }

    #[test]
    fn geometry_has_period_one(s in surd(), k in -5i64..5) {
        let g = geometry_of(&s, 10);
        let h = geometry_of(&s.add_int(&k.into()), 10);
        prop_assert_eq!(to_csv(&g), to_csv(&h));
    }

    #[test]
    fn csv_round_trip(rs in radii(64)) {
        let g = synthetic(rs);
        prop_assert_eq!(parse_csv(&to_csv(&g)).unwrap(), g.records.clone());
    }

    #[test]
    fn sidecar_round_trip(rs in radii(16), t in proptest::option::of(0.01..1.0f64)) {
        let mut g = synthetic(rs);
        g.invariant_t = t;
        let json = serde_json::to_string(&g.meta()).unwrap();
        let meta: GeometryMeta = serde_json::from_str(&json).unwrap();
        let back = AttractorGeometry::from_parts(&meta, parse_csv(&to_csv(&g)).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn hausdorff_is_a_symmetric_distance(a in radii(48), b in radii(48)) {
        let (g, h) = (synthetic(a), synthetic(b));
        prop_assert!(hausdorff_distance(&g, &g).unwrap() <= 4.0 * f64::EPSILON);
        let d = hausdorff_distance(&g, &h).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!((d - hausdorff_distance(&h, &g).unwrap()).abs() <= 1e-15);
    }

    #[test]
    fn radial_scaling_moves_by_at_most_the_scale(a in radii(48), c in 0.5..1.5f64) {
        let g = synthetic(a.clone());
        let h = synthetic(a.into_iter().map(|(x, y)| (c * x, c * y)).collect());
        let d = hausdorff_distance(&g, &h).unwrap();
        let r_max = g.records.iter().map(|r| r.r_outer).fold(0.0, f64::max);
        prop_assert!(d <= (c - 1.0).abs() * r_max + 1e-12, "{} > {}", d, (c - 1.0).abs() * r_max);
    }

    #[test]
    fn raster_covers_whole_segments(rs in proptest::collection::vec((0.1..0.45f64, 0.55..0.9f64), 8)) {
        let g = synthetic(rs);
        let size = 256;
        let cfg = RasterConfig { width: size, height: size, mode: RasterMode::Attractor, view_radius: Some(1.0) };
        let ppm = render_ppm(&g, &cfg);
        let header = format!("P6\n{size} {size}\n255\n").len();
        for r in &g.records {
            for s in 0..50 {
                let rho = r.r_inner + (r.r_outer - r.r_inner) * s as f64 / 49.0;
                let (x, y) = (rho * r.theta.cos(), rho * r.theta.sin());
                let col = (((x + 1.0) / 2.0) * size as f64).floor() as usize;
                let row = (((1.0 - y) / 2.0) * size as f64).floor() as usize;
                let px = ppm[header + 3 * (row.min(size - 1) * size + col.min(size - 1))];
                prop_assert!(px < 255, "blank pixel on the segment at rho = {}, theta = {}", rho, r.theta);
            }
        }
    }
}

#[test]
fn nearby_rotation_numbers_give_nearby_attractors() {
    let golden = RotationNumber::surd(QuadSurd::from_i64(-1, 1, 5, 2).unwrap());
    let (depth, k, m) = (20, 1024, 1024);
    let g = attractor_geometry(&golden, depth, k, m).unwrap();
    let g_value = (5f64.sqrt() - 1.0) / 2.0;
    let dists: Vec<f64> = [1e-3, 1e-6, 2f64.powi(-30)]
        .iter()
        .map(|&delta| {
            let lit = format!("{:.40}", g_value + delta);
            let a = RotationNumber::decimal(&lit, 256).unwrap();
            hausdorff_distance(&g, &attractor_geometry(&a, depth, k, m).unwrap()).unwrap()
        })
        .collect();
    assert!(dists.windows(2).all(|w| w[1] <= w[0]), "{dists:?}");
    assert!(dists[2] < 1e-3, "{dists:?}");
    // Sanity: the unit circle scale of the view.
    assert!(dists[0] < 2.0 * PI);
}
