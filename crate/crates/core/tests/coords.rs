//! Properties of the change of coordinates `Y_r`.

use attractor_lab::brjuno::h_inv;
use attractor_lab::coords::{y_map, HalfPlanePoint};
use proptest::prelude::*;
use std::f64::consts::PI;

/// `r` spread over many orders of magnitude in `(0, 1/2]`.
fn scale() -> impl Strategy<Value = f64> {
    (0.0..12.0f64).prop_map(|e| 0.5 * 10f64.powf(-e))
}

/// Heights from `-1` to `1e6`, dense near the bottom.
fn height() -> impl Strategy<Value = f64> {
    (-3.0..6.0f64).prop_map(|e| 10f64.powf(e) - 1.001)
}

fn im(r: f64, x: f64, y: f64) -> f64 {
    y_map(r, HalfPlanePoint::new(x, y)).unwrap().y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn real_part_is_r_times_x(r in scale(), x in -1e6..1e6f64, y in height()) {
        let w = y_map(r, HalfPlanePoint::new(x, y)).unwrap();
        prop_assert_eq!(w.x, r * x);
    }

    #[test]
    fn contraction_by_nine_tenths(
        r in scale(),
        x1 in -1e4..1e4f64,
        y1 in height(),
        dx in -10.0..10.0f64,
        dy in -10.0..10.0f64,
        s in -8.0..2.0f64,
    ) {
        let s = 10f64.powf(s);
        let w1 = HalfPlanePoint::new(x1, y1);
        let w2 = HalfPlanePoint::new(x1 + s * dx, (y1 + s * dy).max(-1.0));
        let d = y_map(r, w1).unwrap().dist(&y_map(r, w2).unwrap());
        prop_assert!(d <= 0.9 * w1.dist(&w2) + 1e-12, "{} > 0.9 * {}", d, w1.dist(&w2));
    }

    #[test]
    fn image_stays_above_minus_nine_tenths(r in scale(), x in -1e6..1e6f64, y in height()) {
        prop_assert!(im(r, x, y) >= -0.9);
    }

    #[test]
    fn translation_by_one_over_r(r in 1e-4..0.5f64, x in -100.0..100.0f64, y in height()) {
        let a = y_map(r, HalfPlanePoint::new(x, y)).unwrap();
        let b = y_map(r, HalfPlanePoint::new(x + 1.0 / r, y)).unwrap();
        prop_assert!((b.x - a.x - 1.0).abs() <= 1e-9 * (1.0 + a.x.abs()));
        prop_assert!((b.y - a.y).abs() <= 1e-9 * (1.0 + a.y.abs()));
    }

    #[test]
    fn close_to_inverse_of_h(k in 1i32..40, y in 0.0..6.0f64) {
        let r = 2f64.powi(-k);
        let y = 10f64.powf(y);
        let lhs = 2.0 * PI * im(r, 0.0, y / (2.0 * PI));
        prop_assert!((lhs - h_inv(r, y).unwrap()).abs() <= PI);
    }

    #[test]
    fn horizontal_window_bounds(r in scale(), f in 0.0..1.0f64, y in height()) {
        let x = 1.0 / (2.0 * r) - f;
        let v = 2.0 * PI * im(r, x, y);
        let base = 2.0 * PI * r * y + (1.0 / r).ln();
        prop_assert!(v >= base - 4.0 && v <= base + 2.0, "{} outside [{}, {}]", v, base - 4.0, base + 2.0);
    }

    #[test]
    fn vertical_line_is_lowest(r in scale(), f in 0.0..=1.0f64, y in height()) {
        let x = f / r;
        prop_assert!(im(r, x, y) >= im(r, 0.0, y) - 1.0 / (2.0 * PI) - 1e-12 * (1.0 + y.abs()));
    }

    #[test]
    fn vertical_increments_dominated_on_the_axis(
        r in scale(),
        f in 0.0..=1.0f64,
        y2 in height(),
        gap in 0.0..5.0f64,
    ) {
        let x = f / r;
        let y1 = y2 + 10f64.powf(gap) - 1.0;
        let lhs = im(r, x, y1) - im(r, x, y2);
        let rhs = im(r, 0.0, y1) - im(r, 0.0, y2) + 1.0 / (2.0 * PI);
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + y1.abs()));
    }

    #[test]
    fn shifted_increments_on_the_axis(
        r in scale(),
        y2 in height(),
        gap in 0.0..5.0f64,
        y in 0.0..100.0f64,
    ) {
        let y1 = y2 + 10f64.powf(gap) - 1.0;
        let lhs = im(r, 0.0, y + y1) - im(r, 0.0, y + y2);
        let rhs = im(r, 0.0, y1) - im(r, 0.0, y2) + 1.0 / (4.0 * PI);
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + y1.abs() + y));
    }

    #[test]
    fn short_shifts_lose_little(
        r in scale(),
        y2 in height(),
        gap in 0.0..5.0f64,
        y in 0.0..=(5.0 / PI),
    ) {
        let y1 = y2 + 10f64.powf(gap) - 1.0;
        let lhs = im(r, 0.0, y1) - im(r, 0.0, y2);
        let rhs = im(r, 0.0, y + y1) - im(r, 0.0, y + y2) + 5.0 / PI;
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + y1.abs()));
    }
}

#[test]
fn heights_below_minus_one_are_rejected() {
    assert!(y_map(0.3, HalfPlanePoint::new(0.0, -1.5)).is_err());
    assert!(y_map(0.6, HalfPlanePoint::new(0.0, 0.0)).is_err());
    assert!(y_map(0.0, HalfPlanePoint::new(0.0, 0.0)).is_err());
}
