//! Hausdorff distance between discretised attractors.
//!
//! Each geometry is the union of its radial segments in the plane. Points are
//! sampled along every segment and matched against the exact distance to the
//! nearest segment of the other set. The search walks outwards in angle and
//! stops once the angular separation alone exceeds the best distance found.

use super::AttractorGeometry;
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Points sampled along each segment, endpoints included.
const SEGMENT_SAMPLES: usize = 9;

fn seg_dist(px: f64, py: f64, theta: f64, r0: f64, r1: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let along = (px * c + py * s).clamp(r0, r1);
    ((px - along * c).powi(2) + (py - along * s).powi(2)).sqrt()
}

fn point_to_set(rho: f64, phi: f64, home: usize, g: &AttractorGeometry) -> f64 {
    let k = g.records.len();
    let (px, py) = (rho * phi.cos(), rho * phi.sin());
    let step = 2.0 * PI / k as f64;
    let mut best = f64::INFINITY;
    for off in 0..=k / 2 {
        // Segments `off` cells away are at least this far.
        let sep = (off as f64 - 1.0).max(0.0) * step;
        let bound = if sep >= PI / 2.0 { rho } else { rho * sep.sin() };
        if bound > best {
            break;
        }
        for j in [(home + off) % k, (home + k - off % k) % k] {
            let r = &g.records[j];
            best = best.min(seg_dist(px, py, r.theta, r.r_inner, r.r_outer));
        }
    }
    best
}

fn directed(a: &AttractorGeometry, b: &AttractorGeometry) -> f64 {
    a.records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let n = if r.r_outer > r.r_inner { SEGMENT_SAMPLES } else { 1 };
            (0..n)
                .map(|s| {
                    let f = if n == 1 { 0.0 } else { s as f64 / (n - 1) as f64 };
                    let rho = r.r_inner + f * (r.r_outer - r.r_inner);
                    point_to_set(rho, r.theta, i, b)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance of two geometries with the same angles.
pub fn hausdorff_distance(a: &AttractorGeometry, b: &AttractorGeometry) -> Result<f64> {
    if a.records.len() != b.records.len() {
        return Err(Error::ResolutionMismatch(a.records.len(), b.records.len()));
    }
    if a.records.is_empty() {
        return Ok(0.0);
    }
    Ok(directed(a, b).max(directed(b, a)))
}

#[cfg(test)]
mod tests {
    use super::super::{theta_of, PolarRecord};
    use super::*;
    use crate::brjuno::ArithmeticClass;

    pub(crate) fn circle(k: usize, r0: f64, r1: f64) -> AttractorGeometry {
        AttractorGeometry {
            alpha_desc: "test".into(),
            depth: 0,
            grid: 2,
            class: ArithmeticClass::Undetermined,
            r_alpha: 0.0,
            sup_b: 0.0,
            partial_brjuno: 0.0,
            converged: true,
            invariant_t: None,
            records: (0..k)
                .map(|i| PolarRecord {
                    theta: theta_of(i as f64 / k as f64),
                    r_inner: r0,
                    r_outer: r1,
                })
                .collect(),
        }
    }

    #[test]
    fn concentric_circles() {
        let a = circle(256, 0.5, 0.5);
        let b = circle(256, 0.8, 0.8);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let d = hausdorff_distance(&a, &b).unwrap();
        assert!((d - 0.3).abs() < 1e-12, "{d}");
        assert_eq!(d, hausdorff_distance(&b, &a).unwrap());
    }

    #[test]
    fn disk_against_circle() {
        // Every point of the disk is within 0.4 of the rim only at the centre.
        let disk = circle(512, 0.0, 0.4);
        let rim = circle(512, 0.4, 0.4);
        let d = hausdorff_distance(&disk, &rim).unwrap();
        assert!((d - 0.4).abs() < 1e-12, "{d}");
    }

    #[test]
    fn resolution_mismatch() {
        let a = circle(16, 0.5, 0.5);
        let b = circle(32, 0.5, 0.5);
        assert_eq!(
            hausdorff_distance(&a, &b),
            Err(Error::ResolutionMismatch(16, 32))
        );
    }
}
