//! Polar geometry of the model attractor.
//!
//! Under `w -> conj(e^{2 pi i w})` the region between the floor `b_{-1}` and
//! the ceiling `p_{-1}` becomes, at every angle, one radial segment
//! `[e^{-2 pi p}, e^{-2 pi b}]`. An [`AttractorGeometry`] stores these
//! segments at `K` equidistributed angles, with `theta_k = -2 pi x_k` reduced
//! to `[0, 2 pi)` and `x_k = k/K`.

mod export;
mod hausdorff;
mod topology;

pub use export::{parse_csv, render_ppm, to_csv, to_svg, GeometryMeta, RasterConfig, RasterMode};
pub use hausdorff::hausdorff_distance;
pub use topology::{classify_topology, classify_topology_with, TopologyLabel, TopologyReport, DEFAULT_GAP_THRESHOLD};

use crate::arithmetic::{expand_nearest_integer_partial, NearestIntegerExpansion, RotationNumber};
use crate::brjuno::{brjuno_partial, classify, ArithmeticClass, ClassifyConfig};
use crate::error::{Error, Result};
use crate::tiling::{limit_profile, shifted_floor_limit, HeightProfile, ProfileKind, CEILING_BRJUNO_TERMS};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sup-difference below which a profile counts as converged.
pub const GEOMETRY_TOL: f64 = 1e-8;
/// Default number of angles.
pub const DEFAULT_ANGLES: usize = 4096;

/// The radial segment at one angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarRecord {
    pub theta: f64,
    pub r_inner: f64,
    pub r_outer: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttractorGeometry {
    pub alpha_desc: String,
    /// Refinement depth of the profiles.
    pub depth: usize,
    /// Samples per unit of the profiles.
    pub grid: usize,
    pub class: ArithmeticClass,
    /// `e^{-2 pi p_{-1}(0)}`, or 0 without a ceiling.
    pub r_alpha: f64,
    pub sup_b: f64,
    pub partial_brjuno: f64,
    pub converged: bool,
    /// Set for a member of the invariant family.
    pub invariant_t: Option<f64>,
    pub records: Vec<PolarRecord>,
}

/// Angle of the abscissa `x`, in `[0, 2 pi)`.
pub fn theta_of(x: f64) -> f64 {
    // Adding zero turns -0 into +0.
    let t = (-2.0 * PI * x).rem_euclid(2.0 * PI) + 0.0;
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

impl AttractorGeometry {
    /// Number of angles `K`.
    pub fn resolution(&self) -> usize {
        self.records.len()
    }

    pub fn max_gap(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.r_outer - r.r_inner)
            .fold(0.0, f64::max)
    }

    /// Segment at angle `theta`, interpolated linearly between records.
    pub fn segment_at(&self, theta: f64) -> (f64, f64) {
        let k = self.records.len();
        let pos = (-theta / (2.0 * PI)).rem_euclid(1.0) * k as f64;
        let i = (pos.floor() as usize).min(k - 1);
        let f = pos - i as f64;
        let a = &self.records[i];
        let b = &self.records[(i + 1) % k];
        (
            a.r_inner + f * (b.r_inner - a.r_inner),
            a.r_outer + f * (b.r_outer - a.r_outer),
        )
    }

    /// True when the point at polar coordinates `(theta, rho)` lies in the
    /// filled set `{rho <= r_outer}`.
    pub fn contains_filled(&self, theta: f64, rho: f64) -> bool {
        rho <= self.segment_at(theta).1
    }

    /// The image under `theta -> -theta`.
    pub fn mirrored(&self) -> Self {
        let k = self.records.len();
        let records = (0..k)
            .map(|i| {
                let src = &self.records[(k - i) % k];
                PolarRecord {
                    theta: theta_of(i as f64 / k as f64),
                    r_inner: src.r_inner,
                    r_outer: src.r_outer,
                }
            })
            .collect();
        AttractorGeometry {
            records,
            ..self.clone()
        }
    }

    pub fn meta(&self) -> GeometryMeta {
        GeometryMeta {
            schema_version: 1,
            alpha_desc: self.alpha_desc.clone(),
            depth: self.depth,
            k: self.resolution(),
            m: self.grid,
            class: self.class,
            r_alpha: self.r_alpha,
            sup_b: self.sup_b,
            partial_brjuno: self.partial_brjuno,
            converged: self.converged,
            invariant_t: self.invariant_t,
        }
    }
}

fn radius(height: f64) -> f64 {
    (-2.0 * PI * height).exp()
}

fn records_from(floor: &HeightProfile, ceiling: Option<&HeightProfile>, k: usize) -> Vec<PolarRecord> {
    (0..k)
        .map(|i| {
            let x = i as f64 / k as f64;
            let r_outer = radius(floor.eval(x));
            let r_inner = ceiling.map_or(0.0, |c| radius(c.eval(x)).min(r_outer));
            PolarRecord {
                theta: theta_of(x),
                r_inner,
                r_outer,
            }
        })
        .collect()
}

fn check_sizes(k: usize, m: usize) -> Result<()> {
    if k == 0 || m < 2 {
        return Err(Error::Domain(format!("need K >= 1 and M >= 2, got K={k}, M={m}")));
    }
    Ok(())
}

/// Geometry from an expansion whose class is already known. The depth is
/// capped at the levels the double-precision engine can resample.
pub fn attractor_geometry_for(
    nie: &NearestIntegerExpansion,
    class: ArithmeticClass,
    depth: usize,
    k: usize,
    m: usize,
) -> Result<AttractorGeometry> {
    check_sizes(k, m)?;
    let depth = depth.min(nie.geometric_depth()).min(nie.certified_depth().saturating_sub(1));
    if depth == 0 {
        return Err(Error::BudgetExceeded(format!(
            "no level of {} is usable for geometry",
            nie.alpha_desc
        )));
    }
    let floor = limit_profile(ProfileKind::FloorB, -1, nie, GEOMETRY_TOL, depth, m)?;
    let ceiling = match class {
        ArithmeticClass::NonBrjuno => None,
        _ => Some(limit_profile(ProfileKind::CeilingP, -1, nie, GEOMETRY_TOL, depth, m)?),
    };
    let terms = depth.min(nie.levels.len());
    let partial_brjuno = brjuno_partial(nie, terms)?.sum();
    Ok(AttractorGeometry {
        alpha_desc: nie.alpha_desc.clone(),
        depth,
        grid: m,
        class,
        r_alpha: ceiling.as_ref().map_or(0.0, |c| radius(c.eval(0.0))),
        sup_b: floor.max(),
        partial_brjuno,
        converged: floor.converged && ceiling.as_ref().is_none_or(|c| c.converged),
        invariant_t: None,
        records: records_from(&floor, ceiling.as_ref(), k),
    })
}

/// Expansion of `alpha` deep enough for geometry at `depth`, including the
/// Brjuno tail that seeds the ceiling.
pub fn geometry_expansion(alpha: &RotationNumber, depth: usize) -> Result<NearestIntegerExpansion> {
    expand_nearest_integer_partial(alpha, depth + CEILING_BRJUNO_TERMS + 2)
}

/// Geometry of the attractor of `alpha` at `depth`, with `k` angles and
/// profiles on `m` samples per unit.
pub fn attractor_geometry(alpha: &RotationNumber, depth: usize, k: usize, m: usize) -> Result<AttractorGeometry> {
    let nie = geometry_expansion(alpha, depth)?;
    let class = classify(alpha, &ClassifyConfig::default()).class;
    attractor_geometry_for(&nie, class, depth, k, m)
}

/// Member `t` of the invariant family: the outer radii come from the floor
/// of the set shifted to height `log(1/t)/(2 pi)`, the inner radii from
/// `base`. Requires `r_alpha <= t <= 1`.
pub fn invariant_geometry_for(
    base: &AttractorGeometry,
    nie: &NearestIntegerExpansion,
    t: f64,
) -> Result<AttractorGeometry> {
    if !(t > 0.0 && t <= 1.0 && t >= base.r_alpha) {
        return Err(Error::Domain(format!(
            "t = {t} outside [{}, 1]",
            base.r_alpha
        )));
    }
    let y0 = (1.0 / t).ln() / (2.0 * PI);
    let floor = shifted_floor_limit(y0, nie, GEOMETRY_TOL, base.depth, base.grid)?;
    let k = base.resolution();
    let records = (0..k)
        .map(|i| {
            let x = i as f64 / k as f64;
            let r_outer = radius(floor.eval(x));
            PolarRecord {
                theta: base.records[i].theta,
                r_inner: base.records[i].r_inner.min(r_outer),
                r_outer,
            }
        })
        .collect();
    Ok(AttractorGeometry {
        sup_b: floor.max(),
        converged: base.converged && floor.converged,
        invariant_t: Some(t),
        records,
        ..base.clone()
    })
}

/// Member `t` of the invariant family of `alpha`.
pub fn invariant_geometry(
    alpha: &RotationNumber,
    t: f64,
    depth: usize,
    k: usize,
    m: usize,
) -> Result<AttractorGeometry> {
    let nie = geometry_expansion(alpha, depth)?;
    let class = classify(alpha, &ClassifyConfig::default()).class;
    let base = attractor_geometry_for(&nie, class, depth, k, m)?;
    invariant_geometry_for(&base, &nie, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_geometry(depth: usize) -> (NearestIntegerExpansion, AttractorGeometry) {
        let alpha = RotationNumber::golden();
        let nie = geometry_expansion(&alpha, depth).unwrap();
        let g = attractor_geometry_for(&nie, ArithmeticClass::Herman, depth, 512, 1024).unwrap();
        (nie, g)
    }

    #[test]
    fn plus_one_is_on_the_outer_boundary() {
        let (_, g) = golden_geometry(15);
        assert_eq!(g.records[0].theta, 0.0);
        // b_{-1}(0) tends to 0 at the geometric rate of the tiling.
        assert!((g.records[0].r_outer - 1.0).abs() < 1e-5);
        assert!(g.records.iter().all(|r| 0.0 <= r.r_inner && r.r_inner <= r.r_outer));
    }

    #[test]
    fn herman_gap_closes_with_depth() {
        let (_, g5) = golden_geometry(5);
        let (_, g15) = golden_geometry(15);
        assert!(g15.max_gap() < g5.max_gap());
        assert!(g15.max_gap() < 1e-4);
    }

    #[test]
    fn invariant_family_at_one_is_the_attractor() {
        let (nie, g) = golden_geometry(15);
        let t1 = invariant_geometry_for(&g, &nie, 1.0).unwrap();
        assert_eq!(t1.records, g.records);
        // The Jordan curve passes through +1, so the family is a single set.
        assert!(g.r_alpha > 0.9999);
        assert!(invariant_geometry_for(&g, &nie, 0.5).is_err());
        assert!(invariant_geometry_for(&g, &nie, 1.5).is_err());
    }

    #[test]
    fn shifted_member_starts_at_t() {
        let nie = geometry_expansion(&RotationNumber::golden(), 20).unwrap();
        let mut g = attractor_geometry_for(&nie, ArithmeticClass::NonBrjuno, 20, 256, 1024).unwrap();
        assert_eq!(g.r_alpha, 0.0);
        g.depth = 20;
        let t = invariant_geometry_for(&g, &nie, 0.9).unwrap();
        assert!((t.records[0].r_outer - 0.9).abs() < 1e-6);
        assert!(t.records.iter().zip(&g.records).all(|(a, b)| a.r_outer <= b.r_outer));
    }

    #[test]
    fn mirror_is_an_involution() {
        let (_, g) = golden_geometry(8);
        assert_eq!(g.mirrored().mirrored(), g);
    }
}
