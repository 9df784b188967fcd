//! Sector renormalisation of the model map.
//!
//! For `beta` in `(0, 1/2)` the sector `S_beta` (arguments in `[0, 2 pi beta)`)
//! is uniformised by `psi_beta`, and the first return of `T_beta` to the
//! sector, read in that chart, is the map `E_beta`. It should coincide with
//! `T_{-1/beta}`. Negative rotation numbers reduce to positive ones by
//! complex conjugation.

use crate::arithmetic::{NearestIntegerExpansion, Sign};
use crate::bigreal::BigCtx;
use crate::coords::{im_y_phase, inverse_phase, HalfPlanePoint, Scale, INVERSE_TOL};
use crate::dynamics::{t_map, ModelPoint};
use crate::error::{Error, Result};
use crate::tiling::{limit_profile, ProfileKind};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Width of the inclusion band at the sector edge `arg = 0`.
const SECTOR_BAND: f64 = 1.0 / (1u64 << 40) as f64;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::Domain(format!("sector chart needs alpha in (0, 1/2), got {beta}")));
    }
    Ok(())
}

/// `psi_beta(w) = s(exp(2 pi i Y_0(w)))`: modulus `exp(-2 pi Im Y_beta(w))`,
/// argument `2 pi beta Re w`.
pub fn psi(beta: f64, w: HalfPlanePoint) -> Result<ModelPoint> {
    check_beta(beta)?;
    if !(w.y >= -1.0) {
        return Err(Error::Domain(format!("Im w = {} below -1", w.y)));
    }
    let sc = Scale::new(beta);
    let t = beta * w.x;
    Ok(ModelPoint {
        theta: (2.0 * PI * t).rem_euclid(2.0 * PI),
        rho: (-2.0 * PI * im_y_phase(&sc, t, w.y)).exp(),
    })
}

/// Argument of `z` reduced to `[0, 2 pi)`, with the band below `2 pi`
/// folded to 0.
fn sector_arg(theta: f64) -> f64 {
    let a = theta.rem_euclid(2.0 * PI);
    if a > 2.0 * PI - SECTOR_BAND {
        0.0
    } else {
        a
    }
}

pub fn in_sector(beta: f64, z: &ModelPoint) -> bool {
    !z.is_origin() && sector_arg(z.theta) < 2.0 * PI * beta
}

/// Inverse of [`psi`] on the sector.
pub fn phi(beta: f64, z: &ModelPoint, tol: f64) -> Result<HalfPlanePoint> {
    check_beta(beta)?;
    if !in_sector(beta, z) {
        return Err(Error::NotInSector(format!(
            "arg {} outside [0, 2 pi {beta})",
            z.theta
        )));
    }
    let a = sector_arg(z.theta);
    let x = a / (2.0 * PI * beta);
    let y = inverse_phase(&Scale::new(beta), a / (2.0 * PI), -z.rho.ln() / (2.0 * PI), tol)?;
    Ok(HalfPlanePoint::new(x, y))
}

/// Smallest `k >= 2` with `T^k(z)` in the sector, and that iterate.
pub fn return_time(
    nie_beta: &NearestIntegerExpansion,
    z: ModelPoint,
    depth_cap: usize,
) -> Result<(usize, ModelPoint)> {
    let beta = nie_beta.alpha(0)?;
    let max = (2.0 / beta).ceil() as usize + 2;
    let mut cur = t_map(z, nie_beta, depth_cap)?;
    for k in 2..=max {
        cur = t_map(cur, nie_beta, depth_cap)?;
        if in_sector(beta, &cur) {
            return Ok((k, cur));
        }
    }
    Err(Error::NonConvergence(format!("no return to the sector within {max} steps")))
}

/// Setup shared by renormalisation of a fixed rotation number.
#[derive(Clone, Debug)]
pub struct Renormalizer {
    /// Expansion of `beta = alpha_0 in (0, 1/2)`.
    pub positive: NearestIntegerExpansion,
    /// Expansion of `-1/alpha`.
    pub target: NearestIntegerExpansion,
    /// True when `alpha = -alpha_0 mod 1`, handled by conjugation.
    pub conjugate: bool,
    pub depth_cap: usize,
}

impl Renormalizer {
    pub fn new(nie: &NearestIntegerExpansion, depth_cap: usize) -> Result<Self> {
        let mut positive = nie.clone();
        positive.a_minus1 = 0.into();
        positive.eps0 = Sign::Plus;
        let mut ctx = BigCtx::new(nie.bits);
        let target = nie.gauss_shift(&mut ctx)?;
        Ok(Renormalizer {
            positive,
            target,
            conjugate: nie.eps0 == Sign::Minus,
            depth_cap,
        })
    }

    pub fn beta(&self) -> f64 {
        self.positive.levels[0].alpha_f64
    }

    /// `E_beta(zeta)` for `zeta = exp(2 pi i w)`, with the return time used.
    fn e_beta(&self, zeta: ModelPoint) -> Result<(ModelPoint, usize)> {
        if zeta.is_origin() {
            return Ok((ModelPoint::ORIGIN, 0));
        }
        let beta = self.beta();
        let w = HalfPlanePoint::new(
            (zeta.theta / (2.0 * PI)).rem_euclid(1.0),
            -zeta.rho.ln() / (2.0 * PI),
        );
        let z = psi(beta, w)?;
        let (k, zk) = return_time(&self.positive, z, self.depth_cap)?;
        let h = phi(beta, &zk, INVERSE_TOL)?;
        Ok((
            ModelPoint {
                theta: (2.0 * PI * h.x).rem_euclid(2.0 * PI),
                rho: (-2.0 * PI * h.y).exp(),
            },
            k,
        ))
    }

    /// The renormalised map at `zeta` in `M_{-1/alpha}`.
    pub fn renormalize(&self, zeta: ModelPoint) -> Result<ModelPoint> {
        Ok(self.renormalize_with_time(zeta)?.0)
    }

    fn renormalize_with_time(&self, zeta: ModelPoint) -> Result<(ModelPoint, usize)> {
        if self.conjugate {
            let (e, k) = self.e_beta(zeta.conj())?;
            Ok((e.conj(), k))
        } else {
            self.e_beta(zeta)
        }
    }

    /// `T_{-1/alpha}(zeta)`.
    pub fn target_map(&self, zeta: ModelPoint) -> Result<ModelPoint> {
        t_map(zeta, &self.target, self.depth_cap)
    }
}

/// Renormalisation of `T_alpha` evaluated at `zeta`.
pub fn renormalize(nie: &NearestIntegerExpansion, zeta: ModelPoint, depth_cap: usize) -> Result<ModelPoint> {
    Renormalizer::new(nie, depth_cap)?.renormalize(zeta)
}

/// Points of `M_{-1/alpha}` whose trajectories stay in `I_i \ K_i` down to
/// `level`: built bottom-up with `l_i = a_i + (3 eps_{i+1} - 1)/2`, which keeps
/// every rung in the last unit strip. Such points exercise the truncated
/// limit of the lift, so their deviation reflects the depth cap.
pub fn seam_samples(target: &NearestIntegerExpansion, count: usize, level: usize) -> Result<Vec<ModelPoint>> {
    let level = level.min(crate::dynamics::dynamic_depth(target).saturating_sub(1));
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let s = (j as f64 + 0.5) / count as f64;
        let a_l = target.levels[level].alpha_f64;
        let mut w = HalfPlanePoint::new(1.0 / a_l - 1.0 + s, 0.5);
        for i in (0..level).rev() {
            let k = i + 1;
            let sc = Scale::new(target.levels[k].alpha_f64);
            let t = sc.r * w.x;
            let y = im_y_phase(&sc, t, w.y);
            let eps = target.eps(k)?;
            let re = if eps == Sign::Minus { t } else { -t };
            let a_i = target.levels[i].digit.to_f64();
            let l = a_i + (3.0 * eps.as_f64() - 1.0) / 2.0;
            w = HalfPlanePoint::new(re + l, y);
        }
        let sc = Scale::new(target.levels[0].alpha_f64);
        let t = sc.r * w.x;
        let y = im_y_phase(&sc, t, w.y);
        let re = if target.eps0 == Sign::Minus { t } else { -t };
        out.push(ModelPoint::from_lift(HalfPlanePoint::new(re, y)));
    }
    Ok(out)
}

/// Largest deviation between the renormalised map at `depth` and
/// `T_{-1/alpha}` over seam samples built at levels `levels`, `per_level`
/// points each. The sample set depends only on `levels`, so runs at
/// different depths compare the same points.
pub fn seam_deviation(
    nie: &NearestIntegerExpansion,
    depth: usize,
    levels: std::ops::RangeInclusive<usize>,
    per_level: usize,
) -> Result<f64> {
    let r = Renormalizer::new(nie, depth)?;
    let mut pts = Vec::new();
    for l in levels {
        pts.extend(seam_samples(&r.target, per_level, l)?);
    }
    let devs: Vec<Result<f64>> = pts
        .par_iter()
        .map(|z| Ok(r.renormalize(*z)?.dist(&r.target_map(*z)?)))
        .collect();
    devs.into_iter().try_fold(0.0, |m, d| Ok(f64::max(m, d?)))
}

#[derive(Clone, Debug, Serialize)]
pub struct RenormFailure {
    pub theta: f64,
    pub rho: f64,
    pub dev: f64,
}

/// Comparison of the renormalised map with `T_{-1/alpha}` on boundary samples.
#[derive(Clone, Debug, Serialize)]
pub struct RenormReport {
    pub schema_version: u32,
    pub alpha_desc: String,
    pub depth: usize,
    pub samples: usize,
    pub max_dev: f64,
    pub mean_dev: f64,
    pub tol: f64,
    pub return_times: Vec<usize>,
    pub gauss_shift_ok: bool,
    pub failures: Vec<RenormFailure>,
}

/// Sample `M_{-1/alpha}` on its boundary at equidistributed angles and
/// compare both maps.
pub fn verify_renormalization(
    nie: &NearestIntegerExpansion,
    sample_count: usize,
    depth: usize,
    tol: f64,
    m: usize,
) -> Result<RenormReport> {
    let r = Renormalizer::new(nie, depth)?;
    let gauss_shift_ok = r
        .target
        .levels
        .iter()
        .zip(&nie.levels[1..])
        .all(|(a, b)| a.digit == b.digit && a.sign_next == b.sign_next);
    let floor = limit_profile(ProfileKind::FloorB, 0, nie, tol, depth, m)?;
    let results: Vec<Result<(f64, f64, f64, usize)>> = (0..sample_count)
        .into_par_iter()
        .map(|i| {
            let x = (i as f64 + 0.5) / sample_count as f64;
            let y = floor.eval(x);
            let zeta = ModelPoint {
                theta: (2.0 * PI * x).rem_euclid(2.0 * PI),
                rho: (-2.0 * PI * y).exp(),
            };
            let (e, k) = r.renormalize_with_time(zeta)?;
            let t = r.target_map(zeta)?;
            Ok((zeta.theta, zeta.rho, e.dist(&t), k))
        })
        .collect();
    let mut devs = Vec::with_capacity(sample_count);
    let mut failures = Vec::new();
    let mut times = Vec::new();
    for res in results {
        let (theta, rho, dev, k) = res?;
        if dev > tol {
            failures.push(RenormFailure { theta, rho, dev });
        }
        if !times.contains(&k) {
            times.push(k);
        }
        devs.push(dev);
    }
    times.sort_unstable();
    let max_dev = devs.iter().copied().fold(0.0, f64::max);
    let mean_dev = devs.iter().sum::<f64>() / devs.len().max(1) as f64;
    Ok(RenormReport {
        schema_version: 1,
        alpha_desc: nie.alpha_desc.clone(),
        depth,
        samples: sample_count,
        max_dev,
        mean_dev,
        tol,
        return_times: times,
        gauss_shift_ok,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{expand_nearest_integer, RotationNumber};
    use approx::assert_abs_diff_eq;

    #[test]
    fn psi_basics() {
        let b = 0.3;
        let z = psi(b, HalfPlanePoint::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(z.rho, 1.0, epsilon = 1e-14);
        assert_eq!(z.theta, 0.0);
        let z = psi(b, HalfPlanePoint::new(0.7, 2.0)).unwrap();
        assert_abs_diff_eq!(z.theta, 2.0 * PI * b * 0.7, epsilon = 1e-14);
        assert!(psi(0.7, HalfPlanePoint::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn phi_inverts_psi() {
        let b = 0.381966;
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.5), (0.9, -0.4)] {
            let z = psi(b, HalfPlanePoint::new(x, y)).unwrap();
            let w = phi(b, &z, 1e-13).unwrap();
            assert_abs_diff_eq!(w.x, x, epsilon = 1e-12);
            assert_abs_diff_eq!(w.y, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn return_times_are_floor_or_next() {
        let e = expand_nearest_integer(&RotationNumber::golden(), 40).unwrap();
        let r = Renormalizer::new(&e, 25).unwrap();
        let beta = r.beta();
        for i in 0..8 {
            let z = psi(beta, HalfPlanePoint::new(i as f64 / 8.0, 0.2)).unwrap();
            let (k, _) = return_time(&r.positive, z, 25).unwrap();
            assert!(k == 2 || k == 3);
        }
    }

    #[test]
    fn seam_deviation_shrinks_with_depth() {
        let e = expand_nearest_integer(&RotationNumber::sqrt2(), 64).unwrap();
        let d20 = seam_deviation(&e, 20, 21..=29, 2).unwrap();
        let d30 = seam_deviation(&e, 30, 21..=29, 2).unwrap();
        assert!(d30 < d20, "{d30} vs {d20}");
    }

    #[test]
    fn origin_maps_to_origin() {
        let e = expand_nearest_integer(&RotationNumber::sqrt2(), 40).unwrap();
        let z = renormalize(&e, ModelPoint::ORIGIN, 20).unwrap();
        assert!(z.is_origin());
    }
}
