//! The model map on the attractor.
//!
//! A point `w_{-1}` of the half-plane is pushed down the tower: at each rung
//! an integer `l_i` is removed and the signed map `Y_{i+1}` is inverted, until
//! the point lands in `K_n` or the depth cap is reached. The lift `T~` then
//! adds 1 at the bottom and climbs back up with `Y_i + (eps_i + 1)/2`.

use crate::arithmetic::{NearestIntegerExpansion, Sign};
use crate::coords::{im_y_phase, inverse_phase, HalfPlanePoint, Scale, INVERSE_TOL};
use crate::error::{Error, Result};
use crate::tiling::HeightProfile;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Default depth cap of trajectories.
pub const DEFAULT_DEPTH_CAP: usize = 25;
/// Tolerance for points slightly below the half-plane.
const DOMAIN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "level", rename_all = "snake_case")]
pub enum Terminal {
    EnteredK(usize),
    DepthCapped(usize),
}

/// The rungs `(w_i, l_i)` for `i = -1, ..., m`; `l_m` is not computed.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub points: Vec<HalfPlanePoint>,
    pub shifts: Vec<i64>,
    pub terminal: Terminal,
}

impl Trajectory {
    /// `w_i` for `i >= -1`.
    pub fn w(&self, i: i64) -> HalfPlanePoint {
        self.points[(i + 1) as usize]
    }

    /// `l_i` for `-1 <= i < m`.
    pub fn l(&self, i: i64) -> i64 {
        self.shifts[(i + 1) as usize]
    }

    /// Largest `|Y_{i+1}(w_{i+1}) + l_i - w_i|` over the rungs.
    pub fn consistency_residual(&self, nie: &NearestIntegerExpansion) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, &l) in self.shifts.iter().enumerate() {
            let p = signed_forward(nie, k, self.points[k + 1])?;
            let q = HalfPlanePoint::new(p.x + l as f64, p.y);
            worst = worst.max(q.dist(&self.points[k]));
        }
        Ok(worst)
    }
}

/// Levels whose `1/alpha` is small enough for the double-precision rungs.
pub fn dynamic_depth(nie: &NearestIntegerExpansion) -> usize {
    nie.levels
        .iter()
        .take_while(|l| l.ln_inv_alpha.is_f64() && l.ln_inv_alpha.to_f64() <= 40.0 * std::f64::consts::LN_2)
        .count()
}

fn level_scale(nie: &NearestIntegerExpansion, k: usize) -> Scale {
    let l = &nie.levels[k];
    Scale {
        r: l.alpha_f64,
        ln_inv_r: l.ln_inv_alpha.to_f64(),
    }
}

/// `Y_k(w)` with the sign of `eps_k`.
fn signed_forward(nie: &NearestIntegerExpansion, k: usize, w: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let sc = level_scale(nie, k);
    let t = sc.r * w.x;
    let y = im_y_phase(&sc, t, w.y);
    Ok(match nie.eps(k)? {
        Sign::Minus => HalfPlanePoint::new(t, y),
        Sign::Plus => HalfPlanePoint::new(-t, y),
    })
}

/// `Y_k^{-1}(v)` for `v` in the image strip.
fn signed_inverse(nie: &NearestIntegerExpansion, k: usize, v: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let sc = level_scale(nie, k);
    let t = match nie.eps(k)? {
        Sign::Minus => v.x,
        Sign::Plus => -v.x,
    };
    let y = match inverse_phase(&sc, t, v.y, INVERSE_TOL * (1.0 + v.y.abs())) {
        Ok(y) => y,
        Err(Error::NoPreimage(m)) => return Err(Error::OutsideDomain(m)),
        Err(e) => return Err(e),
    };
    Ok(HalfPlanePoint::new(t / sc.r, y))
}

/// Trajectory of `w`, stopping on entry into some `K_n` or at `depth_cap`.
///
/// With `floors` (index `i + 1` holds the floor of level `i`), every rung is
/// checked against its floor within `floor_tol`.
pub fn trajectory(
    w: HalfPlanePoint,
    nie: &NearestIntegerExpansion,
    depth_cap: usize,
    floors: Option<(&[HeightProfile], f64)>,
) -> Result<Trajectory> {
    if !(w.y >= -1.0 - DOMAIN_TOL) || !w.x.is_finite() {
        return Err(Error::OutsideDomain(format!("Im w = {} below -1", w.y)));
    }
    let cap = depth_cap.min(dynamic_depth(nie).saturating_sub(1));
    let check = |i: i64, p: HalfPlanePoint| -> Result<()> {
        if let Some((fl, tol)) = floors {
            if let Some(f) = fl.get((i + 1) as usize) {
                let b = f.eval(p.x);
                if p.y < b - tol {
                    return Err(Error::OutsideDomain(format!(
                        "rung {i}: Im w = {} below floor {b}",
                        p.y
                    )));
                }
            }
        }
        Ok(())
    };
    let mut points = vec![HalfPlanePoint::new(w.x, w.y.max(-1.0))];
    let mut shifts = Vec::new();
    check(-1, points[0])?;
    let mut i: i64 = -1;
    loop {
        let wi = *points.last().unwrap();
        if i >= 0 {
            let a = nie.levels[i as usize].alpha_f64;
            if wi.x < 1.0 / a - 1.0 {
                return Ok(Trajectory {
                    points,
                    shifts,
                    terminal: Terminal::EnteredK(i as usize),
                });
            }
            if i as usize >= cap {
                return Ok(Trajectory {
                    points,
                    shifts,
                    terminal: Terminal::DepthCapped(i as usize),
                });
            }
        }
        let k = (i + 1) as usize;
        let l = match nie.eps(k)? {
            Sign::Minus => wi.x.floor(),
            Sign::Plus => wi.x.ceil(),
        };
        let next = signed_inverse(nie, k, HalfPlanePoint::new(wi.x - l, wi.y))?;
        shifts.push(l as i64);
        i += 1;
        check(i, next)?;
        points.push(next);
    }
}

/// `X_0^n(v)`: climb from level `n` with `Y_i + (eps_i + 1)/2`.
fn climb(nie: &NearestIntegerExpansion, n: usize, mut v: HalfPlanePoint) -> Result<HalfPlanePoint> {
    for i in (0..=n).rev() {
        let p = signed_forward(nie, i, v)?;
        let s = if nie.eps(i)? == Sign::Plus { 1.0 } else { 0.0 };
        v = HalfPlanePoint::new(p.x + s, p.y);
    }
    Ok(v)
}

/// The lift `T~_alpha(w)` with `Re` reduced to `[0, 1)`.
///
/// Entering `K_n` gives the exact composition; a capped trajectory uses the
/// truncated limit, off by at most `30 * 0.9^depth_cap`.
pub fn t_lift(w: HalfPlanePoint, nie: &NearestIntegerExpansion, depth_cap: usize) -> Result<HalfPlanePoint> {
    let tr = trajectory(w, nie, depth_cap, None)?;
    t_lift_from(&tr, nie)
}

fn t_lift_from(tr: &Trajectory, nie: &NearestIntegerExpansion) -> Result<HalfPlanePoint> {
    let (n, shift) = match tr.terminal {
        Terminal::EnteredK(n) => (n, 1.0),
        Terminal::DepthCapped(m) => (m, 1.0 - 1.0 / nie.levels[m].alpha_f64),
    };
    let wn = tr.w(n as i64);
    let v = climb(nie, n, HalfPlanePoint::new(wn.x + shift, wn.y))?;
    Ok(HalfPlanePoint::new(v.x - v.x.floor(), v.y))
}

/// A point `z = conj(exp(2 pi i w))` of the model, or the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelPoint {
    pub theta: f64,
    pub rho: f64,
}

impl ModelPoint {
    pub const ORIGIN: ModelPoint = ModelPoint { theta: 0.0, rho: 0.0 };

    pub fn is_origin(&self) -> bool {
        self.rho == 0.0
    }

    /// Projection of a lift: `rho = exp(-2 pi y)`, `theta = -2 pi x mod 2 pi`.
    pub fn from_lift(w: HalfPlanePoint) -> Self {
        let theta = (-2.0 * PI * w.x).rem_euclid(2.0 * PI) + 0.0;
        ModelPoint {
            theta,
            rho: (-2.0 * PI * w.y).exp(),
        }
    }

    /// The lift with `Re w` in `[0, 1)`.
    pub fn lift(&self) -> HalfPlanePoint {
        let x = (-self.theta / (2.0 * PI)).rem_euclid(1.0);
        HalfPlanePoint::new(x, -self.rho.ln() / (2.0 * PI))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        (self.rho * self.theta.cos(), self.rho * self.theta.sin())
    }

    pub fn dist(&self, o: &ModelPoint) -> f64 {
        let (a, b) = self.to_complex();
        let (c, d) = o.to_complex();
        (a - c).hypot(b - d)
    }

    /// `s(z) = conj z`.
    pub fn conj(&self) -> Self {
        ModelPoint {
            theta: (-self.theta).rem_euclid(2.0 * PI) + 0.0,
            rho: self.rho,
        }
    }
}

/// The model map `T_alpha`, with `T(0) = 0`.
pub fn t_map(z: ModelPoint, nie: &NearestIntegerExpansion, depth_cap: usize) -> Result<ModelPoint> {
    if z.is_origin() {
        return Ok(ModelPoint::ORIGIN);
    }
    if !(z.rho <= (2.0 * PI).exp() * (1.0 + DOMAIN_TOL)) {
        return Err(Error::OutsideAttractor(format!("|z| = {} exceeds e^(2 pi)", z.rho)));
    }
    let w = t_lift(z.lift(), nie, depth_cap).map_err(|e| match e {
        Error::OutsideDomain(m) => Error::OutsideAttractor(m),
        e => e,
    })?;
    Ok(ModelPoint::from_lift(w))
}

/// `z, T(z), ..., T^n(z)`.
pub fn orbit(z: ModelPoint, n: usize, nie: &NearestIntegerExpansion, depth_cap: usize) -> Result<Vec<ModelPoint>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(z);
    let mut cur = z;
    for _ in 0..n {
        cur = t_map(cur, nie, depth_cap)?;
        out.push(cur);
    }
    Ok(out)
}

/// Orbit dump: `k,theta,rho,x,y` per iterate.
pub fn orbit_csv(points: &[ModelPoint]) -> String {
    let mut s = String::from("k,theta,rho,x,y\n");
    for (k, p) in points.iter().enumerate() {
        let (x, y) = p.to_complex();
        let _ = writeln!(s, "{k},{:.16e},{:.16e},{:.16e},{:.16e}", p.theta, p.rho, x, y);
    }
    s
}

/// `|T^k(+1)|` in closed form with the two-sided bounds
/// `1/(8(1+m)) <= value <= 24 pi/(1+m)`, `m = min(k, 1/|alpha| - k)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitSize {
    pub k: u64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl OrbitSize {
    pub fn holds(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }
}

pub fn orbit_size_check(alpha: f64, k: u64) -> Result<OrbitSize> {
    if !(alpha.abs() < 0.5 && alpha != 0.0) {
        return Err(Error::Domain(format!("alpha must lie in (-1/2, 1/2) minus 0, got {alpha}")));
    }
    let inv = 1.0 / alpha.abs();
    if k as f64 >= inv {
        return Err(Error::Domain(format!("k = {k} must be below 1/|alpha| = {inv}")));
    }
    let a = alpha;
    let e = (-3.0 * PI * a).exp();
    // numerator e^{-3 pi a} - e^{pi a i}
    let (nr, ni) = (e - (PI * a).cos(), -(PI * a).sin());
    // denominator e^{-3 pi a} - e^{-pi a i (1 + 2k)}
    let ang = -PI * a * (1.0 + 2.0 * k as f64);
    let (dr, di) = (e - ang.cos(), -ang.sin());
    let value = (nr.hypot(ni)) / (dr.hypot(di));
    let m = (k as f64).min(inv - k as f64);
    Ok(OrbitSize {
        k,
        value,
        lower: 1.0 / (8.0 * (1.0 + m)),
        upper: 24.0 * PI / (1.0 + m),
    })
}

/// `min_{1 <= n <= N} |T^n(z) - z|`.
pub fn recurrence_gap(z: ModelPoint, n: usize, nie: &NearestIntegerExpansion, depth_cap: usize) -> Result<f64> {
    if z.is_origin() {
        return Ok(0.0);
    }
    let mut cur = z;
    let mut best = f64::INFINITY;
    for _ in 0..n {
        cur = t_map(cur, nie, depth_cap)?;
        best = best.min(cur.dist(&z));
    }
    Ok(best)
}
