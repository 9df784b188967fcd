//! The change of coordinates `Y_r` on the half-plane `Im w >= -1`.
//!
//! `Re Y_r(w) = r Re w`, and with the phase `t = r Re w`,
//! `s = 2 pi r Im w + 3 pi r`,
//!
//! ```text
//! 4 pi Im Y_r = log(expm1(s)^2 + 4 e^s sin^2(pi (t + r/2)))
//!             - log(expm1(3 pi r)^2 + 4 e^{3 pi r} sin^2(pi r / 2)).
//! ```
//!
//! Both sides are sums of nonnegative terms, so no cancellation occurs for
//! small `r`. When `r` itself is below the double range the value is
//! computed from `log(1/r)` alone.

use crate::arithmetic::{NearestIntegerExpansion, Sign};
use crate::bigreal::BigCtx;
use crate::error::{Error, Result};
use astro_float::BigFloat;
use serde::Serialize;
use std::f64::consts::PI;

/// Below this `r` the asymptotic small-`r` form is used.
const TINY_R: f64 = 1e-150;
/// Below this the direct numerator loses its meaning in the tiny mode.
const TINY_NUM: f64 = 1e-250;

/// Default bisection tolerance in double mode.
pub const INVERSE_TOL: f64 = 1e-12;
const INVERSE_CAP: usize = 200;

/// A point `x + iy` with `y >= -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        HalfPlanePoint { x, y }
    }

    pub fn dist(&self, o: &HalfPlanePoint) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// The parameter `r` together with `log(1/r)`; `r` may underflow to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scale {
    pub r: f64,
    pub ln_inv_r: f64,
}

impl Scale {
    pub fn new(r: f64) -> Self {
        Scale {
            r,
            ln_inv_r: -r.ln(),
        }
    }

    /// Scale known only through `log(1/r)`.
    pub fn from_ln_inv(ln_inv_r: f64) -> Self {
        Scale {
            r: (-ln_inv_r).exp(),
            ln_inv_r,
        }
    }

    fn tiny(&self) -> bool {
        self.r < TINY_R
    }
}

/// `sin^2(pi v)` after reducing `v` to `[-1/2, 1/2)`.
fn sin2_pi(v: f64) -> f64 {
    let v = v - v.round();
    let s = (PI * v).sin();
    s * s
}

/// `log(expm1(s)^2 + 4 e^s sin2)` for `s > 0`.
fn ln_num(s: f64, sin2: f64) -> f64 {
    if s > 30.0 {
        // expm1(s)^2 = e^{2s} (1 - e^{-s})^2.
        let e = (-s).exp();
        2.0 * s + ((1.0 - e).powi(2) + 4.0 * e * sin2).ln()
    } else {
        let m = s.exp_m1();
        (m * m + 4.0 * s.exp() * sin2).ln()
    }
}

/// `log((2 v e^{ln_scale} + c)^2)` without forming the product when it
/// would overflow.
fn ln_sq_affine(v: f64, ln_scale: f64, c: f64) -> f64 {
    if v == 0.0 {
        return 2.0 * c.abs().ln();
    }
    ln_sq_from_ln(v.abs().ln() + ln_scale, v.signum(), c)
}

/// `log((2 sign e^{ln_abs} + c)^2)`.
fn ln_sq_from_ln(ln_abs: f64, sign: f64, c: f64) -> f64 {
    if ln_abs > 300.0 {
        2.0 * (ln_abs + std::f64::consts::LN_2)
    } else {
        2.0 * (2.0 * sign * ln_abs.exp() + c).abs().ln()
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn ln_den(sc: &Scale) -> f64 {
    if sc.tiny() {
        -2.0 * sc.ln_inv_r + (10.0 * PI * PI).ln()
    } else {
        ln_num(3.0 * PI * sc.r, sin2_pi(sc.r / 2.0))
    }
}

/// `Im Y_r` at phase `t = r Re w` with `u = 2 pi r Im w` given directly.
/// Useful when `Im w` is too large for a double while `u` is moderate.
pub fn im_y_phase_u(sc: &Scale, t: f64, u: f64) -> f64 {
    let ld = ln_den(sc);
    let ln_n = if sc.tiny() {
        let sin2 = sin2_pi(t);
        let direct = if u > 30.0 {
            ln_num(u, sin2)
        } else {
            let m = u.exp_m1();
            (m * m + 4.0 * u.exp() * sin2).ln()
        };
        if direct.is_finite() && direct > TINY_NUM.ln() {
            direct
        } else {
            // Phase and height both O(r): factor r^2 out explicitly.
            let y = ln_sq_affine(u / (2.0 * PI), sc.ln_inv_r, 3.0);
            let tr = ln_sq_affine(t - t.round(), sc.ln_inv_r, 1.0);
            -2.0 * sc.ln_inv_r + 2.0 * PI.ln() + log_add_exp(y, tr)
        }
    } else {
        ln_num(u + 3.0 * PI * sc.r, sin2_pi(t + sc.r / 2.0))
    };
    (ln_n - ld) / (4.0 * PI)
}

/// `Im Y_r` at phase `t` with `u = 2 pi r Im w > 0` given through `log u`,
/// for heights whose `u` underflows or overflows a double.
pub fn im_y_phase_ln_u(sc: &Scale, t: f64, ln_u: f64) -> f64 {
    if !sc.tiny() || ln_u > -300.0 {
        return im_y_phase_u(sc, t, ln_u.exp());
    }
    let y = ln_sq_from_ln(ln_u - (2.0 * PI).ln() + sc.ln_inv_r, 1.0, 3.0);
    let tr = ln_sq_affine(t - t.round(), sc.ln_inv_r, 1.0);
    let ln_n = -2.0 * sc.ln_inv_r + 2.0 * PI.ln() + log_add_exp(y, tr);
    (ln_n - ln_den(sc)) / (4.0 * PI)
}

/// `Im Y_r(w)` at phase `t = r Re w` and height `y = Im w`.
pub fn im_y_phase(sc: &Scale, t: f64, y: f64) -> f64 {
    let u = if sc.tiny() {
        2.0 * PI * y * (-sc.ln_inv_r).exp()
    } else {
        2.0 * PI * sc.r * y
    };
    if sc.tiny() && u.abs() < TINY_NUM && t - t.round() == 0.0 {
        let ld = ln_den(sc);
        let ln_n = -2.0 * sc.ln_inv_r + 2.0 * PI.ln() + log_add_exp(ln_sq_affine(y, 0.0, 3.0), 0.0);
        return (ln_n - ld) / (4.0 * PI);
    }
    im_y_phase_u(sc, t, u)
}

fn check(r: f64, y: f64) -> Result<()> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::Domain(format!("Y_r needs r in (0, 1/2], got {r}")));
    }
    if !(y >= -1.0) {
        return Err(Error::Domain(format!("Y_r needs Im w >= -1, got {y}")));
    }
    Ok(())
}

/// `Y_r(w)`.
pub fn y_map(r: f64, w: HalfPlanePoint) -> Result<HalfPlanePoint> {
    check(r, w.y)?;
    let t = r * w.x;
    Ok(HalfPlanePoint::new(t, im_y_phase(&Scale::new(r), t, w.y)))
}

/// The signed map: `Y_{alpha_n}` if `eps_n = -1`, else `-conj Y_{alpha_n}`.
pub fn y_signed(nie: &NearestIntegerExpansion, n: usize, w: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let r = nie.alpha(n as i64)?;
    let p = y_map(r, w)?;
    Ok(match nie.eps(n)? {
        Sign::Minus => p,
        Sign::Plus => HalfPlanePoint::new(-p.x, p.y),
    })
}

/// Height `y` on the vertical `Re w = x_target / r` with `Im Y_r = y_target`.
pub fn y_inverse_on_vertical(r: f64, x_target: f64, y_target: f64, tol: f64) -> Result<f64> {
    check(r, -1.0)?;
    inverse_phase(&Scale::new(r), x_target, y_target, tol)
}

/// As [`y_inverse_on_vertical`] for a [`Scale`].
pub fn inverse_phase(sc: &Scale, t: f64, y_target: f64, tol: f64) -> Result<f64> {
    let f = |y: f64| im_y_phase(sc, t, y);
    let f_lo = f(-1.0);
    if y_target < f_lo - tol {
        return Err(Error::NoPreimage(format!(
            "target {y_target} below the line minimum {f_lo}"
        )));
    }
    if y_target <= f_lo {
        return Ok(-1.0);
    }
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut grow = 0;
    while f(hi) < y_target {
        lo = hi;
        hi = 2.0 * hi + 1.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::NonConvergence(format!(
                "no upper bracket for target {y_target}"
            )));
        }
    }
    for _ in 0..INVERSE_CAP {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - y_target).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if v < y_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence(format!(
        "bisection cap reached for target {y_target}"
    )))
}

/// Solve `Im Y_r = y_target` at phase `t` for `log u`, with
/// `u = 2 pi r Im w > 0`. Needed when the preimage height is outside the
/// double range; `y_target` must lie above the value at `u -> 0+`.
pub fn inverse_phase_ln_u(sc: &Scale, t: f64, y_target: f64, tol: f64) -> Result<f64> {
    let f = |ln_u: f64| im_y_phase_ln_u(sc, t, ln_u);
    let mut lo = -sc.ln_inv_r - 60.0;
    if f(lo) > y_target {
        return Err(Error::NoPreimage(format!(
            "target {y_target} below the values reached for u > 0"
        )));
    }
    let mut hi = 1.0;
    while f(hi) < y_target {
        lo = hi;
        hi += 2.0;
        if hi > 700.0 {
            return Err(Error::NonConvergence(format!(
                "no upper bracket for target {y_target}"
            )));
        }
    }
    for _ in 0..INVERSE_CAP {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - y_target).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if v < y_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence(format!(
        "bisection cap reached for target {y_target}"
    )))
}

/// `Y_r(x + iy)` at arbitrary precision; returns `(Re, Im)`.
///
/// Works at `ctx.prec` plus guard bits covering `log2(1/r)`.
pub fn y_map_big(ctx: &mut BigCtx, r: &BigFloat, x: &BigFloat, y: &BigFloat) -> (BigFloat, BigFloat) {
    let base = ctx.prec;
    let guard = crate::bigreal::exponent(r).map_or(0, |e| (-e).max(0) as usize);
    ctx.with_prec(base + guard + 64);
    let pi = ctx.pi();
    let one = ctx.small(1);
    let two = ctx.small(2);
    let four = ctx.small(4);
    let t = ctx.mul(r, x);
    let half_r = ctx.div(r, &two);
    // Reduce the phase so the sine argument stays small.
    let v = ctx.add(&t, &half_r);
    let v_red = {
        let k = ctx.add(&v, &ctx.div(&one, &two)).floor();
        ctx.sub(&v, &k)
    };
    let three_pi_r = ctx.mul(&ctx.mul(&ctx.small(3), &pi), r);
    let s = ctx.add(&ctx.mul(&ctx.mul(&two, &pi), &ctx.mul(r, y)), &three_pi_r);
    let ln_n = {
        let es = ctx.exp(&s);
        let m = ctx.sub(&es, &one);
        let sn = ctx.sin(&ctx.mul(&pi, &v_red));
        let q = ctx.add(&ctx.mul(&m, &m), &ctx.mul(&ctx.mul(&four, &es), &ctx.mul(&sn, &sn)));
        ctx.ln(&q)
    };
    let ln_d = {
        let es = ctx.exp(&three_pi_r);
        let m = ctx.sub(&es, &one);
        let sn = ctx.sin(&ctx.mul(&pi, &half_r));
        let q = ctx.add(&ctx.mul(&m, &m), &ctx.mul(&ctx.mul(&four, &es), &ctx.mul(&sn, &sn)));
        ctx.ln(&q)
    };
    let im = ctx.div(&ctx.sub(&ln_n, &ln_d), &ctx.mul(&four, &pi));
    ctx.with_prec(base);
    let mut re = t;
    let mut im = im;
    re.set_precision(ctx.prec, crate::bigreal::RM).expect("precision");
    im.set_precision(ctx.prec, crate::bigreal::RM).expect("precision");
    (re, im)
}
