//! The nearest-integer (modified) continued fraction.

use super::source::AlphaSource;
use super::towers;
use super::{finish_levels, Digit, NearestIntegerExpansion, RawLevel, RotationNumber, Sign};
use crate::bigreal::{self, BigCtx};
use crate::error::{Error, Result};
use astro_float::BigFloat;
use num_bigint::BigInt;

/// Expand `alpha` through `depth` levels; a truncated result is an error.
pub fn expand_nearest_integer(alpha: &RotationNumber, depth: usize) -> Result<NearestIntegerExpansion> {
    let e = expand_nearest_integer_partial(alpha, depth)?;
    if e.is_truncated() {
        return Err(Error::PrecisionExhausted {
            requested: depth,
            certified: e.certified_depth(),
        });
    }
    Ok(e)
}

/// Expand `alpha` through at most `depth` levels, stopping early (and
/// reporting it through `certified_depth`) when a decimal source runs out of
/// trusted bits.
pub fn expand_nearest_integer_partial(
    alpha: &RotationNumber,
    depth: usize,
) -> Result<NearestIntegerExpansion> {
    let bits = alpha.bits();
    let mut ctx = BigCtx::new(bits);
    let (a_minus1, eps0, raw) = match alpha.source() {
        AlphaSource::Surd(s) => surd_levels(s, depth, &mut ctx),
        AlphaSource::Decimal { .. } => {
            let x = alpha.value(bits);
            value_levels(&x, bits as f64, depth, &mut ctx)?
        }
        AlphaSource::Generator(g) => return towers::generator_nearest(g, depth, bits, alpha.desc()),
    };
    let levels = finish_levels(raw, &mut ctx);
    Ok(NearestIntegerExpansion {
        alpha_desc: alpha.desc(),
        a_minus1,
        eps0,
        levels,
        bits,
        requested_depth: depth,
    })
}

fn surd_levels(s: &super::QuadSurd, depth: usize, ctx: &mut BigCtx) -> (BigInt, Sign, Vec<RawLevel>) {
    let a_minus1 = s.round();
    let y = s.sub_int(&a_minus1);
    let eps0 = Sign::of(y.is_positive());
    let mut alpha = y.abs();
    let mut raw = Vec::with_capacity(depth);
    for _ in 0..depth {
        let inv = alpha.recip();
        let a = inv.round();
        let rest = inv.sub_int(&a);
        let sign_next = Sign::of(rest.is_positive());
        raw.push(RawLevel {
            digit: Digit::Int(a),
            sign_next,
            alpha: Some(alpha.eval(ctx)),
            exact: Some(alpha.clone()),
            ln_inv_alpha: None,
            term: None,
        });
        alpha = rest.abs();
    }
    (a_minus1, eps0, raw)
}

fn round_big(ctx: &BigCtx, x: &BigFloat) -> BigFloat {
    let half = ctx.f64(0.5);
    ctx.add(x, &half).floor()
}

/// Expansion of a value known to `trusted_bits` relative bits. Each step
/// multiplies the absolute error by `1/alpha_n^2`; levels are emitted while
/// at least 64 bits survive.
pub(crate) fn value_levels(
    x: &BigFloat,
    trusted_bits: f64,
    depth: usize,
    ctx: &mut BigCtx,
) -> Result<(BigInt, Sign, Vec<RawLevel>)> {
    let guard = 64;
    let target = ctx.prec;
    ctx.with_prec(target + guard);
    let a_minus1_f = round_big(ctx, x);
    let y = ctx.sub(x, &a_minus1_f);
    let a_minus1 = bigreal::to_bigint(ctx, &a_minus1_f);
    if y.is_zero() {
        ctx.with_prec(target);
        return Err(Error::RationalDetected { level: 0 });
    }
    let eps0 = Sign::of(y.is_positive());
    let mut alpha = y.abs();
    let log2 = |v: &BigFloat| bigreal::ln_f64(v) / std::f64::consts::LN_2;
    // log2 of the absolute error of alpha_n.
    let x_mag = if x.is_zero() { 0.0 } else { log2(&x.abs()).max(0.0) };
    let mut err = x_mag - trusted_bits;
    if log2(&alpha) < -(trusted_bits - 8.0) {
        ctx.with_prec(target);
        return Err(Error::RationalDetected { level: 0 });
    }
    let mut raw = Vec::with_capacity(depth);
    if log2(&alpha) - err >= 64.0 {
        for n in 0..depth {
            let remaining = log2(&alpha) - err;
            let inv = ctx.recip(&alpha);
            let a_f = round_big(ctx, &inv);
            let rest = ctx.sub(&inv, &a_f);
            let next_err = err - 2.0 * log2(&alpha);
            if rest.is_zero() || log2(&rest.abs()) < -(remaining - 8.0) {
                ctx.with_prec(target);
                return Err(Error::RationalDetected { level: n + 1 });
            }
            let next = rest.abs();
            let next_trusted = log2(&next) - next_err;
            if next_trusted < 16.0 {
                // The sign of the remainder is not reliable.
                break;
            }
            let mut a_store = alpha.clone();
            a_store.set_precision(target, bigreal::RM).expect("precision");
            raw.push(RawLevel {
                digit: Digit::Int(bigreal::to_bigint(ctx, &a_f)),
                sign_next: Sign::of(rest.is_positive()),
                alpha: Some(a_store),
                exact: None,
                ln_inv_alpha: None,
                term: None,
            });
            if next_trusted < 64.0 {
                break;
            }
            alpha = next;
            err = next_err;
        }
    }
    ctx.with_prec(target);
    Ok((a_minus1, eps0, raw))
}
