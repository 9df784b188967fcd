//! The standard (regular) continued fraction.

use super::source::AlphaSource;
use super::towers;
use super::{finish_levels, Digit, Level, RawLevel, RotationNumber, Sign};
use crate::bigreal::{self, BigCtx};
use crate::error::{Error, Result};
use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// `alpha = a~_{-1} + alpha~_0`, `1/alpha~_n = a~_n + alpha~_{n+1}`.
#[derive(Clone, Debug)]
pub struct StandardExpansion {
    pub alpha_desc: String,
    pub a_minus1: BigInt,
    pub levels: Vec<Level>,
    /// `(p~_n, q~_n)` for `n = -2, -1, 0, ...` while digits are integral.
    pub convergents: Vec<(BigInt, BigInt)>,
    pub bits: usize,
    pub requested_depth: usize,
}

impl StandardExpansion {
    pub fn certified_depth(&self) -> usize {
        self.levels.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.levels.len() < self.requested_depth
    }

    /// `(p~_n, q~_n)` for `n >= -2`.
    pub fn convergent(&self, n: i64) -> Option<&(BigInt, BigInt)> {
        usize::try_from(n + 2).ok().and_then(|k| self.convergents.get(k))
    }

    pub(crate) fn from_levels(
        alpha_desc: String,
        a_minus1: BigInt,
        levels: Vec<Level>,
        bits: usize,
        requested_depth: usize,
    ) -> Self {
        let mut convergents = vec![
            (BigInt::one(), BigInt::zero()),
            (a_minus1.clone(), BigInt::one()),
        ];
        for l in &levels {
            let Some(a) = l.digit.int() else { break };
            let k = convergents.len();
            let (p1, q1) = &convergents[k - 1];
            let (p2, q2) = &convergents[k - 2];
            let next = (a * p1 + p2, a * q1 + q2);
            convergents.push(next);
        }
        StandardExpansion {
            alpha_desc,
            a_minus1,
            levels,
            convergents,
            bits,
            requested_depth,
        }
    }
}

pub fn expand_standard(alpha: &RotationNumber, depth: usize) -> Result<StandardExpansion> {
    let e = expand_standard_partial(alpha, depth)?;
    if e.is_truncated() {
        return Err(Error::PrecisionExhausted {
            requested: depth,
            certified: e.certified_depth(),
        });
    }
    Ok(e)
}

pub fn expand_standard_partial(alpha: &RotationNumber, depth: usize) -> Result<StandardExpansion> {
    let bits = alpha.bits();
    let mut ctx = BigCtx::new(bits);
    let (a_minus1, raw) = match alpha.source() {
        AlphaSource::Surd(s) => {
            let a_minus1 = s.floor();
            let mut x = s.sub_int(&a_minus1);
            let mut raw = Vec::with_capacity(depth);
            for _ in 0..depth {
                let inv = x.recip();
                let a = inv.floor();
                let rest = inv.sub_int(&a);
                raw.push(RawLevel {
                    digit: Digit::Int(a),
                    sign_next: Sign::Plus,
                    alpha: Some(x.eval(&mut ctx)),
                    exact: Some(x.clone()),
                    ln_inv_alpha: None,
                    term: None,
                });
                x = rest;
            }
            (a_minus1, raw)
        }
        AlphaSource::Decimal { .. } => {
            let x = alpha.value(bits);
            standard_value_levels(&x, bits as f64, depth, &mut ctx)?
        }
        AlphaSource::Generator(g) => return towers::generator_standard(g, depth, bits, alpha.desc()),
    };
    let levels = finish_levels(raw, &mut ctx);
    Ok(StandardExpansion::from_levels(
        alpha.desc(),
        a_minus1,
        levels,
        bits,
        depth,
    ))
}

/// Standard digits of a value known to `trusted_bits` relative bits.
pub(crate) fn standard_value_levels(
    x: &BigFloat,
    trusted_bits: f64,
    depth: usize,
    ctx: &mut BigCtx,
) -> Result<(BigInt, Vec<RawLevel>)> {
    let target = ctx.prec;
    ctx.with_prec(target + 64);
    let log2 = |v: &BigFloat| bigreal::ln_f64(v) / std::f64::consts::LN_2;
    let fl = x.floor();
    let a_minus1 = bigreal::to_bigint(ctx, &fl);
    let mut alpha = ctx.sub(x, &fl);
    if alpha.is_zero() {
        ctx.with_prec(target);
        return Err(Error::RationalDetected { level: 0 });
    }
    let x_mag = if x.is_zero() { 0.0 } else { log2(&x.abs()).max(0.0) };
    let mut err = x_mag - trusted_bits;
    let mut raw = Vec::with_capacity(depth);
    if log2(&alpha) - err >= 64.0 {
        for n in 0..depth {
            let remaining = log2(&alpha) - err;
            let inv = ctx.recip(&alpha);
            let a = inv.floor();
            let rest = ctx.sub(&inv, &a);
            let next_err = err - 2.0 * log2(&alpha);
            if rest.is_zero() || log2(&rest) < -(remaining - 8.0) {
                ctx.with_prec(target);
                return Err(Error::RationalDetected { level: n + 1 });
            }
            let next_trusted = log2(&rest) - next_err;
            let one = ctx.small(1);
            let gap = ctx.sub(&one, &rest);
            // The floor is unreliable when the remainder is within error of 0 or 1.
            if next_trusted < 16.0 || log2(&gap) < next_err + 16.0 {
                break;
            }
            let mut a_store = alpha.clone();
            a_store.set_precision(target, bigreal::RM).expect("precision");
            raw.push(RawLevel {
                digit: Digit::Int(bigreal::to_bigint(ctx, &a)),
                sign_next: Sign::Plus,
                alpha: Some(a_store),
                exact: None,
                ln_inv_alpha: None,
                term: None,
            });
            if next_trusted < 64.0 {
                break;
            }
            alpha = rest;
            err = next_err;
        }
    }
    ctx.with_prec(target);
    Ok((a_minus1, raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::QuadSurd;

    #[test]
    fn golden_is_all_ones() {
        let g = RotationNumber::surd(QuadSurd::from_i64(-1, 1, 5, 2).unwrap());
        let e = expand_standard(&g, 30).unwrap();
        assert_eq!(e.a_minus1, BigInt::zero());
        assert!(e.levels.iter().all(|l| l.digit == Digit::Int(BigInt::one())));
    }

    #[test]
    fn convergent_determinant() {
        let s = RotationNumber::surd(QuadSurd::from_i64(1, 3, 7, 5).unwrap());
        let e = expand_standard(&s, 25).unwrap();
        for n in -1..24i64 {
            let (p, q) = e.convergent(n).unwrap();
            let (p1, q1) = e.convergent(n - 1).unwrap();
            let det = q * p1 - p * q1;
            let expect = if (n + 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(det, BigInt::from(expect), "n = {n}");
        }
    }

    #[test]
    fn decimal_matches_surd() {
        let d = RotationNumber::decimal("1.41421356237309504880168872420969807856967187537694", 160).unwrap();
        let e = expand_standard_partial(&d, 100).unwrap();
        assert!(e.certified_depth() > 20);
        assert_eq!(e.a_minus1, BigInt::one());
        assert!(e
            .levels
            .iter()
            .all(|l| l.digit == Digit::Int(BigInt::from(2))));
    }
}
