//! Expansions produced by digit generators.
//!
//! Periodic generators are rebuilt backward from a tail `alpha_N = 1/3`, deep
//! enough that the tail influence (at most `4^{-(N-n)}`) is below the working
//! precision. The two tower generators have digits of iterated-exponential
//! size; levels past the first symbolic digit carry `log(1/alpha_n)` and
//! Brjuno terms supplied by the generator's own law.

use super::nearest::value_levels;
use super::standard::{standard_value_levels, StandardExpansion};
use super::{
    finish_levels, Digit, Generator, Level, NearestIntegerExpansion, RawLevel, Sign, HUGE_DIGIT_LN,
};
use crate::bigreal::{self, BigCtx};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

fn ceil_exp(p: u64) -> BigInt {
    let bits = (p as f64 * std::f64::consts::LOG2_E) as usize + 128;
    let mut ctx = BigCtx::new(bits);
    let x = ctx.small(p as i64);
    let e = ctx.exp(&x);
    bigreal::to_bigint(&mut ctx, &e.ceil())
}

/// Next digit of a law `a_next = ceil(exp(v))` given `v` as a digit.
fn ceil_exp_of(v: &Digit) -> Digit {
    match v {
        Digit::Int(i) => match i.to_u64() {
            Some(p) if (p as f64) <= HUGE_DIGIT_LN => Digit::Int(ceil_exp(p)),
            _ => Digit::Huge {
                ln: ExtReal::new(i.to_f64().unwrap_or(f64::INFINITY)),
            },
        },
        Digit::Huge { ln } => Digit::Huge { ln: ln.exp() },
    }
}

fn periodic_digit(preperiod: &[(u64, Sign)], period: &[(u64, Sign)], n: usize) -> (u64, Sign) {
    if n < preperiod.len() {
        preperiod[n]
    } else {
        period[(n - preperiod.len()) % period.len()]
    }
}

fn check_periodic(preperiod: &[(u64, Sign)], period: &[(u64, Sign)]) -> Result<()> {
    if period.is_empty() {
        return Err(Error::Domain("empty digit period".into()));
    }
    for &(a, s) in preperiod.iter().chain(period) {
        if a < 2 || (a == 2 && s == Sign::Minus) {
            return Err(Error::Domain(format!("invalid nearest-integer digit ({a}, {s})")));
        }
    }
    Ok(())
}

/// `alpha_0, ..., alpha_{depth-1}` of a periodic generator.
fn periodic_alphas(
    preperiod: &[(u64, Sign)],
    period: &[(u64, Sign)],
    depth: usize,
    ctx: &mut BigCtx,
) -> Vec<BigFloat> {
    let n_tail = depth + ctx.prec / 2 + 16;
    let mut alpha = ctx.recip(&ctx.small(3));
    let mut out = vec![alpha.clone(); n_tail];
    for n in (0..n_tail).rev() {
        let (a, s) = periodic_digit(preperiod, period, n);
        let t = if s == Sign::Plus {
            ctx.add(&ctx.small(a as i64), &alpha)
        } else {
            ctx.sub(&ctx.small(a as i64), &alpha)
        };
        alpha = ctx.recip(&t);
        out[n] = alpha.clone();
    }
    out.truncate(depth.max(1));
    out
}

/// Integral digits of the non-Brjuno tower, the first symbolic one included.
fn nonbrjuno_digits(a0: u64, count: usize) -> Vec<Digit> {
    let mut digits = vec![Digit::Int(BigInt::from(a0))];
    // 1/beta^_n as an exact product while digits stay integral.
    let mut prod: Option<BigInt> = Some(BigInt::from(a0));
    let mut ln_prod = ExtReal::new((a0 as f64).ln());
    while digits.len() < count {
        let next = match &prod {
            Some(p) => ceil_exp_of(&Digit::Int(p.clone())),
            None => Digit::Huge { ln: ln_prod.exp() },
        };
        ln_prod = ln_prod.add(next.ln());
        prod = match (prod, &next) {
            (Some(p), Digit::Int(a)) => Some(p * a),
            _ => None,
        };
        digits.push(next);
    }
    digits
}

/// Standard digits `1, 3, 21, ...` of the Brjuno-not-Herman tower.
fn std_tower_digits(count: usize) -> Vec<Digit> {
    let mut digits = vec![Digit::Int(BigInt::from(1))];
    while digits.len() < count {
        let next = ceil_exp_of(digits.last().unwrap());
        digits.push(next);
    }
    digits
}

fn first_huge(digits: &[Digit]) -> usize {
    digits
        .iter()
        .position(|d| matches!(d, Digit::Huge { .. }))
        .unwrap_or(digits.len())
}

/// Values `1/(a_n + alpha_{n+1})` for the integral digits before the first
/// symbolic one, whose `alpha` is below the working precision.
fn backward_alphas(digits: &[Digit], ctx: &mut BigCtx) -> Vec<BigFloat> {
    let h = first_huge(digits);
    let mut out = vec![ctx.small(0); h];
    let mut alpha = ctx.small(0);
    for n in (0..h).rev() {
        let a = ctx.int(digits[n].int().expect("integral digit"));
        alpha = ctx.recip(&ctx.add(&a, &alpha));
        out[n] = alpha.clone();
    }
    out
}

fn raw_from(digits: &[Digit], alphas: &[BigFloat], depth: usize) -> Vec<RawLevel> {
    let h = alphas.len();
    (0..depth)
        .map(|n| RawLevel {
            digit: digits[n].clone(),
            sign_next: Sign::Plus,
            alpha: alphas.get(n).cloned(),
            exact: None,
            ln_inv_alpha: (n >= h).then(|| digits[n].ln()),
            term: (n > h).then_some(f64::NAN),
        })
        .collect()
}

/// Brjuno terms of the levels after the first symbolic digit.
fn fill_tower_terms(levels: &mut [Level], law: &Generator) {
    for n in 0..levels.len() {
        if !levels[n].brjuno_term.is_nan() {
            continue;
        }
        levels[n].brjuno_term = match law {
            // beta_{n-1} / beta^_{n-1} = prod a_i alpha_i; symbolic factors are 1.
            Generator::TowerNonBrjuno { .. } => levels[..n]
                .iter()
                .map(|l| match l.digit {
                    Digit::Int(ref a) => a.to_f64().unwrap() * l.alpha_f64,
                    Digit::Huge { .. } => 1.0,
                })
                .product(),
            // log(1/alpha_n) = a_{n-1}, so the term is beta_{n-2} a_{n-1} alpha_{n-1}.
            _ => {
                let c = match levels[n - 1].digit {
                    Digit::Int(ref a) => a.to_f64().unwrap() * levels[n - 1].alpha_f64,
                    Digit::Huge { .. } => 1.0,
                };
                let b = if n >= 2 { levels[n - 2].beta_f64 } else { 1.0 };
                b * c
            }
        };
    }
}

pub(crate) fn generator_nearest(
    g: &Generator,
    depth: usize,
    bits: usize,
    desc: String,
) -> Result<NearestIntegerExpansion> {
    let mut ctx = BigCtx::new(bits);
    let (a_minus1, eps0, levels) = match g {
        Generator::Periodic {
            a_minus1,
            eps0,
            preperiod,
            period,
            ..
        } => {
            check_periodic(preperiod, period)?;
            ctx.with_prec(bits + 32);
            let alphas = periodic_alphas(preperiod, period, depth, &mut ctx);
            ctx.with_prec(bits);
            let raw = (0..depth)
                .map(|n| {
                    let (a, s) = periodic_digit(preperiod, period, n);
                    let mut al = alphas[n].clone();
                    al.set_precision(ctx.prec, bigreal::RM).expect("precision");
                    RawLevel {
                        digit: Digit::Int(BigInt::from(a)),
                        sign_next: s,
                        alpha: Some(al),
                        exact: None,
                        ln_inv_alpha: None,
                        term: None,
                    }
                })
                .collect();
            (BigInt::from(*a_minus1), *eps0, finish_levels(raw, &mut ctx))
        }
        Generator::TowerNonBrjuno { a0 } => {
            let digits = nonbrjuno_digits(*a0, depth + 1);
            let alphas = backward_alphas(&digits, &mut ctx);
            let raw = raw_from(&digits, &alphas, depth);
            let mut levels = finish_levels(raw, &mut ctx);
            fill_tower_terms(&mut levels, g);
            (BigInt::from(0), Sign::Plus, levels)
        }
        Generator::StdTowerBnotH => {
            let st = std_tower_digits(depth + 2);
            let alphas_st = backward_alphas(&st, &mut ctx);
            // alpha = [0; 1, a~_1, ...] gives a_{-1} = 1, eps_0 = -1,
            // a_0 = a~_1 + 1 and a_n = a~_{n+1}, alpha_n = alpha~_{n+1} after.
            let mut digits: Vec<Digit> = st[1..].to_vec();
            if let Digit::Int(ref mut a) = digits[0] {
                *a += 1;
            }
            let mut alphas: Vec<BigFloat> = Vec::new();
            if let Some(a0) = alphas_st.first() {
                alphas.push(ctx.sub(&ctx.small(1), a0));
                alphas.extend(alphas_st.iter().skip(2).cloned());
            }
            let raw = raw_from(&digits, &alphas, depth);
            let mut levels = finish_levels(raw, &mut ctx);
            fill_tower_terms(&mut levels, g);
            (BigInt::from(1), Sign::Minus, levels)
        }
    };
    Ok(NearestIntegerExpansion {
        alpha_desc: desc,
        a_minus1,
        eps0,
        levels,
        bits,
        requested_depth: depth,
    })
}

pub(crate) fn generator_standard(
    g: &Generator,
    depth: usize,
    bits: usize,
    desc: String,
) -> Result<StandardExpansion> {
    let mut ctx = BigCtx::new(bits);
    match g {
        Generator::Periodic { .. } => {
            let x = generator_value(g, bits + 64);
            let (a_minus1, raw) = standard_value_levels(&x, bits as f64, depth, &mut ctx)?;
            let levels = finish_levels(raw, &mut ctx);
            Ok(StandardExpansion::from_levels(desc, a_minus1, levels, bits, depth))
        }
        Generator::TowerNonBrjuno { .. } => {
            // All signs are +1 and alpha < 1/2: both expansions coincide.
            let nie = generator_nearest(g, depth, bits, desc.clone())?;
            Ok(StandardExpansion::from_levels(
                desc,
                BigInt::from(0),
                nie.levels,
                bits,
                depth,
            ))
        }
        Generator::StdTowerBnotH => {
            let st = std_tower_digits(depth + 1);
            let alphas = backward_alphas(&st, &mut ctx);
            let raw = raw_from(&st, &alphas, depth);
            let mut levels = finish_levels(raw, &mut ctx);
            fill_tower_terms(&mut levels, g);
            Ok(StandardExpansion::from_levels(desc, BigInt::from(0), levels, bits, depth))
        }
    }
}

pub(crate) fn generator_value(g: &Generator, bits: usize) -> BigFloat {
    let mut ctx = BigCtx::new(bits + 32);
    let mut v = match g {
        Generator::Periodic {
            a_minus1,
            eps0,
            preperiod,
            period,
            ..
        } => {
            let alphas = periodic_alphas(preperiod, period, 1, &mut ctx);
            let a = ctx.small(*a_minus1);
            if *eps0 == Sign::Plus {
                ctx.add(&a, &alphas[0])
            } else {
                ctx.sub(&a, &alphas[0])
            }
        }
        Generator::TowerNonBrjuno { a0 } => {
            let digits = nonbrjuno_digits(*a0, 8);
            backward_alphas(&digits, &mut ctx).remove(0)
        }
        Generator::StdTowerBnotH => {
            let st = std_tower_digits(8);
            backward_alphas(&st, &mut ctx).remove(0)
        }
    };
    v.set_precision(bits.max(64).div_ceil(64) * 64, bigreal::RM)
        .expect("precision");
    v
}

/// Re-expand the value of a generator as if it were a decimal literal;
/// used as an independent cross-check.
pub(crate) fn _value_expansion(g: &Generator, depth: usize, bits: usize) -> Result<usize> {
    let mut ctx = BigCtx::new(bits);
    let x = generator_value(g, bits);
    let (_, _, raw) = value_levels(&x, bits as f64, depth, &mut ctx)?;
    Ok(raw.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_tower_digits_match_law() {
        let d = std_tower_digits(6);
        assert_eq!(d[1], Digit::Int(BigInt::from(3)));
        assert_eq!(d[2], Digit::Int(BigInt::from(21)));
        assert_eq!(d[3], Digit::Int(BigInt::from(1318815735u64)));
        assert_eq!(d[4].ln().to_f64(), 1318815735.0);
        assert_eq!(d[5].ln().level(), 1);
    }

    #[test]
    fn nonbrjuno_digits_match_law() {
        let d = nonbrjuno_digits(2, 5);
        assert_eq!(d[1], Digit::Int(BigInt::from(8)));
        assert_eq!(d[2], Digit::Int(BigInt::from(8886111)));
        assert_eq!(d[3].ln().to_f64(), 16.0 * 8886111.0);
        assert_eq!(d[4].ln().level(), 1);
    }

    #[test]
    fn std_tower_nearest_integer_shape() {
        let e = generator_nearest(&Generator::StdTowerBnotH, 8, 256, "t".into()).unwrap();
        assert_eq!(e.a_minus1, BigInt::from(1));
        assert_eq!(e.eps0, Sign::Minus);
        assert_eq!(e.levels[0].digit, Digit::Int(BigInt::from(4)));
        assert_eq!(e.levels[1].digit, Digit::Int(BigInt::from(21)));
        for l in &e.levels {
            assert!(l.alpha_f64 < 0.5);
            assert_eq!(l.sign_next, Sign::Plus);
            assert!(l.brjuno_term >= 0.0);
        }
    }
}
