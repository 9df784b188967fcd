//! Thin helpers over `astro_float` used wherever more than double precision
//! is needed.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;

pub const RM: RoundingMode = RoundingMode::ToEven;

/// A precision together with the constant cache needed by transcendental
/// functions.
pub struct BigCtx {
    pub prec: usize,
    cc: Consts,
}

impl BigCtx {
    pub fn new(bits: usize) -> Self {
        let prec = bits.max(64).div_ceil(64) * 64;
        BigCtx {
            prec,
            cc: Consts::new().expect("constant cache"),
        }
    }

    pub fn with_prec(&mut self, bits: usize) -> &mut Self {
        self.prec = bits.max(64).div_ceil(64) * 64;
        self
    }

    pub fn int(&mut self, i: &BigInt) -> BigFloat {
        let p = self.prec.max(i.bits() as usize + 64);
        BigFloat::parse(&i.to_string(), Radix::Dec, p, RM, &mut self.cc)
    }

    pub fn small(&self, i: i64) -> BigFloat {
        let v = BigFloat::from_word(i.unsigned_abs(), self.prec);
        if i < 0 {
            v.neg()
        } else {
            v
        }
    }

    pub fn f64(&self, f: f64) -> BigFloat {
        BigFloat::from_f64(f, self.prec)
    }

    pub fn parse(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.prec, RM, &mut self.cc)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn recip(&self, a: &BigFloat) -> BigFloat {
        a.reciprocal(self.prec, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.prec, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.prec, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    pub fn format(&mut self, a: &BigFloat) -> String {
        a.format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| "NaN".to_string())
    }
}

/// Nearest double (truncated from the top 64 mantissa bits).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let (m, _p, s, e, _) = x.as_raw_parts().expect("finite value");
    let top = *m.last().expect("nonempty mantissa") as f64;
    let e = e as i64 - 64;
    let v = if e > 2000 {
        f64::INFINITY
    } else if e < -2200 {
        0.0
    } else if e < -1000 {
        top * 2f64.powi(-1000) * 2f64.powi((e + 1000) as i32)
    } else {
        top * 2f64.powi(e as i32)
    };
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`, or `None` for zero.
pub fn exponent(x: &BigFloat) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.exponent().map(|e| e as i64)
    }
}

/// Natural logarithm of a positive big value as a double, valid far outside
/// the double exponent range.
pub fn ln_f64(x: &BigFloat) -> f64 {
    let e = exponent(x).expect("positive value");
    let mut scaled = x.clone();
    scaled.set_exponent(0);
    to_f64(&scaled).abs().ln() + e as f64 * std::f64::consts::LN_2
}

pub fn cmp(a: &BigFloat, b: &BigFloat) -> std::cmp::Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => std::cmp::Ordering::Less,
        Some(0) => std::cmp::Ordering::Equal,
        _ => std::cmp::Ordering::Greater,
    }
}

/// Exact integer value of an integral big float.
pub fn to_bigint(ctx: &mut BigCtx, x: &BigFloat) -> BigInt {
    let i = x.int();
    let s = ctx.format(&i);
    parse_sci_int(&s)
}

// astro-float prints integers in scientific notation, e.g. "1.25e+2".
fn parse_sci_int(s: &str) -> BigInt {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let (ip, fp) = match mant.find('.') {
        Some(k) => (&mant[..k], &mant[k + 1..]),
        None => (mant, ""),
    };
    let mut digits = format!("{ip}{fp}");
    let shift = exp - fp.len() as i64;
    if shift >= 0 {
        digits.extend(std::iter::repeat('0').take(shift as usize));
    } else {
        let keep = (digits.len() as i64 + shift).max(0) as usize;
        digits.truncate(keep);
    }
    if digits.is_empty() {
        digits.push('0');
    }
    let v: BigInt = digits.parse().expect("decimal digits");
    if neg {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_to_double() {
        let c = BigCtx::new(256);
        let five = c.small(5);
        let one = c.small(1);
        let two = c.small(2);
        let g = c.div(&c.sub(&c.sqrt(&five), &one), &two);
        assert_eq!(to_f64(&g), 0.6180339887498949);
    }

    #[test]
    fn integer_round_trip() {
        let mut c = BigCtx::new(256);
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let x = c.int(&n);
        assert_eq!(to_bigint(&mut c, &x), n);
        let m: BigInt = "-42".parse().unwrap();
        let y = c.int(&m);
        assert_eq!(to_bigint(&mut c, &y), m);
    }

    #[test]
    fn log_of_tiny_value() {
        let mut c = BigCtx::new(128);
        let x = c.f64(-3000.0);
        let e = c.exp(&x);
        assert!((ln_f64(&e) + 3000.0).abs() < 1e-9);
        assert_eq!(to_f64(&e), 0.0);
    }
}
