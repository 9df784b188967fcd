//! Exact arithmetic on quadratic irrationals `(p + q*sqrt(d)) / r`.

use crate::bigreal::BigCtx;
use crate::error::{Error, Result};
use astro_float::BigFloat;
use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A quadratic irrational `(p + q*sqrt(d)) / r` kept in lowest terms with
/// `r > 0`, `q != 0` and `d > 1` square-free of squares.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

impl QuadSurd {
    pub fn new(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self> {
        if d <= BigInt::one() {
            return Err(Error::Domain("surd radicand must exceed 1".into()));
        }
        if q.is_zero() {
            return Err(Error::Domain("surd coefficient q must be nonzero".into()));
        }
        if r.is_zero() {
            return Err(Error::Domain("surd denominator must be nonzero".into()));
        }
        let s = d.sqrt();
        if &s * &s == d {
            return Err(Error::Domain(format!("{d} is a perfect square")));
        }
        Ok(QuadSurd { p, q, d, r }.normalized())
    }

    pub fn from_i64(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        Self::new(p.into(), q.into(), d.into(), r.into())
    }

    /// Parse `"p,q,d,r"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("surd needs p,q,d,r: {s:?}")));
        }
        let mut v = Vec::with_capacity(4);
        for part in parts {
            v.push(
                part.parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("{part:?}: {e}")))?,
            );
        }
        let r = v.pop().unwrap();
        let d = v.pop().unwrap();
        let q = v.pop().unwrap();
        let p = v.pop().unwrap();
        Self::new(p, q, d, r)
    }

    fn normalized(mut self) -> Self {
        // Pull square factors of d into q.
        let mut k = BigInt::from(2);
        while &k * &k <= self.d && k < BigInt::from(1000) {
            let kk = &k * &k;
            while self.d.is_multiple_of(&kk) {
                self.d /= &kk;
                self.q *= &k;
            }
            k += 1;
        }
        if self.r.is_negative() {
            self.p = -self.p;
            self.q = -self.q;
            self.r = -self.r;
        }
        let g = self.p.gcd(&self.q).gcd(&self.r);
        if !g.is_one() && !g.is_zero() {
            self.p /= &g;
            self.q /= &g;
            self.r /= &g;
        }
        self
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.p, &self.q, &self.d, &self.r)
    }

    // floor(q*sqrt(d)); q*sqrt(d) is never an integer.
    fn floor_q_root(&self) -> BigInt {
        let s = (&self.q * &self.q * &self.d).sqrt();
        if self.q.is_positive() {
            s
        } else {
            -s - 1
        }
    }

    pub fn floor(&self) -> BigInt {
        (&self.p + self.floor_q_root()).div_floor(&self.r)
    }

    /// Nearest integer (ties are impossible for irrationals).
    pub fn round(&self) -> BigInt {
        let shifted = QuadSurd {
            p: &self.p * 2 + &self.r,
            q: &self.q * 2,
            d: self.d.clone(),
            r: &self.r * 2,
        };
        shifted.floor()
    }

    pub fn sub_int(&self, k: &BigInt) -> Self {
        QuadSurd {
            p: &self.p - k * &self.r,
            q: self.q.clone(),
            d: self.d.clone(),
            r: self.r.clone(),
        }
        .normalized()
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        self.sub_int(&-k)
    }

    pub fn neg(&self) -> Self {
        QuadSurd {
            p: -&self.p,
            q: -&self.q,
            d: self.d.clone(),
            r: self.r.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        let den = &self.p * &self.p - &self.q * &self.q * &self.d;
        QuadSurd {
            p: &self.r * &self.p,
            q: -&self.r * &self.q,
            d: self.d.clone(),
            r: den,
        }
        .normalized()
    }

    /// Exact sign of `self` (never zero).
    pub fn is_positive(&self) -> bool {
        // sign(p + q sqrt d) since r > 0.
        match (self.p.sign(), self.q.sign()) {
            (BigSign::Minus, BigSign::Minus) => false,
            (BigSign::Plus, BigSign::Plus) | (BigSign::NoSign, BigSign::Plus) => true,
            (BigSign::NoSign, _) => false,
            _ => {
                let pp = &self.p * &self.p;
                let qq = &self.q * &self.q * &self.d;
                if self.q.is_positive() {
                    qq > pp
                } else {
                    pp > qq
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_positive() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn one_minus(&self) -> Self {
        self.neg().add_int(&BigInt::one())
    }

    pub fn mul(&self, other: &QuadSurd) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Domain("surds with different radicands".into()));
        }
        let p = &self.p * &other.p + &self.q * &other.q * &self.d;
        let q = &self.p * &other.q + &self.q * &other.p;
        let r = &self.r * &other.r;
        if q.is_zero() {
            return Err(Error::Domain("product is rational".into()));
        }
        Ok(QuadSurd {
            p,
            q,
            d: self.d.clone(),
            r,
        }
        .normalized())
    }

    /// Value at the context precision; guard bits absorb cancellation in
    /// `p + q sqrt(d)`.
    pub fn eval(&self, ctx: &mut BigCtx) -> BigFloat {
        let target = ctx.prec;
        let guard = self.p.bits().max(self.q.bits() + self.d.bits()) as usize + self.r.bits() as usize + 64;
        ctx.with_prec(target + guard);
        let d = ctx.int(&self.d);
        let q = ctx.int(&self.q);
        let p = ctx.int(&self.p);
        let r = ctx.int(&self.r);
        let num = ctx.add(&p, &ctx.mul(&q, &ctx.sqrt(&d)));
        let mut v = ctx.div(&num, &r);
        ctx.with_prec(target);
        v.set_precision(ctx.prec, crate::bigreal::RM).expect("precision");
        v
    }

    pub fn to_f64(&self) -> f64 {
        let mut c = BigCtx::new(128);
        crate::bigreal::to_f64(&self.eval(&mut c))
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}*sqrt({}))/{}", self.p, self.q, self.d, self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> QuadSurd {
        QuadSurd::from_i64(-1, 1, 5, 2).unwrap()
    }

    #[test]
    fn floor_and_round() {
        let g = golden();
        assert_eq!(g.floor(), BigInt::from(0));
        assert_eq!(g.round(), BigInt::from(1));
        let m = g.neg();
        assert_eq!(m.floor(), BigInt::from(-1));
        assert_eq!(m.round(), BigInt::from(-1));
        let s = QuadSurd::from_i64(0, 1, 2, 1).unwrap();
        assert_eq!(s.floor(), BigInt::from(1));
        assert_eq!(s.round(), BigInt::from(1));
    }

    #[test]
    fn reciprocal_is_exact() {
        let g = golden();
        // 1/g = g + 1
        assert_eq!(g.recip(), g.add_int(&BigInt::one()));
    }

    #[test]
    fn square_factors_are_absorbed() {
        let a = QuadSurd::from_i64(0, 1, 8, 1).unwrap();
        let b = QuadSurd::from_i64(0, 2, 2, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_rational_input() {
        assert!(QuadSurd::from_i64(1, 1, 4, 1).is_err());
        assert!(QuadSurd::from_i64(1, 0, 5, 1).is_err());
        assert!(QuadSurd::parse("1,2,3").is_err());
    }

    #[test]
    fn evaluation_matches_double() {
        assert_eq!(golden().to_f64(), 0.6180339887498949);
    }
}
