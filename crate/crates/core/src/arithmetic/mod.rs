//! Continued-fraction engines.
//!
//! Two expansions of an irrational `alpha` are computed. The nearest-integer
//! (modified) expansion has `alpha_{n+1} = d(1/alpha_n, Z)` with digits `a_n`
//! and signs `eps_{n+1}`. The standard expansion has
//! `1/alpha~_n = a~_n + alpha~_{n+1}`. Both share the [`Level`] record so
//! that the Brjuno sums and the geometry can treat them alike.

mod nearest;
mod relations;
mod source;
mod standard;
mod surd;
mod towers;

pub use nearest::{expand_nearest_integer, expand_nearest_integer_partial};
pub use relations::{index_map_c, verify_expansion_relations, RelationReport};
pub use source::{AlphaSource, Generator, RotationNumber};
pub use standard::{expand_standard, expand_standard_partial, StandardExpansion};
pub use surd::QuadSurd;

use crate::bigreal::{self, BigCtx};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::fmt;

/// Default working precision in bits.
pub const DEFAULT_BITS: usize = 256;

/// Digits whose logarithm exceeds this are kept symbolically.
pub(crate) const HUGE_DIGIT_LN: f64 = 2000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+1")]
    Plus,
}

impl Sign {
    pub fn of(positive: bool) -> Sign {
        if positive {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_i64() as f64
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-1",
            Sign::Plus => "+1",
        })
    }
}

/// A continued-fraction digit; digits beyond `exp(2000)` are stored through
/// their logarithm.
#[derive(Clone, Debug, PartialEq)]
pub enum Digit {
    Int(BigInt),
    Huge { ln: ExtReal },
}

impl Digit {
    pub fn int(&self) -> Option<&BigInt> {
        match self {
            Digit::Int(i) => Some(i),
            Digit::Huge { .. } => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Digit::Int(i) => i.to_f64().unwrap_or(f64::INFINITY),
            Digit::Huge { .. } => f64::INFINITY,
        }
    }

    pub fn ln(&self) -> ExtReal {
        match self {
            Digit::Int(i) => {
                let f = i.to_f64().unwrap_or(f64::INFINITY);
                if f.is_finite() {
                    ExtReal::new(f.ln())
                } else {
                    ExtReal::new(i.bits() as f64 * std::f64::consts::LN_2)
                }
            }
            Digit::Huge { ln } => *ln,
        }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Digit::Int(i) => write!(f, "{i}"),
            Digit::Huge { ln } => write!(f, "exp({ln})"),
        }
    }
}

impl Serialize for Digit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One level of an expansion: the digit, the next sign, `alpha_n`, the
/// product `beta_n` and the Brjuno term `beta_{n-1} log(1/alpha_n)`.
#[derive(Clone, Debug)]
pub struct Level {
    pub digit: Digit,
    /// `eps_{n+1}`; always `Plus` for standard expansions.
    pub sign_next: Sign,
    /// `alpha_n` at working precision when representable.
    pub alpha: Option<BigFloat>,
    pub alpha_f64: f64,
    /// Exact value for surd sources.
    pub exact: Option<QuadSurd>,
    pub ln_inv_alpha: ExtReal,
    pub beta: Option<BigFloat>,
    pub beta_f64: f64,
    pub ln_inv_beta: ExtReal,
    pub brjuno_term: f64,
}

/// Raw material for a level before products are accumulated.
pub(crate) struct RawLevel {
    pub digit: Digit,
    pub sign_next: Sign,
    pub alpha: Option<BigFloat>,
    pub exact: Option<QuadSurd>,
    pub ln_inv_alpha: Option<ExtReal>,
    pub term: Option<f64>,
}

/// Accumulate `beta_n`, `log(1/beta_n)` and the Brjuno terms.
pub(crate) fn finish_levels(raw: Vec<RawLevel>, ctx: &mut BigCtx) -> Vec<Level> {
    let mut out: Vec<Level> = Vec::with_capacity(raw.len());
    let mut beta_prev: Option<BigFloat> = Some(ctx.small(1));
    let mut ln_inv_beta_prev = ExtReal::ZERO;
    for r in raw {
        let ln_inv_alpha = match (&r.ln_inv_alpha, &r.alpha) {
            (Some(l), _) => *l,
            (None, Some(a)) => ExtReal::new(-bigreal::ln_f64(a)),
            (None, None) => r.digit.ln(),
        };
        let alpha_f64 = match &r.alpha {
            Some(a) => bigreal::to_f64(a),
            None => (-ln_inv_alpha.to_f64()).exp(),
        };
        let term = match (r.term, &beta_prev, &r.alpha) {
            (Some(t), _, _) => t,
            (None, Some(b), Some(a)) => {
                let l = ctx.ln(a);
                bigreal::to_f64(&ctx.mul(b, &l)).abs()
            }
            (None, Some(b), None) => bigreal::to_f64(b) * ln_inv_alpha.to_f64(),
            (None, None, _) => 0.0,
        };
        let beta = match (&beta_prev, &r.alpha) {
            (Some(b), Some(a)) => Some(ctx.mul(b, a)),
            _ => None,
        };
        let ln_inv_beta = ln_inv_beta_prev.add(ln_inv_alpha);
        let beta_f64 = match &beta {
            Some(b) => bigreal::to_f64(b),
            None => (-ln_inv_beta.to_f64()).exp(),
        };
        ln_inv_beta_prev = ln_inv_beta;
        beta_prev = beta.clone();
        out.push(Level {
            digit: r.digit,
            sign_next: r.sign_next,
            alpha: r.alpha,
            alpha_f64,
            exact: r.exact,
            ln_inv_alpha,
            beta,
            beta_f64,
            ln_inv_beta,
            brjuno_term: term,
        });
    }
    out
}

/// The nearest-integer expansion `alpha = a_{-1} + eps_0 alpha_0`,
/// `1/alpha_n = a_n + eps_{n+1} alpha_{n+1}`.
#[derive(Clone, Debug)]
pub struct NearestIntegerExpansion {
    pub alpha_desc: String,
    pub a_minus1: BigInt,
    pub eps0: Sign,
    /// Certified levels `0..certified_depth`.
    pub levels: Vec<Level>,
    pub bits: usize,
    pub requested_depth: usize,
}

impl NearestIntegerExpansion {
    /// Number of certified levels.
    pub fn certified_depth(&self) -> usize {
        self.levels.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.levels.len() < self.requested_depth
    }

    fn check(&self, n: i64) -> Result<()> {
        if n < -1 || n >= self.levels.len() as i64 {
            return Err(Error::DepthExceeded {
                requested: n,
                available: self.levels.len(),
            });
        }
        Ok(())
    }

    /// `alpha_n` as a double, with `alpha_{-1} = 1`.
    pub fn alpha(&self, n: i64) -> Result<f64> {
        self.check(n)?;
        Ok(if n < 0 { 1.0 } else { self.levels[n as usize].alpha_f64 })
    }

    /// `eps_n` for `0 <= n <= certified_depth`.
    pub fn eps(&self, n: usize) -> Result<Sign> {
        if n == 0 {
            Ok(self.eps0)
        } else if n <= self.levels.len() {
            Ok(self.levels[n - 1].sign_next)
        } else {
            Err(Error::DepthExceeded {
                requested: n as i64,
                available: self.levels.len(),
            })
        }
    }

    pub fn ln_inv_alpha(&self, n: usize) -> Result<ExtReal> {
        self.check(n as i64)?;
        Ok(self.levels[n].ln_inv_alpha)
    }

    /// `log(1/beta_n)`, zero for `n = -1`.
    pub fn ln_inv_beta(&self, n: i64) -> Result<ExtReal> {
        self.check(n)?;
        Ok(if n < 0 {
            ExtReal::ZERO
        } else {
            self.levels[n as usize].ln_inv_beta
        })
    }

    pub fn digits(&self) -> Vec<(Digit, Sign)> {
        self.levels
            .iter()
            .map(|l| (l.digit.clone(), l.sign_next))
            .collect()
    }

    /// The expansion of `alpha + k`.
    pub fn plus_int(&self, k: i64) -> Self {
        let mut e = self.clone();
        e.a_minus1 += k;
        e
    }

    /// The expansion of `-alpha`.
    pub fn negated(&self) -> Self {
        let mut e = self.clone();
        e.a_minus1 = -e.a_minus1;
        e.eps0 = e.eps0.flip();
        e.alpha_desc = format!("-({})", self.alpha_desc);
        e
    }

    /// The expansion of `-1/alpha` as a Gauss shift: `a'_{-1} = -a_0`,
    /// `eps'_0 = -eps_1`, `alpha'_n = alpha_{n+1}`. Only valid when
    /// `|alpha| < 1/2`, i.e. `a_{-1} = 0`.
    pub fn gauss_shift(&self, ctx: &mut BigCtx) -> Result<Self> {
        if self.levels.is_empty() {
            return Err(Error::DepthExceeded {
                requested: 0,
                available: 0,
            });
        }
        let a0 = self.levels[0]
            .digit
            .int()
            .cloned()
            .ok_or_else(|| Error::BudgetExceeded("symbolic leading digit".into()))?;
        let eps1 = self.levels[0].sign_next;
        // For alpha = eps0 * alpha_0, -1/alpha = -eps0 (a_0 + eps1 alpha_1).
        let (a_minus1, eps0) = match self.eps0 {
            Sign::Plus => (-a0, eps1.flip()),
            Sign::Minus => (a0, eps1),
        };
        let raw: Vec<RawLevel> = self.levels[1..]
            .iter()
            .map(|l| RawLevel {
                digit: l.digit.clone(),
                sign_next: l.sign_next,
                alpha: l.alpha.clone(),
                exact: l.exact.clone(),
                ln_inv_alpha: Some(l.ln_inv_alpha),
                term: if l.alpha.is_some() { None } else { Some(f64::NAN) },
            })
            .collect();
        let mut levels = finish_levels(raw, ctx);
        // Terms of symbolic levels rescale by 1/alpha_0.
        let a0f = self.levels[0].alpha_f64;
        for (i, l) in levels.iter_mut().enumerate() {
            if l.brjuno_term.is_nan() {
                l.brjuno_term = self.levels[i + 1].brjuno_term / a0f;
            }
        }
        Ok(NearestIntegerExpansion {
            alpha_desc: format!("-1/({})", self.alpha_desc),
            a_minus1,
            eps0,
            levels,
            bits: self.bits,
            requested_depth: self.requested_depth.saturating_sub(1),
        })
    }

    /// Keep only the first `depth` levels.
    pub fn truncated(&self, depth: usize) -> Self {
        let mut e = self.clone();
        e.levels.truncate(depth);
        e.requested_depth = e.requested_depth.min(depth);
        e
    }

    /// Levels usable by the double-precision geometry engines: every level
    /// strictly inside the chain needs `1/alpha < 2^40`, and the deepest one
    /// needs a finite `log(1/alpha)`.
    pub fn geometric_depth(&self) -> usize {
        let mut d = 0;
        for l in &self.levels {
            if l.ln_inv_alpha.is_f64() && l.ln_inv_alpha.to_f64().is_finite() {
                d += 1;
                if l.ln_inv_alpha.to_f64() > 40.0 * std::f64::consts::LN_2 {
                    break;
                }
            } else {
                break;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_helpers() {
        assert_eq!(Sign::Plus.flip(), Sign::Minus);
        assert_eq!(Sign::of(false).as_i64(), -1);
        assert_eq!(Sign::Minus.to_string(), "-1");
    }

    #[test]
    fn digit_logs() {
        let d = Digit::Int(BigInt::from(21));
        assert!((d.ln().to_f64() - 21f64.ln()).abs() < 1e-15);
        let h = Digit::Huge {
            ln: ExtReal::new(1e9),
        };
        assert_eq!(h.ln().to_f64(), 1e9);
        assert_eq!(h.to_string(), "exp(1000000000)");
    }
}
