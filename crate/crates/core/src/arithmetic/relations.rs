//! Alignment between the nearest-integer and the standard expansion.

use super::standard::StandardExpansion;
use super::NearestIntegerExpansion;
use crate::bigreal::{self, BigCtx};
use crate::error::{Error, Result};
use astro_float::BigFloat;
use serde::Serialize;

/// Index `c(n)` of the standard level aligned with nearest-integer level `n`.
///
/// `c(-1) = -1` and each step adds 2 when `eps_n = -1`, 1 when `eps_n = +1`.
pub fn index_map_c(nie: &NearestIntegerExpansion, n: i64) -> Result<i64> {
    if n < -1 || n > nie.certified_depth() as i64 {
        return Err(Error::DepthExceeded {
            requested: n,
            available: nie.certified_depth(),
        });
    }
    let mut c = -1;
    for i in 0..=n {
        c += if nie.eps(i as usize)?.as_i64() < 0 { 2 } else { 1 };
    }
    Ok(c)
}

/// Residuals of the three alignment identities at one level.
#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub n: i64,
    pub c_n: i64,
    pub c_next: i64,
    /// `|alpha_{n+1} - alpha~_{c(n)+1}|`, or against `1 - alpha~_{c(n)+1}`
    /// when `eps_{n+1} = -1`.
    pub residual_i: f64,
    /// `|alpha_{n+1} - prod_{c(n)+1}^{c(n+1)} alpha~_i|`.
    pub residual_ii: f64,
    /// `|beta~_{c(n)} - beta_n|`.
    pub residual_iii: f64,
    /// Exact equality in (i) for surd sources, when both sides are known.
    pub exact_i: Option<bool>,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_i.max(self.residual_ii).max(self.residual_iii)
    }
}

fn alpha_big(levels: &[super::Level], k: usize, ctx: &BigCtx) -> BigFloat {
    match &levels[k].alpha {
        Some(a) => a.clone(),
        None => ctx.f64(levels[k].alpha_f64),
    }
}

fn beta_big(levels: &[super::Level], k: i64, ctx: &BigCtx) -> BigFloat {
    if k < 0 {
        return ctx.small(1);
    }
    let l = &levels[k as usize];
    match &l.beta {
        Some(b) => b.clone(),
        None => ctx.f64(l.beta_f64),
    }
}

/// Check the alignment identities at level `n >= -1`.
pub fn verify_expansion_relations(
    nie: &NearestIntegerExpansion,
    se: &StandardExpansion,
    n: i64,
) -> Result<RelationReport> {
    let depth_err = |req: i64, avail: usize| Error::DepthExceeded {
        requested: req,
        available: avail,
    };
    if n < -1 || n + 1 >= nie.certified_depth() as i64 {
        return Err(depth_err(n, nie.certified_depth().saturating_sub(1)));
    }
    let c_n = index_map_c(nie, n)?;
    let c_next = index_map_c(nie, n + 1)?;
    if c_next >= se.certified_depth() as i64 {
        return Err(depth_err(c_next, se.certified_depth()));
    }
    let ctx = BigCtx::new(nie.bits.max(se.bits));
    let k = (n + 1) as usize;
    let a_next = alpha_big(&nie.levels, k, &ctx);
    let minus = nie.eps(k)?.as_i64() < 0;
    let j = (c_n + 1) as usize;
    let st = alpha_big(&se.levels, j, &ctx);
    let rhs_i = if minus { ctx.sub(&ctx.small(1), &st) } else { st };
    let residual_i = bigreal::to_f64(&ctx.sub(&a_next, &rhs_i)).abs();

    let mut prod = ctx.small(1);
    for i in (c_n + 1)..=c_next {
        prod = ctx.mul(&prod, &alpha_big(&se.levels, i as usize, &ctx));
    }
    let residual_ii = bigreal::to_f64(&ctx.sub(&a_next, &prod)).abs();

    let b = beta_big(&nie.levels, n, &ctx);
    let bt = beta_big(&se.levels, c_n, &ctx);
    let residual_iii = bigreal::to_f64(&ctx.sub(&b, &bt)).abs();

    let exact_i = match (&nie.levels[k].exact, &se.levels[j].exact) {
        (Some(x), Some(y)) => Some(if minus { *x == y.one_minus() } else { x == y }),
        _ => None,
    };
    Ok(RelationReport {
        n,
        c_n,
        c_next,
        residual_i,
        residual_ii,
        residual_iii,
        exact_i,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{expand_nearest_integer, expand_standard, RotationNumber};

    #[test]
    fn golden_index_map() {
        let e = expand_nearest_integer(&RotationNumber::golden(), 10).unwrap();
        assert_eq!(index_map_c(&e, -1).unwrap(), -1);
        for n in 0..10 {
            assert_eq!(index_map_c(&e, n).unwrap(), 2 * n + 1);
        }
        assert!(index_map_c(&e, 11).is_err());
    }

    #[test]
    fn golden_relations_hold() {
        let a = RotationNumber::golden();
        let nie = expand_nearest_integer(&a, 10).unwrap();
        let se = expand_standard(&a, 30).unwrap();
        for n in -1..5 {
            let r = verify_expansion_relations(&nie, &se, n).unwrap();
            assert!(r.max_residual() < 1e-30, "{r:?}");
        }
        let r = verify_expansion_relations(&nie, &se, -1).unwrap();
        assert_eq!(r.residual_iii, 0.0);
    }

    #[test]
    fn plus_sign_is_exact_for_surds() {
        let a = RotationNumber::sqrt2();
        let nie = expand_nearest_integer(&a, 8).unwrap();
        let se = expand_standard(&a, 16).unwrap();
        let r = verify_expansion_relations(&nie, &se, 2).unwrap();
        assert_eq!(r.exact_i, Some(true));
    }
}
