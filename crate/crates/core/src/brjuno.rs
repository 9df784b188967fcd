//! Brjuno sums, the maps `h_r`, the Herman witness search and the
//! finite-depth arithmetic classification.

use crate::arithmetic::{
    expand_nearest_integer_partial, Level, NearestIntegerExpansion, RotationNumber,
    StandardExpansion,
};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BrjunoVariant {
    Modified,
    Standard,
}

/// Truncated Brjuno series.
#[derive(Clone, Debug, Serialize)]
pub struct BrjunoPartial {
    pub variant: BrjunoVariant,
    /// `beta_{n-1} log(1/alpha_n)` for `n < depth`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub depth: usize,
    /// Share of the total contributed by the last quarter of the terms.
    pub divergence_score: f64,
}

impl BrjunoPartial {
    pub fn sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    fn from_levels(variant: BrjunoVariant, levels: &[Level], n: usize) -> Result<Self> {
        if n > levels.len() {
            return Err(Error::DepthExceeded {
                requested: n as i64,
                available: levels.len(),
            });
        }
        let terms: Vec<f64> = levels[..n].iter().map(|l| l.brjuno_term).collect();
        let partial_sums: Vec<f64> = terms
            .iter()
            .scan(0.0, |s, t| {
                *s += t;
                Some(*s)
            })
            .collect();
        let total = partial_sums.last().copied().unwrap_or(0.0);
        let window: f64 = terms[n - n / 4..].iter().sum();
        let divergence_score = if total > 0.0 { window / total } else { 0.0 };
        Ok(BrjunoPartial {
            variant,
            terms,
            partial_sums,
            depth: n,
            divergence_score,
        })
    }
}

/// First `n` terms of the modified Brjuno series.
pub fn brjuno_partial(nie: &NearestIntegerExpansion, n: usize) -> Result<BrjunoPartial> {
    BrjunoPartial::from_levels(BrjunoVariant::Modified, &nie.levels, n)
}

/// First `n` terms of the standard Brjuno series.
pub fn brjuno_standard_partial(se: &StandardExpansion, n: usize) -> Result<BrjunoPartial> {
    BrjunoPartial::from_levels(BrjunoVariant::Standard, &se.levels, n)
}

/// `B(alpha_m)` truncated to `count` terms (fewer when the expansion ends):
/// `log(1/alpha_m) + (1/beta_{m-1}) sum_{k>m} beta_{k-1} log(1/alpha_k)`.
pub fn brjuno_tail(levels: &[Level], m: usize, count: usize) -> Result<ExtReal> {
    if m >= levels.len() {
        return Err(Error::DepthExceeded {
            requested: m as i64,
            available: levels.len(),
        });
    }
    let end = (m + count.max(1)).min(levels.len());
    let rest: f64 = levels[m + 1..end].iter().map(|l| l.brjuno_term).sum();
    let head = levels[m].ln_inv_alpha;
    if rest <= 0.0 {
        return Ok(head);
    }
    let ln_inv_beta = if m == 0 {
        ExtReal::ZERO
    } else {
        levels[m - 1].ln_inv_beta
    };
    let scaled = ExtReal::new(rest.ln()).add(ln_inv_beta).exp();
    Ok(head.add(scaled))
}

/// `h_r(y)`: `exp(y)` below `log(1/r)` and `(y - log(1/r) + 1)/r` above.
pub fn h(r: f64, y: f64) -> f64 {
    let l = -r.ln();
    if y <= l {
        y.exp()
    } else {
        (y - l + 1.0) / r
    }
}

/// Inverse of [`h`] on `(0, inf)`.
pub fn h_inv(r: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("h_inv needs y > 0, got {y}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("h needs r in (0,1), got {r}")));
    }
    Ok(if y <= 1.0 / r { y.ln() } else { r * y - r.ln() - 1.0 })
}

/// `h_r(y)` for `y >= 0` given `log(1/r)`, at iterated-exponential scale.
pub fn h_ext(ln_inv_r: ExtReal, y: ExtReal) -> ExtReal {
    if y <= ln_inv_r {
        y.exp()
    } else {
        y.sub_lower(ln_inv_r)
            .add(ExtReal::ONE)
            .ln()
            .add(ln_inv_r)
            .exp()
    }
}

/// Outcome of a Herman witness search from level `n`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessResult {
    /// `tower[k]` is the chain `h_{alpha_{n+k-1}} o ... o h_{alpha_n}(0)`.
    Found {
        n: usize,
        m: usize,
        tower: Vec<ExtReal>,
        brjuno_at_m: ExtReal,
    },
    NotFoundUpTo {
        n: usize,
        m_max: usize,
        tower: Vec<ExtReal>,
    },
}

impl WitnessResult {
    pub fn is_found(&self) -> bool {
        matches!(self, WitnessResult::Found { .. })
    }
}

/// Smallest `m` in `[n, m_max]` with `h_{alpha_{m-1}} o ... o h_{alpha_n}(0) >= B(alpha_m)`,
/// the Brjuno value truncated to `brjuno_depth` terms.
pub fn herman_witness_search(
    nie: &NearestIntegerExpansion,
    n: usize,
    m_max: usize,
    brjuno_depth: usize,
) -> Result<WitnessResult> {
    let levels = &nie.levels;
    if m_max >= levels.len() || n > m_max {
        return Err(Error::DepthExceeded {
            requested: m_max as i64,
            available: levels.len(),
        });
    }
    let mut y = ExtReal::ZERO;
    let mut tower = vec![y];
    for m in n..=m_max {
        let b = brjuno_tail(levels, m, brjuno_depth)?;
        if y >= b {
            return Ok(WitnessResult::Found {
                n,
                m,
                tower,
                brjuno_at_m: b,
            });
        }
        y = h_ext(levels[m].ln_inv_alpha, y);
        tower.push(y);
    }
    tower.pop();
    Ok(WitnessResult::NotFoundUpTo { n, m_max, tower })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithmeticClass {
    Herman,
    BrjunoNotHerman,
    NonBrjuno,
    Undetermined,
}

/// Depth, caps and thresholds of [`classify`].
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyConfig {
    pub depth: usize,
    /// Terms of each `B(alpha_m)` in the witness search.
    pub brjuno_depth: usize,
    /// Partial sum above which divergence is considered.
    pub divergence_sum: f64,
    /// Minimal share of the total carried by the last quarter of the terms.
    pub divergence_share: f64,
    /// Terms summed for the stabilisation test.
    pub stable_window: usize,
    pub stable_tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            depth: 64,
            brjuno_depth: 40,
            divergence_sum: 50.0,
            divergence_share: 0.2,
            stable_window: 10,
            stable_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArithmeticVerdict {
    pub class: ArithmeticClass,
    pub alpha: String,
    /// Levels actually used.
    pub depth: usize,
    pub brjuno: Option<BrjunoPartial>,
    pub stabilized: bool,
    pub probes: Vec<usize>,
    pub witnesses: Vec<WitnessResult>,
    pub config: ClassifyConfig,
    pub reason: String,
}

/// Finite-depth classification: Herman, Brjuno but not Herman, non-Brjuno,
/// or undetermined when the data does not decide.
pub fn classify(alpha: &RotationNumber, cfg: &ClassifyConfig) -> ArithmeticVerdict {
    let mut v = ArithmeticVerdict {
        class: ArithmeticClass::Undetermined,
        alpha: alpha.desc(),
        depth: 0,
        brjuno: None,
        stabilized: false,
        probes: vec![],
        witnesses: vec![],
        config: cfg.clone(),
        reason: String::new(),
    };
    let nie = match expand_nearest_integer_partial(alpha, cfg.depth) {
        Ok(e) => e,
        Err(e) => {
            v.reason = format!("expansion failed: {e}");
            return v;
        }
    };
    classify_expansion(&nie, cfg, v)
}

fn classify_expansion(
    nie: &NearestIntegerExpansion,
    cfg: &ClassifyConfig,
    mut v: ArithmeticVerdict,
) -> ArithmeticVerdict {
    let l = nie.certified_depth().min(cfg.depth);
    v.depth = l;
    if l < 4 {
        v.reason = format!("only {l} certified levels");
        return v;
    }
    let partial = brjuno_partial(nie, l).expect("depth checked");
    let sum = partial.sum();
    let window = cfg.stable_window.min(l);
    let tail: f64 = partial.terms[l - window..].iter().sum();
    v.stabilized = tail < cfg.stable_tol;
    let diverging = sum > cfg.divergence_sum && partial.divergence_score > cfg.divergence_share;
    v.brjuno = Some(partial.clone());
    if diverging {
        v.class = ArithmeticClass::NonBrjuno;
        v.reason = format!(
            "partial sum {sum:.3} over {l} terms, last quarter carries {:.1}%",
            100.0 * partial.divergence_score
        );
        return v;
    }
    v.probes = vec![0, l / 4, l / 2, 3 * l / 4];
    v.witnesses = v
        .probes
        .par_iter()
        .map(|&n| herman_witness_search(nie, n, l - 1, cfg.brjuno_depth).expect("probe in range"))
        .collect();
    let all = v.witnesses.iter().all(WitnessResult::is_found);
    if !v.stabilized {
        v.reason = format!("partial sums not stabilized (last {window} terms sum to {tail:.3e})");
    } else if all {
        v.class = ArithmeticClass::Herman;
        v.reason = "every probe has a witness".into();
    } else {
        v.class = ArithmeticClass::BrjunoNotHerman;
        let missing: Vec<String> = v
            .witnesses
            .iter()
            .filter(|w| !w.is_found())
            .map(|w| match w {
                WitnessResult::NotFoundUpTo { n, .. } => n.to_string(),
                _ => unreachable!(),
            })
            .collect();
        v.reason = format!(
            "Brjuno sum stabilized at {sum:.6}; no witness from n = {}",
            missing.join(", ")
        );
    }
    v
}
