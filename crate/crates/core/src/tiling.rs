//! Height profiles of the nested tower sets.
//!
//! The set `I_n^j` is the region above the graph of a floor `b_n^j` over
//! `[0, 1/alpha_n]`; in the Brjuno case a ceiling `p_n^j` bounds it from
//! above. Both are 1-periodic, so one period `[0, 1)` sampled on a uniform
//! grid of `M` points is stored. A profile at level `n` is obtained from the
//! one at level `n + 1` by applying the signed map and reading the child at
//! the preimage abscissa.

use crate::arithmetic::{NearestIntegerExpansion, Sign};
use crate::brjuno::brjuno_tail;
use crate::coords::{im_y_phase, im_y_phase_ln_u, inverse_phase, inverse_phase_ln_u, Scale, INVERSE_TOL};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Default samples per unit.
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Default refinement depth.
pub const DEFAULT_DEPTH: usize = 25;
/// Terms used for the Brjuno values seeding ceilings.
pub const CEILING_BRJUNO_TERMS: usize = 64;
/// Largest `1/alpha` for which an interior level can be resampled.
const MAX_INV_ALPHA_LN: f64 = 40.0 * std::f64::consts::LN_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    FloorB,
    CeilingP,
    ShiftedFloor { y0: f64 },
}

impl ProfileKind {
    pub fn name(&self) -> String {
        match self {
            ProfileKind::FloorB => "floor_b".into(),
            ProfileKind::CeilingP => "ceiling_p".into(),
            ProfileKind::ShiftedFloor { y0 } => format!("shifted_floor({y0})"),
        }
    }
}

/// A 1-periodic height function sampled at `x = k/M`, `k < M`.
#[derive(Clone, Debug, Serialize)]
pub struct HeightProfile {
    pub level: i64,
    pub kind: ProfileKind,
    pub depth: usize,
    pub resolution: usize,
    pub samples: Vec<f64>,
    pub converged: bool,
    pub sup_diff_history: Vec<f64>,
    pub alpha_desc: String,
}

impl HeightProfile {
    fn constant(level: i64, kind: ProfileKind, value: f64, m: usize) -> Self {
        HeightProfile {
            level,
            kind,
            depth: 0,
            resolution: m,
            samples: vec![value; m],
            converged: false,
            sup_diff_history: vec![],
            alpha_desc: String::new(),
        }
    }

    /// Value at any real `x`, by periodic linear interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        interp(&self.samples, x)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest jump between neighbouring samples, seam included.
    pub fn max_adjacent_jump(&self) -> f64 {
        let m = self.samples.len();
        (0..m)
            .map(|k| (self.samples[(k + 1) % m] - self.samples[k]).abs())
            .fold(0.0, f64::max)
    }

    /// Slack for [`HeightProfile::liminf_violations`]: `window` times the
    /// 99th percentile of the neighbour jumps. A continuous profile moves by
    /// about that much across a window; isolated larger jumps do not.
    pub fn liminf_slack(&self, window: usize) -> f64 {
        let m = self.samples.len();
        let mut jumps: Vec<f64> = (0..m)
            .map(|k| (self.samples[(k + 1) % m] - self.samples[k]).abs())
            .collect();
        jumps.sort_by(f64::total_cmp);
        window as f64 * jumps[(m * 99 / 100).min(m - 1)]
    }

    /// Grid points where the `window` samples on one side all exceed the
    /// value by more than `slack`.
    pub fn liminf_violations(&self, window: usize, slack: f64) -> usize {
        let m = self.samples.len();
        let s = &self.samples;
        (0..m)
            .filter(|&k| {
                let right = (1..=window).map(|i| s[(k + i) % m]).fold(f64::INFINITY, f64::min);
                let left = (1..=window)
                    .map(|i| s[(k + m - i % m) % m])
                    .fold(f64::INFINITY, f64::min);
                right > s[k] + slack || left > s[k] + slack
            })
            .count()
    }

    /// CSV dump: two comment lines, then `x,value` rows.
    pub fn to_csv(&self) -> String {
        let m = self.resolution;
        let mut out = String::new();
        out.push_str("# level,depth,M,kind,alpha_desc\n");
        let _ = writeln!(
            out,
            "# {},{},{},{},{}",
            self.level,
            self.depth,
            m,
            self.kind.name(),
            self.alpha_desc
        );
        for (k, v) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{},{}", fmt17(k as f64 / m as f64), fmt17(*v));
        }
        out
    }

    /// Parse a dump written by [`HeightProfile::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let bad = |m: &str| Error::Parse(format!("profile csv: {m}"));
        lines.next().ok_or_else(|| bad("empty"))?;
        let meta = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| bad("missing metadata line"))?;
        let f: Vec<&str> = meta.splitn(5, ',').collect();
        if f.len() != 5 {
            return Err(bad("metadata needs five fields"));
        }
        let level: i64 = f[0].parse().map_err(|_| bad("level"))?;
        let depth: usize = f[1].parse().map_err(|_| bad("depth"))?;
        let m: usize = f[2].parse().map_err(|_| bad("M"))?;
        let kind = match f[3] {
            "floor_b" => ProfileKind::FloorB,
            "ceiling_p" => ProfileKind::CeilingP,
            k => {
                let y0 = k
                    .strip_prefix("shifted_floor(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad("kind"))?;
                ProfileKind::ShiftedFloor { y0 }
            }
        };
        let mut samples = Vec::with_capacity(m);
        for l in lines.filter(|l| !l.trim().is_empty()) {
            let (_, v) = l.split_once(',').ok_or_else(|| bad("row"))?;
            samples.push(v.trim().parse::<f64>().map_err(|_| bad("value"))?);
        }
        if samples.len() != m {
            return Err(Error::ResolutionMismatch(m, samples.len()));
        }
        Ok(HeightProfile {
            level,
            kind,
            depth,
            resolution: m,
            samples,
            converged: false,
            sup_diff_history: vec![],
            alpha_desc: f[4].to_string(),
        })
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn interp(s: &[f64], x: f64) -> f64 {
    let m = s.len();
    let pos = (x - x.floor()) * m as f64;
    let i = (pos.floor() as usize).min(m - 1);
    let f = pos - i as f64;
    if f == 0.0 {
        return s[i];
    }
    let a = s[i];
    let b = s[(i + 1) % m];
    a + (b - a) * f
}

/// The constant floor `-1` at level `n`.
pub fn initial_floor(n: i64, m: usize) -> HeightProfile {
    HeightProfile::constant(n, ProfileKind::FloorB, -1.0, m)
}

/// The constant ceiling `(B(alpha_{n+1}) + 5 pi) / (2 pi)` at level `n`.
pub fn initial_ceiling(n: i64, brjuno_value: f64, m: usize) -> HeightProfile {
    HeightProfile::constant(
        n,
        ProfileKind::CeilingP,
        (brjuno_value + 5.0 * PI) / (2.0 * PI),
        m,
    )
}

/// The height at the bottom of a chain.
#[derive(Clone, Copy, Debug)]
enum Top {
    /// Constant height.
    Height(f64),
    /// Constant height known only through `log u`, `u = 2 pi r y`.
    LnU(f64),
}

enum Child<'a> {
    Grid(&'a [f64]),
    Const(Top),
}

fn scale_of(nie: &NearestIntegerExpansion, k: usize) -> Result<Scale> {
    let l = nie.levels.get(k).ok_or(Error::DepthExceeded {
        requested: k as i64,
        available: nie.levels.len(),
    })?;
    if !l.ln_inv_alpha.is_f64() {
        return Err(Error::BudgetExceeded(format!(
            "log(1/alpha_{k}) = {} is beyond double range",
            l.ln_inv_alpha
        )));
    }
    Ok(Scale {
        r: l.alpha_f64,
        ln_inv_r: l.ln_inv_alpha.to_f64(),
    })
}

/// Profile at level `n` from its child at level `n + 1`, on `m` samples.
fn refine(child: Child, n: i64, nie: &NearestIntegerExpansion, m: usize) -> Result<Vec<f64>> {
    let k = (n + 1) as usize;
    let sc = scale_of(nie, k)?;
    let eps = nie.eps(k)?;
    if matches!(child, Child::Grid(_)) && sc.ln_inv_r > MAX_INV_ALPHA_LN {
        return Err(Error::BudgetExceeded(format!(
            "1/alpha_{k} too large to resample level {k}"
        )));
    }
    let out = (0..m)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / m as f64;
            let (xn, t) = match eps {
                Sign::Minus => (x / sc.r, x),
                Sign::Plus if i == 0 => (0.0, 0.0),
                Sign::Plus => ((1.0 - x) / sc.r, 1.0 - x),
            };
            match &child {
                Child::Grid(s) => im_y_phase(&sc, t, interp(s, xn)),
                Child::Const(Top::Height(y)) => im_y_phase(&sc, t, *y),
                Child::Const(Top::LnU(l)) => im_y_phase_ln_u(&sc, t, *l),
            }
        })
        .collect();
    Ok(out)
}

/// One refinement: the profile at level `n` from the profile at level `n + 1`.
pub fn refine_step(child: &HeightProfile, nie: &NearestIntegerExpansion) -> Result<HeightProfile> {
    if child.level < 0 {
        return Err(Error::Domain("the child level must be at least 0".into()));
    }
    let n = child.level - 1;
    let samples = refine(Child::Grid(&child.samples), n, nie, child.resolution)?;
    Ok(HeightProfile {
        level: n,
        kind: child.kind,
        depth: child.depth + 1,
        resolution: child.resolution,
        samples,
        converged: false,
        sup_diff_history: vec![],
        alpha_desc: nie.alpha_desc.clone(),
    })
}

/// Run the chain from a constant top at level `n + depth` down to level `n`.
fn chain(nie: &NearestIntegerExpansion, n: i64, depth: usize, top: Top, m: usize) -> Result<Vec<f64>> {
    if depth == 0 {
        return Ok(vec![
            match top {
                Top::Height(y) => y,
                Top::LnU(_) => f64::INFINITY,
            };
            m
        ]);
    }
    let bottom = n + depth as i64 - 1;
    let mut s = refine(Child::Const(top), bottom, nie, m)?;
    for lvl in (n..bottom).rev() {
        s = refine(Child::Grid(&s), lvl, nie, m)?;
    }
    Ok(s)
}

fn ceiling_top(nie: &NearestIntegerExpansion, level: i64) -> Result<Top> {
    let k = (level + 1) as usize;
    let b = brjuno_tail(&nie.levels, k, CEILING_BRJUNO_TERMS)?.add(ExtReal::new(5.0 * PI));
    if b.is_f64() {
        return Ok(Top::Height(b.to_f64() / (2.0 * PI)));
    }
    // u = alpha_level (B + 5 pi), kept as a logarithm.
    let ln_b = b.ln();
    let ln_inv_r = if level < 0 {
        0.0
    } else {
        nie.levels[level as usize].ln_inv_alpha.to_f64()
    };
    Ok(Top::LnU(if ln_b.is_f64() {
        ln_b.to_f64() - ln_inv_r
    } else {
        f64::INFINITY
    }))
}

fn check_depth(nie: &NearestIntegerExpansion, n: i64, depth: usize, extra: usize) -> Result<()> {
    if n < -1 {
        return Err(Error::Domain(format!("level {n} below -1")));
    }
    let need = (n + depth as i64 + 1) as usize + extra;
    if need > nie.certified_depth() {
        return Err(Error::DepthExceeded {
            requested: need as i64 - 1,
            available: nie.certified_depth(),
        });
    }
    Ok(())
}

fn top_for(
    kind: ProfileKind,
    nie: &NearestIntegerExpansion,
    level: i64,
    seeds: &[Top],
) -> Result<Top> {
    Ok(match kind {
        ProfileKind::FloorB => Top::Height(-1.0),
        ProfileKind::CeilingP => ceiling_top(nie, level)?,
        ProfileKind::ShiftedFloor { .. } => match seeds[(level + 1) as usize] {
            Top::Height(y) => Top::Height(y - 1.0),
            // One unit lower is `2 pi alpha` in `u`, far below its resolution.
            Top::LnU(l) => Top::LnU(l),
        },
    })
}

/// Profile of `kind` at level `n` after exactly `depth` refinements.
pub fn profile_at_depth(
    kind: ProfileKind,
    n: i64,
    nie: &NearestIntegerExpansion,
    depth: usize,
    m: usize,
) -> Result<HeightProfile> {
    let extra = usize::from(kind == ProfileKind::CeilingP);
    check_depth(nie, n, depth, extra)?;
    let seeds = match kind {
        ProfileKind::ShiftedFloor { y0 } => seed_tops(y0, nie, (n + depth as i64 + 1) as usize)?,
        _ => vec![],
    };
    let top = top_for(kind, nie, n + depth as i64, &seeds)?;
    Ok(HeightProfile {
        level: n,
        kind,
        depth,
        resolution: m,
        samples: chain(nie, n, depth, top, m)?,
        converged: false,
        sup_diff_history: vec![],
        alpha_desc: nie.alpha_desc.clone(),
    })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            if d.is_nan() {
                if x == y {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

/// Profiles at depths `0..=max_depth`, the last one returned with the
/// sup-differences between successive depths.
pub fn limit_profile(
    kind: ProfileKind,
    n: i64,
    nie: &NearestIntegerExpansion,
    tol: f64,
    max_depth: usize,
    m: usize,
) -> Result<HeightProfile> {
    let extra = usize::from(kind == ProfileKind::CeilingP);
    check_depth(nie, n, max_depth, extra)?;
    let seeds = match kind {
        ProfileKind::ShiftedFloor { y0 } => seed_tops(y0, nie, (n + max_depth as i64 + 1) as usize)?,
        _ => vec![],
    };
    let mut prev = chain(nie, n, 0, top_for(kind, nie, n, &seeds)?, m)?;
    let mut history = Vec::with_capacity(max_depth);
    for j in 1..=max_depth {
        let top = top_for(kind, nie, n + j as i64, &seeds)?;
        let cur = chain(nie, n, j, top, m)?;
        history.push(sup_diff(&cur, &prev));
        prev = cur;
    }
    Ok(HeightProfile {
        level: n,
        kind,
        depth: max_depth,
        resolution: m,
        samples: prev,
        converged: history.last().is_some_and(|d| *d < tol),
        sup_diff_history: history,
        alpha_desc: nie.alpha_desc.clone(),
    })
}

/// Heights `y_{-1} = y0, y_0, ..., y_{depth-1}` with
/// `Y_{n+1}(i y_{n+1}) = i y_n`. Heights beyond the double range are
/// reported as `+inf`.
pub fn shifted_seed(y0: f64, nie: &NearestIntegerExpansion, depth: usize) -> Result<Vec<f64>> {
    Ok(seed_tops(y0, nie, depth)?
        .into_iter()
        .map(|t| match t {
            Top::Height(y) => y,
            Top::LnU(_) => f64::INFINITY,
        })
        .collect())
}

/// Seeds as chain tops; a seed whose height overflows is kept as
/// `log u`, `u = 2 pi alpha_k y`, and ends the sequence.
fn seed_tops(y0: f64, nie: &NearestIntegerExpansion, depth: usize) -> Result<Vec<Top>> {
    if !(y0 >= 0.0) {
        return Err(Error::Domain(format!("seed height must be >= 0, got {y0}")));
    }
    let mut seeds = vec![Top::Height(y0)];
    for k in 0..depth {
        let y = match seeds[k] {
            Top::Height(y) => y,
            Top::LnU(_) => {
                return Err(Error::BudgetExceeded(format!(
                    "seed height at level {} is beyond double range",
                    k as i64 - 1
                )))
            }
        };
        let next = if y == 0.0 {
            Top::Height(0.0)
        } else {
            let sc = scale_of(nie, k)?;
            let tol = INVERSE_TOL * (1.0 + y.abs());
            let ln_u = inverse_phase_ln_u(&sc, 0.0, y, tol)?;
            let ln_y = ln_u - (2.0 * PI).ln() + sc.ln_inv_r;
            if ln_y < 100.0 {
                Top::Height(inverse_phase(&sc, 0.0, y, tol)?)
            } else {
                Top::LnU(ln_u)
            }
        };
        seeds.push(next);
    }
    Ok(seeds)
}

/// Floor of the shifted set seeded at height `y0` on the imaginary axis.
pub fn shifted_floor_limit(
    y0: f64,
    nie: &NearestIntegerExpansion,
    tol: f64,
    max_depth: usize,
    m: usize,
) -> Result<HeightProfile> {
    limit_profile(ProfileKind::ShiftedFloor { y0 }, -1, nie, tol, max_depth, m)
}
