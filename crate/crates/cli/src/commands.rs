//! One function per subcommand. Each writes its report and maps the outcome
//! to a [`Failure`] when the exit code must be non-zero.

use crate::{Failure, ImageFormat, Mode, OrbitArgs, RenderArgs, RenormArgs};
use attractor_lab::acceptance::{self, CriterionOutcome, CRITERIA};
use attractor_lab::arithmetic::{
    expand_nearest_integer_partial, expand_standard_partial, index_map_c, verify_expansion_relations,
    NearestIntegerExpansion, RelationReport, RotationNumber,
};
use attractor_lab::brjuno::{brjuno_partial, brjuno_standard_partial, classify as classify_alpha, BrjunoPartial, ClassifyConfig};
use attractor_lab::dynamics::{orbit as orbit_points, orbit_csv, ModelPoint};
use attractor_lab::ext_real::ExtReal;
use attractor_lab::geometry::{
    attractor_geometry, classify_topology_with, geometry_expansion, invariant_geometry, render_ppm, to_csv, to_svg,
    GeometryMeta, RasterConfig, RasterMode, TopologyReport, DEFAULT_GAP_THRESHOLD,
};
use attractor_lab::renorm::verify_renormalization;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Version stamped into every JSON document this binary writes.
pub const SCHEMA_VERSION: u32 = 1;

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn expansion(alpha: &RotationNumber, depth: usize) -> Result<NearestIntegerExpansion, Failure> {
    Ok(expand_nearest_integer_partial(alpha, depth)?)
}

fn check_certified(nie: &NearestIntegerExpansion) -> Result<(), Failure> {
    if nie.is_truncated() {
        return Err(Failure::Budget(format!(
            "only {} of {} levels certified at {} bits",
            nie.certified_depth(),
            nie.requested_depth,
            nie.bits
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct LevelRow {
    n: usize,
    digit: String,
    /// `eps_{n+1}`.
    eps_next: i64,
    alpha: f64,
    beta: f64,
    ln_inv_alpha: ExtReal,
    ln_inv_beta: ExtReal,
}

#[derive(Serialize)]
struct ExpandReport {
    schema_version: u32,
    alpha: String,
    bits: usize,
    a_minus1: String,
    eps0: i64,
    requested_depth: usize,
    certified_depth: usize,
    levels: Vec<LevelRow>,
}

pub fn expand(alpha: &RotationNumber, depth: usize, json: bool) -> Result<(), Failure> {
    let nie = expansion(alpha, depth)?;
    let levels: Vec<LevelRow> = nie
        .levels
        .iter()
        .enumerate()
        .map(|(n, l)| LevelRow {
            n,
            digit: l.digit.to_string(),
            eps_next: l.sign_next.as_i64(),
            alpha: l.alpha_f64,
            beta: l.beta_f64,
            ln_inv_alpha: l.ln_inv_alpha,
            ln_inv_beta: l.ln_inv_beta,
        })
        .collect();
    let report = ExpandReport {
        schema_version: SCHEMA_VERSION,
        alpha: nie.alpha_desc.clone(),
        bits: nie.bits,
        a_minus1: nie.a_minus1.to_string(),
        eps0: nie.eps0.as_i64(),
        requested_depth: nie.requested_depth,
        certified_depth: nie.certified_depth(),
        levels,
    };
    if json {
        print_json(&report)?;
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "alpha {} ({} bits)", report.alpha, report.bits);
        let _ = writeln!(s, "a_-1 {}, eps_0 {}", report.a_minus1, report.eps0);
        let _ = writeln!(s, "certified depth {} of {}", report.certified_depth, report.requested_depth);
        let _ = writeln!(s, "{:>4}  {:>8}  {:>3}  {:>24}  {:>24}", "n", "a_n", "eps", "alpha_n", "beta_n");
        for r in &report.levels {
            let _ = writeln!(
                s,
                "{:>4}  {:>8}  {:>3}  {:>24.16e}  {:>24.16e}",
                r.n, r.digit, r.eps_next, r.alpha, r.beta
            );
        }
        print!("{s}");
    }
    check_certified(&nie)
}

#[derive(Serialize)]
struct Alignment {
    n: usize,
    c_n: i64,
    /// Modified partial sum through level `n`.
    modified: f64,
    /// Standard partial sum through level `c(n)`, when certified.
    standard: Option<f64>,
}

#[derive(Serialize)]
struct BrjunoReport {
    schema_version: u32,
    alpha: String,
    depth: usize,
    modified: BrjunoPartial,
    standard: BrjunoPartial,
    alignment: Vec<Alignment>,
    relations: Vec<RelationReport>,
}

pub fn brjuno(alpha: &RotationNumber, depth: usize) -> Result<(), Failure> {
    let nie = expansion(alpha, depth + 1)?;
    let n = depth.min(nie.certified_depth());
    let modified = brjuno_partial(&nie, n)?;
    let c_last = if n == 0 { 0 } else { index_map_c(&nie, n as i64 - 1)? + 1 };
    let se = expand_standard_partial(alpha, c_last as usize + 1)?;
    let standard = brjuno_standard_partial(&se, (c_last as usize).min(se.certified_depth()))?;
    let alignment = (0..n)
        .map(|i| {
            let c_n = index_map_c(&nie, i as i64)?;
            Ok(Alignment {
                n: i,
                c_n,
                modified: modified.partial_sums[i],
                standard: standard.partial_sums.get(c_n as usize).copied(),
            })
        })
        .collect::<attractor_lab::Result<Vec<_>>>()?;
    let relations = (-1..n as i64)
        .map_while(|i| verify_expansion_relations(&nie, &se, i).ok())
        .collect();
    print_json(&BrjunoReport {
        schema_version: SCHEMA_VERSION,
        alpha: nie.alpha_desc.clone(),
        depth: n,
        modified,
        standard,
        alignment,
        relations,
    })?;
    if n < depth {
        return Err(Failure::Budget(format!("only {n} of {depth} levels certified")));
    }
    Ok(())
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

pub fn classify(alpha: &RotationNumber, depth: usize) -> Result<(), Failure> {
    let cfg = ClassifyConfig {
        depth,
        ..ClassifyConfig::default()
    };
    print_json(&Versioned {
        schema_version: SCHEMA_VERSION,
        body: classify_alpha(alpha, &cfg),
    })
}

#[derive(Serialize)]
struct RenderSidecar {
    #[serde(flatten)]
    meta: GeometryMeta,
    topology: TopologyReport,
}

fn with_extension(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn render(alpha: &RotationNumber, a: &RenderArgs) -> Result<(), Failure> {
    if let Some(t) = a.invariant_t {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Failure::Usage(format!("--invariant-t must lie in (0, 1], got {t}")));
        }
    }
    let geom = match a.invariant_t {
        Some(t) => invariant_geometry(alpha, t, a.depth, a.k, a.m)?,
        None => attractor_geometry(alpha, a.depth, a.k, a.m)?,
    };
    if !geom.converged {
        eprintln!("warning: profiles did not converge within depth {}", geom.depth);
    }
    let cfg = RasterConfig {
        width: a.width,
        height: a.height,
        mode: match a.mode {
            Mode::Filled => RasterMode::Filled,
            Mode::Attractor => RasterMode::Attractor,
        },
        view_radius: None,
    };
    let csv_path = with_extension(&a.out, "csv");
    let json_path = with_extension(&a.out, "json");
    let image_path = match a.image {
        ImageFormat::Ppm => with_extension(&a.out, "ppm"),
        ImageFormat::Svg => with_extension(&a.out, "svg"),
    };
    fs::write(&csv_path, to_csv(&geom))?;
    match a.image {
        ImageFormat::Ppm => fs::write(&image_path, render_ppm(&geom, &cfg))?,
        ImageFormat::Svg => fs::write(&image_path, to_svg(&geom, &cfg))?,
    }
    let sidecar = RenderSidecar {
        meta: geom.meta(),
        topology: classify_topology_with(&geom, geom.class, DEFAULT_GAP_THRESHOLD),
    };
    let mut json = serde_json::to_string_pretty(&sidecar)?;
    json.push('\n');
    fs::write(&json_path, json)?;
    for p in [&csv_path, &image_path, &json_path] {
        println!("{}", p.display());
    }
    Ok(())
}

pub fn orbit(alpha: &RotationNumber, a: &OrbitArgs) -> Result<(), Failure> {
    if !(a.rho >= 0.0 && a.rho.is_finite() && a.theta.is_finite()) {
        return Err(Failure::Usage("the starting point needs finite theta and rho >= 0".into()));
    }
    let nie = geometry_expansion(alpha, a.depth)?;
    let z = ModelPoint {
        theta: a.theta.rem_euclid(std::f64::consts::TAU),
        rho: a.rho,
    };
    let points = orbit_points(z, a.iterations, &nie, a.depth)?;
    let csv = orbit_csv(&points);
    match &a.out {
        Some(p) => fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    // Running minimum of |T^k(z) - z|, reported at each power of ten.
    let mut best = f64::INFINITY;
    let mut next = 10;
    for (k, p) in points.iter().enumerate().skip(1) {
        best = best.min(p.dist(&z));
        if k == next || k == a.iterations {
            eprintln!("recurrence gap N={k}: {best:.6e}");
            next *= 10;
        }
    }
    Ok(())
}

pub fn renorm_verify(alpha: &RotationNumber, a: &RenormArgs) -> Result<(), Failure> {
    let tol = a.tol.unwrap_or(10.0 * 0.9f64.powi(a.depth as i32));
    if !(tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    let nie = geometry_expansion(alpha, a.depth)?;
    let rep = verify_renormalization(&nie, a.samples, a.depth, tol, a.m)?;
    print_json(&rep)?;
    if rep.max_dev > tol || !rep.gauss_shift_ok {
        return Err(Failure::Validation(format!(
            "max deviation {:.3e} against tolerance {tol:.3e}, gauss shift ok: {}",
            rep.max_dev, rep.gauss_shift_ok
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SelftestReport<'a> {
    schema_version: u32,
    passed: usize,
    total: usize,
    outcomes: &'a [CriterionOutcome],
}

pub fn selftest(only: &[u32], json: bool) -> Result<(), Failure> {
    if let Some(bad) = only.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(Failure::Usage(format!("no criterion {bad}")));
    }
    let mut outcomes = Vec::new();
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.0)) {
        let o = acceptance::run_criterion(c.0).expect("criterion exists");
        if !json {
            println!("{}", o.line());
        }
        outcomes.push(o);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    if json {
        print_json(&SelftestReport {
            schema_version: SCHEMA_VERSION,
            passed,
            total: outcomes.len(),
            outcomes: &outcomes,
        })?;
    } else {
        println!("{passed}/{} criteria passed", outcomes.len());
    }
    if outcomes.iter().any(|o| !o.check_passed) {
        Err(Failure::Validation("some criteria failed".into()))
    } else if passed < outcomes.len() {
        Err(Failure::Budget("some criteria exceeded their time budget".into()))
    } else {
        Ok(())
    }
}
