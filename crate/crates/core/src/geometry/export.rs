//! CSV, PPM and SVG output and the JSON metadata sidecar.

use super::{AttractorGeometry, PolarRecord};
use crate::brjuno::ArithmeticClass;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "theta,r_inner,r_outer";

/// Sidecar describing how a geometry was computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryMeta {
    pub schema_version: u32,
    pub alpha_desc: String,
    pub depth: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub class: ArithmeticClass,
    pub r_alpha: f64,
    pub sup_b: f64,
    pub partial_brjuno: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invariant_t: Option<f64>,
}

/// One line per angle, values with 17 significant digits.
pub fn to_csv(geom: &AttractorGeometry) -> String {
    let mut s = String::with_capacity(64 * geom.records.len());
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &geom.records {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", r.theta, r.r_inner, r.r_outer);
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<PolarRecord>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Parse(format!("missing header `{CSV_HEADER}`")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            let v: Vec<f64> = l
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
            match v[..] {
                [theta, r_inner, r_outer] => Ok(PolarRecord {
                    theta,
                    r_inner,
                    r_outer,
                }),
                _ => Err(Error::Parse(format!("row {}: expected 3 fields", i + 1))),
            }
        })
        .collect()
}

impl AttractorGeometry {
    /// Rebuild a geometry from its sidecar and CSV records.
    pub fn from_parts(meta: &GeometryMeta, records: Vec<PolarRecord>) -> Result<Self> {
        if records.len() != meta.k {
            return Err(Error::ResolutionMismatch(meta.k, records.len()));
        }
        Ok(AttractorGeometry {
            alpha_desc: meta.alpha_desc.clone(),
            depth: meta.depth,
            grid: meta.m,
            class: meta.class,
            r_alpha: meta.r_alpha,
            sup_b: meta.sup_b,
            partial_brjuno: meta.partial_brjuno,
            converged: meta.converged,
            invariant_t: meta.invariant_t,
            records,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterMode {
    /// Everything inside the outer curve.
    Filled,
    /// Only the radial segments.
    Attractor,
}

#[derive(Clone, Copy, Debug)]
pub struct RasterConfig {
    pub width: usize,
    pub height: usize,
    pub mode: RasterMode,
    /// Half-width of the square view centred at the origin; by default a
    /// margin around the largest outer radius.
    pub view_radius: Option<f64>,
}

impl Default for RasterConfig {
    fn default() -> Self {
        RasterConfig {
            width: 1024,
            height: 1024,
            mode: RasterMode::Filled,
            view_radius: None,
        }
    }
}

fn view_radius(geom: &AttractorGeometry, cfg: &RasterConfig) -> f64 {
    cfg.view_radius.unwrap_or_else(|| {
        1.05 * geom
            .records
            .iter()
            .map(|r| r.r_outer)
            .fold(0.0, f64::max)
            .max(1e-300)
    })
}

/// Binary PPM (P6), white background and black set. Each pixel averages a
/// 2x2 grid of sample points. In attractor mode a sample counts when its
/// radius is within half a pixel of the interpolated band, and each stored
/// segment is then stamped onto the pixels it crosses.
pub fn render_ppm(geom: &AttractorGeometry, cfg: &RasterConfig) -> Vec<u8> {
    let (w, h) = (cfg.width, cfg.height);
    let half = view_radius(geom, cfg);
    let px = 2.0 * half / w.max(h) as f64;
    let mut pixels = vec![0u8; 3 * w * h];
    pixels.par_chunks_mut(3 * w).enumerate().for_each(|(j, row)| {
        for i in 0..w {
            let mut covered = 0u32;
            for (di, dj) in [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)] {
                let x = (i as f64 + di) * px - px * w as f64 / 2.0;
                let y = px * h as f64 / 2.0 - (j as f64 + dj) * px;
                let rho = x.hypot(y);
                let theta = y.atan2(x).rem_euclid(2.0 * PI);
                let (r_in, r_out) = geom.segment_at(theta);
                let hit = match cfg.mode {
                    RasterMode::Filled => rho <= r_out,
                    RasterMode::Attractor => rho >= r_in - px / 2.0 && rho <= r_out + px / 2.0,
                };
                covered += u32::from(hit);
            }
            let v = (255 * (4 - covered) / 4) as u8;
            row[3 * i..3 * i + 3].fill(v);
        }
    });
    if cfg.mode == RasterMode::Attractor {
        for rec in &geom.records {
            let steps = ((rec.r_outer - rec.r_inner) / (px / 4.0)).ceil() as usize;
            for s in 0..=steps {
                let rho = rec.r_inner + (rec.r_outer - rec.r_inner) * s as f64 / steps.max(1) as f64;
                let col = ((rho * rec.theta.cos() + px * w as f64 / 2.0) / px).floor();
                let row = ((px * h as f64 / 2.0 - rho * rec.theta.sin()) / px).floor();
                if (0.0..w as f64).contains(&col) && (0.0..h as f64).contains(&row) {
                    let at = 3 * (row as usize * w + col as usize);
                    pixels[at..at + 3].fill(0);
                }
            }
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    out
}

/// SVG with one polyline per radial segment and one for the outer curve.
pub fn to_svg(geom: &AttractorGeometry, cfg: &RasterConfig) -> String {
    let r = view_radius(geom, cfg);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        cfg.width,
        cfg.height,
        -r,
        -r,
        2.0 * r,
        2.0 * r
    );
    let _ = writeln!(
        s,
        r#"<g transform="scale(1,-1)" fill="none" stroke="black" stroke-width="{:e}">"#,
        r / 1000.0
    );
    let pt = |rho: f64, theta: f64| format!("{:.9e},{:.9e}", rho * theta.cos(), rho * theta.sin());
    for rec in &geom.records {
        let _ = writeln!(
            s,
            r#"<polyline class="segment" points="{} {}"/>"#,
            pt(rec.r_inner, rec.theta),
            pt(rec.r_outer, rec.theta)
        );
    }
    let mut outer: Vec<String> = geom.records.iter().map(|rec| pt(rec.r_outer, rec.theta)).collect();
    if let Some(first) = outer.first().cloned() {
        outer.push(first);
    }
    let _ = writeln!(s, r#"<polyline class="outer" points="{}"/>"#, outer.join(" "));
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::theta_of;

    fn ring(k: usize) -> AttractorGeometry {
        AttractorGeometry {
            alpha_desc: "ring".into(),
            depth: 3,
            grid: 8,
            class: ArithmeticClass::Herman,
            r_alpha: 0.5,
            sup_b: 0.0,
            partial_brjuno: 1.0,
            converged: true,
            invariant_t: None,
            records: (0..k)
                .map(|i| PolarRecord {
                    theta: theta_of(i as f64 / k as f64),
                    r_inner: 0.5,
                    r_outer: 0.75 + 0.1 * (i as f64 * 0.37).sin(),
                })
                .collect(),
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = ring(64);
        let back = AttractorGeometry::from_parts(&g.meta(), parse_csv(&to_csv(&g)).unwrap()).unwrap();
        assert_eq!(back, g);
        let json = serde_json::to_string(&g.meta()).unwrap();
        assert!(json.contains("\"K\":64"));
        let meta: GeometryMeta = serde_json::from_str(&json).unwrap();
        assert_eq!(meta, g.meta());
    }

    #[test]
    fn ppm_header_and_colours() {
        let g = ring(64);
        let cfg = RasterConfig {
            width: 40,
            height: 30,
            ..Default::default()
        };
        let img = render_ppm(&g, &cfg);
        let header = b"P6\n40 30\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(img.len(), header.len() + 3 * 40 * 30);
        let body = &img[header.len()..];
        // Corner is background, centre is inside the filled set.
        assert_eq!(&body[..3], &[255, 255, 255]);
        let c = 3 * (15 * 40 + 20);
        assert_eq!(&body[c..c + 3], &[0, 0, 0]);
        let cfg = RasterConfig {
            mode: RasterMode::Attractor,
            ..cfg
        };
        let body = render_ppm(&g, &cfg)[header.len()..].to_vec();
        assert_eq!(&body[c..c + 3], &[255, 255, 255]);
    }

    #[test]
    fn svg_has_one_segment_per_angle() {
        let g = ring(100);
        let svg = to_svg(&g, &RasterConfig::default());
        assert_eq!(svg.matches(r#"class="segment""#).count(), 100);
        assert_eq!(svg.matches(r#"class="outer""#).count(), 1);
    }
}
