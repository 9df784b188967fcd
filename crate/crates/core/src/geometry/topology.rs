//! Topological labels backed by hair statistics.

use super::AttractorGeometry;
use crate::brjuno::{ArithmeticClass, ArithmeticVerdict};
use serde::Serialize;

/// Radial gap above which an angle carries a hair.
pub const DEFAULT_GAP_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyLabel {
    JordanCurve,
    OneSidedHairyJordanCurve,
    CantorBouquet,
    Unlabeled,
}

impl TopologyLabel {
    pub fn of(class: ArithmeticClass) -> Self {
        match class {
            ArithmeticClass::Herman => TopologyLabel::JordanCurve,
            ArithmeticClass::BrjunoNotHerman => TopologyLabel::OneSidedHairyJordanCurve,
            ArithmeticClass::NonBrjuno => TopologyLabel::CantorBouquet,
            ArithmeticClass::Undetermined => TopologyLabel::Unlabeled,
        }
    }
}

/// Label from the arithmetic verdict, with the geometric statistics that
/// corroborate it. These are diagnostics of the discretised set, not proofs
/// of its topology.
#[derive(Clone, Debug, Serialize)]
pub struct TopologyReport {
    pub label: TopologyLabel,
    /// Share of angles whose segment is longer than `gap_threshold`.
    pub hair_fraction: f64,
    /// Share of angles where the segment collapses to a point.
    pub touch_fraction: f64,
    pub gap_threshold: f64,
    pub max_gap: f64,
}

pub fn classify_topology(geom: &AttractorGeometry, verdict: &ArithmeticVerdict) -> TopologyReport {
    classify_topology_with(geom, verdict.class, DEFAULT_GAP_THRESHOLD)
}

pub fn classify_topology_with(
    geom: &AttractorGeometry,
    class: ArithmeticClass,
    gap_threshold: f64,
) -> TopologyReport {
    let k = geom.records.len().max(1) as f64;
    let hairs = geom
        .records
        .iter()
        .filter(|r| r.r_outer - r.r_inner > gap_threshold)
        .count() as f64;
    TopologyReport {
        label: TopologyLabel::of(class),
        hair_fraction: hairs / k,
        touch_fraction: 1.0 - hairs / k,
        gap_threshold,
        max_gap: geom.max_gap(),
    }
}
