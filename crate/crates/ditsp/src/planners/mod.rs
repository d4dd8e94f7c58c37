//! Tour strategies with per-primitive length and time accounting.

mod cleanup;
mod recbta;
mod reccca;
mod sgs;

pub use cleanup::greedy_cleanup;
pub use recbta::rec_bta;
pub use reccca::rec_cca;
pub use sgs::stop_go_stop;

use crate::error::{domain, Result};
use crate::geometry::CellSizing;
use crate::space::PointSet;
use crate::vehicle::VehicleParams;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Pass,
    UTurn,
    CellArc,
    StopGoLeg,
    Closing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub length: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tour {
    pub segments: Vec<Segment>,
    pub total_length: f64,
    pub total_time: f64,
    /// Target indices in service order.
    pub visit_order: Vec<usize>,
}

impl Tour {
    pub(crate) fn cruise(&mut self, kind: SegmentKind, length: f64, speed: f64) {
        self.push(Segment { kind, length, duration: length / speed });
    }

    pub(crate) fn push(&mut self, s: Segment) {
        self.total_length += s.length;
        self.total_time += s.duration;
        self.segments.push(s);
    }

    pub(crate) fn append(&mut self, other: Tour) {
        for s in other.segments {
            self.push(s);
        }
        self.visit_order.extend(other.visit_order);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub phase: u32,
    /// Sub-phase label for the 3D planner.
    pub subphase: Option<&'static str>,
    /// Base cells per meta-cell.
    pub meta_size: u64,
    pub meta_rows: u64,
    pub meta_cells: u64,
    pub served: usize,
    pub leftover: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plan {
    pub tour: Tour,
    pub phases: Vec<PhaseReport>,
    pub leftover_after_phases: usize,
    pub cell: Option<CellSizing>,
    /// Time spent in the recursive phases.
    pub phase_time: f64,
    pub cleanup_time: f64,
}

impl Plan {
    pub fn phase_count(&self) -> usize {
        self.phases.iter().map(|p| p.phase).max().unwrap_or(0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Sgs,
    Recbta,
    Reccca,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Sgs => "sgs",
            Algo::Recbta => "recbta",
            Algo::Reccca => "reccca",
        })
    }
}

impl FromStr for Algo {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgs" => Ok(Algo::Sgs),
            "recbta" => Ok(Algo::Recbta),
            "reccca" => Ok(Algo::Reccca),
            _ => Err(crate::Error::Config(format!("unknown algorithm {s}"))),
        }
    }
}

/// Runs any planner and wraps the result uniformly.
pub fn plan(algo: Algo, ps: &PointSet, params: &VehicleParams, seed: u64) -> Result<Plan> {
    match algo {
        Algo::Sgs => {
            let tour = stop_go_stop(ps, params, seed)?;
            let t = tour.total_time;
            Ok(Plan { tour, phases: Vec::new(), leftover_after_phases: 0, cell: None, phase_time: 0.0, cleanup_time: t })
        }
        Algo::Recbta => rec_bta(ps, params),
        Algo::Reccca => rec_cca(ps, params),
    }
}

pub(crate) fn require_dim(ps: &PointSet, dim: usize) -> Result<()> {
    if ps.dim() != dim {
        return domain(format!("planner needs a {dim}D workspace, got {}D", ps.dim()));
    }
    if ps.is_empty() {
        return domain("point set is empty");
    }
    Ok(())
}
