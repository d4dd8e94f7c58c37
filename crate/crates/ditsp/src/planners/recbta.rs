use super::{greedy_cleanup, require_dim, PhaseReport, Plan, SegmentKind, Tour};
use crate::error::Result;
use crate::geometry::{ell_for_n, meta_shifts, BeadCell, BeadGrid, BeadSpec};
use crate::vehicle::{cruise_profile, u_turn_length, VehicleParams};
use crate::space::PointSet;
use std::collections::HashMap;
use std::f64::consts::PI;

struct MetaRow {
    left: f64,
    right: f64,
    y: f64,
    cells: u64,
}

fn meta_rows(grid: &BeadGrid, a: u32, b: u32) -> Vec<MetaRow> {
    let rows = grid.rows();
    let count = if rows == 0 { 0 } else { ((rows - 1) >> a) + 1 };
    (0..count)
        .map(|m| {
            let lo = m << a;
            let hi = ((m + 1) << a).min(rows);
            let mut row = MetaRow { left: f64::INFINITY, right: f64::NEG_INFINITY, y: 0.0, cells: 0 };
            for r in lo..hi {
                let (l, rr) = grid.row_span(r);
                row.left = row.left.min(l);
                row.right = row.right.max(rr);
                row.y += grid.center(BeadCell { row: r, col: 0 })[1];
                row.cells = row.cells.max(((grid.cols(r) as u64 - 1) >> b) + 1);
            }
            row.y /= (hi - lo) as f64;
            row
        })
        .collect()
}

/// Recursive bead tiling in the plane.
///
/// Phase `i` sweeps every meta-row of the phase-`i` grouping, top to bottom
/// with alternating direction, serving the oldest pending target of each
/// non-empty meta-bead. Targets left after `⌈log₂n⌉+1` phases are served
/// greedily.
pub fn rec_bta(ps: &PointSet, params: &VehicleParams) -> Result<Plan> {
    require_dim(ps, 2)?;
    let ws = ps.workspace;
    let n = ps.len();
    let cruise = cruise_profile(params.r_vel, params)?;
    let rho = cruise.rho;
    let sizing = ell_for_n(&ws, rho, n)?;
    let spec = BeadSpec::new(rho, sizing.ell)?;
    let grid = BeadGrid::new(spec, ws.w, ws.h)?;
    let cells: Vec<BeadCell> = ps.points.iter().map(|p| grid.locate([p[0], p[1]])).collect();
    let (ell, arc, uturn) = (spec.ell, spec.arc_length(), u_turn_length(rho)?);
    let max_phases = (n as f64).log2().ceil() as u32 + 1;

    let mut tour = Tour::default();
    let mut phases = Vec::new();
    let mut pending: Vec<usize> = (0..n).collect();
    for phase in 1..=max_phases {
        if pending.is_empty() {
            break;
        }
        let (a, b) = meta_shifts(phase);
        let rows = meta_rows(&grid, a, b);
        let mut taken: HashMap<(u32, u32), ()> = HashMap::new();
        let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); rows.len()];
        pending.retain(|&t| {
            let key = grid.meta(cells[t], phase);
            if taken.insert(key, ()).is_none() {
                by_row[key.0 as usize].push(t);
                false
            } else {
                true
            }
        });
        let mut leg = Tour::default();
        let mut rightward = true;
        for (k, m) in (0..rows.len()).rev().enumerate() {
            let row = &rows[m];
            if k > 0 {
                leg.cruise(SegmentKind::UTurn, uturn + (rows[m + 1].y - row.y).abs(), cruise.speed);
            }
            let served = &mut by_row[m];
            let straight = (row.right - row.left - served.len() as f64 * ell).max(0.0);
            leg.cruise(SegmentKind::Pass, straight, cruise.speed);
            served.sort_by(|&p, &q| {
                let o = ps.points[p][0].total_cmp(&ps.points[q][0]);
                if rightward { o } else { o.reverse() }
            });
            for &t in served.iter() {
                leg.cruise(SegmentKind::CellArc, arc, cruise.speed);
                leg.visit_order.push(t);
            }
            rightward = !rightward;
        }
        let meta_w = (1u64 << b) as f64 * ell;
        leg.cruise(SegmentKind::Closing, ws.w + ws.h + 2.0 * PI * rho + 2.0 * meta_w, cruise.speed);
        phases.push(PhaseReport {
            phase,
            subphase: None,
            meta_size: 1u64 << (a + b),
            meta_rows: rows.len() as u64,
            meta_cells: rows.iter().map(|r| r.cells).sum(),
            served: leg.visit_order.len(),
            leftover: pending.len(),
            length: leg.total_length,
        });
        tour.append(leg);
    }
    let phase_time = tour.total_time;
    let leftover = pending.len();
    let rest: Vec<(usize, [f64; 3])> = pending.iter().map(|&t| (t, ps.points[t])).collect();
    let cleanup = greedy_cleanup(&rest, [0.0, ws.h, 0.0], params)?;
    let cleanup_time = cleanup.total_time;
    tour.append(cleanup);
    Ok(Plan { tour, phases, leftover_after_phases: leftover, cell: Some(sizing), phase_time, cleanup_time })
}
