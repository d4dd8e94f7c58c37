use super::{greedy_cleanup, require_dim, PhaseReport, Plan, SegmentKind, Tour};
use crate::error::Result;
use crate::geometry::{ell_for_n, meta_shifts_3d, CylCell, CylinderGrid, CylinderSpec, SUBPHASES};
use crate::space::PointSet;
use crate::vehicle::{cruise_profile, u_turn_length, VehicleParams};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

/// Meta-lines of a sub-phase in sweep order: layers ascending, rows
/// alternating direction from one meta-layer to the next.
fn meta_lines(grid: &CylinderGrid, row_shift: u32, layer_shift: u32) -> Vec<((u32, u32), [f64; 2])> {
    let mut acc: BTreeMap<(u32, u32), ([f64; 2], u32)> = BTreeMap::new();
    for k in 0..grid.layers() {
        for j in 0..grid.rows(k) {
            let e = acc.entry((k >> layer_shift, j >> row_shift)).or_insert(([0.0; 2], 0));
            let [y, z] = grid.axis(k, j);
            e.0[0] += y;
            e.0[1] += z;
            e.1 += 1;
        }
    }
    let mut layers: BTreeMap<u32, Vec<((u32, u32), [f64; 2])>> = BTreeMap::new();
    for (key, (s, c)) in acc {
        layers.entry(key.0).or_default().push((key, [s[0] / c as f64, s[1] / c as f64]));
    }
    let mut out = Vec::new();
    for (i, (_, mut v)) in layers.into_iter().enumerate() {
        if i % 2 == 1 {
            v.reverse();
        }
        out.extend(v);
    }
    out
}

/// Recursive cylinder covering in space.
///
/// Each phase runs five sub-phases with meta-cylinders of 1, 2, 4, 8 and 16
/// phase cells; every sub-phase sweeps all meta-lines with an out-and-back
/// pair of passes and serves the oldest pending target of each non-empty
/// meta-cylinder.
pub fn rec_cca(ps: &PointSet, params: &VehicleParams) -> Result<Plan> {
    require_dim(ps, 3)?;
    let ws = ps.workspace;
    let (w, h, d) = (ws.w, ws.h, ws.d.unwrap_or(0.0));
    let n = ps.len();
    let cruise = cruise_profile(params.r_vel, params)?;
    let rho = cruise.rho;
    let sizing = ell_for_n(&ws, rho, n)?;
    let spec = CylinderSpec::new(rho, sizing.ell)?;
    let grid = CylinderGrid::new(spec, w, h, d)?;
    let cells: Vec<CylCell> = ps.points.iter().map(|&p| grid.locate(p)).collect();
    let ell = spec.ell;
    let arc = spec.bead().arc_length();
    let uturn = u_turn_length(rho)?;
    let span = grid.cols() as f64 * ell;
    let max_phases = (((n as f64).log2() + 7.0) / 5.0).ceil().max(1.0) as u32;

    let mut tour = Tour::default();
    let mut phases = Vec::new();
    let mut pending: Vec<usize> = (0..n).collect();
    'phases: for phase in 1..=max_phases {
        for (sub, label) in SUBPHASES.iter().enumerate() {
            if pending.is_empty() {
                break 'phases;
            }
            let (sc, sr, sl) = meta_shifts_3d(phase, sub);
            let lines = meta_lines(&grid, sr, sl);
            let slot: HashMap<(u32, u32), usize> = lines.iter().enumerate().map(|(i, l)| (l.0, i)).collect();
            let mut taken: HashMap<(u32, u32, u32), ()> = HashMap::new();
            let mut by_line: Vec<Vec<usize>> = vec![Vec::new(); lines.len()];
            pending.retain(|&t| {
                let key = grid.meta(cells[t], phase, sub);
                if taken.insert(key, ()).is_none() {
                    by_line[slot[&(key.0, key.1)]].push(t);
                    false
                } else {
                    true
                }
            });
            let mut leg = Tour::default();
            for (i, line) in lines.iter().enumerate() {
                if i > 0 {
                    let [y0, z0] = lines[i - 1].1;
                    let hop = (line.1[0] - y0).hypot(line.1[1] - z0);
                    leg.cruise(SegmentKind::UTurn, uturn + hop, cruise.speed);
                }
                let served = &mut by_line[i];
                let straight = (span - served.len() as f64 * ell).max(0.0);
                leg.cruise(SegmentKind::Pass, straight, cruise.speed);
                served.sort_by(|&p, &q| ps.points[p][0].total_cmp(&ps.points[q][0]));
                for &t in served.iter() {
                    leg.cruise(SegmentKind::CellArc, arc, cruise.speed);
                    leg.visit_order.push(t);
                }
                leg.cruise(SegmentKind::UTurn, uturn + ell / 2.0, cruise.speed);
                leg.cruise(SegmentKind::Pass, span, cruise.speed);
            }
            let meta_l = (1u64 << sc) as f64 * ell;
            leg.cruise(SegmentKind::Closing, w + h + d + 2.0 * PI * rho + 2.0 * meta_l, cruise.speed);
            let cols = ((grid.cols() as u64 - 1) >> sc) + 1;
            phases.push(PhaseReport {
                phase,
                subphase: Some(label),
                meta_size: 1u64 << (sc + sr + sl),
                meta_rows: lines.len() as u64,
                meta_cells: lines.len() as u64 * cols,
                served: leg.visit_order.len(),
                leftover: pending.len(),
                length: leg.total_length,
            });
            tour.append(leg);
        }
    }
    let phase_time = tour.total_time;
    let leftover = pending.len();
    let rest: Vec<(usize, [f64; 3])> = pending.iter().map(|&t| (t, ps.points[t])).collect();
    let cleanup = greedy_cleanup(&rest, [0.0, 0.0, 0.0], params)?;
    let cleanup_time = cleanup.total_time;
    tour.append(cleanup);
    Ok(Plan { tour, phases, leftover_after_phases: leftover, cell: Some(sizing), phase_time, cleanup_time })
}
