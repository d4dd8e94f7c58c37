use super::{Segment, SegmentKind, Tour};
use crate::error::{domain, Result};
use crate::etsp::etsp_tour;
use crate::space::{dist, PointSet};
use crate::vehicle::{stop_go_time, VehicleParams};

/// Visits the points in tour order, stopping at each one.
pub fn stop_go_stop(ps: &PointSet, params: &VehicleParams, seed: u64) -> Result<Tour> {
    if ps.is_empty() {
        return domain("point set is empty");
    }
    let order = etsp_tour(ps, seed).order;
    let mut tour = Tour::default();
    let n = order.len();
    if n > 1 {
        for i in 0..n {
            let d = dist(&ps.points[order[i]], &ps.points[order[(i + 1) % n]]);
            tour.push(Segment { kind: SegmentKind::StopGoLeg, length: d, duration: stop_go_time(d, params)? });
        }
    }
    tour.visit_order = order;
    Ok(tour)
}
