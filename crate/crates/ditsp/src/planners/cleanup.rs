use super::{Segment, SegmentKind, Tour};
use crate::error::Result;
use crate::space::dist;
use crate::vehicle::{stop_go_time, VehicleParams};

/// Serves `targets` (index, position) in nearest-neighbour order from `start`,
/// stopping at each.
pub fn greedy_cleanup(targets: &[(usize, [f64; 3])], start: [f64; 3], params: &VehicleParams) -> Result<Tour> {
    let mut tour = Tour::default();
    let mut left: Vec<(usize, [f64; 3])> = targets.to_vec();
    let mut cur = start;
    while !left.is_empty() {
        let (k, d) = left
            .iter()
            .enumerate()
            .map(|(k, t)| (k, dist(&cur, &t.1)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        let (id, p) = left.remove(k);
        tour.push(Segment { kind: SegmentKind::StopGoLeg, length: d, duration: stop_go_time(d, params)? });
        tour.visit_order.push(id);
        cur = p;
    }
    Ok(tour)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_pair() {
        let p = VehicleParams::new(1.0, 1.0).unwrap();
        assert!(greedy_cleanup(&[], [0.0; 3], &p).unwrap().segments.is_empty());
        let a = [0.2, 0.2, 0.0];
        let b = [1.2, 0.2, 0.0];
        let t = greedy_cleanup(&[(0, a), (1, b)], a, &p).unwrap();
        assert!((t.total_time - 2.0).abs() < 1e-12);
        assert_eq!(t.visit_order, vec![0, 1]);
    }
}
