//! Euclidean TSP: nearest-neighbour construction refined by local search.

use crate::error::{domain, Result};
use crate::space::{dist, PointSet, Workspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::VecDeque;

/// Below this size every other point is a 2-opt candidate, so the result is
/// a true 2-opt local optimum.
pub const FULL_CANDIDATE_LIMIT: usize = 1000;
pub const NEIGHBORS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TourOrder {
    pub order: Vec<usize>,
    pub length: f64,
}

pub fn tour_length(points: &[[f64; 3]], order: &[usize]) -> f64 {
    if order.len() < 2 {
        return 0.0;
    }
    let mut len: f64 = order.windows(2).map(|w| dist(&points[w[0]], &points[w[1]])).sum();
    len += dist(&points[order[order.len() - 1]], &points[order[0]]);
    len
}

/// Closed-tour edges longer than `threshold`.
pub fn long_edge_count(points: &[[f64; 3]], order: &[usize], threshold: f64) -> usize {
    let n = order.len();
    if n < 2 {
        return 0;
    }
    (0..n)
        .filter(|&i| dist(&points[order[i]], &points[order[(i + 1) % n]]) > threshold)
        .count()
}

struct Grid {
    dims: [usize; 3],
    cell: [f64; 3],
    buckets: Vec<Vec<u32>>,
}

impl Grid {
    fn new(points: &[[f64; 3]], ws: &Workspace) -> Self {
        let n = points.len().max(1) as f64;
        let dims = match ws.d {
            None => {
                let g = (n / 2.0).sqrt().ceil().max(1.0) as usize;
                [g, g, 1]
            }
            Some(_) => {
                let g = (n / 2.0).cbrt().ceil().max(1.0) as usize;
                [g, g, g]
            }
        };
        let ext = [ws.w, ws.h, ws.d.unwrap_or(1.0)];
        let cell = [ext[0] / dims[0] as f64, ext[1] / dims[1] as f64, ext[2] / dims[2] as f64];
        let mut g = Grid { dims, cell, buckets: vec![Vec::new(); dims[0] * dims[1] * dims[2]] };
        for (i, p) in points.iter().enumerate() {
            let k = g.key(p);
            g.buckets[k].push(i as u32);
        }
        g
    }

    fn coords(&self, p: &[f64; 3]) -> [usize; 3] {
        let mut c = [0; 3];
        for a in 0..3 {
            c[a] = ((p[a] / self.cell[a]) as usize).min(self.dims[a] - 1);
        }
        c
    }

    fn key(&self, p: &[f64; 3]) -> usize {
        let c = self.coords(p);
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    fn min_cell(&self) -> f64 {
        let mut m = self.cell[0].min(self.cell[1]);
        if self.dims[2] > 1 {
            m = m.min(self.cell[2]);
        }
        m
    }

    /// Visits buckets at Chebyshev ring distance `k` from `c`; false if none exist.
    fn ring(&self, c: [usize; 3], k: usize, mut f: impl FnMut(&[u32])) -> bool {
        let k = k as i64;
        let lim = |a: usize| {
            let lo = (c[a] as i64 - k).max(0);
            let hi = (c[a] as i64 + k).min(self.dims[a] as i64 - 1);
            (lo, hi)
        };
        let (x, y, z) = (lim(0), lim(1), lim(2));
        let mut any = false;
        for iz in z.0..=z.1 {
            for iy in y.0..=y.1 {
                let dz = (iz - c[2] as i64).abs();
                let dy = (iy - c[1] as i64).abs();
                if dz.max(dy) == k {
                    for ix in x.0..=x.1 {
                        any = true;
                        f(&self.buckets[((iz as usize * self.dims[1]) + iy as usize) * self.dims[0] + ix as usize]);
                    }
                } else {
                    for ix in [c[0] as i64 - k, c[0] as i64 + k] {
                        if ix >= x.0 && ix <= x.1 {
                            any = true;
                            f(&self.buckets[((iz as usize * self.dims[1]) + iy as usize) * self.dims[0] + ix as usize]);
                            if k == 0 {
                                break;
                            }
                        }
                    }
                }
            }
        }
        any
    }

    fn max_ring(&self) -> usize {
        *self.dims.iter().max().unwrap()
    }
}

pub fn nearest_neighbor_order(ps: &PointSet, start: usize) -> Vec<usize> {
    let pts = &ps.points;
    let n = pts.len();
    if n == 0 {
        return Vec::new();
    }
    let mut grid = Grid::new(pts, &ps.workspace);
    let mut slot = vec![0usize; n];
    for b in &grid.buckets {
        for (s, &i) in b.iter().enumerate() {
            slot[i as usize] = s;
        }
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rem_slot: Vec<usize> = (0..n).collect();
    let remove = |grid: &mut Grid, slot: &mut Vec<usize>, rem: &mut Vec<usize>, rs: &mut Vec<usize>, i: usize| {
        let k = grid.key(&pts[i]);
        let b = &mut grid.buckets[k];
        let s = slot[i];
        b.swap_remove(s);
        if s < b.len() {
            slot[b[s] as usize] = s;
        }
        let s = rs[i];
        rem.swap_remove(s);
        if s < rem.len() {
            rs[rem[s]] = s;
        }
    };
    let dim = ps.dim() as u32;
    let mut order = Vec::with_capacity(n);
    let mut cur = start.min(n - 1);
    remove(&mut grid, &mut slot, &mut remaining, &mut rem_slot, cur);
    order.push(cur);
    while !remaining.is_empty() {
        let p = pts[cur];
        let c = grid.coords(&p);
        let mut best = (f64::INFINITY, usize::MAX);
        let cs = grid.min_cell();
        let mut k = 0;
        loop {
            if ((2 * k + 1) as u64).pow(dim) > remaining.len() as u64 * 4 {
                for &j in &remaining {
                    let d = dist(&p, &pts[j]);
                    if d < best.0 || (d == best.0 && j < best.1) {
                        best = (d, j);
                    }
                }
                break;
            }
            let any = grid.ring(c, k, |b| {
                for &j in b {
                    let j = j as usize;
                    let d = dist(&p, &pts[j]);
                    if d < best.0 || (d == best.0 && j < best.1) {
                        best = (d, j);
                    }
                }
            });
            if best.0 <= k as f64 * cs || (!any && k > grid.max_ring()) {
                break;
            }
            k += 1;
        }
        cur = best.1;
        remove(&mut grid, &mut slot, &mut remaining, &mut rem_slot, cur);
        order.push(cur);
    }
    order
}

fn candidate_lists(ps: &PointSet) -> Vec<Vec<u32>> {
    let pts = &ps.points;
    let n = pts.len();
    if n <= FULL_CANDIDATE_LIMIT {
        return (0..n)
            .map(|i| {
                let mut v: Vec<u32> = (0..n as u32).filter(|&j| j as usize != i).collect();
                v.sort_by(|&a, &b| {
                    dist(&pts[i], &pts[a as usize]).total_cmp(&dist(&pts[i], &pts[b as usize])).then(a.cmp(&b))
                });
                v
            })
            .collect();
    }
    let grid = Grid::new(pts, &ps.workspace);
    let cs = grid.min_cell();
    let kk = NEIGHBORS.min(n - 1);
    (0..n)
        .map(|i| {
            let p = pts[i];
            let c = grid.coords(&p);
            let mut best: Vec<(f64, u32)> = Vec::with_capacity(kk + 1);
            let mut k = 0;
            loop {
                grid.ring(c, k, |b| {
                    for &j in b {
                        if j as usize == i {
                            continue;
                        }
                        let d = dist(&p, &pts[j as usize]);
                        if best.len() < kk || d < best[kk - 1].0 {
                            let at = best.partition_point(|e| e.0 <= d);
                            best.insert(at, (d, j));
                            best.truncate(kk);
                        }
                    }
                });
                if (best.len() == kk && best[kk - 1].0 <= k as f64 * cs) || k > grid.max_ring() {
                    break;
                }
                k += 1;
            }
            best.into_iter().map(|e| e.1).collect()
        })
        .collect()
}

struct ArrayTour {
    tour: Vec<u32>,
    pos: Vec<u32>,
}

impl ArrayTour {
    fn succ(&self, a: usize) -> usize {
        let n = self.tour.len();
        self.tour[(self.pos[a] as usize + 1) % n] as usize
    }

    fn pred(&self, a: usize) -> usize {
        let n = self.tour.len();
        self.tour[(self.pos[a] as usize + n - 1) % n] as usize
    }

    /// Reverses the cyclic stretch from position `i` forward to `j`.
    fn reverse(&mut self, i: usize, j: usize) {
        let n = self.tour.len();
        let mut len = (j + n - i) % n + 1;
        let (mut i, mut j) = (i, j);
        if 2 * len > n {
            let (ni, nj) = ((j + 1) % n, (i + n - 1) % n);
            i = ni;
            j = nj;
            len = n - len;
        }
        for _ in 0..len / 2 {
            self.tour.swap(i, j);
            self.pos[self.tour[i] as usize] = i as u32;
            self.pos[self.tour[j] as usize] = j as u32;
            i = (i + 1) % n;
            j = (j + n - 1) % n;
        }
    }
}

impl ArrayTour {
    /// Replaces edges `{a,b}`, `{c,d}` by `{a,c}`, `{b,d}`; the cycle must
    /// read `a b … c d` in one of its two orientations.
    fn exchange(&mut self, a: usize, b: usize, c: usize, d: usize) {
        if self.succ(a) == b {
            self.reverse(self.pos[b] as usize, self.pos[c] as usize);
        } else {
            self.reverse(self.pos[a] as usize, self.pos[d] as usize);
        }
    }
}

const MAX_SEGMENT: usize = 3;

/// Local search with 2-opt and segment-insertion moves over neighbour lists,
/// driven by don't-look bits; at most `50·n` moves.
pub fn two_opt(ps: &PointSet, order: &mut Vec<usize>) -> usize {
    let pts = &ps.points;
    let n = order.len();
    if n < 4 {
        return 0;
    }
    let cands = candidate_lists(ps);
    let mut t = ArrayTour { tour: order.iter().map(|&i| i as u32).collect(), pos: vec![0; n] };
    for (k, &c) in t.tour.iter().enumerate() {
        t.pos[c as usize] = k as u32;
    }
    let d = |a: usize, b: usize| dist(&pts[a], &pts[b]);
    let cap = 50 * n;
    let eps = 1e-12;
    let mut moves = 0;
    let mut queued = vec![true; n];
    let mut queue: VecDeque<usize> = order.iter().copied().collect();
    'outer: loop {
        while let Some(a) = queue.pop_front() {
            queued[a] = false;
            let touched = match improve_two_opt(&mut t, &cands, &d, a, eps) {
                Some(v) => Some(v),
                None if n > MAX_SEGMENT + 3 => improve_or_opt(&mut t, &cands, &d, a, eps),
                None => None,
            };
            if let Some(nodes) = touched {
                moves += 1;
                for x in nodes {
                    if !queued[x] {
                        queued[x] = true;
                        queue.push_back(x);
                    }
                }
                if moves >= cap {
                    break 'outer;
                }
            }
        }
        if n > FULL_CANDIDATE_LIMIT || !exists_improving_move(&t, &d, eps) {
            break;
        }
        queue.extend(0..n);
        queued.fill(true);
    }
    *order = t.tour.iter().map(|&i| i as usize).collect();
    moves
}

fn improve_two_opt(
    t: &mut ArrayTour,
    cands: &[Vec<u32>],
    d: &impl Fn(usize, usize) -> f64,
    a: usize,
    eps: f64,
) -> Option<Vec<usize>> {
    for forward in [true, false] {
        let b = if forward { t.succ(a) } else { t.pred(a) };
        let dab = d(a, b);
        for &c in &cands[a] {
            let c = c as usize;
            let g1 = dab - d(a, c);
            if g1 <= eps {
                break;
            }
            let e = if forward { t.succ(c) } else { t.pred(c) };
            if c == b || e == a {
                continue;
            }
            if g1 + d(c, e) - d(b, e) > eps {
                t.exchange(a, b, c, e);
                return Some(vec![a, b, c, e]);
            }
        }
    }
    None
}

/// Moves a segment of up to three cities starting at `s1` between two
/// adjacent cities elsewhere, possibly reversed.
fn improve_or_opt(
    t: &mut ArrayTour,
    cands: &[Vec<u32>],
    d: &impl Fn(usize, usize) -> f64,
    s1: usize,
    eps: f64,
) -> Option<Vec<usize>> {
    let p = t.pred(s1);
    let mut s2 = s1;
    for _len in 1..=MAX_SEGMENT {
        let nx = t.succ(s2);
        let g0 = d(p, s1) + d(s2, nx) - d(p, nx);
        if g0 > eps {
            let in_seg = |x: usize| {
                let mut y = s1;
                loop {
                    if x == y {
                        return true;
                    }
                    if y == s2 {
                        return false;
                    }
                    y = t.succ(y);
                }
            };
            for (end, other) in [(s1, s2), (s2, s1)] {
                for &c in &cands[end] {
                    let c = c as usize;
                    if g0 - d(c, end) <= eps {
                        break;
                    }
                    if c == p || c == nx || in_seg(c) {
                        continue;
                    }
                    for e in [t.succ(c), t.pred(c)] {
                        if e == p || e == nx || in_seg(e) {
                            continue;
                        }
                        let add = d(c, end) + d(other, e) - d(c, e);
                        if g0 - add > eps {
                            let (u, v) = if t.succ(c) == e { (c, e) } else { (e, c) };
                            t.exchange(p, s1, u, v);
                            t.exchange(p, u, nx, s2);
                            // segment now sits as u s2 … s1 v
                            let want_u = if u == c { end } else { other };
                            if want_u == s1 && s1 != s2 {
                                t.exchange(u, s2, s1, v);
                            }
                            return Some(vec![p, nx, s1, s2, c, e]);
                        }
                    }
                }
            }
        }
        s2 = t.succ(s2);
        if s2 == p || t.succ(s2) == p {
            break;
        }
    }
    None
}

fn exists_improving_move(t: &ArrayTour, d: &impl Fn(usize, usize) -> f64, eps: f64) -> bool {
    let n = t.tour.len();
    let at = |k: usize| t.tour[k % n] as usize;
    (0..n).any(|i| {
        (i + 2..n).any(|j| {
            if i == 0 && j == n - 1 {
                return false;
            }
            let (a, b, c, e) = (at(i), at(i + 1), at(j), at(j + 1));
            d(a, b) + d(c, e) - d(a, c) - d(b, e) > eps
        })
    })
}

pub fn etsp_tour(ps: &PointSet, seed: u64) -> TourOrder {
    let n = ps.len();
    if n == 0 {
        return TourOrder { order: Vec::new(), length: 0.0 };
    }
    let start = ChaCha8Rng::seed_from_u64(seed).gen_range(0..n);
    let mut order = nearest_neighbor_order(ps, start);
    two_opt(ps, &mut order);
    let length = tour_length(&ps.points, &order);
    TourOrder { order, length }
}

/// Points at the centres of a `k^d` lattice with `k = ⌈n^{1/d}⌉`, first `n`
/// in lexicographic order.
pub fn worst_case_grid(ws: &Workspace, n: usize) -> Result<(PointSet, f64)> {
    if n == 0 {
        return domain("n must be >= 1");
    }
    let dim = ws.dim() as u32;
    let mut k = (n as f64).powf(1.0 / dim as f64).round().max(1.0) as usize;
    while k.pow(dim) < n {
        k += 1;
    }
    while k > 1 && (k - 1).pow(dim) >= n {
        k -= 1;
    }
    let step = [ws.w / k as f64, ws.h / k as f64, ws.d.unwrap_or(0.0) / k as f64];
    let c = |i: usize, a: usize| (i as f64 + 0.5) * step[a];
    let mut pts = Vec::with_capacity(n);
    'fill: for i in 0..k {
        for j in 0..k {
            if dim == 2 {
                pts.push([c(i, 0), c(j, 1), 0.0]);
                if pts.len() == n {
                    break 'fill;
                }
            } else {
                for l in 0..k {
                    pts.push([c(i, 0), c(j, 1), c(l, 2)]);
                    if pts.len() == n {
                        break 'fill;
                    }
                }
            }
        }
    }
    let pitch = step[..dim as usize].iter().cloned().fold(0.0, f64::max);
    Ok((PointSet::new(*ws, pts)?, pitch))
}
