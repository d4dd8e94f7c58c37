use super::bead::CylinderSpec;
use crate::error::{positive, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CylCell {
    pub layer: u32,
    pub row: u32,
    pub col: u32,
}

/// Sub-phases of a 3D recursive phase, in execution order.
pub const SUBPHASES: [&str; 5] = ["I", "II", "III", "IV", "V"];

/// Covering of `[0,W]×[0,H]×[0,D]` by cylinders with axes along x.
///
/// Layer `k` sits at `z = k·r`; rows within a layer are `2r` apart and odd
/// layers are shifted by `r` in y, so axes form a square lattice rotated by 45°.
#[derive(Debug, Clone, Serialize)]
pub struct CylinderGrid {
    pub spec: CylinderSpec,
    pub w: f64,
    pub h: f64,
    pub d: f64,
    layers: u32,
    rows_even: u32,
    rows_odd: u32,
    cols: u32,
}

/// `(col, row, layer)` shifts for phase `p` (from 1) and sub-phase `s` in 0..5.
pub fn meta_shifts_3d(phase: u32, sub: usize) -> (u32, u32, u32) {
    assert!(phase >= 1 && sub < 5);
    let (sa, sr, sl) = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0), (2, 1, 1)][sub];
    let q = phase - 1;
    (q + sa, 2 * q + sr, 2 * q + sl)
}

fn count_until(limit: f64) -> u32 {
    if limit <= 0.0 { 0 } else { limit.ceil() as u32 }
}

impl CylinderGrid {
    pub fn new(spec: CylinderSpec, w: f64, h: f64, d: f64) -> Result<Self> {
        positive("W", w)?;
        positive("H", h)?;
        positive("D", d)?;
        let r = spec.radius();
        Ok(Self {
            spec,
            w,
            h,
            d,
            layers: count_until(d / r + 1.0),
            rows_even: count_until((h + r) / (2.0 * r)),
            rows_odd: count_until(h / (2.0 * r)),
            cols: count_until(w / spec.ell),
        })
    }

    pub fn radius(&self) -> f64 {
        self.spec.radius()
    }

    pub fn layers(&self) -> u32 {
        self.layers
    }

    pub fn rows(&self, layer: u32) -> u32 {
        if layer.is_multiple_of(2) { self.rows_even } else { self.rows_odd }
    }

    pub fn max_rows(&self) -> u32 {
        self.rows_even.max(self.rows_odd)
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn lines(&self) -> u64 {
        let k = self.layers as u64;
        k.div_ceil(2) * self.rows_even as u64 + (k / 2) * self.rows_odd as u64
    }

    pub fn len(&self) -> u64 {
        self.lines() * self.cols as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis position `(y, z)` of a row.
    pub fn axis(&self, layer: u32, row: u32) -> [f64; 2] {
        let r = self.radius();
        let o = if layer.is_multiple_of(2) { 0.0 } else { r };
        [o + 2.0 * r * row as f64, r * layer as f64]
    }

    pub fn x_range(&self, col: u32) -> (f64, f64) {
        let l = self.spec.ell;
        (col as f64 * l, (col + 1) as f64 * l)
    }

    /// Layer-major linear index.
    pub fn index(&self, c: CylCell) -> u64 {
        let k = c.layer as u64;
        let line = k.div_ceil(2) * self.rows_even as u64 + (k / 2) * self.rows_odd as u64 + c.row as u64;
        line * self.cols as u64 + c.col as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = CylCell> + '_ {
        (0..self.layers).flat_map(move |layer| {
            (0..self.rows(layer))
                .flat_map(move |row| (0..self.cols).map(move |col| CylCell { layer, row, col }))
        })
    }

    fn candidates(&self, p: [f64; 3]) -> impl Iterator<Item = CylCell> + '_ {
        let r = self.radius();
        let col = ((p[0] / self.spec.ell).floor()).clamp(0.0, self.cols as f64 - 1.0) as u32;
        let k0 = (p[2] / r).floor() as i64;
        (k0 - 1..=k0 + 2).filter_map(move |k| {
            if k < 0 || k >= self.layers as i64 {
                return None;
            }
            let layer = k as u32;
            let o = if layer.is_multiple_of(2) { 0.0 } else { r };
            let j = ((p[1] - o) / (2.0 * r)).round();
            let row = j.clamp(0.0, self.rows(layer) as f64 - 1.0) as u32;
            Some(CylCell { layer, row, col })
        })
    }

    fn axis_dist(&self, c: CylCell, p: [f64; 3]) -> f64 {
        let [y, z] = self.axis(c.layer, c.row);
        (p[1] - y).hypot(p[2] - z)
    }

    /// Owner is the nearest axis; ties go to the lowest index.
    pub fn locate(&self, p: [f64; 3]) -> CylCell {
        let tie = 1e-12 * self.radius();
        let mut best: Option<(f64, CylCell)> = None;
        for c in self.candidates(p) {
            let d = self.axis_dist(c, p);
            match best {
                Some((bd, _)) if d >= bd - tie => {}
                _ => best = Some((d, c)),
            }
        }
        best.expect("point outside the covered workspace").1
    }

    pub fn containing(&self, p: [f64; 3], tol: f64) -> Vec<CylCell> {
        let r = self.radius();
        let (x0, x1) = self.x_range(self.candidates(p).next().map_or(0, |c| c.col));
        let mut v: Vec<CylCell> = self
            .candidates(p)
            .filter(|&c| self.axis_dist(c, p) <= r + tol && p[0] >= x0 - tol && p[0] <= x1 + tol)
            .collect();
        v.dedup();
        v
    }

    pub fn meta(&self, c: CylCell, phase: u32, sub: usize) -> (u32, u32, u32) {
        let (sc, sr, sl) = meta_shifts_3d(phase, sub);
        (c.layer >> sl, c.row >> sr, c.col >> sc)
    }
}
