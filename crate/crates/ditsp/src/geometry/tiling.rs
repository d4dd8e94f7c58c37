use super::bead::BeadSpec;
use crate::error::{positive, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BeadCell {
    pub row: u32,
    pub col: u32,
}

/// Staggered-row tiling of `[0,W]×[0,H]` by beads with horizontal axes.
///
/// Row `r` has its axis at `y = r·w/2`; odd rows are shifted by `ℓ/2`.
#[derive(Debug, Clone, Serialize)]
pub struct BeadGrid {
    pub spec: BeadSpec,
    pub w: f64,
    pub h: f64,
    rows: u32,
    cols_even: u32,
    cols_odd: u32,
}

/// Row and column shifts grouping beads into phase-`i` meta-cells.
pub fn meta_shifts(phase: u32) -> (u32, u32) {
    assert!(phase >= 1);
    let j = phase.div_ceil(2);
    if phase % 2 == 1 {
        (j - 1, j - 1)
    } else {
        (j - 1, j)
    }
}

fn count_until(limit: f64) -> u32 {
    // number of non-negative integers k with k < limit
    if limit <= 0.0 {
        0
    } else {
        limit.ceil() as u32
    }
}

impl BeadGrid {
    pub fn new(spec: BeadSpec, w: f64, h: f64) -> Result<Self> {
        positive("W", w)?;
        positive("H", h)?;
        let (l, bw) = (spec.ell, spec.width());
        Ok(Self {
            spec,
            w,
            h,
            rows: count_until(2.0 * h / bw + 1.0),
            cols_even: count_until((w + l / 2.0) / l),
            cols_odd: count_until(w / l),
        })
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self, row: u32) -> u32 {
        if row.is_multiple_of(2) { self.cols_even } else { self.cols_odd }
    }

    pub fn len(&self) -> u64 {
        let r = self.rows as u64;
        r.div_ceil(2) * self.cols_even as u64 + (r / 2) * self.cols_odd as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pitch_y(&self) -> f64 {
        self.spec.width() / 2.0
    }

    pub fn row_offset(&self, row: u32) -> f64 {
        if row.is_multiple_of(2) { 0.0 } else { self.spec.ell / 2.0 }
    }

    pub fn center(&self, c: BeadCell) -> [f64; 2] {
        [self.row_offset(c.row) + c.col as f64 * self.spec.ell, c.row as f64 * self.pitch_y()]
    }

    /// Row-major linear index.
    pub fn index(&self, c: BeadCell) -> u64 {
        let r = c.row as u64;
        r.div_ceil(2) * self.cols_even as u64 + (r / 2) * self.cols_odd as u64 + c.col as u64
    }

    pub fn cell_at(&self, idx: u64) -> BeadCell {
        let pair = (self.cols_even + self.cols_odd) as u64;
        let (p, rem) = (idx / pair, idx % pair);
        if rem < self.cols_even as u64 {
            BeadCell { row: (2 * p) as u32, col: rem as u32 }
        } else {
            BeadCell { row: (2 * p + 1) as u32, col: (rem - self.cols_even as u64) as u32 }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = BeadCell> + '_ {
        (0..self.rows).flat_map(move |row| (0..self.cols(row)).map(move |col| BeadCell { row, col }))
    }

    /// x-extent covered by the beads of a row.
    pub fn row_span(&self, row: u32) -> (f64, f64) {
        let o = self.row_offset(row);
        let l = self.spec.ell;
        (o - l / 2.0, o + (self.cols(row) as f64 - 0.5) * l)
    }

    fn candidates(&self, p: [f64; 2]) -> impl Iterator<Item = BeadCell> + '_ {
        let r0 = (p[1] / self.pitch_y()).floor() as i64;
        (r0 - 1..=r0 + 2).filter_map(move |r| {
            if r < 0 || r >= self.rows as i64 {
                return None;
            }
            let row = r as u32;
            let k = ((p[0] - self.row_offset(row)) / self.spec.ell).round();
            let col = k.clamp(0.0, self.cols(row) as f64 - 1.0) as u32;
            Some(BeadCell { row, col })
        })
    }

    fn margin(&self, c: BeadCell, p: [f64; 2]) -> f64 {
        let [cx, cy] = self.center(c);
        self.spec.margin(p[0] - cx, p[1] - cy)
    }

    /// Owning bead of a point; boundary ties go to the lowest index.
    pub fn locate(&self, p: [f64; 2]) -> BeadCell {
        let mut best: Option<(f64, BeadCell)> = None;
        for c in self.candidates(p) {
            let m = self.margin(c, p);
            let tie = 1e-12 * self.spec.width();
            match best {
                Some((bm, _)) if m <= bm + tie => {}
                _ => best = Some((m, c)),
            }
        }
        best.expect("point outside the tiled workspace").1
    }

    pub fn containing(&self, p: [f64; 2], tol: f64) -> Vec<BeadCell> {
        let mut v: Vec<BeadCell> = self.candidates(p).filter(|&c| self.margin(c, p) >= -tol).collect();
        v.dedup();
        v
    }

    pub fn meta(&self, c: BeadCell, phase: u32) -> (u32, u32) {
        let (a, b) = meta_shifts(phase);
        (c.row >> a, c.col >> b)
    }
}
