use crate::error::Result;
use crate::geometry::{BeadCell, BeadGrid, BeadSpec, CylCell, CylinderGrid, CylinderSpec};
use crate::space::Workspace;
use crate::vehicle::{u_turn_length, VehicleParams};
use std::f64::consts::PI;

/// A cell of either tiling, as `[layer, row, col]` (layer 0 in 2D).
pub type CellId = [u32; 3];

/// Fixed full-speed sweep over every cell of a tiling, with closed-form
/// visit times. Every cell crossing is charged the arc length.
#[derive(Debug, Clone)]
pub enum Sweep {
    Bead(BeadSweep),
    Cyl(CylSweep),
}

#[derive(Debug, Clone)]
pub struct BeadSweep {
    pub grid: BeadGrid,
    speed: f64,
    arc: f64,
    turn: f64,
    closing: f64,
}

#[derive(Debug, Clone)]
pub struct CylSweep {
    pub grid: CylinderGrid,
    speed: f64,
    arc: f64,
    line: f64,
    row_turn: f64,
    closing: f64,
    layer_start: [f64; 2],
}

fn evens_in(lo: u64, hi_excl: u64) -> u64 {
    hi_excl.div_ceil(2) - lo.div_ceil(2)
}

impl Sweep {
    pub fn new(ws: &Workspace, params: &VehicleParams, ell: f64) -> Result<Self> {
        let rho = params.rho();
        let s = params.r_vel;
        let u = u_turn_length(rho)?;
        Ok(match ws.d {
            None => {
                let spec = BeadSpec::new(rho, ell)?;
                let grid = BeadGrid::new(spec, ws.w, ws.h)?;
                Sweep::Bead(BeadSweep {
                    speed: s,
                    arc: spec.arc_length(),
                    turn: (u + grid.pitch_y()) / s,
                    closing: (ws.w + ws.h + 2.0 * PI * rho + 2.0 * ell) / s,
                    grid,
                })
            }
            Some(d) => {
                let spec = CylinderSpec::new(rho, ell)?;
                let grid = CylinderGrid::new(spec, ws.w, ws.h, d)?;
                let r = grid.radius();
                let cols = grid.cols() as f64;
                let arc = spec.bead().arc_length();
                let line = (cols * arc + u + ell / 2.0 + cols * ell) / s;
                let y_top = |k: u32| grid.axis(k, grid.rows(k) - 1)[0];
                let trans = [
                    // even layer ends at its top row, odd layer starts at its top row
                    (u + (y_top(1.min(grid.layers() - 1)) - y_top(0)).hypot(r)) / s,
                    (u + r * 2f64.sqrt()) / s,
                ];
                let mut sw = CylSweep {
                    speed: s,
                    arc,
                    line,
                    row_turn: (u + 2.0 * r) / s,
                    closing: (ws.w + ws.h + d + 2.0 * PI * rho + 2.0 * ell) / s,
                    layer_start: [0.0; 2],
                    grid,
                };
                sw.layer_start = [sw.layer_time(0) + trans[0], sw.layer_time(1) + trans[1]];
                Sweep::Cyl(sw)
            }
        })
    }

    pub fn period(&self) -> f64 {
        match self {
            Sweep::Bead(b) => {
                let g = &b.grid;
                let rows = g.rows() as u64;
                let cells = g.len() as f64;
                cells * b.arc / b.speed + rows.saturating_sub(1) as f64 * b.turn + b.closing
            }
            Sweep::Cyl(c) => {
                let k = c.grid.layers();
                c.layer_offset(k - 1) + c.layer_time(k - 1) + c.closing
            }
        }
    }

    /// Measure owned by an interior cell.
    pub fn cell_measure(&self) -> f64 {
        match self {
            Sweep::Bead(b) => b.grid.spec.area(),
            Sweep::Cyl(c) => c.grid.spec.lattice_volume(),
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Sweep::Bead(b) => b.grid.len(),
            Sweep::Cyl(c) => c.grid.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_at(&self, idx: u64) -> CellId {
        match self {
            Sweep::Bead(b) => {
                let c = b.grid.cell_at(idx);
                [0, c.row, c.col]
            }
            Sweep::Cyl(c) => {
                let g = &c.grid;
                let cols = g.cols() as u64;
                let (line, col) = (idx / cols, (idx % cols) as u32);
                let (re, ro) = (g.rows(0) as u64, if g.layers() > 1 { g.rows(1) as u64 } else { 0 });
                let pair = re + ro;
                let (p, rem) = (line / pair, line % pair);
                if rem < re {
                    [(2 * p) as u32, rem as u32, col]
                } else {
                    [(2 * p + 1) as u32, (rem - re) as u32, col]
                }
            }
        }
    }

    /// Time from sweep start until the vehicle crosses the cell centre.
    pub fn visit_offset(&self, cell: CellId) -> f64 {
        match self {
            Sweep::Bead(b) => {
                let g = &b.grid;
                let rows = g.rows() as u64;
                let r = cell[1] as u64;
                let k = rows - 1 - r;
                let ev = evens_in(r + 1, rows);
                let od = k - ev;
                let before = (ev * g.cols(0) as u64 + od * g.cols(1) as u64) as f64 * b.arc / b.speed + k as f64 * b.turn;
                let cols = g.cols(cell[1]) as f64;
                let c = cell[2] as f64;
                let pos = if k.is_multiple_of(2) { c + 0.5 } else { cols - c - 0.5 };
                before + pos * b.arc / b.speed
            }
            Sweep::Cyl(c) => {
                let [k, j, col] = cell;
                let rows = c.grid.rows(k);
                let q = if k % 2 == 0 { j } else { rows - 1 - j };
                c.layer_offset(k) + q as f64 * (c.line + c.row_turn) + (col as f64 + 0.5) * c.arc / c.speed
            }
        }
    }

    /// Bounding box of the cell clipped to the workspace.
    pub fn candidate_box(&self, cell: CellId) -> ([f64; 3], [f64; 3]) {
        match self {
            Sweep::Bead(b) => {
                let g = &b.grid;
                let [cx, cy] = g.center(BeadCell { row: cell[1], col: cell[2] });
                let (hx, hy) = (g.spec.ell / 2.0, g.spec.width() / 2.0);
                ([(cx - hx).max(0.0), (cy - hy).max(0.0), 0.0], [(cx + hx).min(g.w), (cy + hy).min(g.h), 0.0])
            }
            Sweep::Cyl(c) => {
                let g = &c.grid;
                let r = g.radius();
                let [y, z] = g.axis(cell[0], cell[1]);
                let (x0, x1) = g.x_range(cell[2]);
                (
                    [x0.max(0.0), (y - r).max(0.0), (z - r).max(0.0)],
                    [x1.min(g.w), (y + r).min(g.h), (z + r).min(g.d)],
                )
            }
        }
    }

    pub fn owner(&self, p: [f64; 3]) -> CellId {
        match self {
            Sweep::Bead(b) => {
                let c = b.grid.locate([p[0], p[1]]);
                [0, c.row, c.col]
            }
            Sweep::Cyl(c) => {
                let CylCell { layer, row, col } = c.grid.locate(p);
                [layer, row, col]
            }
        }
    }

    /// Measure of the whole sampling box of an interior cell.
    pub fn box_measure(&self) -> f64 {
        match self {
            Sweep::Bead(b) => b.grid.spec.ell * b.grid.spec.width(),
            Sweep::Cyl(c) => {
                let r = c.grid.radius();
                4.0 * r * r * c.grid.spec.ell
            }
        }
    }
}

impl CylSweep {
    fn layer_time(&self, k: u32) -> f64 {
        let rows = self.grid.rows(k) as f64;
        rows * self.line + (rows - 1.0).max(0.0) * self.row_turn
    }

    fn layer_offset(&self, k: u32) -> f64 {
        let k = k as u64;
        let ev = k.div_ceil(2);
        let od = k / 2;
        ev as f64 * self.layer_start[0] + od as f64 * self.layer_start[1]
    }
}
