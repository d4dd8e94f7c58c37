//! Cells reachable by a cruising vehicle, and their tilings.

mod bead;
mod covering;
mod tiling;

pub use bead::{bead_width, BeadSpec, CylinderSpec};
pub use covering::{meta_shifts_3d, CylCell, CylinderGrid, SUBPHASES};
pub use tiling::{meta_shifts, BeadCell, BeadGrid};

use crate::error::{domain, positive, Result};
use crate::space::Workspace;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSizing {
    pub ell: f64,
    /// Set when the requested cell would need `ℓ > 4ρ`.
    pub clamped: bool,
}

fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, hi: f64) -> CellSizing {
    if f(hi) <= target {
        return CellSizing { ell: hi, clamped: f(hi) < target };
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    CellSizing { ell: 0.5 * (lo + hi), clamped: false }
}

/// Cell length giving `n` cells of the recursive planners' size.
///
/// 2D: bead area `WH/(2n)`. 3D: nominal cylinder volume `WHD/(4n)`.
pub fn ell_for_n(ws: &Workspace, rho: f64, n: usize) -> Result<CellSizing> {
    positive("rho", rho)?;
    if n == 0 {
        return domain("n must be >= 1");
    }
    let n = n as f64;
    Ok(match ws.d {
        None => bisect_increasing(
            |l| BeadSpec { rho, ell: l }.area(),
            ws.w * ws.h / (2.0 * n),
            4.0 * rho,
        ),
        Some(d) => bisect_increasing(
            |l| CylinderSpec { rho, ell: l }.volume(),
            ws.w * ws.h * d / (4.0 * n),
            4.0 * rho,
        ),
    })
}
