//! Rectangular workspaces and point sets.

use crate::error::{domain, positive, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Axis-aligned box `[0,W]×[0,H]` or `[0,W]×[0,H]×[0,D]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub w: f64,
    pub h: f64,
    pub d: Option<f64>,
}

impl Workspace {
    pub fn rect(w: f64, h: f64) -> Result<Self> {
        Ok(Self { w: positive("W", w)?, h: positive("H", h)?, d: None })
    }

    pub fn cuboid(w: f64, h: f64, d: f64) -> Result<Self> {
        Ok(Self { w: positive("W", w)?, h: positive("H", h)?, d: Some(positive("D", d)?) })
    }

    pub fn unit(dim: usize) -> Self {
        match dim {
            3 => Self { w: 1.0, h: 1.0, d: Some(1.0) },
            _ => Self { w: 1.0, h: 1.0, d: None },
        }
    }

    pub fn dim(&self) -> usize {
        if self.d.is_some() { 3 } else { 2 }
    }

    pub fn measure(&self) -> f64 {
        self.w * self.h * self.d.unwrap_or(1.0)
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        let inside = |v: f64, hi: f64| (0.0..=hi).contains(&v);
        inside(p[0], self.w)
            && inside(p[1], self.h)
            && match self.d {
                Some(d) => inside(p[2], d),
                None => p[2] == 0.0,
            }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        [
            rng.gen::<f64>() * self.w,
            rng.gen::<f64>() * self.h,
            self.d.map_or(0.0, |d| rng.gen::<f64>() * d),
        ]
    }
}

/// Points stored with a zero third coordinate in the planar case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub workspace: Workspace,
    pub points: Vec<[f64; 3]>,
}

impl PointSet {
    pub fn new(workspace: Workspace, points: Vec<[f64; 3]>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !workspace.contains(p)) {
            return domain(format!("point {p:?} lies outside the workspace"));
        }
        Ok(Self { workspace, points })
    }

    pub fn from_planar(workspace: Workspace, pts: &[[f64; 2]]) -> Result<Self> {
        Self::new(workspace, pts.iter().map(|p| [p[0], p[1], 0.0]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.workspace.dim()
    }
}

#[inline]
pub fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    (dx * dx + dy * dy + dz * dz).sqrt()
}
