use crate::error::{domain, positive, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Planar cell reachable between two tips `ℓ` apart with turning radius `ρ`.
///
/// In the local frame the tips sit at `(±ℓ/2, 0)`. Each of the four edges is an
/// S-curve of two radius-`ρ` arcs meeting at the quarter points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeadSpec {
    pub rho: f64,
    pub ell: f64,
}

/// `ρ - sqrt(ρ² - u²)` without cancellation.
#[inline]
fn sagitta(rho: f64, u: f64) -> f64 {
    let u2 = u * u;
    u2 / (rho + (rho * rho - u2).max(0.0).sqrt())
}

impl BeadSpec {
    pub fn new(rho: f64, ell: f64) -> Result<Self> {
        positive("rho", rho)?;
        positive("ell", ell)?;
        if ell > 4.0 * rho * (1.0 + 1e-12) {
            return domain(format!("bead length {ell} exceeds 4*rho = {}", 4.0 * rho));
        }
        Ok(Self { rho, ell: ell.min(4.0 * rho) })
    }

    pub fn width(&self) -> f64 {
        4.0 * sagitta(self.rho, self.ell / 4.0)
    }

    pub fn area(&self) -> f64 {
        self.ell * self.width() / 2.0
    }

    /// Length of the minimum-curvature arc joining the two tips.
    pub fn arc_length(&self) -> f64 {
        4.0 * self.rho * (self.ell / (4.0 * self.rho)).min(1.0).asin()
    }

    /// Boundary height above the axis at local abscissa `x`.
    pub fn half_thickness(&self, x: f64) -> f64 {
        let u = self.ell / 2.0 - x.abs();
        if u < 0.0 {
            return f64::NEG_INFINITY;
        }
        if u <= self.ell / 4.0 {
            sagitta(self.rho, u)
        } else {
            self.width() / 2.0 - sagitta(self.rho, self.ell / 2.0 - u)
        }
    }

    /// Signed clearance of a local point: positive inside, negative outside.
    pub fn margin(&self, x: f64, y: f64) -> f64 {
        let g = self.half_thickness(x);
        if g.is_finite() {
            g - y.abs()
        } else {
            self.ell / 2.0 - x.abs()
        }
    }

    pub fn contains_local(&self, x: f64, y: f64, tol: f64) -> bool {
        self.margin(x, y) >= -tol
    }

    pub fn contains(&self, center: [f64; 2], p: [f64; 2], tol: f64) -> bool {
        self.contains_local(p[0] - center[0], p[1] - center[1], tol)
    }

    /// Tips and extreme points, counter-clockwise from the left tip.
    pub fn vertices(&self, center: [f64; 2]) -> [[f64; 2]; 4] {
        let (hx, hy) = (self.ell / 2.0, self.width() / 2.0);
        let [cx, cy] = center;
        [[cx - hx, cy], [cx, cy - hy], [cx + hx, cy], [cx, cy + hy]]
    }
}

pub fn bead_width(ell: f64, rho: f64) -> Result<f64> {
    Ok(BeadSpec::new(rho, ell)?.width())
}

/// Cylindrical cell obtained by sweeping a bead about its axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub rho: f64,
    pub ell: f64,
}

impl CylinderSpec {
    pub fn new(rho: f64, ell: f64) -> Result<Self> {
        let b = BeadSpec::new(rho, ell)?;
        Ok(Self { rho: b.rho, ell: b.ell })
    }

    pub fn bead(&self) -> BeadSpec {
        BeadSpec { rho: self.rho, ell: self.ell }
    }

    pub fn radius(&self) -> f64 {
        self.bead().width() / 4.0
    }

    /// Nominal cell volume `π r² ℓ / 2` used for sizing.
    pub fn volume(&self) -> f64 {
        let r = self.radius();
        PI * r * r * self.ell / 2.0
    }

    /// Volume owned by one cylinder in the covering lattice.
    pub fn lattice_volume(&self) -> f64 {
        let r = self.radius();
        2.0 * r * r * self.ell
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn width_formula() {
        let b = BeadSpec::new(1.0, 4.0).unwrap();
        assert!((b.width() - 4.0).abs() < 1e-12);
        let b = BeadSpec::new(1.0, 2.0).unwrap();
        assert!((b.width() - (4.0 - 2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((bead_width(0.01, 1.0).unwrap() / (0.01f64.powi(2) / 8.0) - 1.0).abs() < 1e-5);
        assert!(BeadSpec::new(1.0, 4.0 + 1e-6).is_err());
        assert!(BeadSpec::new(1.0, 0.0).is_err());
    }

    #[test]
    fn boundary_is_continuous_and_reaches_extremes() {
        let b = BeadSpec::new(0.7, 1.9).unwrap();
        assert!(b.half_thickness(0.0) - b.width() / 2.0 < 1e-15);
        assert!(b.half_thickness(b.ell / 2.0).abs() < 1e-15);
        let q = b.ell / 4.0;
        assert!((b.half_thickness(q - 1e-12) - b.half_thickness(q + 1e-12)).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(rho, ell) in &[(1.0, 4.0), (1.0, 1.0), (0.3, 0.05)] {
            let b = BeadSpec::new(rho, ell).unwrap();
            let (hx, hy) = (ell / 2.0, b.width() / 2.0);
            let n = 400_000;
            let hits = (0..n)
                .filter(|_| {
                    let x = rng.gen_range(-hx..hx);
                    let y = rng.gen_range(-hy..hy);
                    b.contains_local(x, y, 0.0)
                })
                .count();
            let est = hits as f64 / n as f64 * 4.0 * hx * hy;
            assert!((est / b.area() - 1.0).abs() < 0.01, "{rho} {ell}: {est} vs {}", b.area());
        }
    }

    #[test]
    fn inside_radius_two_rho_lens() {
        let b = BeadSpec::new(1.0, 2.5).unwrap();
        let big = 2.0 * b.rho;
        let cy = (big * big - b.ell * b.ell / 4.0).sqrt();
        for i in 0..=200 {
            let x = -b.ell / 2.0 + b.ell * i as f64 / 200.0;
            let lens = (big * big - x * x).sqrt() - cy;
            assert!(b.half_thickness(x) <= lens + 1e-12, "x={x}");
        }
    }
}
