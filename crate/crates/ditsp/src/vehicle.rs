//! Double-integrator vehicle model with saturated speed and acceleration.

use crate::error::{domain, positive, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub r_vel: f64,
    pub r_ctr: f64,
}

impl VehicleParams {
    pub fn new(r_vel: f64, r_ctr: f64) -> Result<Self> {
        Ok(Self {
            r_vel: positive("r_vel", r_vel)?,
            r_ctr: positive("r_ctr", r_ctr)?,
        })
    }

    /// Turning radius at full speed.
    pub fn rho(&self) -> f64 {
        self.r_vel * self.r_vel / self.r_ctr
    }
}

/// Constant-speed travel: speed and the tightest feasible turning radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CruiseProfile {
    pub speed: f64,
    pub rho: f64,
}

/// Minimum time to cover `delta` starting and ending at rest.
pub fn stop_go_time(delta: f64, params: &VehicleParams) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return domain(format!("distance must be finite and >= 0, got {delta}"));
    }
    let VehicleParams { r_vel, r_ctr } = *params;
    if delta <= r_vel * r_vel / r_ctr {
        Ok(2.0 * (delta / r_ctr).sqrt())
    } else {
        Ok(r_vel / r_ctr + delta / r_vel)
    }
}

pub fn cruise_profile(speed: f64, params: &VehicleParams) -> Result<CruiseProfile> {
    if !(speed > 0.0 && speed <= params.r_vel) {
        return domain(format!("cruise speed must be in (0, {}], got {speed}", params.r_vel));
    }
    Ok(CruiseProfile { speed, rho: speed * speed / params.r_ctr })
}

/// Length of the 180° reversal built from three radius-`rho` arcs.
pub fn u_turn_length(rho: f64) -> Result<f64> {
    positive("rho", rho)?;
    Ok(7.0 * PI * rho / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integrates the bang-bang law exactly and bisects for the braking instant.
    fn bang_bang_oracle(delta: f64, p: &VehicleParams) -> f64 {
        let cover = |t_brake: f64| -> f64 {
            let t_sat = p.r_vel / p.r_ctr;
            let (v, x) = if t_brake <= t_sat {
                (p.r_ctr * t_brake, 0.5 * p.r_ctr * t_brake * t_brake)
            } else {
                (p.r_vel, 0.5 * p.r_ctr * t_sat * t_sat + p.r_vel * (t_brake - t_sat))
            };
            x + v * v / (2.0 * p.r_ctr)
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while cover(hi) < delta {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cover(mid) < delta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tb = 0.5 * (lo + hi);
        let v = (p.r_ctr * tb).min(p.r_vel);
        tb + v / p.r_ctr
    }

    #[test]
    fn short_and_long_moves() {
        let p = VehicleParams::new(1.0, 1.0).unwrap();
        assert!((stop_go_time(0.25, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!((stop_go_time(4.0, &p).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(stop_go_time(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn continuous_at_threshold() {
        let p = VehicleParams::new(2.0, 0.5).unwrap();
        let d = p.r_vel * p.r_vel / p.r_ctr;
        let a = stop_go_time(d, &p).unwrap();
        let b = stop_go_time(d * (1.0 + 1e-12), &p).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn matches_bang_bang_integration() {
        for &(rv, rc) in &[(1.0, 1.0), (0.1, 1.0), (3.0, 0.2)] {
            let p = VehicleParams::new(rv, rc).unwrap();
            for &d in &[1e-3, 0.05, 0.5, 1.0, 7.0, 90.0, 1234.5] {
                let t = stop_go_time(d, &p).unwrap();
                let o = bang_bang_oracle(d, &p);
                assert!(((t - o) / o).abs() < 1e-9, "{rv} {rc} {d}: {t} vs {o}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = VehicleParams::new(1.0, 1.0).unwrap();
        assert!(stop_go_time(-1.0, &p).is_err());
        assert!(stop_go_time(f64::NAN, &p).is_err());
        assert!(VehicleParams::new(0.0, 1.0).is_err());
        assert!(cruise_profile(1.5, &p).is_err());
        assert!(u_turn_length(0.0).is_err());
    }

    #[test]
    fn cruise_and_u_turn() {
        let p = VehicleParams::new(2.0, 4.0).unwrap();
        let c = cruise_profile(2.0, &p).unwrap();
        assert_eq!(c.rho, 1.0);
        assert!((u_turn_length(1.0).unwrap() - 7.330382858376184).abs() < 1e-12);
    }
}
