//! Closed-form time bounds for tours and for the dynamic service problem.

use crate::dtrp::tuning::{minimize_unit, system_time_factor};
use crate::error::{domain, Result};
use crate::space::Workspace;
use crate::vehicle::VehicleParams;
use serde::Serialize;
use std::f64::consts::PI;

fn need_n(n: usize) -> Result<f64> {
    if n == 0 {
        domain("n must be >= 1")
    } else {
        Ok(n as f64)
    }
}

/// `1 + 7πρ/(3W)`, the turning overhead factor.
pub fn turn_factor(ws: &Workspace, p: &VehicleParams) -> f64 {
    1.0 + 7.0 * PI * p.rho() / (3.0 * ws.w)
}

pub fn tour_lower_2d(w: f64, h: f64, p: &VehicleParams, n: usize) -> Result<f64> {
    Ok(0.75 * (6.0 * w * h / (p.r_vel * p.r_ctr)).cbrt() * need_n(n)?.powf(2.0 / 3.0))
}

pub fn tour_lower_3d(w: f64, h: f64, d: f64, p: &VehicleParams, n: usize) -> Result<f64> {
    let c = 20.0 * w * h * d / (PI * p.r_vel * p.r_ctr * p.r_ctr);
    Ok(5.0 / 6.0 * c.powf(0.2) * need_n(n)?.powf(0.8))
}

pub fn tour_upper_2d(w: f64, h: f64, p: &VehicleParams, n: usize) -> Result<f64> {
    let ws = Workspace { w, h, d: None };
    Ok(24.0 * (w * h / (p.r_vel * p.r_ctr)).cbrt() * turn_factor(&ws, p) * need_n(n)?.powf(2.0 / 3.0))
}

pub fn tour_upper_3d(w: f64, h: f64, d: f64, p: &VehicleParams, n: usize) -> Result<f64> {
    let ws = Workspace { w, h, d: Some(d) };
    let c = w * h * d / (p.r_ctr * p.r_ctr * p.r_vel);
    Ok(61.0 * c.powf(0.2) * turn_factor(&ws, p) * need_n(n)?.powf(0.8))
}

pub fn tour_lower(ws: &Workspace, p: &VehicleParams, n: usize) -> Result<f64> {
    match ws.d {
        None => tour_lower_2d(ws.w, ws.h, p, n),
        Some(d) => tour_lower_3d(ws.w, ws.h, d, p, n),
    }
}

pub fn tour_upper(ws: &Workspace, p: &VehicleParams, n: usize) -> Result<f64> {
    match ws.d {
        None => tour_upper_2d(ws.w, ws.h, p, n),
        Some(d) => tour_upper_3d(ws.w, ws.h, d, p, n),
    }
}

/// Scale `WH/(r_vel r_ctr)` or `WHD/(r_vel r_ctr²)` shared by the DTRP bounds.
fn dtrp_scale(ws: &Workspace, p: &VehicleParams) -> f64 {
    match ws.d {
        None => ws.w * ws.h / (p.r_vel * p.r_ctr),
        Some(d) => ws.w * ws.h * d / (p.r_vel * p.r_ctr * p.r_ctr),
    }
}

pub const DTRP_LOWER_2D: f64 = 81.0 / 32.0;
pub const DTRP_LOWER_3D_PRINTED: f64 = 7813.0 / 972.0;
pub const DTRP_LOWER_3D: f64 = 15625.0 / 1944.0;
pub const DTRP_UPPER_2D_PRINTED: f64 = 70.5;
pub const DTRP_UPPER_3D_PRINTED: f64 = 2e7;
pub const C_BTA_PRINTED: f64 = 0.5241;
pub const C_CCA_PRINTED: f64 = 0.1615;

/// Coefficient of `λ^{2}` (2D) or `λ^{4}` (3D) in the system-time lower bound.
pub fn dtrp_lower(ws: &Workspace, p: &VehicleParams) -> f64 {
    let k = if ws.d.is_none() { DTRP_LOWER_2D } else { DTRP_LOWER_3D };
    k * dtrp_scale(ws, p)
}

/// The same coefficient obtained by raising the per-target tour lower bound
/// `A·n^{-1/k}` to the power `k` (stability requires it to be at most `1/λ`).
pub fn dtrp_lower_from_tour_bound(ws: &Workspace, p: &VehicleParams) -> f64 {
    match ws.d {
        None => tour_lower_2d(ws.w, ws.h, p, 1).unwrap().powi(3),
        Some(d) => tour_lower_3d(ws.w, ws.h, d, p, 1).unwrap().powi(5),
    }
}

/// Tuned policy constant: `16·g(x*)` in 2D and `16384·g(x*)` in 3D, where
/// `g(x) = x^{-k}(1 + x/(2(1-x)))`.
pub fn dtrp_upper_constant(dim: usize) -> f64 {
    let k = if dim == 3 { 4 } else { 2 };
    let x = minimize_unit(|x| system_time_factor(x, k));
    let g = system_time_factor(x, k);
    if dim == 3 { 16384.0 * g } else { 16.0 * g }
}

/// Coefficient of `λ^{2}` or `λ^{4}` in the system-time upper bound.
pub fn dtrp_upper(ws: &Workspace, p: &VehicleParams) -> f64 {
    let f = turn_factor(ws, p);
    let dim = ws.dim();
    let pow = if dim == 3 { 5 } else { 3 };
    dtrp_upper_constant(dim) * dtrp_scale(ws, p) * f.powi(pow)
}

pub fn dtrp_upper_printed(ws: &Workspace, p: &VehicleParams) -> f64 {
    let f = turn_factor(ws, p);
    match ws.d {
        None => DTRP_UPPER_2D_PRINTED * dtrp_scale(ws, p) * f.powi(3),
        Some(_) => DTRP_UPPER_3D_PRINTED * dtrp_scale(ws, p) * f.powi(5),
    }
}

/// Leading term of the area (2D) or volume (3D) reachable within time `t`
/// starting at speed `v`.
pub fn reachable_leading(dim: usize, v: f64, p: &VehicleParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !(0.0..=p.r_vel).contains(&v) {
        return domain(format!("need t >= 0 and 0 <= v <= r_vel, got t={t}, v={v}"));
    }
    Ok(match dim {
        2 => p.r_ctr * v * t.powi(3) / 6.0,
        3 => PI * p.r_ctr * p.r_ctr * v * t.powi(5) / 20.0,
        _ => return domain(format!("dimension must be 2 or 3, got {dim}")),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSet {
    pub dim: usize,
    pub n: usize,
    pub tour_lower: f64,
    pub tour_upper: f64,
    pub tour_ratio: f64,
    pub dtrp_lower: f64,
    pub dtrp_lower_printed: f64,
    pub dtrp_lower_from_tour_bound: f64,
    pub dtrp_upper: f64,
    pub dtrp_upper_printed: f64,
    pub dtrp_upper_constant: f64,
    pub reachable_coefficient: f64,
}

pub fn bound_set(ws: &Workspace, p: &VehicleParams, n: usize) -> Result<BoundSet> {
    let dim = ws.dim();
    let lo = tour_lower(ws, p, n)?;
    let hi = tour_upper(ws, p, n)?;
    let printed = if dim == 3 { DTRP_LOWER_3D_PRINTED } else { DTRP_LOWER_2D } * dtrp_scale(ws, p);
    Ok(BoundSet {
        dim,
        n,
        tour_lower: lo,
        tour_upper: hi,
        tour_ratio: hi / lo,
        dtrp_lower: dtrp_lower(ws, p),
        dtrp_lower_printed: printed,
        dtrp_lower_from_tour_bound: dtrp_lower_from_tour_bound(ws, p),
        dtrp_upper: dtrp_upper(ws, p),
        dtrp_upper_printed: dtrp_upper_printed(ws, p),
        dtrp_upper_constant: dtrp_upper_constant(dim),
        reachable_coefficient: reachable_leading(dim, p.r_vel, p, 1.0)?,
    })
}
