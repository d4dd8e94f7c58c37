use super::sweep::Sweep;
use crate::bounds::{turn_factor, C_BTA_PRINTED, C_CCA_PRINTED};
use crate::error::{domain, Error, Result};
use crate::space::Workspace;
use crate::vehicle::VehicleParams;
use serde::Serialize;

/// `x^{-k}(1 + x/(2(1-x)))`: system time of the sweep queue in units of the
/// period at utilization `x`, scaled by the cell size.
pub fn system_time_factor(x: f64, k: i32) -> f64 {
    x.powi(-k) * (1.0 + x / (2.0 * (1.0 - x)))
}

/// Golden-section minimizer of a unimodal function on `(0, 1)`.
pub fn minimize_unit(f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-9, 1.0 - 1e-9);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Serialize)]
pub struct PolicyTuning {
    pub dim: usize,
    /// Optimal utilization `x* = C/a`.
    pub x_star: f64,
    /// Speed scale `a` with `ℓ = x·a/λ`.
    pub a: f64,
    pub c: f64,
    pub ell: f64,
    pub clamped: bool,
    pub lambda_b: f64,
    pub mu_b: f64,
    pub utilization: f64,
    pub period: f64,
    /// Coefficient `16·g(x*)` (2D) or `16384·g(x*)` (3D).
    pub upper_constant: f64,
    pub c_printed: f64,
    pub x_printed: f64,
    /// Coefficient the printed constant would give.
    pub upper_constant_at_printed: f64,
}

fn constant(dim: usize, x: f64) -> f64 {
    if dim == 3 {
        16384.0 * system_time_factor(x, 4)
    } else {
        16.0 * system_time_factor(x, 2)
    }
}

pub fn tune_policy(ws: &Workspace, params: &VehicleParams, lambda: f64) -> Result<PolicyTuning> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("lambda must be > 0, got {lambda}"));
    }
    let dim = ws.dim();
    let k = if dim == 3 { 4 } else { 2 };
    let rho = params.rho();
    let f = turn_factor(ws, params);
    let x_star = minimize_unit(|x| system_time_factor(x, k));
    let a = if dim == 3 { params.r_vel / (2.0 * f) } else { params.r_vel / f };
    let c = x_star * a;
    let ell = (c / lambda).min(4.0 * rho);
    let sweep = Sweep::new(ws, params, ell)?;
    let period = sweep.period();
    let lambda_b = lambda * sweep.cell_measure() / ws.measure();
    let mu_b = 1.0 / period;
    let utilization = lambda_b / mu_b;
    if utilization >= 1.0 {
        return Err(Error::Unstable { utilization });
    }
    let c_printed = if dim == 3 { C_CCA_PRINTED } else { C_BTA_PRINTED } * params.r_vel / f;
    let x_printed = c_printed / a;
    Ok(PolicyTuning {
        dim,
        x_star,
        a,
        c,
        ell,
        clamped: c / lambda > 4.0 * rho,
        lambda_b,
        mu_b,
        utilization,
        period,
        upper_constant: constant(dim, x_star),
        c_printed,
        x_printed,
        upper_constant_at_printed: if x_printed < 1.0 { constant(dim, x_printed) } else { f64::INFINITY },
    })
}
