//! C interface to the ditsp planners, simulator and bounds.
//!
//! Every fallible call returns a [`DitspStatus`]; on failure the message is
//! available from [`ditsp_last_error`] on the same thread. Handles are opaque
//! and freed with their matching `_free` function.

use ditsp::bounds::bound_set;
use ditsp::dtrp::{self, DtrpConfig, Horizon};
use ditsp::harness::sample_uniform;
use ditsp::planners::{plan, Algo, Plan};
use ditsp::vehicle::stop_go_time;
use ditsp::{Error, PointSet, VehicleParams, Workspace};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DitspStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Config = 3,
    Unstable = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DitspAlgo {
    Sgs = 0,
    Recbta = 1,
    Reccca = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DitspPolicy {
    Bta = 0,
    Cca = 1,
}

/// Speed bound and control bound of the vehicle.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DitspVehicle {
    pub r_vel: f64,
    pub r_ctr: f64,
}

/// Box `[0,w]×[0,h]`, or `[0,w]×[0,h]×[0,d]` when `dim` is 3.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DitspWorkspace {
    pub dim: u32,
    pub w: f64,
    pub h: f64,
    pub d: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DitspTourSummary {
    pub n: usize,
    pub total_time: f64,
    pub total_length: f64,
    pub leftover_after_phases: usize,
    pub phase_count: usize,
    /// Length of the first recursive phase, 0 for STOP-GO-STOP.
    pub first_phase_length: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DitspDtrpSummary {
    pub mean_system_time: f64,
    pub mean_queue_len: f64,
    pub little_residual: f64,
    pub served: u64,
    pub arrivals: u64,
    pub sweeps: u32,
    pub divergent: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DitspBounds {
    pub tour_lower: f64,
    pub tour_upper: f64,
    pub dtrp_lower: f64,
    pub dtrp_lower_printed: f64,
    pub dtrp_upper: f64,
    pub dtrp_upper_printed: f64,
    pub dtrp_upper_constant: f64,
}

pub struct DitspPointSet {
    inner: PointSet,
}

pub struct DitspTour {
    inner: Plan,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DitspStatus {
    match e {
        Error::Domain(_) => DitspStatus::Domain,
        Error::Config(_) => DitspStatus::Config,
        Error::Unstable { .. } => DitspStatus::Unstable,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => DitspStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DitspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DitspStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            DitspStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            DitspStatus::Panic
        }
    }
}

fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: caller passes either null or a valid pointer.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn workspace(w: &DitspWorkspace) -> Result<Workspace, Fail> {
    Ok(match w.dim {
        2 => Workspace::rect(w.w, w.h)?,
        3 => Workspace::cuboid(w.w, w.h, w.d)?,
        d => return Err(Error::Domain(format!("dimension must be 2 or 3, got {d}")).into()),
    })
}

fn vehicle(v: &DitspVehicle) -> Result<VehicleParams, Fail> {
    Ok(VehicleParams::new(v.r_vel, v.r_ctr)?)
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn ditsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn ditsp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a point set from `n` points stored as `n*dim` coordinates.
///
/// # Safety
/// `coords` must point to `n*ws.dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_pointset_new(
    ws: DitspWorkspace,
    coords: *const f64,
    n: usize,
    out_set: *mut *mut DitspPointSet,
) -> DitspStatus {
    guard(|| {
        let slot = out(out_set, "out_set")?;
        let space = workspace(&ws)?;
        let dim = ws.dim as usize;
        if coords.is_null() {
            return Err(Fail::Null("coords"));
        }
        let raw = std::slice::from_raw_parts(coords, n * dim);
        let pts = raw.chunks_exact(dim).map(|c| [c[0], c[1], if dim == 3 { c[2] } else { 0.0 }]).collect();
        *slot = Box::into_raw(Box::new(DitspPointSet { inner: PointSet::new(space, pts)? }));
        Ok(())
    })
}

/// `n` i.i.d. uniform points, deterministic in `seed`.
///
/// # Safety
/// `out_set` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_pointset_uniform(
    ws: DitspWorkspace,
    n: usize,
    seed: u64,
    out_set: *mut *mut DitspPointSet,
) -> DitspStatus {
    guard(|| {
        let slot = out(out_set, "out_set")?;
        let ps = sample_uniform(&workspace(&ws)?, n, seed)?;
        *slot = Box::into_raw(Box::new(DitspPointSet { inner: ps }));
        Ok(())
    })
}

/// Number of points, 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ditsp_pointset_len(set: *const DitspPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ditsp_pointset_free(set: *mut DitspPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Plans a closed tour through every point.
///
/// # Safety
/// `set` must be a live handle and `out_tour` writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_plan(
    set: *const DitspPointSet,
    algo: DitspAlgo,
    params: DitspVehicle,
    seed: u64,
    out_tour: *mut *mut DitspTour,
) -> DitspStatus {
    guard(|| {
        let slot = out(out_tour, "out_tour")?;
        let ps = &nonnull(set, "set")?.inner;
        let algo = match algo {
            DitspAlgo::Sgs => Algo::Sgs,
            DitspAlgo::Recbta => Algo::Recbta,
            DitspAlgo::Reccca => Algo::Reccca,
        };
        let p = plan(algo, ps, &vehicle(&params)?, seed)?;
        *slot = Box::into_raw(Box::new(DitspTour { inner: p }));
        Ok(())
    })
}

/// # Safety
/// `tour` must be a live handle and `out_summary` writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_tour_summary(tour: *const DitspTour, out_summary: *mut DitspTourSummary) -> DitspStatus {
    guard(|| {
        let slot = out(out_summary, "out_summary")?;
        let p = &nonnull(tour, "tour")?.inner;
        *slot = DitspTourSummary {
            n: p.tour.visit_order.len(),
            total_time: p.tour.total_time,
            total_length: p.tour.total_length,
            leftover_after_phases: p.leftover_after_phases,
            phase_count: p.phase_count(),
            first_phase_length: p.phases.first().map_or(0.0, |r| r.length),
        };
        Ok(())
    })
}

/// Copies up to `cap` visited point indices into `buf`; `written` receives the full count.
///
/// # Safety
/// `buf` must hold `cap` entries (may be null when `cap` is 0); `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_tour_visit_order(
    tour: *const DitspTour,
    buf: *mut usize,
    cap: usize,
    written: *mut usize,
) -> DitspStatus {
    guard(|| {
        let total = out(written, "written")?;
        let order = &nonnull(tour, "tour")?.inner.tour.visit_order;
        let k = cap.min(order.len());
        if k > 0 {
            if buf.is_null() {
                return Err(Fail::Null("buf"));
            }
            std::slice::from_raw_parts_mut(buf, k).copy_from_slice(&order[..k]);
        }
        *total = order.len();
        Ok(())
    })
}

/// # Safety
/// `tour` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ditsp_tour_free(tour: *mut DitspTour) {
    if !tour.is_null() {
        drop(Box::from_raw(tour));
    }
}

/// Runs the dynamic service policy for `horizon_sweeps` sweep periods.
///
/// # Safety
/// `out_summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_dtrp_run(
    policy: DitspPolicy,
    lambda: f64,
    ws: DitspWorkspace,
    params: DitspVehicle,
    horizon_sweeps: u32,
    seed: u64,
    out_summary: *mut DitspDtrpSummary,
) -> DitspStatus {
    guard(|| {
        let slot = out(out_summary, "out_summary")?;
        let mut cfg = DtrpConfig::new(lambda, workspace(&ws)?, vehicle(&params)?, seed);
        cfg.horizon = Horizon::Sweeps(horizon_sweeps);
        let policy = match policy {
            DitspPolicy::Bta => dtrp::Policy::Bta,
            DitspPolicy::Cca => dtrp::Policy::Cca,
        };
        let s = dtrp::run(policy, &cfg)?;
        *slot = DitspDtrpSummary {
            mean_system_time: s.mean_system_time,
            mean_queue_len: s.mean_queue_len,
            little_residual: s.little_residual,
            served: s.served,
            arrivals: s.arrivals,
            sweeps: s.sweeps,
            divergent: s.divergent,
        };
        Ok(())
    })
}

/// Tour bounds for `n` targets and DTRP system-time coefficients.
///
/// # Safety
/// `out_bounds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_bounds(
    ws: DitspWorkspace,
    params: DitspVehicle,
    n: usize,
    out_bounds: *mut DitspBounds,
) -> DitspStatus {
    guard(|| {
        let slot = out(out_bounds, "out_bounds")?;
        let b = bound_set(&workspace(&ws)?, &vehicle(&params)?, n)?;
        *slot = DitspBounds {
            tour_lower: b.tour_lower,
            tour_upper: b.tour_upper,
            dtrp_lower: b.dtrp_lower,
            dtrp_lower_printed: b.dtrp_lower_printed,
            dtrp_upper: b.dtrp_upper,
            dtrp_upper_printed: b.dtrp_upper_printed,
            dtrp_upper_constant: b.dtrp_upper_constant,
        };
        Ok(())
    })
}

/// Minimum time to travel `delta` from rest to rest.
///
/// # Safety
/// `out_time` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ditsp_stop_go_time(delta: f64, params: DitspVehicle, out_time: *mut f64) -> DitspStatus {
    guard(|| {
        let slot = out(out_time, "out_time")?;
        *slot = stop_go_time(delta, &vehicle(&params)?)?;
        Ok(())
    })
}
