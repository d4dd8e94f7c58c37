use ditsp_ffi::*;
use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

const UNIT2: DitspWorkspace = DitspWorkspace { dim: 2, w: 1.0, h: 1.0, d: 0.0 };
const UNIT3: DitspWorkspace = DitspWorkspace { dim: 3, w: 1.0, h: 1.0, d: 1.0 };
const ONES: DitspVehicle = DitspVehicle { r_vel: 1.0, r_ctr: 1.0 };

fn last_error() -> String {
    let p = ditsp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn corner_square_round_trip() {
    let coords = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(ditsp_pointset_new(UNIT2, coords.as_ptr(), 4, &mut set), DitspStatus::Ok);
        assert_eq!(ditsp_pointset_len(set), 4);
        let mut tour = ptr::null_mut();
        assert_eq!(ditsp_plan(set, DitspAlgo::Sgs, ONES, 0, &mut tour), DitspStatus::Ok);
        let mut s = DitspTourSummary::default();
        assert_eq!(ditsp_tour_summary(tour, &mut s), DitspStatus::Ok);
        assert_eq!(s.n, 4);
        assert!((s.total_time - 8.0).abs() < 1e-12);
        let mut buf = [usize::MAX; 4];
        let mut written = 0;
        assert_eq!(ditsp_tour_visit_order(tour, buf.as_mut_ptr(), 4, &mut written), DitspStatus::Ok);
        assert_eq!(written, 4);
        let mut sorted = buf;
        sorted.sort();
        assert_eq!(sorted, [0, 1, 2, 3]);
        ditsp_tour_free(tour);
        ditsp_pointset_free(set);
    }
}

#[test]
fn recursive_planners() {
    unsafe {
        for (ws, algo) in [(UNIT2, DitspAlgo::Recbta), (UNIT3, DitspAlgo::Reccca)] {
            let mut set = ptr::null_mut();
            assert_eq!(ditsp_pointset_uniform(ws, 500, 9, &mut set), DitspStatus::Ok);
            let mut tour = ptr::null_mut();
            assert_eq!(ditsp_plan(set, algo, ONES, 0, &mut tour), DitspStatus::Ok);
            let mut s = DitspTourSummary::default();
            ditsp_tour_summary(tour, &mut s);
            assert_eq!(s.n, 500);
            assert!(s.phase_count >= 1 && s.first_phase_length > 0.0);
            let mut b = DitspBounds::default();
            assert_eq!(ditsp_bounds(ws, ONES, 500, &mut b), DitspStatus::Ok);
            assert!(s.total_time <= b.tour_upper);
            ditsp_tour_free(tour);
            ditsp_pointset_free(set);
        }
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut set = ptr::null_mut();
        let bad = DitspVehicle { r_vel: -1.0, r_ctr: 1.0 };
        assert_eq!(ditsp_pointset_uniform(UNIT2, 10, 0, &mut set), DitspStatus::Ok);
        let mut tour = ptr::null_mut();
        assert_eq!(ditsp_plan(set, DitspAlgo::Sgs, bad, 0, &mut tour), DitspStatus::Domain);
        assert!(tour.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(ditsp_plan(set, DitspAlgo::Reccca, ONES, 0, &mut tour), DitspStatus::Domain);
        assert_eq!(ditsp_plan(ptr::null(), DitspAlgo::Sgs, ONES, 0, &mut tour), DitspStatus::NullPointer);
        assert!(last_error().contains("set"));
        assert_eq!(ditsp_pointset_uniform(UNIT2, 0, 0, &mut set), DitspStatus::Domain);
        let outside = [2.0, 0.5];
        let mut other = ptr::null_mut();
        assert_eq!(ditsp_pointset_new(UNIT2, outside.as_ptr(), 1, &mut other), DitspStatus::Domain);
        let odd = DitspWorkspace { dim: 4, ..UNIT2 };
        assert_eq!(ditsp_pointset_uniform(odd, 5, 0, &mut other), DitspStatus::Domain);
        let mut t = 0.0;
        assert_eq!(ditsp_stop_go_time(-1.0, ONES, &mut t), DitspStatus::Domain);
        assert_eq!(ditsp_stop_go_time(1.0, ONES, ptr::null_mut()), DitspStatus::NullPointer);
        ditsp_pointset_free(set);
        ditsp_pointset_free(ptr::null_mut());
        ditsp_tour_free(ptr::null_mut());
        assert_eq!(ditsp_pointset_len(ptr::null()), 0);
    }
}

#[test]
fn stop_go_and_bounds() {
    unsafe {
        let mut t = 0.0;
        assert_eq!(ditsp_stop_go_time(1.0, ONES, &mut t), DitspStatus::Ok);
        assert!((t - 2.0).abs() < 1e-15);
        let mut b = DitspBounds::default();
        let slow = DitspVehicle { r_vel: 0.1, r_ctr: 1.0 };
        assert_eq!(ditsp_bounds(UNIT2, slow, 1000, &mut b), DitspStatus::Ok);
        assert!((b.dtrp_lower - 25.3125).abs() < 1e-9);
        assert!((b.dtrp_upper_constant - 70.546).abs() < 1e-3);
        assert!(b.tour_lower < b.tour_upper);
    }
}

#[test]
fn dtrp_summary() {
    let slow = DitspVehicle { r_vel: 0.1, r_ctr: 1.0 };
    let mut s = DitspDtrpSummary::default();
    let st = unsafe { ditsp_dtrp_run(DitspPolicy::Bta, 20.0, UNIT2, slow, 30, 1, &mut s) };
    assert_eq!(st, DitspStatus::Ok);
    assert!(!s.divergent && s.served > 0 && s.mean_system_time > 0.0);
    let st = unsafe { ditsp_dtrp_run(DitspPolicy::Cca, 20.0, UNIT2, slow, 30, 1, &mut s) };
    assert_ne!(st, DitspStatus::Ok);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ditsp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ditsp.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["ditsp_plan", "ditsp_last_error", "ditsp_dtrp_run", "ditsp_bounds", "DitspPointSet", "DITSP_STATUS_PANIC"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"]).arg(&header).status() else {
        eprintln!("no C compiler, syntax check skipped");
        return;
    };
    assert!(status.success());
}
