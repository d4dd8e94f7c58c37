//! Dynamic service of Poisson-arriving targets by repeated cell sweeps.
//!
//! Only a random subset of cells may be tracked: each cell's queue depends
//! solely on its own arrivals and on the fixed sweep schedule, so arrivals are
//! generated inside the tracked cells only (by thinning uniform proposals in
//! each cell's bounding box) and system-wide queue lengths are scaled up.

mod md1;
mod sweep;
pub mod tuning;

pub use md1::{md1_system_time, simulate_md1, Md1Result};
pub use sweep::{CellId, Sweep};
pub use tuning::{tune_policy, PolicyTuning};

use crate::bounds::dtrp_upper;
use crate::error::{domain, Result};
use crate::space::Workspace;
use crate::vehicle::VehicleParams;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Track every cell when the tiling has at most this many.
pub const FULL_TRACKING_LIMIT: u64 = 1 << 16;
pub const DEFAULT_TRACKED: u64 = 4096;
/// Trace events kept in memory at most.
pub const TRACE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Bta,
    Cca,
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Policy::Bta => "bta",
            Policy::Cca => "cca",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    Sweeps(u32),
    Time(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtrpConfig {
    pub lambda: f64,
    pub workspace: Workspace,
    pub params: VehicleParams,
    pub horizon: Horizon,
    pub warmup: f64,
    pub seed: u64,
    /// Cells to track; `None` tracks all of them for small tilings.
    pub tracked_cells: Option<u64>,
    pub trace: bool,
}

impl DtrpConfig {
    pub fn new(lambda: f64, workspace: Workspace, params: VehicleParams, seed: u64) -> Self {
        Self {
            lambda,
            workspace,
            params,
            horizon: Horizon::Sweeps(200),
            warmup: 0.3,
            seed,
            tracked_cells: None,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Arrival,
    Service,
    SweepStart,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub t: f64,
    pub event: EventKind,
    pub target_id: Option<u64>,
    pub cell_index: Option<CellId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetRecord {
    pub id: u64,
    pub position: [f64; 3],
    pub birth: f64,
    pub service: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DtrpStats {
    pub policy: Policy,
    pub lambda: f64,
    pub seed: u64,
    /// Mean time from arrival to service over targets born after warmup.
    pub mean_system_time: f64,
    /// Time-averaged number of outstanding targets in the whole workspace.
    pub mean_queue_len: f64,
    /// Mean outstanding targets in the tracked cells.
    pub tracked_queue_len: f64,
    pub tracked_arrival_rate: f64,
    pub little_residual: f64,
    pub served: u64,
    pub arrivals: u64,
    pub divergent: bool,
    pub sweeps: u32,
    pub tracked_cells: u64,
    pub total_cells: u64,
    /// Estimated workspace queue length at each sweep start.
    pub queue_series: Vec<(f64, f64)>,
    pub tuning: PolicyTuning,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
}

pub fn run_bta(config: &DtrpConfig) -> Result<DtrpStats> {
    if config.workspace.dim() != 2 {
        return domain("the bead policy needs a planar workspace");
    }
    simulate(Policy::Bta, config)
}

pub fn run_cca(config: &DtrpConfig) -> Result<DtrpStats> {
    if config.workspace.dim() != 3 {
        return domain("the cylinder policy needs a 3D workspace");
    }
    simulate(Policy::Cca, config)
}

pub fn run(policy: Policy, config: &DtrpConfig) -> Result<DtrpStats> {
    match policy {
        Policy::Bta => run_bta(config),
        Policy::Cca => run_cca(config),
    }
}

struct Tracked {
    cell: CellId,
    offset: f64,
    lo: [f64; 3],
    hi: [f64; 3],
    queue: VecDeque<(u64, f64)>,
}

fn simulate(policy: Policy, cfg: &DtrpConfig) -> Result<DtrpStats> {
    if !(cfg.warmup >= 0.0 && cfg.warmup < 1.0) {
        return domain(format!("warmup fraction must be in [0, 1), got {}", cfg.warmup));
    }
    let ws = cfg.workspace;
    let tuning = tune_policy(&ws, &cfg.params, cfg.lambda)?;
    let sweep = Sweep::new(&ws, &cfg.params, tuning.ell)?;
    let period = sweep.period();
    let sweeps = match cfg.horizon {
        Horizon::Sweeps(s) => s.max(1),
        Horizon::Time(t) if t > 0.0 => (t / period).ceil().max(1.0) as u32,
        Horizon::Time(t) => return domain(format!("horizon must be > 0, got {t}")),
    };
    let horizon = sweeps as f64 * period;
    let warm = cfg.warmup * horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let total = sweep.len();
    let want = match cfg.tracked_cells {
        Some(k) => k.clamp(1, total),
        None if total <= FULL_TRACKING_LIMIT => total,
        None => DEFAULT_TRACKED.min(total),
    };
    let ids: Vec<u64> = if want == total {
        (0..total).collect()
    } else {
        index::sample(&mut rng, total as usize, want as usize).into_iter().map(|i| i as u64).collect()
    };
    let mut cells: Vec<Tracked> = ids
        .iter()
        .map(|&i| {
            let cell = sweep.cell_at(i);
            let (lo, hi) = sweep.candidate_box(cell);
            Tracked { cell, offset: sweep.visit_offset(cell), lo, hi, queue: VecDeque::new() }
        })
        .collect();
    cells.sort_by(|a, b| a.offset.total_cmp(&b.offset));
    let dim = ws.dim();
    let vol = |c: &Tracked| (0..dim).map(|a| (c.hi[a] - c.lo[a]).max(0.0)).product::<f64>();
    let mut cum = Vec::with_capacity(cells.len());
    let mut acc = 0.0;
    let mut owned = 0.0;
    let full_box = sweep.box_measure();
    for c in &cells {
        let v = vol(c);
        acc += v;
        cum.push(acc);
        owned += sweep.cell_measure() * (v / full_box).min(1.0);
    }
    let tracked_fraction = if want == total { 1.0 } else { (owned / ws.measure()).min(1.0) };
    let scale = total as f64 / want as f64;
    let proposal_rate = cfg.lambda * acc / ws.measure();
    let gap = Exp::new(proposal_rate).map_err(|e| crate::Error::Domain(e.to_string()))?;
    let dim_k = if dim == 3 { 4 } else { 2 };
    let threshold = 100.0 * cfg.lambda * dtrp_upper(&ws, &cfg.params) * cfg.lambda.powi(dim_k);

    let mut trace = Vec::new();
    let mut log = |e: TraceEvent| {
        if cfg.trace && trace.len() < TRACE_LIMIT {
            trace.push(e);
        }
    };
    let mut next_arrival = gap.sample(&mut rng);
    let mut next_id = 0u64;
    let (mut q, mut last_t, mut area) = (0u64, 0.0f64, 0.0f64);
    let (mut sum_t, mut count_t, mut served, mut arrivals, mut arrivals_after) = (0.0, 0u64, 0u64, 0u64, 0u64);
    let mut series = Vec::with_capacity(sweeps as usize);
    let mut divergent = false;
    let advance = |t: f64, q: u64, last_t: &mut f64, area: &mut f64| {
        let from = last_t.max(warm);
        if t > from {
            *area += q as f64 * (t - from);
        }
        *last_t = t;
    };
    let mut done_sweeps = 0;
    'run: for s in 0..sweeps {
        let t0 = s as f64 * period;
        let est = q as f64 * scale;
        series.push((t0, est));
        log(TraceEvent { t: t0, event: EventKind::SweepStart, target_id: None, cell_index: None });
        if est > threshold {
            divergent = true;
            break 'run;
        }
        done_sweeps = s + 1;
        for k in 0..cells.len() {
            let tv = t0 + cells[k].offset;
            while next_arrival <= tv {
                let t = next_arrival;
                next_arrival += gap.sample(&mut rng);
                let u = rng.gen::<f64>() * acc;
                let ci = cum.partition_point(|&c| c <= u).min(cells.len() - 1);
                let c = &cells[ci];
                let mut p = [0.0; 3];
                for a in 0..dim {
                    p[a] = c.lo[a] + rng.gen::<f64>() * (c.hi[a] - c.lo[a]);
                }
                if sweep.owner(p) != c.cell {
                    continue;
                }
                advance(t, q, &mut last_t, &mut area);
                let id = next_id;
                next_id += 1;
                arrivals += 1;
                if t >= warm {
                    arrivals_after += 1;
                }
                cells[ci].queue.push_back((id, t));
                q += 1;
                log(TraceEvent { t, event: EventKind::Arrival, target_id: Some(id), cell_index: Some(cells[ci].cell) });
            }
            if let Some((id, birth)) = cells[k].queue.pop_front() {
                advance(tv, q, &mut last_t, &mut area);
                q -= 1;
                served += 1;
                if birth >= warm {
                    sum_t += tv - birth;
                    count_t += 1;
                }
                log(TraceEvent { t: tv, event: EventKind::Service, target_id: Some(id), cell_index: Some(cells[k].cell) });
            }
        }
    }
    let end = if divergent { done_sweeps as f64 * period } else { horizon };
    advance(end, q, &mut last_t, &mut area);
    let window = (end - warm).max(f64::MIN_POSITIVE);
    let tracked_queue = area / window;
    let mean_t = if count_t > 0 { sum_t / count_t as f64 } else { 0.0 };
    let lam_tracked = cfg.lambda * tracked_fraction;
    let little = if mean_t > 0.0 { (tracked_queue - lam_tracked * mean_t).abs() / (lam_tracked * mean_t) } else { 0.0 };
    Ok(DtrpStats {
        policy,
        lambda: cfg.lambda,
        seed: cfg.seed,
        mean_system_time: mean_t,
        mean_queue_len: tracked_queue * scale,
        tracked_queue_len: tracked_queue,
        tracked_arrival_rate: arrivals_after as f64 / window,
        little_residual: little,
        served,
        arrivals,
        divergent,
        sweeps: done_sweeps,
        tracked_cells: want,
        total_cells: total,
        queue_series: series,
        tuning,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Exp as ExpDist};
    use std::collections::HashMap;

    fn slow() -> VehicleParams {
        VehicleParams::new(0.1, 1.0).unwrap()
    }

    fn traced(lambda: f64, sweeps: u32) -> DtrpStats {
        let mut cfg = DtrpConfig::new(lambda, Workspace::unit(2), slow(), 11);
        cfg.horizon = Horizon::Sweeps(sweeps);
        cfg.trace = true;
        run(Policy::Bta, &cfg).unwrap()
    }

    #[test]
    fn arrivals_are_poisson() {
        let s = traced(2.0, 4);
        assert_eq!(s.tracked_cells, s.total_cells);
        let times: Vec<f64> = s.trace.iter().filter(|e| e.event == EventKind::Arrival).map(|e| e.t).collect();
        let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.len() > 500, "{}", gaps.len());
        gaps.sort_by(f64::total_cmp);
        let dist = ExpDist::new(2.0).unwrap();
        let m = gaps.len() as f64;
        let ks = gaps
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let f = dist.cdf(g);
                (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value
        assert!(ks < 1.63 / m.sqrt(), "ks {ks}");
    }

    #[test]
    fn cells_serve_in_arrival_order() {
        let s = traced(2.0, 4);
        let mut born: HashMap<u64, (f64, CellId)> = HashMap::new();
        let mut pending: HashMap<CellId, VecDeque<u64>> = HashMap::new();
        let mut served = 0;
        for e in &s.trace {
            match e.event {
                EventKind::Arrival => {
                    let (id, c) = (e.target_id.unwrap(), e.cell_index.unwrap());
                    born.insert(id, (e.t, c));
                    pending.entry(c).or_default().push_back(id);
                }
                EventKind::Service => {
                    let (id, c) = (e.target_id.unwrap(), e.cell_index.unwrap());
                    assert_eq!(pending.get_mut(&c).and_then(|q| q.pop_front()), Some(id));
                    assert!(born[&id].0 <= e.t);
                    served += 1;
                }
                EventKind::SweepStart => {}
            }
        }
        assert_eq!(served, s.served);
        // at most one service per cell per sweep
        let starts: Vec<f64> = s.trace.iter().filter(|e| e.event == EventKind::SweepStart).map(|e| e.t).collect();
        assert_eq!(starts.len(), 4);
        for w in starts.windows(2) {
            let mut seen = std::collections::HashSet::new();
            for e in s.trace.iter().filter(|e| e.event == EventKind::Service && e.t >= w[0] && e.t < w[1]) {
                assert!(seen.insert(e.cell_index.unwrap()));
            }
        }
    }

    #[test]
    fn heavier_load_waits_longer() {
        let run_at = |lambda: f64| {
            let mut cfg = DtrpConfig::new(lambda, Workspace::unit(2), slow(), 3);
            cfg.horizon = Horizon::Sweeps(60);
            run(Policy::Bta, &cfg).unwrap()
        };
        let (a, b) = (run_at(10.0), run_at(20.0));
        assert!(!a.divergent && !b.divergent);
        assert!(b.mean_system_time > a.mean_system_time);
        assert!(a.little_residual < 0.15 && b.little_residual < 0.15);
    }

    #[test]
    fn bad_configs() {
        let mut cfg = DtrpConfig::new(1.0, Workspace::unit(2), slow(), 0);
        cfg.warmup = 1.0;
        assert!(run(Policy::Bta, &cfg).is_err());
        let cfg = DtrpConfig::new(1.0, Workspace::unit(3), slow(), 0);
        assert!(run(Policy::Bta, &cfg).is_err());
        let cfg = DtrpConfig::new(0.0, Workspace::unit(2), slow(), 0);
        assert!(run(Policy::Bta, &cfg).is_err());
    }

    #[test]
    fn same_seed_same_result() {
        let mut cfg = DtrpConfig::new(20.0, Workspace::unit(2), slow(), 5);
        cfg.horizon = Horizon::Sweeps(20);
        let (a, b) = (run(Policy::Bta, &cfg).unwrap(), run(Policy::Bta, &cfg).unwrap());
        assert_eq!(a.mean_system_time.to_bits(), b.mean_system_time.to_bits());
        assert_eq!(a.served, b.served);
    }
}
