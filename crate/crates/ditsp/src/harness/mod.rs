//! Experiment driver: instances, Monte Carlo sweeps, fits and CSV output.

mod fit;

pub use fit::{fit_loglog, summarize, FitPoint, FitResult};

use crate::bounds::bound_set;
use crate::dtrp::{self, DtrpConfig, Horizon, Policy};
use crate::error::{domain, Error, Result};
use crate::etsp::worst_case_grid;
use crate::geometry::{ell_for_n, BeadGrid, BeadSpec};
use crate::planners::{plan, Algo};
use crate::space::{PointSet, Workspace};
use crate::vehicle::VehicleParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Independent generator for one stream of a master seed.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Stream id of trial `trial` at grid point `point`.
pub fn trial_stream(point: usize, trial: usize) -> u64 {
    ((point as u64) << 32) | trial as u64
}

pub fn sample_uniform_with<R: Rng + ?Sized>(ws: &Workspace, n: usize, rng: &mut R) -> Result<PointSet> {
    if n == 0 {
        return domain("n must be >= 1");
    }
    PointSet::new(*ws, (0..n).map(|_| ws.sample(rng)).collect())
}

pub fn sample_uniform(ws: &Workspace, n: usize, seed: u64) -> Result<PointSet> {
    sample_uniform_with(ws, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    ScalingTour,
    DtrpSweep,
    WorstCase,
    GeometryAudit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Values of `n` (tours), `λ` (DTRP) or `ℓ/ρ` (geometry audit).
    pub grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub workspace: Workspace,
    pub params: VehicleParams,
    #[serde(default = "default_algo")]
    pub algo: Algo,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_sweeps")]
    pub horizon_sweeps: u32,
    #[serde(default)]
    pub tracked_cells: Option<u64>,
}

fn default_algo() -> Algo {
    Algo::Recbta
}

fn default_workers() -> usize {
    1
}

fn default_sweeps() -> u32 {
    200
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, grid: Vec<f64>, trials: usize, master_seed: u64, workspace: Workspace, params: VehicleParams) -> Self {
        Self {
            kind,
            grid,
            trials,
            master_seed,
            output: None,
            workspace,
            params,
            algo: default_algo(),
            workers: default_workers(),
            horizon_sweeps: default_sweeps(),
            tracked_cells: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("parameter grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourRow {
    pub algo: String,
    pub n: usize,
    pub seed: u64,
    pub total_time: f64,
    pub total_length: f64,
    pub leftover_after_phases: usize,
    pub phase_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtrpRow {
    pub policy: String,
    pub lambda: f64,
    pub seed: u64,
    pub mean_system_time: f64,
    pub mean_queue_len: f64,
    pub served: u64,
    pub divergent_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryRow {
    pub ell_over_rho: f64,
    pub seed: u64,
    pub width: f64,
    pub area_exact: f64,
    pub area_estimate: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Tour(Vec<TourRow>),
    Dtrp(Vec<DtrpRow>),
    Geometry(Vec<GeometryRow>),
}

impl Rows {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Rows::Tour(r) => r.iter().try_for_each(|x| w.serialize(x))?,
            Rows::Dtrp(r) => r.iter().try_for_each(|x| w.serialize(x))?,
            Rows::Geometry(r) => r.iter().try_for_each(|x| w.serialize(x))?,
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn len(&self) -> usize {
        match self {
            Rows::Tour(r) => r.len(),
            Rows::Dtrp(r) => r.len(),
            Rows::Geometry(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Rows,
    pub fit: Option<FitResult>,
    pub failed: usize,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))
}

fn tasks(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    (0..cfg.grid.len()).flat_map(|i| (0..cfg.trials).map(move |t| (i, t))).collect()
}

fn grid_n(x: f64) -> Result<usize> {
    if x >= 1.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(Error::Config(format!("grid value {x} is not a point count")))
    }
}

fn tour_trial(cfg: &ExperimentConfig, point: usize, trial: usize) -> Result<TourRow> {
    let n = grid_n(cfg.grid[point])?;
    let stream = trial_stream(point, trial);
    let mut rng = stream_rng(cfg.master_seed, stream);
    let (ps, algo) = match cfg.kind {
        ExperimentKind::WorstCase => (worst_case_grid(&cfg.workspace, n)?.0, Algo::Sgs),
        _ => (sample_uniform_with(&cfg.workspace, n, &mut rng)?, cfg.algo),
    };
    let p = plan(algo, &ps, &cfg.params, rng.gen())?;
    Ok(TourRow {
        algo: algo.to_string(),
        n,
        seed: stream,
        total_time: p.tour.total_time,
        total_length: p.tour.total_length,
        leftover_after_phases: p.leftover_after_phases,
        phase_count: p.phase_count(),
    })
}

/// Simulator configuration of one DTRP trial.
pub fn dtrp_trial_config(cfg: &ExperimentConfig, point: usize, trial: usize) -> DtrpConfig {
    let seed = stream_rng(cfg.master_seed, trial_stream(point, trial)).gen();
    let mut d = DtrpConfig::new(cfg.grid[point], cfg.workspace, cfg.params, seed);
    d.horizon = Horizon::Sweeps(cfg.horizon_sweeps);
    d.tracked_cells = cfg.tracked_cells;
    d
}

pub fn policy_for(ws: &Workspace) -> Policy {
    if ws.dim() == 3 {
        Policy::Cca
    } else {
        Policy::Bta
    }
}

fn dtrp_trial(cfg: &ExperimentConfig, point: usize, trial: usize) -> Result<DtrpRow> {
    let lambda = cfg.grid[point];
    let stream = trial_stream(point, trial);
    let policy = policy_for(&cfg.workspace);
    let s = dtrp::run(policy, &dtrp_trial_config(cfg, point, trial))?;
    Ok(DtrpRow {
        policy: policy.to_string(),
        lambda,
        seed: stream,
        mean_system_time: s.mean_system_time,
        mean_queue_len: s.mean_queue_len,
        served: s.served,
        divergent_flag: s.divergent,
    })
}

pub const AUDIT_SAMPLES: usize = 1_000_000;
pub const AUDIT_POINTS: usize = 100_000;

/// Monte Carlo area of a bead and coverage of the unit-pitch tiling.
pub fn geometry_audit(ell_over_rho: f64, seed: u64) -> Result<GeometryRow> {
    let spec = BeadSpec::new(1.0, ell_over_rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (hx, hy) = (spec.ell / 2.0, spec.width() / 2.0);
    let hits = (0..AUDIT_SAMPLES)
        .filter(|_| spec.contains_local(rng.gen_range(-hx..hx), rng.gen_range(-hy..hy), 0.0))
        .count();
    let grid = BeadGrid::new(spec, 20.0 * spec.ell, 20.0 * spec.width())?;
    let covered = (0..AUDIT_POINTS)
        .filter(|_| {
            let p = [rng.gen::<f64>() * grid.w, rng.gen::<f64>() * grid.h];
            !grid.containing(p, 1e-12 * spec.ell).is_empty()
        })
        .count();
    Ok(GeometryRow {
        ell_over_rho,
        seed,
        width: spec.width(),
        area_exact: spec.area(),
        area_estimate: hits as f64 / AUDIT_SAMPLES as f64 * 4.0 * hx * hy,
        coverage: covered as f64 / AUDIT_POINTS as f64,
    })
}

fn sorted<T>(mut v: Vec<((usize, usize), T)>) -> Vec<T> {
    v.sort_by_key(|e| e.0);
    v.into_iter().map(|e| e.1).collect()
}

fn split<T>(results: Vec<((usize, usize), Result<T>)>) -> (Vec<((usize, usize), T)>, usize) {
    let mut ok = Vec::new();
    let mut failed = 0;
    for (k, r) in results {
        match r {
            Ok(v) => ok.push((k, v)),
            Err(_) => failed += 1,
        }
    }
    (ok, failed)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = pool(cfg.workers)?;
    let jobs = tasks(cfg);
    let report = match cfg.kind {
        ExperimentKind::ScalingTour | ExperimentKind::WorstCase => {
            if cfg.kind == ExperimentKind::WorstCase && cfg.workspace.dim() != 2 && cfg.workspace.dim() != 3 {
                return domain("bad workspace");
            }
            let res: Vec<_> = pool.install(|| jobs.par_iter().map(|&(i, t)| ((i, t), tour_trial(cfg, i, t))).collect());
            let (ok, failed) = split(res);
            let rows = sorted(ok);
            let fit = fit_points(cfg, |i| {
                rows.iter().filter(|r| r.n as f64 == cfg.grid[i]).map(|r| r.total_time).collect()
            });
            ExperimentReport { kind: cfg.kind, rows: Rows::Tour(rows), fit, failed }
        }
        ExperimentKind::DtrpSweep => {
            let res: Vec<_> = pool.install(|| jobs.par_iter().map(|&(i, t)| ((i, t), dtrp_trial(cfg, i, t))).collect());
            let (ok, failed) = split(res);
            let rows: Vec<DtrpRow> = sorted(ok);
            let fit = fit_points(cfg, |i| {
                rows.iter()
                    .filter(|r| r.lambda == cfg.grid[i] && !r.divergent_flag)
                    .map(|r| r.mean_system_time)
                    .collect()
            });
            ExperimentReport { kind: cfg.kind, rows: Rows::Dtrp(rows), fit, failed }
        }
        ExperimentKind::GeometryAudit => {
            let res: Vec<_> = pool.install(|| {
                jobs.par_iter()
                    .map(|&(i, t)| ((i, t), geometry_audit(cfg.grid[i], stream_rng(cfg.master_seed, trial_stream(i, t)).gen())))
                    .collect()
            });
            let (ok, failed) = split(res);
            ExperimentReport { kind: cfg.kind, rows: Rows::Geometry(sorted(ok)), fit: None, failed }
        }
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, report.rows.to_csv()?)?;
    }
    Ok(report)
}

fn fit_points(cfg: &ExperimentConfig, samples: impl Fn(usize) -> Vec<f64>) -> Option<FitResult> {
    let points: Vec<FitPoint> = (0..cfg.grid.len())
        .map(|i| {
            let s = samples(i);
            let failed = cfg.trials - s.len();
            summarize(cfg.grid[i], &s, failed)
        })
        .collect();
    if points.len() < 2 || points.iter().any(|p| p.trials == 0) {
        return None;
    }
    Some(fit_loglog(points))
}

/// Runs a tour scaling experiment and fits the log-log slope.
pub fn fit_scaling(algo: Algo, ws: Workspace, params: VehicleParams, grid: &[usize], trials: usize, seed: u64) -> Result<FitResult> {
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::ScalingTour,
        grid.iter().map(|&n| n as f64).collect(),
        trials,
        seed,
        ws,
        params,
    );
    cfg.algo = algo;
    run_experiment(&cfg)?.fit.ok_or_else(|| Error::Config("not enough successful trials to fit".into()))
}

/// Bound values attached to reports.
pub fn reference_bounds(ws: &Workspace, params: &VehicleParams, n: usize) -> Result<crate::bounds::BoundSet> {
    bound_set(ws, params, n)
}

/// Cell length the recursive planners use for `n` targets.
pub fn planner_ell(ws: &Workspace, params: &VehicleParams, n: usize) -> Result<f64> {
    Ok(ell_for_n(ws, params.rho(), n)?.ell)
}
