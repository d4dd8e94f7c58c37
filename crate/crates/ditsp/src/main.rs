use clap::{Args, Parser, Subcommand, ValueEnum};
use ditsp::bounds::{bound_set, dtrp_lower, dtrp_upper, tour_upper};
use ditsp::dtrp::{self, tune_policy, Policy};
use ditsp::geometry::{ell_for_n, BeadGrid, BeadSpec, CylinderGrid, CylinderSpec};
use ditsp::harness::{dtrp_trial_config, policy_for, run_experiment, ExperimentConfig, ExperimentKind, Rows};
use ditsp::planners::Algo;
use ditsp::{Error, Result, VehicleParams, Workspace};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "ditsp", version, about = "Tour planning and dynamic service for double-integrator vehicles")]
#[command(args_override_self = true)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// JSON object of flag values; `command` selects the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Plan tours over random targets, one row per trial.
    Tour(TourArgs),
    /// Simulate the dynamic service policy.
    Dtrp(DtrpArgs),
    /// Print every bound coefficient.
    Bounds(BoundsArgs),
    /// Dump cell geometry.
    Tile(TileArgs),
    /// Monte Carlo sweep with log-log fit.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug, Clone)]
struct Space {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long = "W", alias = "w", default_value_t = 1.0)]
    w: f64,
    #[arg(long = "H", alias = "h", default_value_t = 1.0)]
    h: f64,
    #[arg(long = "D", alias = "d")]
    d: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    rvel: f64,
    #[arg(long, default_value_t = 1.0)]
    rctr: f64,
}

impl Space {
    fn workspace(&self) -> Result<Workspace> {
        match self.dim {
            2 => Workspace::rect(self.w, self.h),
            3 => Workspace::cuboid(self.w, self.h, self.d.unwrap_or(1.0)),
            d => Err(Error::Config(format!("--dim must be 2 or 3, got {d}"))),
        }
    }

    fn params(&self) -> Result<VehicleParams> {
        VehicleParams::new(self.rvel, self.rctr)
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct TourArgs {
    #[arg(long, value_enum, default_value_t = Algo::Recbta)]
    algo: Algo,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[command(flatten)]
    space: Space,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Targets on the regular grid instead of uniform (STOP-GO-STOP only).
    #[arg(long)]
    worst_case: bool,
    /// Fail unless every recursive-planner trial is within the upper bound.
    #[arg(long)]
    check_bounds: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct DtrpArgs {
    #[arg(long, value_enum)]
    policy: Option<Policy>,
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    space: Space,
    /// Horizon in sweep periods.
    #[arg(long, default_value_t = 200)]
    horizon: u32,
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    tracked_cells: Option<u64>,
    /// Event trace of the first seed as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Fail unless every run is stable and inside half/one-and-a-half times the bounds.
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct BoundsArgs {
    #[command(flatten)]
    space: Space,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Arrival rate for the tuning report.
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct TileArgs {
    #[command(flatten)]
    space: Space,
    /// Size cells for this many targets.
    #[arg(long, conflicts_with = "ell")]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<f64>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ScalingArgs {
    #[arg(long, value_enum, default_value_t = ExperimentKind::ScalingTour)]
    kind: ExperimentKind,
    #[arg(long, value_enum, default_value_t = Algo::Recbta)]
    algo: Algo,
    /// Comma-separated n, λ or ℓ/ρ values.
    #[arg(long, value_delimiter = ',', default_values_t = [1000.0, 10000.0, 100000.0])]
    grid: Vec<f64>,
    #[command(flatten)]
    space: Space,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 200)]
    horizon: u32,
    #[arg(long)]
    tracked_cells: Option<u64>,
    #[arg(long)]
    min_slope: Option<f64>,
    #[arg(long)]
    max_slope: Option<f64>,
}

const MAX_TILE_CELLS: u64 = 1_000_000;

struct Output {
    text: String,
    ok: bool,
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn rows_text(rows: &Rows, format: Format) -> Result<String> {
    match format {
        Format::Csv => rows.to_csv(),
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
    }
}

fn tour(cli: &Cli, a: &TourArgs) -> Result<Output> {
    let ws = a.space.workspace()?;
    let params = a.space.params()?;
    if a.n == 0 {
        return Err(Error::Domain("--n must be >= 1".into()));
    }
    let kind = if a.worst_case { ExperimentKind::WorstCase } else { ExperimentKind::ScalingTour };
    let mut cfg = ExperimentConfig::new(kind, vec![a.n as f64], a.trials, cli.seed, ws, params);
    cfg.algo = a.algo;
    cfg.workers = a.workers;
    let rep = run_experiment(&cfg)?;
    let mut ok = rep.failed == 0;
    if a.check_bounds && a.algo != Algo::Sgs {
        let hi = tour_upper(&ws, &params, a.n)?;
        if let Rows::Tour(rows) = &rep.rows {
            for r in rows.iter().filter(|r| r.total_time > hi) {
                eprintln!("trial {}: total_time {} exceeds bound {}", r.seed, r.total_time, hi);
                ok = false;
            }
        }
    }
    Ok(Output { text: rows_text(&rep.rows, cli.format)?, ok })
}

fn dtrp_cmd(cli: &Cli, a: &DtrpArgs) -> Result<Output> {
    let ws = a.space.workspace()?;
    let params = a.space.params()?;
    let policy = policy_for(&ws);
    if let Some(p) = a.policy {
        if p != policy {
            return Err(Error::Config(format!("policy {p} needs a {}D workspace", if p == Policy::Bta { 2 } else { 3 })));
        }
    }
    let mut cfg = ExperimentConfig::new(ExperimentKind::DtrpSweep, vec![a.lambda], a.seeds, cli.seed, ws, params);
    cfg.workers = a.workers;
    cfg.horizon_sweeps = a.horizon;
    cfg.tracked_cells = a.tracked_cells;
    let rep = run_experiment(&cfg)?;
    let mut ok = rep.failed == 0;
    if let Some(path) = &a.trace {
        let mut d = dtrp_trial_config(&cfg, 0, 0);
        d.trace = true;
        let stats = dtrp::run(policy, &d)?;
        std::fs::write(path, serde_json::to_string(&stats.trace)?)?;
    }
    if a.check {
        let scale = a.lambda.powi(if ws.dim() == 3 { 4 } else { 2 });
        let (lo, hi) = (0.5 * dtrp_lower(&ws, &params), 1.5 * dtrp_upper(&ws, &params));
        if let Rows::Dtrp(rows) = &rep.rows {
            for r in rows {
                let c = r.mean_system_time / scale;
                if r.divergent_flag || !(lo..=hi).contains(&c) {
                    eprintln!("seed {}: coefficient {c} outside [{lo}, {hi}] or divergent", r.seed);
                    ok = false;
                }
            }
        }
    }
    Ok(Output { text: rows_text(&rep.rows, cli.format)?, ok })
}

fn bounds_cmd(a: &BoundsArgs) -> Result<Output> {
    let ws = a.space.workspace()?;
    let params = a.space.params()?;
    let b = bound_set(&ws, &params, a.n)?;
    let t = tune_policy(&ws, &params, a.lambda)?;
    let v = json!({ "bounds": b, "tuning": t });
    Ok(Output { text: serde_json::to_string_pretty(&v)? + "\n", ok: true })
}

fn tile_cmd(a: &TileArgs) -> Result<Output> {
    let ws = a.space.workspace()?;
    let rho = a.space.params()?.rho();
    let ell = match (a.ell, a.n) {
        (Some(l), _) => l,
        (None, Some(n)) => ell_for_n(&ws, rho, n)?.ell,
        (None, None) => return Err(Error::Config("tile needs --n or --ell".into())),
    };
    let spec = BeadSpec::new(rho, ell)?;
    let mut cells = Vec::new();
    match ws.d {
        None => {
            let g = BeadGrid::new(spec, ws.w, ws.h)?;
            if g.len() > MAX_TILE_CELLS {
                return Err(Error::Config(format!("{} cells is too many to dump", g.len())));
            }
            for c in g.iter() {
                let ctr = g.center(c);
                cells.push(json!({ "index": g.index(c), "anchor": ctr, "vertices": spec.vertices(ctr) }));
            }
        }
        Some(d) => {
            let g = CylinderGrid::new(CylinderSpec::new(rho, ell)?, ws.w, ws.h, d)?;
            if g.len() > MAX_TILE_CELLS {
                return Err(Error::Config(format!("{} cells is too many to dump", g.len())));
            }
            for c in g.iter() {
                let [y, z] = g.axis(c.layer, c.row);
                let (x0, x1) = g.x_range(c.col);
                cells.push(json!({
                    "index": g.index(c),
                    "anchor": [(x0 + x1) / 2.0, y, z],
                    "axis": [[x0, y, z], [x1, y, z]],
                    "radius": g.radius(),
                }));
            }
        }
    }
    let v = json!({ "spec": { "rho": rho, "ell": ell, "w": spec.width() }, "cells": cells });
    Ok(Output { text: serde_json::to_string(&v)? + "\n", ok: true })
}

fn scaling_cmd(cli: &Cli, a: &ScalingArgs) -> Result<Output> {
    let ws = a.space.workspace()?;
    let mut cfg = ExperimentConfig::new(a.kind, a.grid.clone(), a.trials, cli.seed, ws, a.space.params()?);
    cfg.algo = a.algo;
    cfg.workers = a.workers;
    cfg.horizon_sweeps = a.horizon;
    cfg.tracked_cells = a.tracked_cells;
    let rep = run_experiment(&cfg)?;
    let mut ok = true;
    if let Some(f) = &rep.fit {
        eprintln!("slope {:.4} intercept {:.4} r2 {:.4}", f.slope, f.intercept, f.r2);
        if a.min_slope.is_some_and(|m| f.slope < m) || a.max_slope.is_some_and(|m| f.slope > m) {
            eprintln!("slope outside requested window");
            ok = false;
        }
    } else if a.min_slope.is_some() || a.max_slope.is_some() {
        eprintln!("no fit available");
        ok = false;
    }
    let text = match cli.format {
        Format::Csv => rep.rows.to_csv()?,
        Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
    };
    Ok(Output { text, ok })
}

/// Splices flags from a JSON config file in front of the command line ones.
fn expand_config(raw: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = raw.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(raw);
    };
    let mut rest = raw.clone();
    let path = if let Some(p) = raw[pos].strip_prefix("--config=") {
        rest.remove(pos);
        p.to_string()
    } else {
        let p = raw.get(pos + 1).cloned().ok_or_else(|| Error::Config("--config needs a path".into()))?;
        rest.drain(pos..pos + 2);
        p
    };
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
    let obj = v.as_object().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    const COMMANDS: [&str; 5] = ["tour", "dtrp", "bounds", "tile", "scaling"];
    let cli_cmd = rest.iter().skip(1).position(|a| COMMANDS.contains(&a.as_str())).map(|i| i + 1);
    let cmd = match (cli_cmd, obj.get("command").and_then(Value::as_str)) {
        (Some(i), _) => rest.remove(i),
        (None, Some(c)) => c.to_string(),
        (None, None) => return Err(Error::Config("no subcommand given".into())),
    };
    let mut out = vec![rest[0].clone(), cmd];
    for (k, v) in obj.iter().filter(|(k, _)| k.as_str() != "command") {
        let flag = format!("--{k}");
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => out.extend([flag, s.clone()]),
            Value::Array(a) => {
                let items: Vec<String> = a.iter().map(|x| x.as_str().map(String::from).unwrap_or_else(|| x.to_string())).collect();
                out.extend([flag, items.join(",")]);
            }
            other => out.extend([flag, other.to_string()]),
        }
    }
    out.extend(rest.into_iter().skip(1));
    Ok(out)
}

fn run(cli: &Cli) -> Result<bool> {
    let out = match &cli.cmd {
        Cmd::Tour(a) => tour(cli, a)?,
        Cmd::Dtrp(a) => dtrp_cmd(cli, a)?,
        Cmd::Bounds(a) => bounds_cmd(a)?,
        Cmd::Tile(a) => tile_cmd(a)?,
        Cmd::Scaling(a) => scaling_cmd(cli, a)?,
    };
    emit(cli, &out.text)?;
    Ok(out.ok)
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
