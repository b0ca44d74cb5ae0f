//! Experiment presets, TOML configuration and the run driver.
//!
//! A config file names a scenario and overrides any subset of its preset:
//!
//! ```toml
//! scenario = "stationary_droplet"
//! output_dir = "out/droplet-b1e-3"
//!
//! [params]
//! beta = 1e-3
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, TimeSeriesLog};
use crate::elliptic::EllipticOperator;
use crate::error::{ConfigError, Error, Result, SolverError};
use crate::free_energy::FreeEnergy;
use crate::fv::{FvConfig, FvSolver, FvState, SourceMode};
use crate::implicit::{run_implicit, ChSystem, IrkConfig, RelaxedSystem};
use crate::io;
use crate::params::{BoundaryKind, Grid1D, ParamSet};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    CompressionRiemann,
    ExpansionRiemann,
    FrictionSweep,
    StationaryDroplet,
    Spinodal,
    Ostwald,
    OstwaldAdvected,
    TwoPhaseShockTube,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 9] = [
        ScenarioKind::CompressionRiemann,
        ScenarioKind::ExpansionRiemann,
        ScenarioKind::FrictionSweep,
        ScenarioKind::StationaryDroplet,
        ScenarioKind::Spinodal,
        ScenarioKind::Ostwald,
        ScenarioKind::OstwaldAdvected,
        ScenarioKind::TwoPhaseShockTube,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::CompressionRiemann => "compression_riemann",
            ScenarioKind::ExpansionRiemann => "expansion_riemann",
            ScenarioKind::FrictionSweep => "friction_sweep",
            ScenarioKind::StationaryDroplet => "stationary_droplet",
            ScenarioKind::Spinodal => "spinodal",
            ScenarioKind::Ostwald => "ostwald",
            ScenarioKind::OstwaldAdvected => "ostwald_advected",
            ScenarioKind::TwoPhaseShockTube => "two_phase_shock_tube",
            ScenarioKind::Custom => "custom",
        }
    }

    /// Scenarios started from two constant states split at `x = 0`.
    pub fn is_riemann(self) -> bool {
        matches!(
            self,
            ScenarioKind::CompressionRiemann
                | ScenarioKind::ExpansionRiemann
                | ScenarioKind::FrictionSweep
                | ScenarioKind::TwoPhaseShockTube
                | ScenarioKind::Custom
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Fv,
    Implicit,
    ChReference,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Fv => "fv",
            Engine::Implicit => "implicit",
            Engine::ChReference => "ch_reference",
        }
    }
}

/// Left and right `(p, u, c, v)` of a Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    pub left: [f64; 4],
    pub right: [f64; 4],
}

impl RiemannData {
    pub const COMPRESSION: RiemannData = RiemannData { left: [0.0, 1.0, 1.0, 0.0], right: [0.0, -1.0, 1.0, 0.0] };
    pub const EXPANSION: RiemannData = RiemannData { left: [0.0, -1.0, 2.0, 0.0], right: [0.0, 1.0, 2.0, 0.0] };
}

/// One run. `end_time` drives whichever engine is selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub engine: Engine,
    pub output_dir: PathBuf,
    pub end_time: f64,
    pub snapshot_times: Vec<f64>,
    pub free_energy: FreeEnergy,
    pub params: ParamSet,
    pub grid: Grid1D,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riemann: Option<RiemannData>,
    /// Uniform initial velocity of the phase-field scenarios.
    #[serde(default)]
    pub velocity: f64,
    /// Write `omega` into every snapshot, solving for it if the engine does not.
    #[serde(default)]
    pub dump_omega: bool,
    #[serde(default)]
    pub fv: FvConfig,
    #[serde(default)]
    pub irk: IrkConfig,
}

const GAMMA_PHASE: f64 = 1e-3;

impl ScenarioConfig {
    /// Defaults of each experiment. Where the experiment sweeps a parameter
    /// the first value of the sweep is used.
    pub fn preset(kind: ScenarioKind) -> ScenarioConfig {
        let periodic = |x_min, x_max, n| Grid1D { x_min, x_max, n, bc: BoundaryKind::Periodic };
        let open = |x_min, x_max, n| Grid1D { x_min, x_max, n, bc: BoundaryKind::NonReflecting };
        let fv = |source_mode| FvConfig { cfl: 0.9, source_mode, ..FvConfig::default() };
        let base = ScenarioConfig {
            scenario: kind,
            engine: Engine::Fv,
            output_dir: PathBuf::from("out").join(kind.name()),
            end_time: 0.15,
            snapshot_times: vec![0.15],
            free_energy: FreeEnergy::ConvexReciprocal,
            params: ParamSet::new(0.5, 0.0625, f64::INFINITY, GAMMA_PHASE, 0.0),
            grid: open(-1.0, 1.0, 10_000),
            riemann: None,
            velocity: 0.0,
            dump_omega: false,
            fv: fv(SourceMode::None),
            irk: IrkConfig::default(),
        };
        let phase = |alpha, delta, beta, grid, end_time, snapshot_times| ScenarioConfig {
            engine: Engine::Implicit,
            end_time,
            snapshot_times,
            free_energy: FreeEnergy::QuarticDoubleWell,
            params: ParamSet::new(alpha, delta, beta, GAMMA_PHASE, 0.0),
            grid,
            ..base.clone()
        };
        let mut cfg = match kind {
            ScenarioKind::CompressionRiemann => ScenarioConfig { riemann: Some(RiemannData::COMPRESSION), ..base },
            ScenarioKind::ExpansionRiemann => ScenarioConfig { riemann: Some(RiemannData::EXPANSION), ..base },
            ScenarioKind::FrictionSweep => ScenarioConfig {
                params: ParamSet::new(0.05, 0.0625, f64::INFINITY, GAMMA_PHASE, 0.0),
                grid: open(-2.5, 2.5, 10_000),
                riemann: Some(RiemannData::COMPRESSION),
                fv: fv(SourceMode::FrictionOnly),
                ..base
            },
            ScenarioKind::StationaryDroplet => phase(1e-4, 1e-8, 0.1, periodic(-1.0, 1.0, 1000), 1.0, vec![0.0, 1.0]),
            ScenarioKind::Spinodal => phase(
                1e-4,
                1e-2,
                1e-4,
                periodic(-1.0, 1.0, 1000),
                4.0,
                vec![0.0, 0.02, 0.1, 0.95, 0.96, 4.0],
            ),
            ScenarioKind::Ostwald => phase(0.1, 1e-8, 1e-4, periodic(0.0, 1.0, 500), 0.3, vec![0.1, 0.2, 0.3]),
            ScenarioKind::OstwaldAdvected => ScenarioConfig {
                velocity: 1.0 / 0.3,
                ..phase(0.1, 1e-8, 1e-4, periodic(0.0, 1.0, 500), 0.3, vec![0.1, 0.2, 0.3])
            },
            ScenarioKind::TwoPhaseShockTube => ScenarioConfig {
                free_energy: FreeEnergy::ShiftedDoubleWell,
                params: ParamSet::new(0.5, 0.0625, 0.1, 1e-4, 0.0),
                grid: open(-1.0, 1.0, 2000),
                riemann: Some(RiemannData::COMPRESSION),
                fv: fv(SourceMode::Full),
                ..base
            },
            ScenarioKind::Custom => ScenarioConfig {
                riemann: Some(RiemannData::COMPRESSION),
                grid: open(-1.0, 1.0, 1000),
                ..base
            },
        };
        cfg.sync();
        cfg
    }

    /// Parse a config file body: the preset named by `scenario`, overlaid
    /// with every key present in `text`.
    pub fn from_toml_str(text: &str) -> std::result::Result<ScenarioConfig, ConfigError> {
        let user: toml::Table = toml::from_str(text).map_err(|e| ConfigError::new("config", e.message()))?;
        let kind: ScenarioKind = user
            .get("scenario")
            .ok_or_else(|| ConfigError::new("scenario", "missing"))?
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::new("scenario", e.message()))?;
        let mut merged = toml::Table::try_from(ScenarioConfig::preset(kind)).expect("presets serialize");
        merge(&mut merged, user);
        let mut cfg: ScenarioConfig =
            toml::Value::Table(merged).try_into().map_err(|e: toml::de::Error| ConfigError::new("config", e.message()))?;
        cfg.sync();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Ok(ScenarioConfig::from_toml_str(&text)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    fn sync(&mut self) {
        self.fv.end_time = self.end_time;
        self.irk.end_time = self.end_time;
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        self.params.validate()?;
        self.grid.validate()?;
        self.free_energy.validate().map_err(|m| ConfigError::new("free_energy", m))?;
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return Err(ConfigError::new("end_time", format!("must be positive, got {}", self.end_time)));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.end_time)) {
            return Err(ConfigError::new("snapshot_times", format!("{t} lies outside [0, {}]", self.end_time)));
        }
        if !self.velocity.is_finite() {
            return Err(ConfigError::new("velocity", "must be finite"));
        }
        if self.scenario.is_riemann() && self.riemann.is_none() {
            return Err(ConfigError::new("riemann", format!("required by scenario {}", self.scenario.name())));
        }
        let finite_beta = || {
            if self.params.beta.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new("params.beta", format!("engine {} needs a finite beta", self.engine.name())))
            }
        };
        match self.engine {
            Engine::Fv => {
                let mut fv = self.fv;
                fv.end_time = self.end_time;
                fv.validate()?;
                if fv.source_mode == SourceMode::Full {
                    finite_beta()?;
                }
            }
            Engine::Implicit | Engine::ChReference => {
                if self.grid.bc != BoundaryKind::Periodic {
                    return Err(ConfigError::new("grid.bc", format!("engine {} needs a periodic grid", self.engine.name())));
                }
                let mut irk = self.irk;
                irk.end_time = self.end_time;
                irk.validate()?;
                if self.engine == Engine::Implicit {
                    finite_beta()?;
                }
                if self.engine == Engine::ChReference && self.scenario.is_riemann() {
                    return Err(ConfigError::new(
                        "engine",
                        format!("ch_reference needs a uniform velocity; scenario {} has none", self.scenario.name()),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Copy with one parameter replaced and the output directory moved to
    /// `<output_dir>/<axis>_<value>`.
    pub fn with_value(&self, axis: &str, value: f64) -> std::result::Result<ScenarioConfig, ConfigError> {
        let mut cfg = self.clone();
        match axis {
            "alpha" => cfg.params.alpha = value,
            "delta" => cfg.params.delta = value,
            "beta" => cfg.params.beta = value,
            "gamma" => cfg.params.gamma = value,
            "nu" => cfg.params.nu = value,
            "cfl" => cfg.fv.cfl = value,
            "velocity" => cfg.velocity = value,
            "end_time" => cfg.end_time = value,
            "n" => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(ConfigError::new("n", format!("must be a positive integer, got {value}")));
                }
                cfg.grid.n = value as usize;
            }
            _ => return Err(ConfigError::new("axis", format!("unknown sweep axis `{axis}`"))),
        }
        cfg.output_dir = self.output_dir.join(format!("{axis}_{}", io::fmt_f64(value)));
        cfg.sync();
        cfg.validate()?;
        Ok(cfg)
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            // tagged unions are replaced whole so stale variant fields do not leak
            (_, v) if k == "free_energy" => {
                base.insert(k, v);
            }
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Sample positions: cell centres for the finite-volume engine, nodes otherwise.
pub fn positions(cfg: &ScenarioConfig) -> Vec<f64> {
    match cfg.engine {
        Engine::Fv => cfg.grid.cell_centers(),
        _ => cfg.grid.nodes(),
    }
}

/// Droplet `-tanh(10(|x| - 0.5))`.
pub fn droplet_profile(x: f64) -> f64 {
    -(10.0 * (x.abs() - 0.5)).tanh()
}

pub fn spinodal_profile(x: f64) -> f64 {
    let bump = |y: f64| 0.01 * ((10.0 * PI * y).sin() - (10.0 * PI * y * y).sin());
    if x <= 0.0 {
        bump(1.0 + x)
    } else {
        -bump(1.0 - x)
    }
}

pub const OSTWALD_CENTRES: [f64; 2] = [0.3, 0.75];
pub const OSTWALD_RADII: [f64; 2] = [0.12, 0.06];

pub fn ostwald_profile(x: f64, gamma: f64) -> f64 {
    let w = (2.0 * gamma).sqrt();
    -1.0 + OSTWALD_CENTRES.iter().zip(OSTWALD_RADII).map(|(xi, r)| (((x - xi).abs() - r) / w).tanh()).sum::<f64>()
}

/// Initial states at [`positions`]. Phase-field scenarios start at rest
/// (apart from `velocity`) with `v = (W'(c) + (c - omega)/beta)_x`.
pub fn build_initial(cfg: &ScenarioConfig) -> Result<Vec<State>> {
    let x = positions(cfg);
    let phase = |f: &dyn Fn(f64) -> f64| -> Result<Vec<State>> {
        let c: Vec<f64> = x.iter().map(|&x| f(x)).collect();
        let mut mu = Vec::with_capacity(c.len());
        for &ci in &c {
            mu.push(cfg.free_energy.wp(ci)?);
        }
        if cfg.params.beta.is_finite() {
            let omega = EllipticOperator::build(&cfg.grid, cfg.params.gamma, cfg.params.beta)?.solve(&c);
            for ((m, ci), w) in mu.iter_mut().zip(&c).zip(&omega) {
                *m += (ci - w) / cfg.params.beta;
            }
        }
        let v = diagnostics::central_derivative(&mu, &cfg.grid);
        Ok(c.iter().zip(v).map(|(&c, v)| State::new(0.0, cfg.velocity, c, v)).collect())
    };
    let cells = match cfg.scenario {
        k if k.is_riemann() => {
            let data = cfg.riemann.ok_or_else(|| ConfigError::new("riemann", "missing"))?;
            let (l, r) = (State::from_array(data.left), State::from_array(data.right));
            x.iter().map(|&x| if x <= 0.0 { l } else { r }).collect()
        }
        ScenarioKind::StationaryDroplet => phase(&droplet_profile)?,
        ScenarioKind::Spinodal => phase(&spinodal_profile)?,
        ScenarioKind::Ostwald | ScenarioKind::OstwaldAdvected => phase(&|x| ostwald_profile(x, cfg.params.gamma))?,
        _ => unreachable!("every scenario is either Riemann or phase-field"),
    };
    for q in &cells {
        q.check_admissible(&cfg.free_energy)?;
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub cells: Vec<State>,
    pub omega: Option<Vec<f64>>,
    pub path: PathBuf,
}

/// Outcome of [`run`]. A solver failure still produces a report, holding the
/// last good state, with `failure` set.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub x: Vec<f64>,
    pub t: f64,
    pub cells: Vec<State>,
    pub omega: Option<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub log: TimeSeriesLog,
    pub steps: usize,
    pub wall_time: f64,
    pub failure: Option<SolverError>,
}

impl RunReport {
    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.t == t)
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.cells.iter().map(|q| q[k]).collect()
    }
}

fn snapshot_path(dir: &Path, t: f64) -> PathBuf {
    dir.join(format!("snapshot_t{}.csv", io::fmt_f64(t)))
}

struct Recorder<'a> {
    dir: &'a Path,
    x: &'a [f64],
    snapshots: Vec<Snapshot>,
    error: Option<Error>,
}

impl Recorder<'_> {
    fn record(&mut self, t: f64, cells: Vec<State>, omega: Option<Vec<f64>>) {
        let path = snapshot_path(self.dir, t);
        if self.error.is_none() {
            if let Err(e) = io::write_snapshot_file(&path, self.x, &cells, omega.as_deref()) {
                self.error = Some(e);
            }
        }
        self.snapshots.push(Snapshot { t, cells, omega, path });
    }
}

/// Integrate a validated config, writing `snapshot_t<t>.csv` per snapshot,
/// `log.csv` and `summary.txt` to `output_dir`. Deterministic apart from the
/// wall time recorded in the summary.
pub fn run(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let started = Instant::now();
    let dir = cfg.output_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let x = positions(cfg);
    let init = build_initial(cfg)?;
    let mut rec = Recorder { dir, x: &x, snapshots: Vec::new(), error: None };

    let (t, cells, omega, log, steps, failure) = match cfg.engine {
        Engine::Fv => {
            let mut solver = FvSolver::new(cfg.grid, cfg.free_energy, cfg.params, cfg.fv)?;
            let side = match (cfg.dump_omega, solver.elliptic()) {
                (true, None) if cfg.params.beta.is_finite() => {
                    Some(EllipticOperator::build(&cfg.grid, cfg.params.gamma, cfg.params.beta)?)
                }
                _ => None,
            };
            let omega_of = |cells: &[State], solved: Option<&[f64]>| -> Option<Vec<f64>> {
                let c: Vec<f64> = cells.iter().map(|q| q.c).collect();
                match (solved, &side) {
                    (Some(om), _) => Some(om.to_vec()),
                    (None, Some(op)) => Some(op.solve(&c)),
                    (None, None) => None,
                }
            };
            let mut state = FvState::new(cfg.grid, init);
            let mut log = TimeSeriesLog::default();
            let res = solver.run(&mut state, &cfg.snapshot_times, &mut log, |s, om| {
                rec.record(s.t, s.cells.clone(), omega_of(&s.cells, om));
            });
            let (steps, failure) = match res {
                Ok(summary) => (summary.steps, None),
                Err(e) => (log.rows.len().saturating_sub(1), Some(e)),
            };
            let full = solver.elliptic().map(|op| op.solve(&state.component(2)));
            let omega = omega_of(&state.cells, full.as_deref());
            (state.t, state.cells, omega, log, steps, failure)
        }
        Engine::Implicit => {
            let mut sys = RelaxedSystem::new(cfg.grid, cfg.free_energy, cfg.params)?;
            let y0: Vec<f64> = init.iter().flat_map(|q| q.to_array()).collect();
            let res = run_implicit(y0, &mut sys, &cfg.irk, &cfg.snapshot_times, |sys, t, y| {
                rec.record(t, RelaxedSystem::cells(y), Some(sys.omega_of(y)));
            });
            let (run, failure) = match res {
                Ok(run) => (run, None),
                Err((e, run)) => (run, Some(e)),
            };
            let omega = sys.omega_of(&run.y);
            (run.t, RelaxedSystem::cells(&run.y), Some(omega), run.log, run.accepted, failure)
        }
        Engine::ChReference => {
            let mut sys = ChSystem::new(cfg.grid, cfg.free_energy, cfg.params.gamma, cfg.velocity)?;
            let grid = cfg.grid;
            let u = cfg.velocity;
            // v carries the chemical-potential gradient it approximates; omega = c in the limit
            let as_cells = move |sys: &mut ChSystem, c: &[f64]| -> Vec<State> {
                let mu_x = diagnostics::central_derivative(sys.chemical_potential(c), &grid);
                c.iter().zip(mu_x).map(|(&c, v)| State::new(0.0, u, c, v)).collect()
            };
            let c0: Vec<f64> = init.iter().map(|q| q.c).collect();
            let res = run_implicit(c0, &mut sys, &cfg.irk, &cfg.snapshot_times, |sys, t, c| {
                rec.record(t, as_cells(sys, c), Some(c.to_vec()));
            });
            let (run, failure) = match res {
                Ok(run) => (run, None),
                Err((e, run)) => (run, Some(e)),
            };
            let cells = as_cells(&mut sys, &run.y);
            (run.t, cells, Some(run.y.clone()), run.log, run.accepted, failure)
        }
    };

    if let Some(e) = rec.error.take() {
        return Err(e);
    }
    let snapshots = rec.snapshots;
    if failure.is_some() {
        let path = dir.join(format!("snapshot_failed_t{}.csv", io::fmt_f64(t)));
        io::write_snapshot_file(&path, &x, &cells, omega.as_deref())?;
    }
    io::write_log_file(&dir.join("log.csv"), &log)?;
    let wall_time = started.elapsed().as_secs_f64();
    let report = RunReport {
        config: cfg.clone(),
        x,
        t,
        cells,
        omega,
        snapshots,
        log,
        steps,
        wall_time,
        failure,
    };
    io::write_metadata_file(&dir.join("summary.txt"), &summary_pairs(&report))?;
    Ok(report)
}

fn summary_pairs(r: &RunReport) -> Vec<(String, String)> {
    let cfg = &r.config;
    let f = io::fmt_f64;
    let first = r.log.rows.first();
    let last = r.log.last();
    let mut pairs: Vec<(&str, String)> = vec![
        ("scenario", cfg.scenario.name().into()),
        ("engine", cfg.engine.name().into()),
        ("status", if r.failure.is_some() { "failed".into() } else { "ok".into() }),
        ("free_energy", cfg.free_energy.name().into()),
        ("alpha", f(cfg.params.alpha)),
        ("delta", f(cfg.params.delta)),
        ("beta", f(cfg.params.beta)),
        ("gamma", f(cfg.params.gamma)),
        ("nu", f(cfg.params.nu)),
        ("x_min", f(cfg.grid.x_min)),
        ("x_max", f(cfg.grid.x_max)),
        ("n", cfg.grid.n.to_string()),
        ("bc", format!("{:?}", cfg.grid.bc)),
        ("end_time", f(cfg.end_time)),
        ("t_final", f(r.t)),
        ("steps", r.steps.to_string()),
        ("wall_time", format!("{:.3}", r.wall_time)),
        ("energy_initial", first.map_or("nan".into(), |row| f(row.energy))),
        ("energy_final", last.map_or("nan".into(), |row| f(row.energy))),
        ("mass_initial", first.map_or("nan".into(), |row| f(row.mass_c))),
        ("mass_final", last.map_or("nan".into(), |row| f(row.mass_c))),
        ("max_energy_increase", f(r.log.max_energy_increase())),
        ("l2_c_omega_final", last.map_or("nan".into(), |row| f(row.l2_c_omega))),
    ];
    if let Some(e) = &r.failure {
        pairs.push(("failure", e.to_string()));
    }
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// One run per value of `axis`, each in its own subdirectory.
pub fn sweep(cfg: &ScenarioConfig, axis: &str, values: &[f64]) -> Result<Vec<RunReport>> {
    let cfgs = values.iter().map(|&v| cfg.with_value(axis, v)).collect::<std::result::Result<Vec<_>, _>>()?;
    cfgs.iter().map(run).collect()
}
