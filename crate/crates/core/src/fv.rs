//! Explicit MUSCL-Hancock finite-volume engine with Rusanov fluxes and
//! Strang-split sources.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, LogRow, Quadrature, RelaxedFields, TimeSeriesLog};
use crate::eigen::{flux, max_wave_speed};
use crate::elliptic::EllipticOperator;
use crate::error::{ConfigError, SolverError};
use crate::free_energy::FreeEnergy;
use crate::params::{BoundaryKind, Grid1D, ParamSet};
use crate::state::{State, COMPONENTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    Minmod,
    /// Zero slopes: the scheme degenerates to first-order Rusanov.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxScheme {
    Rusanov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    /// Hyperbolic sub-system only.
    None,
    /// Damping `-v/delta` of the flux variable.
    FrictionOnly,
    /// All sources, with `omega` from the elliptic constraint.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvConfig {
    pub cfl: f64,
    pub limiter: Limiter,
    pub flux_scheme: FluxScheme,
    pub source_mode: SourceMode,
    /// Set by the scenario runner from its own end time.
    #[serde(skip)]
    pub end_time: f64,
}

impl Default for FvConfig {
    fn default() -> Self {
        FvConfig {
            cfl: 0.9,
            limiter: Limiter::Minmod,
            flux_scheme: FluxScheme::Rusanov,
            source_mode: SourceMode::None,
            end_time: 0.15,
        }
    }
}

impl FvConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(ConfigError::new("fv.cfl", format!("must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return Err(ConfigError::new("fv.end_time", format!("must be positive, got {}", self.end_time)));
        }
        Ok(())
    }
}

/// Cell averages at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FvState {
    pub cells: Vec<State>,
    pub t: f64,
    pub grid: Grid1D,
}

impl FvState {
    pub fn new(grid: Grid1D, cells: Vec<State>) -> Self {
        assert_eq!(cells.len(), grid.n, "one state per cell");
        FvState { cells, t: 0.0, grid }
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.cells.iter().map(|q| q[k]).collect()
    }

    pub fn check_finite(&self) -> Result<(), SolverError> {
        check_finite(&self.cells, self.t)
    }
}

fn check_finite(cells: &[State], t: f64) -> Result<(), SolverError> {
    for (index, q) in cells.iter().enumerate() {
        if let Some(k) = q.first_non_finite() {
            return Err(SolverError::NonFinite { component: COMPONENTS[k], index, t });
        }
    }
    Ok(())
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Local Lax–Friedrichs flux. The returned flag is false when either state
/// has a complex pair of characteristic speeds (the modulus is used then).
pub fn rusanov_flux(ql: &State, qr: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<(State, bool), SolverError> {
    let fl = flux(ql, fe, ps)?;
    let fr = flux(qr, fe, ps)?;
    let (sl, hl) = max_wave_speed(ql, fe, ps);
    let (sr, hr) = max_wave_speed(qr, fe, ps);
    let s = sl.max(sr);
    Ok(((fl + fr) * 0.5 - (*qr - *ql) * (0.5 * s), hl && hr))
}

/// `v exp(-dt/delta)`, the exact solution of `v' = -v/delta`.
pub fn apply_friction_exact(v: &mut [f64], dt: f64, delta: f64) {
    let decay = (-dt / delta).exp();
    for x in v {
        *x *= decay;
    }
}

#[inline]
fn mirror(q: State) -> State {
    State { p: q.p, u: -q.u, c: q.c, v: -q.v }
}

/// Result of one full step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub smax: f64,
    /// Faces where a complex characteristic speed was met.
    pub non_hyperbolic_faces: usize,
}

/// Solver workspace; owns the elliptic factorization in full-model mode.
pub struct FvSolver {
    pub grid: Grid1D,
    pub fe: FreeEnergy,
    pub ps: ParamSet,
    pub cfg: FvConfig,
    elliptic: Option<EllipticOperator>,
    ext: Vec<State>,
    lo: Vec<State>,
    hi: Vec<State>,
    face: Vec<State>,
    omega: Vec<f64>,
    omega_x: Vec<f64>,
    c_buf: Vec<f64>,
}

const GHOSTS: usize = 2;

impl FvSolver {
    pub fn new(grid: Grid1D, fe: FreeEnergy, ps: ParamSet, cfg: FvConfig) -> Result<Self, SolverError> {
        let elliptic = match cfg.source_mode {
            SourceMode::Full => Some(EllipticOperator::build(&grid, ps.gamma, ps.beta)?),
            _ => None,
        };
        let n = grid.n;
        Ok(FvSolver {
            grid,
            fe,
            ps,
            cfg,
            elliptic,
            ext: vec![State::ZERO; n + 2 * GHOSTS],
            lo: vec![State::ZERO; n + 2 * GHOSTS],
            hi: vec![State::ZERO; n + 2 * GHOSTS],
            face: vec![State::ZERO; n + 1],
            omega: vec![0.0; n],
            omega_x: vec![0.0; n],
            c_buf: vec![0.0; n],
        })
    }

    pub fn elliptic(&self) -> Option<&EllipticOperator> {
        self.elliptic.as_ref()
    }

    /// `dt = cfl dx / max |lambda|` over the cells, with the largest speed.
    pub fn stable_dt(&self, cells: &[State]) -> Result<(f64, f64), SolverError> {
        let mut smax = 0.0f64;
        for q in cells {
            self.fe.check(q.c)?;
            smax = smax.max(max_wave_speed(q, &self.fe, &self.ps).0);
        }
        let mut dt = self.cfg.cfl * self.grid.dx() / smax;
        if self.ps.nu > 0.0 {
            dt = dt.min(0.4 * self.grid.dx() * self.grid.dx() / self.ps.nu);
        }
        Ok((dt, smax))
    }

    fn fill_ghosts(&mut self, cells: &[State]) {
        let n = cells.len();
        self.ext[GHOSTS..GHOSTS + n].copy_from_slice(cells);
        for g in 0..GHOSTS {
            let (left, right) = match self.grid.bc {
                BoundaryKind::Periodic => (cells[n - GHOSTS + g], cells[g]),
                BoundaryKind::NonReflecting => (cells[0], cells[n - 1]),
                BoundaryKind::WallNeumann => (mirror(cells[GHOSTS - 1 - g]), mirror(cells[n - 1 - g])),
            };
            self.ext[g] = left;
            self.ext[GHOSTS + n + g] = right;
        }
    }

    /// Conservative MUSCL-Hancock update of the homogeneous system over `dt`.
    pub fn hyperbolic_step(&mut self, cells: &mut [State], dt: f64) -> Result<usize, SolverError> {
        let n = cells.len();
        self.fill_ghosts(cells);
        let half = 0.5 * dt / self.grid.dx();
        let (fe, ps) = (&self.fe, &self.ps);
        for k in 1..n + 2 * GHOSTS - 1 {
            let q = self.ext[k];
            let slope = match self.cfg.limiter {
                Limiter::Minmod => (q - self.ext[k - 1]).zip(self.ext[k + 1] - q, minmod),
                Limiter::FirstOrder => State::ZERO,
            };
            let (ql, qr) = (q - slope * 0.5, q + slope * 0.5);
            let dflux = (flux(&ql, fe, ps)? - flux(&qr, fe, ps)?) * half;
            self.lo[k] = ql + dflux;
            self.hi[k] = qr + dflux;
        }
        let mut non_hyperbolic = 0;
        for j in 0..=n {
            // face between ext[GHOSTS - 1 + j] and ext[GHOSTS + j]
            let k = GHOSTS - 1 + j;
            let (f, hyperbolic) = match self.cfg.flux_scheme {
                FluxScheme::Rusanov => rusanov_flux(&self.hi[k], &self.lo[k + 1], fe, ps)?,
            };
            if !hyperbolic {
                non_hyperbolic += 1;
            }
            self.face[j] = f;
        }
        let r = dt / self.grid.dx();
        for (i, q) in cells.iter_mut().enumerate() {
            *q -= (self.face[i + 1] - self.face[i]) * r;
        }
        Ok(non_hyperbolic)
    }

    /// Solve for `omega` and `omega_x` from the current phase field.
    pub fn update_omega(&mut self, cells: &[State]) {
        if let Some(op) = &self.elliptic {
            for (c, q) in self.c_buf.iter_mut().zip(cells) {
                *c = q.c;
            }
            op.solve_into(&self.c_buf, &mut self.omega);
            op.gradient_into(&self.omega, &mut self.omega_x);
        }
    }

    pub fn omega(&self) -> Option<(&[f64], &[f64])> {
        self.elliptic.as_ref().map(|_| (self.omega.as_slice(), self.omega_x.as_slice()))
    }

    /// Source sub-step of length `tau`. The phase field is untouched here, so
    /// `omega` is constant over the sub-step and the friction/relaxation pair
    /// for `v` is integrated exactly.
    pub fn source_step(&mut self, cells: &mut [State], tau: f64) {
        let delta = self.ps.delta;
        match self.cfg.source_mode {
            SourceMode::None => {}
            SourceMode::FrictionOnly => {
                let decay = (-tau / delta).exp();
                for q in cells.iter_mut() {
                    q.v *= decay;
                }
            }
            SourceMode::Full => {
                self.update_omega(cells);
                let ib = self.ps.inv_beta();
                let decay = (-tau / delta).exp();
                for (q, wx) in cells.iter_mut().zip(&self.omega_x) {
                    q.u += tau * q.c * wx * ib;
                    q.v = q.v * decay + wx * ib * (1.0 - decay);
                }
            }
        }
        if self.ps.nu > 0.0 {
            self.viscous_step(cells, tau);
        }
    }

    /// Explicit midpoint for `u_t = nu u_xx`.
    fn viscous_step(&mut self, cells: &mut [State], tau: f64) {
        let n = cells.len();
        let nu = self.ps.nu;
        let idx2 = 1.0 / (self.grid.dx() * self.grid.dx());
        let bc = self.grid.bc;
        let lap = |u: &dyn Fn(usize) -> f64, i: usize| -> f64 {
            let (l, r) = match bc {
                BoundaryKind::Periodic => (u((i + n - 1) % n), u((i + 1) % n)),
                BoundaryKind::NonReflecting => (u(i.saturating_sub(1)), u((i + 1).min(n - 1))),
                BoundaryKind::WallNeumann => (
                    if i == 0 { -u(0) } else { u(i - 1) },
                    if i + 1 == n { -u(n - 1) } else { u(i + 1) },
                ),
            };
            (l - 2.0 * u(i) + r) * idx2
        };
        let u0: Vec<f64> = cells.iter().map(|q| q.u).collect();
        let mid: Vec<f64> = (0..n).map(|i| u0[i] + 0.5 * tau * nu * lap(&|j| u0[j], i)).collect();
        for (i, q) in cells.iter_mut().enumerate() {
            q.u += tau * nu * lap(&|j| mid[j], i);
        }
    }

    /// One Strang-split step: half source, full hyperbolic step, half source.
    pub fn step(&mut self, state: &mut FvState, dt: f64) -> Result<usize, SolverError> {
        let split = !matches!(self.cfg.source_mode, SourceMode::None) || self.ps.nu > 0.0;
        if split {
            self.source_step(&mut state.cells, 0.5 * dt);
        }
        let bad = self.hyperbolic_step(&mut state.cells, dt)?;
        if split {
            self.source_step(&mut state.cells, 0.5 * dt);
        }
        state.t += dt;
        check_finite(&state.cells, state.t)?;
        Ok(bad)
    }

    /// Relaxed energy per unit volume; without the elliptic field the
    /// relaxation terms drop out (`omega = c`).
    pub fn energy(&mut self, cells: &[State]) -> Result<(f64, f64), SolverError> {
        let n = cells.len();
        let (mut p, mut u, mut c, mut v) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (i, q) in cells.iter().enumerate() {
            (p[i], u[i], c[i], v[i]) = (q.p, q.u, q.c, q.v);
        }
        let zeros = vec![0.0; n];
        let (omega, omega_x, l2) = match self.elliptic {
            Some(_) => {
                self.update_omega(cells);
                let l2 = diagnostics::l2_diff(&c, &self.omega, &self.grid);
                (self.omega.clone(), self.omega_x.clone(), l2)
            }
            None => (c.clone(), zeros, 0.0),
        };
        let f = RelaxedFields { p: &p, u: &u, c: &c, v: &v, omega: &omega, omega_x: &omega_x };
        let e = diagnostics::energy_relaxed(&f, &self.fe, &self.ps, &self.grid, Quadrature::Midpoint)?;
        Ok((e, l2))
    }

    fn log_row(&mut self, state: &FvState, dt: f64, smax: f64) -> Result<LogRow, SolverError> {
        let (energy, l2) = self.energy(&state.cells)?;
        let c: Vec<f64> = state.cells.iter().map(|q| q.c).collect();
        Ok(LogRow {
            t: state.t,
            dt,
            energy,
            mass_c: diagnostics::mass(&c, &self.grid),
            smax,
            newton_iters: 0,
            l2_c_omega: l2,
        })
    }

    /// Integrate to `cfg.end_time`, clipping steps so that every requested
    /// snapshot time (and the end time) is met exactly. On failure `state`
    /// holds the last successfully completed step.
    pub fn run(
        &mut self,
        state: &mut FvState,
        snapshot_times: &[f64],
        log: &mut TimeSeriesLog,
        mut on_snapshot: impl FnMut(&FvState, Option<&[f64]>),
    ) -> Result<RunSummary, SolverError> {
        let started = Instant::now();
        let end = self.cfg.end_time;
        let mut targets: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t >= state.t && t <= end).collect();
        targets.sort_by(f64::total_cmp);
        targets.dedup();
        let mut next = 0;
        let mut summary = RunSummary::default();
        if log.rows.is_empty() {
            let (_, smax) = self.stable_dt(&state.cells)?;
            let row = self.log_row(state, 0.0, smax)?;
            log.push(row);
        }
        let mut emit = |solver: &mut Self, state: &FvState, next: &mut usize| {
            while *next < targets.len() && targets[*next] <= state.t {
                let omega = match solver.elliptic {
                    Some(_) => {
                        solver.update_omega(&state.cells);
                        Some(solver.omega.clone())
                    }
                    None => None,
                };
                on_snapshot(state, omega.as_deref());
                *next += 1;
            }
        };
        emit(self, state, &mut next);
        let mut scratch = state.clone();
        while state.t < end {
            let (mut dt, smax) = self.stable_dt(&state.cells)?;
            let stop = targets.get(next).copied().unwrap_or(end).min(end);
            let clipped = stop - state.t <= dt * (1.0 + 1e-12);
            if clipped {
                dt = stop - state.t;
            }
            if !(dt > 1e-14 * end) && !clipped {
                return Err(SolverError::DtUnderflow { dt, t: state.t, smax });
            }
            scratch.cells.copy_from_slice(&state.cells);
            scratch.t = state.t;
            summary.non_hyperbolic_faces += self.step(&mut scratch, dt)?;
            if clipped {
                scratch.t = stop;
            }
            std::mem::swap(state, &mut scratch);
            summary.steps += 1;
            summary.max_smax = summary.max_smax.max(smax);
            let row = self.log_row(state, dt, smax)?;
            log.push(row);
            emit(self, state, &mut next);
        }
        summary.wall_time = started.elapsed().as_secs_f64();
        Ok(summary)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub max_smax: f64,
    pub non_hyperbolic_faces: usize,
    pub wall_time: f64,
}

/// One step of size `dt` (or the stable step if `None`); returns the new state.
pub fn muscl_hancock_step(
    s: &FvState,
    cfg: &FvConfig,
    fe: &FreeEnergy,
    ps: &ParamSet,
    dt: Option<f64>,
) -> Result<(FvState, StepInfo), SolverError> {
    let mut solver = FvSolver::new(s.grid, *fe, *ps, *cfg)?;
    let (stable, smax) = solver.stable_dt(&s.cells)?;
    let dt = dt.unwrap_or(stable);
    let mut next = s.clone();
    let bad = solver.step(&mut next, dt)?;
    Ok((next, StepInfo { dt, smax, non_hyperbolic_faces: bad }))
}

/// Integrate `init` to `cfg.end_time`.
pub fn run_fv(
    init: FvState,
    cfg: &FvConfig,
    fe: &FreeEnergy,
    ps: &ParamSet,
    snapshot_times: &[f64],
    on_snapshot: impl FnMut(&FvState, Option<&[f64]>),
) -> Result<(FvState, TimeSeriesLog), SolverError> {
    let mut solver = FvSolver::new(init.grid, *fe, *ps, *cfg)?;
    let mut state = init;
    let mut log = TimeSeriesLog::default();
    solver.run(&mut state, snapshot_times, &mut log, on_snapshot)?;
    Ok((state, log))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn riemann(n: usize, left: State, right: State, bc: BoundaryKind) -> FvState {
        let g = Grid1D::new(-1.0, 1.0, n, bc).unwrap();
        let cells = g.cell_centers().iter().map(|&x| if x <= 0.0 { left } else { right }).collect();
        FvState::new(g, cells)
    }

    fn reciprocal_params() -> (FreeEnergy, ParamSet) {
        (FreeEnergy::ConvexReciprocal, ParamSet::new(0.1, 0.0625, f64::INFINITY, 1e-3, 0.0))
    }

    #[test]
    fn minmod_examples() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-1.0, 2.0), 0.0);
        assert_eq!(minmod(-3.0, -2.0), -2.0);
        assert_eq!(minmod(0.0, 5.0), 0.0);
    }

    #[test]
    fn rusanov_is_consistent() {
        let (fe, ps) = reciprocal_params();
        let q = State::new(0.3, -0.7, 1.4, 0.2);
        let (f, hyp) = rusanov_flux(&q, &q, &fe, &ps).unwrap();
        assert_eq!(f, flux(&q, &fe, &ps).unwrap());
        assert!(hyp);
    }

    #[test]
    fn friction_exact_examples() {
        let mut v = vec![1.0, -2.0];
        apply_friction_exact(&mut v, 0.0, 0.3);
        assert_eq!(v, vec![1.0, -2.0]);
        let mut v = vec![1.0];
        apply_friction_exact(&mut v, 0.25, 0.25);
        assert!((v[0] - (-1.0f64).exp()).abs() < 1e-16);
        let mut v = vec![5.0];
        apply_friction_exact(&mut v, 1e-3, 1e-6);
        assert_eq!(v[0], 0.0);
    }

    #[test]
    fn periodic_run_conserves_all_components() {
        let (fe, ps) = reciprocal_params();
        let g = Grid1D::new(-1.0, 1.0, 100, BoundaryKind::Periodic).unwrap();
        let cells: Vec<State> = g
            .cell_centers()
            .iter()
            .map(|&x| State::new(0.1 * (3.0 * x).sin(), 0.5 * (std::f64::consts::PI * x).cos(), 1.5 + 0.3 * x.sin(), 0.05 * x))
            .collect();
        let mut s = FvState::new(g, cells);
        let cfg = FvConfig { end_time: 1.0, ..FvConfig::default() };
        let mut solver = FvSolver::new(g, fe, ps, cfg).unwrap();
        let sums = |s: &FvState| -> [f64; 4] {
            let mut a = [0.0; 4];
            for q in &s.cells {
                for k in 0..4 {
                    a[k] += q[k] * g.dx();
                }
            }
            a
        };
        let before = sums(&s);
        let scale: f64 = before.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for _ in 0..1000 {
            let (dt, _) = solver.stable_dt(&s.cells).unwrap();
            solver.step(&mut s, 0.5 * dt).unwrap();
        }
        let after = sums(&s);
        for k in 0..4 {
            assert!((after[k] - before[k]).abs() <= 1e-12 * scale, "component {k}: {} vs {}", after[k], before[k]);
        }
    }

    fn assert_mirror_symmetric(s: &FvState, tol: f64) {
        let n = s.cells.len();
        for i in 0..n / 2 {
            let (a, b) = (s.cells[i], s.cells[n - 1 - i]);
            assert!((a.p - b.p).abs() <= tol && (a.c - b.c).abs() <= tol, "even part at {i}");
            assert!((a.u + b.u).abs() <= tol && (a.v + b.v).abs() <= tol, "odd part at {i}");
        }
    }

    #[test]
    fn compression_data_stays_mirror_symmetric() {
        let (fe, ps) = reciprocal_params();
        for mode in [SourceMode::None, SourceMode::FrictionOnly] {
            let s0 = riemann(200, State::new(0.0, 1.0, 1.0, 0.0), State::new(0.0, -1.0, 1.0, 0.0), BoundaryKind::NonReflecting);
            let cfg = FvConfig { source_mode: mode, end_time: 0.05, ..FvConfig::default() };
            let (s, _) = run_fv(s0, &cfg, &fe, &ps, &[], |_, _| {}).unwrap();
            assert_mirror_symmetric(&s, 1e-10);
        }
    }

    #[test]
    fn first_step_is_symmetric() {
        let (fe, ps) = reciprocal_params();
        let s0 = riemann(50, State::new(0.0, 1.0, 1.0, 0.0), State::new(0.0, -1.0, 1.0, 0.0), BoundaryKind::NonReflecting);
        let (s1, info) = muscl_hancock_step(&s0, &FvConfig::default(), &fe, &ps, None).unwrap();
        assert!(info.dt > 0.0 && info.non_hyperbolic_faces == 0);
        assert_mirror_symmetric(&s1, 0.0);
    }

    /// Plain first-order Rusanov, written independently of the engine.
    fn first_order_reference(cells: &[State], dt: f64, dx: f64, fe: &FreeEnergy, ps: &ParamSet) -> Vec<State> {
        let n = cells.len();
        let at = |i: isize| cells[i.clamp(0, n as isize - 1) as usize];
        let face = |i: isize| {
            let (l, r) = (at(i - 1), at(i));
            let fl = flux(&l, fe, ps).unwrap();
            let fr = flux(&r, fe, ps).unwrap();
            let s = max_wave_speed(&l, fe, ps).0.max(max_wave_speed(&r, fe, ps).0);
            (fl + fr) * 0.5 - (r - l) * (0.5 * s)
        };
        (0..n as isize).map(|i| at(i) - (face(i + 1) - face(i)) * (dt / dx)).collect()
    }

    #[test]
    fn zero_slopes_reduce_to_first_order_rusanov() {
        let (fe, ps) = reciprocal_params();
        let mut s = riemann(60, State::new(0.0, -1.0, 2.0, 0.0), State::new(0.0, 1.0, 2.0, 0.0), BoundaryKind::NonReflecting);
        let cfg = FvConfig { limiter: Limiter::FirstOrder, ..FvConfig::default() };
        let mut solver = FvSolver::new(s.grid, fe, ps, cfg).unwrap();
        let mut reference = s.cells.clone();
        for _ in 0..10 {
            let (dt, _) = solver.stable_dt(&s.cells).unwrap();
            solver.step(&mut s, dt).unwrap();
            reference = first_order_reference(&reference, dt, s.grid.dx(), &fe, &ps);
        }
        for (a, b) in s.cells.iter().zip(&reference) {
            assert!((*a - *b).max_abs() < 1e-13);
        }
    }

    #[test]
    fn full_source_keeps_uniform_equilibrium() {
        let fe = FreeEnergy::ShiftedDoubleWell;
        let ps = ParamSet::new(0.5, 0.0625, 0.1, 1e-4, 0.0);
        let g = Grid1D::new(-1.0, 1.0, 64, BoundaryKind::NonReflecting).unwrap();
        let s0 = FvState::new(g, vec![State::new(0.0, 0.0, 2.0, 0.0); 64]);
        let cfg = FvConfig { source_mode: SourceMode::Full, end_time: 0.01, ..FvConfig::default() };
        let (s, log) = run_fv(s0.clone(), &cfg, &fe, &ps, &[], |_, _| {}).unwrap();
        for (a, b) in s.cells.iter().zip(&s0.cells) {
            assert!((*a - *b).max_abs() < 1e-12);
        }
        assert!(log.rows.iter().all(|r| r.energy.abs() < 1e-12));
    }

    #[test]
    fn snapshots_hit_requested_times() {
        let (fe, ps) = reciprocal_params();
        let s0 = riemann(40, State::new(0.0, 1.0, 1.0, 0.0), State::new(0.0, -1.0, 1.0, 0.0), BoundaryKind::NonReflecting);
        let cfg = FvConfig { end_time: 0.02, ..FvConfig::default() };
        let mut seen = Vec::new();
        let (s, log) = run_fv(s0, &cfg, &fe, &ps, &[0.0, 0.0123, 0.02], |st, om| {
            assert!(om.is_none());
            seen.push(st.t);
        })
        .unwrap();
        assert_eq!(seen, vec![0.0, 0.0123, 0.02]);
        assert_eq!(s.t, 0.02);
        assert!(log.rows.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn inadmissible_state_is_reported() {
        let (fe, ps) = reciprocal_params();
        let s0 = riemann(20, State::new(0.0, 0.0, -1.0, 0.0), State::new(0.0, 0.0, 1.0, 0.0), BoundaryKind::NonReflecting);
        let err = run_fv(s0, &FvConfig::default(), &fe, &ps, &[], |_, _| {}).unwrap_err();
        assert!(matches!(err, SolverError::Domain(_)));
    }
}
