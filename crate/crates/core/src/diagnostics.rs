//! Energies, mass, norms, convergence orders and wave-front extraction.

use crate::error::DomainError;
use crate::free_energy::FreeEnergy;
use crate::params::{BoundaryKind, Grid1D, ParamSet};

/// How point values are integrated over the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// Cell averages of a finite-volume grid.
    Midpoint,
    /// Nodal values of a finite-difference grid.
    Trapezoid,
}

/// `int f dx` over the grid.
pub fn integrate(f: &[f64], grid: &Grid1D, quad: Quadrature) -> f64 {
    let dx = grid.dx();
    let sum: f64 = f.iter().sum();
    match (quad, grid.bc) {
        (Quadrature::Midpoint, _) | (Quadrature::Trapezoid, BoundaryKind::Periodic) => sum * dx,
        (Quadrature::Trapezoid, _) => {
            // nodes 0..n-1 span [x_min, x_min + (n-1) dx]
            (sum - 0.5 * (f[0] + f[f.len() - 1])) * dx
        }
    }
}

fn measure(grid: &Grid1D, quad: Quadrature) -> f64 {
    match (quad, grid.bc) {
        (Quadrature::Trapezoid, BoundaryKind::NonReflecting | BoundaryKind::WallNeumann) => {
            grid.length() - grid.dx()
        }
        _ => grid.length(),
    }
}

/// Integral of `c`.
pub fn mass(c: &[f64], grid: &Grid1D) -> f64 {
    c.iter().sum::<f64>() * grid.dx()
}

/// Discrete `L2` norm `sqrt(sum (a-b)^2 dx)`.
pub fn l2_diff(a: &[f64], b: &[f64], grid: &Grid1D) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * grid.dx()).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Central first derivative using the grid's boundary closure (mirror at
/// non-periodic ends, so the boundary derivative uses a one-sided half step).
pub fn central_derivative(f: &[f64], grid: &Grid1D) -> Vec<f64> {
    let n = f.len();
    let inv = 0.5 / grid.dx();
    (0..n)
        .map(|i| {
            let (l, r) = match grid.bc {
                BoundaryKind::Periodic => (f[(i + n - 1) % n], f[(i + 1) % n]),
                _ => (f[i.saturating_sub(1)], f[(i + 1).min(n - 1)]),
            };
            (r - l) * inv
        })
        .collect()
}

/// Field values entering the relaxed energy.
#[derive(Debug, Clone, Copy)]
pub struct RelaxedFields<'a> {
    pub p: &'a [f64],
    pub u: &'a [f64],
    pub c: &'a [f64],
    pub v: &'a [f64],
    pub omega: &'a [f64],
    pub omega_x: &'a [f64],
}

/// Relaxed energy per unit volume,
/// `alpha/2 p^2 + u^2/2 + delta/2 v^2 + W(c) + (c - omega)^2/(2 beta) + gamma/2 omega_x^2`.
pub fn energy_relaxed(
    f: &RelaxedFields,
    fe: &FreeEnergy,
    ps: &ParamSet,
    grid: &Grid1D,
    quad: Quadrature,
) -> Result<f64, DomainError> {
    let ib = ps.inv_beta();
    let mut density = Vec::with_capacity(f.c.len());
    for i in 0..f.c.len() {
        let dc = f.c[i] - f.omega[i];
        density.push(
            0.5 * ps.alpha * f.p[i] * f.p[i]
                + 0.5 * f.u[i] * f.u[i]
                + 0.5 * ps.delta * f.v[i] * f.v[i]
                + fe.w(f.c[i])?
                + 0.5 * ib * dc * dc
                + 0.5 * ps.gamma * f.omega_x[i] * f.omega_x[i],
        );
    }
    Ok(integrate(&density, grid, quad) / measure(grid, quad))
}

/// Energy of the friction-type system (no relaxation), per unit volume:
/// `alpha/2 p^2 + u^2/2 + delta/2 v^2 + W(c) + gamma/2 c_x^2`.
pub fn energy_friction(
    p: &[f64],
    u: &[f64],
    c: &[f64],
    v: &[f64],
    fe: &FreeEnergy,
    ps: &ParamSet,
    grid: &Grid1D,
    quad: Quadrature,
) -> Result<f64, DomainError> {
    let cx = central_derivative(c, grid);
    let mut density = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        density.push(
            0.5 * ps.alpha * p[i] * p[i]
                + 0.5 * u[i] * u[i]
                + 0.5 * ps.delta * v[i] * v[i]
                + fe.w(c[i])?
                + 0.5 * ps.gamma * cx[i] * cx[i],
        );
    }
    Ok(integrate(&density, grid, quad) / measure(grid, quad))
}

/// Van der Waals energy with kinetic part, per unit volume: `u^2/2 + W(c) + gamma/2 c_x^2`.
pub fn energy_nsch(
    u: &[f64],
    c: &[f64],
    fe: &FreeEnergy,
    gamma: f64,
    grid: &Grid1D,
    quad: Quadrature,
) -> Result<f64, DomainError> {
    let cx = central_derivative(c, grid);
    let mut density = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        density.push(0.5 * u[i] * u[i] + fe.w(c[i])? + 0.5 * gamma * cx[i] * cx[i]);
    }
    Ok(integrate(&density, grid, quad) / measure(grid, quad))
}

/// Least-squares slope of `log e` against `log h`.
pub fn convergence_order(data: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = data.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Positions of the waves in a piecewise-constant-like profile.
///
/// Each field is scaled by its range. A sample is active when some scaled
/// field changes by more than `threshold` across the following `width` in
/// x; consecutive active samples form one wave, reported at its steepest
/// face. Fans and shock-fan composites count once, and the result does not
/// depend on the resolution as long as `width` spans a few cells.
pub fn wave_fronts(fields: &[&[f64]], x: &[f64], width: f64, threshold: f64) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return Vec::new();
    }
    let dx = (x[n - 1] - x[0]) / (n - 1) as f64;
    let w = ((width / dx).round() as usize).clamp(1, n - 1);
    let scaled: Vec<(&[f64], f64)> = fields
        .iter()
        .filter_map(|f| {
            let (lo, hi) = f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
            (hi > lo).then(|| (*f, 1.0 / (hi - lo)))
        })
        .collect();
    let jump = |i: usize, j: usize| scaled.iter().map(|(f, s)| (f[j] - f[i]).abs() * s).fold(0.0, f64::max);

    let mut fronts = Vec::new();
    let mut start = None;
    for i in 0..=n - w {
        let active = i < n - w && jump(i, i + w) > threshold;
        match (active, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let best = (s..i + w - 1).max_by(|&a, &b| jump(a, a + 1).total_cmp(&jump(b, b + 1))).unwrap_or(s);
                fronts.push(0.5 * (x[best] + x[best + 1]));
                start = None;
            }
            _ => {}
        }
    }
    fronts
}

/// Number of sign changes of `f`, counting the wrap-around pair on periodic grids.
pub fn sign_changes(f: &[f64], periodic: bool) -> usize {
    let nz: Vec<f64> = f.iter().copied().filter(|x| *x != 0.0).collect();
    let mut k = nz.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    if periodic && nz.len() > 1 && nz[0] * nz[nz.len() - 1] < 0.0 {
        k += 1;
    }
    k
}

/// One row per accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub mass_c: f64,
    /// Largest wave speed (explicit engine), 0 otherwise.
    pub smax: f64,
    /// Newton iterations of the step (implicit engine), 0 otherwise.
    pub newton_iters: usize,
    pub l2_c_omega: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeriesLog {
    pub rows: Vec<LogRow>,
}

impl TimeSeriesLog {
    pub const HEADER: &'static str = "t,dt,energy,mass_c,smax,newton_iters,l2_c_omega";

    /// Appends a row; times must increase strictly.
    pub fn push(&mut self, row: LogRow) {
        if let Some(last) = self.rows.last() {
            debug_assert!(row.t > last.t, "log times must increase ({} after {})", row.t, last.t);
        }
        self.rows.push(row);
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// Largest increase of the energy between consecutive rows (0 if monotone).
    pub fn max_energy_increase(&self) -> f64 {
        self.rows.windows(2).map(|w| w[1].energy - w[0].energy).fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&LogRow> {
        self.rows.last()
    }
}
