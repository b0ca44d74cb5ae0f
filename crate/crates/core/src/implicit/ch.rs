//! Fourth-order conservative finite differences for advective Cahn-Hilliard
//! with a prescribed constant velocity, used as the reference limit.

use super::banded::ring_colouring;
use super::relaxed::fd_increment;
use super::{Linearization, Observation, SemiDiscreteSystem};
use crate::diagnostics::{self, Quadrature};
use crate::error::SolverError;
use crate::free_energy::FreeEnergy;
use crate::params::{BoundaryKind, Grid1D};

const RADIUS: usize = 4;

pub struct ChSystem {
    grid: Grid1D,
    fe: FreeEnergy,
    gamma: f64,
    u: f64,
    colours: Vec<Vec<usize>>,
    mu: Vec<f64>,
    face: Vec<f64>,
}

impl ChSystem {
    pub fn new(grid: Grid1D, fe: FreeEnergy, gamma: f64, u: f64) -> Result<Self, SolverError> {
        if grid.bc != BoundaryKind::Periodic {
            return Err(SolverError::Unsupported("the implicit engine supports periodic grids only".into()));
        }
        if !(gamma > 0.0 && gamma.is_finite() && u.is_finite()) {
            return Err(SolverError::Unsupported(format!("gamma = {gamma}, u = {u}")));
        }
        let n = grid.n;
        if n < 2 * RADIUS + 1 {
            return Err(SolverError::Unsupported(format!("need at least {} nodes", 2 * RADIUS + 1)));
        }
        Ok(ChSystem { grid, fe, gamma, u, colours: ring_colouring(n, RADIUS), mu: vec![0.0; n], face: vec![0.0; n] })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Discrete chemical potential `W'(c) - gamma c_xx`.
    pub fn chemical_potential(&mut self, c: &[f64]) -> &[f64] {
        let n = self.grid.n;
        let dx = self.grid.dx();
        let k = self.gamma / (12.0 * dx * dx);
        for i in 0..n {
            let at = |o: isize| c[(i as isize + o).rem_euclid(n as isize) as usize];
            let lap = -at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2);
            self.mu[i] = self.fe.wp_unchecked(c[i]) - k * lap;
        }
        &self.mu
    }
}

impl SemiDiscreteSystem for ChSystem {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn rhs(&mut self, _t: f64, c: &[f64], dc: &mut [f64]) {
        let n = self.grid.n;
        let dx = self.grid.dx();
        self.chemical_potential(c);
        let mu = &self.mu;
        for i in 0..n {
            let w = |f: &[f64], o: isize| f[(i as isize + o).rem_euclid(n as isize) as usize];
            let interp = (-w(c, 2) + 7.0 * w(c, 1) + 7.0 * w(c, 0) - w(c, -1)) / 12.0;
            let grad = (-w(mu, 2) + 15.0 * w(mu, 1) - 15.0 * w(mu, 0) + w(mu, -1)) / (12.0 * dx);
            self.face[i] = self.u * interp - grad;
        }
        for i in 0..n {
            dc[i] = -(self.face[i] - self.face[(i + n - 1) % n]) / dx;
        }
    }

    fn linearize(&mut self, t: f64, y: &[f64], f0: &[f64]) -> Result<Linearization, SolverError> {
        let n = self.grid.n;
        let mut lin = Linearization::ring(n, 1, 0, RADIUS);
        let mut pert = y.to_vec();
        let mut out = vec![0.0; n];
        let colours = self.colours.clone();
        for group in &colours {
            for &j in group {
                pert[j] += fd_increment(y[j]);
            }
            self.rhs(t, &pert, &mut out);
            for &j in group {
                let h = pert[j] - y[j];
                for o in 0..=2 * RADIUS {
                    let i = (j + n + o - RADIUS) % n;
                    let d = (out[i] - f0[i]) / h;
                    if d != 0.0 {
                        lin.neg_jac.add(lin.state_position(i, 0), lin.state_position(j, 0), -d);
                    }
                }
                pert[j] = y[j];
            }
        }
        Ok(lin)
    }

    fn observe(&mut self, c: &[f64]) -> Observation {
        let u = vec![self.u; c.len()];
        let energy = diagnostics::energy_nsch(&u, c, &self.fe, self.gamma, &self.grid, Quadrature::Trapezoid)
            .unwrap_or(f64::NAN);
        Observation { energy, mass_c: diagnostics::mass(c, &self.grid), l2_c_omega: 0.0 }
    }
}
