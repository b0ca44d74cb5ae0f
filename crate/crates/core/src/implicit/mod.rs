//! Method-of-lines engines advanced by the three-stage Radau IIA method.
//!
//! A [`SemiDiscreteSystem`] supplies the right-hand side and a banded
//! linearization. Systems with a linear elliptic constraint keep the
//! constraint unknowns in the linear algebra ("auxiliary" rows), so the
//! Newton matrices stay banded although the reduced Jacobian is dense.

pub mod banded;
pub mod ch;
pub mod radau;
pub mod relaxed;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, SolverError};
use banded::{BandLu, BandMatrix, Scalar};

pub use ch::ChSystem;
pub use radau::{radau5_step, run_implicit, ImplicitRun, Radau5};
pub use relaxed::RelaxedSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrkMethod {
    RadauIia5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IrkConfig {
    pub method: IrkMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    /// Defaults to `end_time / 50`.
    pub dt_max: Option<f64>,
    /// Bound on the scaled stage increments; defaults to the classic
    /// `max(10 eps / rel_tol, min(0.03, sqrt(rel_tol)))`.
    pub newton_tol: Option<f64>,
    pub newton_max_iter: usize,
    /// Set by the scenario runner from its own end time.
    #[serde(skip)]
    pub end_time: f64,
}

impl Default for IrkConfig {
    fn default() -> Self {
        IrkConfig {
            method: IrkMethod::RadauIia5,
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            dt_init: 1e-6,
            dt_min: 1e-14,
            dt_max: None,
            newton_tol: None,
            newton_max_iter: 7,
            end_time: 1.0,
        }
    }
}

impl IrkConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pos = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(name, format!("must be positive, got {x}")))
            }
        };
        pos("irk.abs_tol", self.abs_tol)?;
        pos("irk.rel_tol", self.rel_tol)?;
        pos("irk.dt_init", self.dt_init)?;
        pos("irk.dt_min", self.dt_min)?;
        pos("irk.end_time", self.end_time)?;
        if let Some(tol) = self.newton_tol {
            pos("irk.newton_tol", tol)?;
        }
        let dt_max = self.dt_max();
        if !(self.dt_min <= self.dt_init && self.dt_init <= dt_max) {
            return Err(ConfigError::new(
                "irk.dt_init",
                format!("need dt_min <= dt_init <= dt_max, got {} <= {} <= {}", self.dt_min, self.dt_init, dt_max),
            ));
        }
        if self.newton_max_iter < 2 {
            return Err(ConfigError::new("irk.newton_max_iter", "need at least 2 iterations"));
        }
        Ok(())
    }

    pub fn dt_max(&self) -> f64 {
        self.dt_max.unwrap_or(self.end_time / 50.0)
    }

    pub fn newton_tol(&self) -> f64 {
        self.newton_tol
            .unwrap_or_else(|| (10.0 * f64::EPSILON / self.rel_tol).max(0.03f64.min(self.rel_tol.sqrt())))
    }
}

/// Per-state diagnostics reported by a system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    pub energy: f64,
    pub mass_c: f64,
    pub l2_c_omega: f64,
}

pub trait SemiDiscreteSystem {
    fn dim(&self) -> usize;

    /// `dy = F(t, y)`. Deterministic; scratch space lives in `self`.
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Banded linearization at `(t, y)`, with `f0 = F(t, y)`.
    fn linearize(&mut self, t: f64, y: &[f64], f0: &[f64]) -> Result<Linearization, SolverError>;

    fn observe(&mut self, y: &[f64]) -> Observation;
}

/// `-J` of an augmented system in a banded ordering. The Newton matrices are
/// `sigma D - J` where `D` is the identity on state rows and zero on
/// auxiliary rows.
#[derive(Debug, Clone)]
pub struct Linearization {
    /// Banded row of each state unknown.
    pub position: Vec<usize>,
    pub state_row: Vec<bool>,
    pub neg_jac: BandMatrix<f64>,
    nodes: usize,
    per: usize,
    state_per_node: usize,
}

impl Linearization {
    /// Layout for `nodes` ring nodes carrying `state_per_node` state unknowns
    /// and `aux_per_node` auxiliary unknowns, coupled up to `radius` nodes away.
    pub fn ring(nodes: usize, state_per_node: usize, aux_per_node: usize, radius: usize) -> Self {
        let per = state_per_node + aux_per_node;
        let band = per * 2 * radius + per - 1;
        let m = nodes * per;
        let mut position = Vec::with_capacity(nodes * state_per_node);
        for i in 0..nodes {
            for k in 0..state_per_node {
                position.push(per * banded::fold(i, nodes) + k);
            }
        }
        let mut state_row = vec![false; m];
        for &p in &position {
            state_row[p] = true;
        }
        Linearization { position, state_row, neg_jac: BandMatrix::zeros(m, band, band), nodes, per, state_per_node }
    }

    /// Banded row of auxiliary unknown `a` of node `i`.
    pub fn aux_position(&self, i: usize, a: usize) -> usize {
        self.per * banded::fold(i, self.nodes) + self.state_per_node + a
    }

    /// Banded row of state component `k` of node `i`.
    #[inline]
    pub fn state_position(&self, i: usize, k: usize) -> usize {
        self.position[i * self.state_per_node + k]
    }

    pub fn factor<T: Scalar>(&self, sigma: T) -> Result<LinearSolver<T>, SolverError> {
        let (kl, ku) = self.neg_jac.bandwidths();
        let m = self.neg_jac.dim();
        let mut a = BandMatrix::<T>::zeros(m, kl, ku);
        for i in 0..m {
            for j in i.saturating_sub(kl)..=(i + ku).min(m - 1) {
                let v = self.neg_jac.get(i, j);
                if v != 0.0 {
                    a.add(i, j, T::from_real(v));
                }
            }
            if self.state_row[i] {
                a.add(i, i, sigma);
            }
        }
        Ok(LinearSolver { lu: a.factor()?, position: self.position.clone(), m })
    }
}

pub struct LinearSolver<T> {
    lu: BandLu<T>,
    position: Vec<usize>,
    m: usize,
}

impl<T: Scalar> LinearSolver<T> {
    /// Solve `(sigma D - J) x = r` for the state part, auxiliary right-hand sides zero.
    pub fn solve(&self, r: &[T], x: &mut [T], work: &mut Vec<T>) {
        work.clear();
        work.resize(self.m, T::ZERO);
        for (k, &p) in self.position.iter().enumerate() {
            work[p] = r[k];
        }
        self.lu.solve_in_place(work);
        for (k, &p) in self.position.iter().enumerate() {
            x[k] = work[p];
        }
    }
}

pub type ComplexSolver = LinearSolver<Complex64>;
