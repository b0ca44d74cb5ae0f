//! Second-order conservative finite differences for the full relaxed model on
//! a periodic node grid.

use super::banded::ring_colouring;
use super::{Linearization, Observation, SemiDiscreteSystem};
use crate::diagnostics::{self, Quadrature, RelaxedFields};
use crate::elliptic::EllipticOperator;
use crate::error::SolverError;
use crate::free_energy::FreeEnergy;
use crate::params::{BoundaryKind, Grid1D, ParamSet};
use crate::state::State;

const NC: usize = 4;

/// Forward-difference increment for an unknown of size `y`.
#[inline]
pub(crate) fn fd_increment(y: f64) -> f64 {
    (f64::EPSILON * y.abs().max(1e-5)).sqrt()
}

/// `y` is node-major: `(p, u, c, v)` of node 0, then node 1, and so on.
pub struct RelaxedSystem {
    grid: Grid1D,
    fe: FreeEnergy,
    ps: ParamSet,
    elliptic: EllipticOperator,
    colours: Vec<Vec<usize>>,
    c: Vec<f64>,
    omega: Vec<f64>,
    mu: Vec<f64>,
}

impl RelaxedSystem {
    pub fn new(grid: Grid1D, fe: FreeEnergy, ps: ParamSet) -> Result<Self, SolverError> {
        if grid.bc != BoundaryKind::Periodic {
            return Err(SolverError::Unsupported("the implicit engine supports periodic grids only".into()));
        }
        let elliptic = EllipticOperator::build(&grid, ps.gamma, ps.beta)?;
        let n = grid.n;
        Ok(RelaxedSystem {
            grid,
            fe,
            ps,
            elliptic,
            colours: ring_colouring(n, 1),
            c: vec![0.0; n],
            omega: vec![0.0; n],
            mu: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> &ParamSet {
        &self.ps
    }

    pub fn elliptic(&self) -> &EllipticOperator {
        &self.elliptic
    }

    /// Flat state from nodal `p`, `u`, `c`, with the flux variable
    /// `v = (W'(c) + (c - omega)/beta)_x` after one elliptic solve.
    pub fn initial_state(&self, p: &[f64], u: &[f64], c: &[f64]) -> Result<Vec<f64>, SolverError> {
        let omega = self.elliptic.solve(c);
        let ib = self.ps.inv_beta();
        let mut mu = Vec::with_capacity(c.len());
        for (ci, wi) in c.iter().zip(&omega) {
            mu.push(self.fe.wp(*ci)? + (ci - wi) * ib);
        }
        let v = diagnostics::central_derivative(&mu, &self.grid);
        let mut y = Vec::with_capacity(NC * c.len());
        for i in 0..c.len() {
            y.extend_from_slice(&[p[i], u[i], c[i], v[i]]);
        }
        Ok(y)
    }

    pub fn cells(y: &[f64]) -> Vec<State> {
        y.chunks_exact(NC).map(|q| State::new(q[0], q[1], q[2], q[3])).collect()
    }

    /// `omega` of the state `y`.
    pub fn omega_of(&self, y: &[f64]) -> Vec<f64> {
        let c: Vec<f64> = y.chunks_exact(NC).map(|q| q[2]).collect();
        self.elliptic.solve(&c)
    }

    fn solve_omega(&mut self, y: &[f64]) {
        for (c, q) in self.c.iter_mut().zip(y.chunks_exact(NC)) {
            *c = q[2];
        }
        self.elliptic.solve_into(&self.c, &mut self.omega);
    }

    /// Right-hand side with `omega` given instead of solved for.
    ///
    /// The `p`, `c` and `v` equations are the central flux divergence. In the
    /// `u` equation the pressure `G(c)` and the relaxation source are combined
    /// into `c D(mu)` with `mu = W'(c) + (c - omega)/beta`, and `3/4 (u^2)_x`
    /// is split as `D(u^2)/2 + u D(u)/2`. Both agree with the flux form to
    /// second order, and together with the skew-symmetry of `D` they make
    /// the discrete energy decay exactly `-sum v^2` in the inviscid case.
    fn local_rhs(&mut self, y: &[f64], omega: &[f64], dy: &mut [f64]) {
        let n = self.grid.n;
        let dx = self.grid.dx();
        let ib = self.ps.inv_beta();
        for (i, q) in y.chunks_exact(NC).enumerate() {
            self.mu[i] = self.fe.wp_unchecked(q[2]) + (q[2] - omega[i]) * ib;
        }
        let h = 0.5 / dx;
        let idx2 = 1.0 / (dx * dx);
        let (inv_alpha, inv_delta, nu) = (1.0 / self.ps.alpha, 1.0 / self.ps.delta, self.ps.nu);
        for i in 0..n {
            let (l, r) = (NC * ((i + n - 1) % n), NC * ((i + 1) % n));
            let k = NC * i;
            let (u, c, v) = (y[k + 1], y[k + 2], y[k + 3]);
            let d = |j: usize| (y[r + j] - y[l + j]) * h;
            let du = d(1);
            let dmu = (self.mu[(i + 1) % n] - self.mu[(i + n - 1) % n]) * h;
            let duu = (y[r + 1] * y[r + 1] - y[l + 1] * y[l + 1]) * h;
            let dcu = (y[r + 2] * y[r + 1] - y[l + 2] * y[l + 1]) * h;
            let visc = if nu > 0.0 { nu * (y[l + 1] - 2.0 * u + y[r + 1]) * idx2 } else { 0.0 };
            dy[k] = -du * inv_alpha;
            dy[k + 1] = -0.5 * (duu + u * du) - d(0) - c * dmu + visc;
            dy[k + 2] = -dcu - d(3);
            dy[k + 3] = -(dmu + v) * inv_delta;
        }
    }
}

impl SemiDiscreteSystem for RelaxedSystem {
    fn dim(&self) -> usize {
        NC * self.grid.n
    }

    fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.solve_omega(y);
        let omega = std::mem::take(&mut self.omega);
        self.local_rhs(y, &omega, dy);
        self.omega = omega;
    }

    fn linearize(&mut self, _t: f64, y: &[f64], _f0: &[f64]) -> Result<Linearization, SolverError> {
        let n = self.grid.n;
        let mut lin = Linearization::ring(n, NC, 1, 1);
        self.solve_omega(y);
        let omega = self.omega.clone();
        let mut base = vec![0.0; y.len()];
        self.local_rhs(y, &omega, &mut base);
        let mut pert = y.to_vec();
        let mut out = vec![0.0; y.len()];
        let neighbours = |j: usize| [(j + n - 1) % n, j, (j + 1) % n];
        let colours = self.colours.clone();

        // columns of the state unknowns, omega frozen
        for group in &colours {
            for k in 0..NC {
                for &j in group {
                    pert[NC * j + k] += fd_increment(y[NC * j + k]);
                }
                self.local_rhs(&pert, &omega, &mut out);
                for &j in group {
                    let col = NC * j + k;
                    let h = pert[col] - y[col];
                    for i in neighbours(j) {
                        for l in 0..NC {
                            let d = (out[NC * i + l] - base[NC * i + l]) / h;
                            if d != 0.0 {
                                lin.neg_jac.add(lin.state_position(i, l), lin.state_position(j, k), -d);
                            }
                        }
                    }
                    pert[col] = y[col];
                }
            }
        }

        // columns of omega
        let mut omega_pert = omega.clone();
        for group in &colours {
            for &j in group {
                omega_pert[j] += fd_increment(omega[j]);
            }
            self.local_rhs(y, &omega_pert, &mut out);
            for &j in group {
                let h = omega_pert[j] - omega[j];
                for i in neighbours(j) {
                    for l in 0..NC {
                        let d = (out[NC * i + l] - base[NC * i + l]) / h;
                        if d != 0.0 {
                            lin.neg_jac.add(lin.state_position(i, l), lin.aux_position(j, 0), -d);
                        }
                    }
                }
                omega_pert[j] = omega[j];
            }
        }

        // constraint rows: -c/beta + A omega = 0
        let (diag, off) = self.elliptic.stencil();
        let ib = self.ps.inv_beta();
        for i in 0..n {
            let row = lin.aux_position(i, 0);
            lin.neg_jac.add(row, lin.state_position(i, 2), -ib);
            lin.neg_jac.add(row, row, diag);
            lin.neg_jac.add(row, lin.aux_position((i + n - 1) % n, 0), off);
            lin.neg_jac.add(row, lin.aux_position((i + 1) % n, 0), off);
        }
        Ok(lin)
    }

    fn observe(&mut self, y: &[f64]) -> Observation {
        let n = self.grid.n;
        let (mut p, mut u, mut c, mut v) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (i, q) in y.chunks_exact(NC).enumerate() {
            (p[i], u[i], c[i], v[i]) = (q[0], q[1], q[2], q[3]);
        }
        let omega = self.elliptic.solve(&c);
        // forward differences: the gradient energy whose variation is the
        // three-point Laplacian of the constraint
        let dx = self.grid.dx();
        let omega_x: Vec<f64> = (0..n).map(|i| (omega[(i + 1) % n] - omega[i]) / dx).collect();
        let f = RelaxedFields { p: &p, u: &u, c: &c, v: &v, omega: &omega, omega_x: &omega_x };
        let energy = diagnostics::energy_relaxed(&f, &self.fe, &self.ps, &self.grid, Quadrature::Trapezoid)
            .unwrap_or(f64::NAN);
        Observation {
            energy,
            mass_c: diagnostics::mass(&c, &self.grid),
            l2_c_omega: diagnostics::l2_diff(&c, &omega, &self.grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{flux_unchecked, source};
    use crate::implicit::IrkConfig;

    fn system(n: usize, ps: ParamSet) -> RelaxedSystem {
        let g = Grid1D::new(-1.0, 1.0, n, BoundaryKind::Periodic).unwrap();
        RelaxedSystem::new(g, FreeEnergy::QuarticDoubleWell, ps).unwrap()
    }

    fn droplet_params() -> ParamSet {
        ParamSet::new(1e-2, 1e-2, 1e-2, 1e-3, 0.0)
    }

    #[test]
    fn constant_state_is_stationary() {
        let mut sys = system(50, droplet_params());
        let y: Vec<f64> = (0..50).flat_map(|_| [0.3, 0.7, 0.4, 0.0]).collect();
        let mut dy = vec![1.0; 200];
        sys.rhs(0.0, &y, &mut dy);
        assert!(dy.iter().all(|d| d.abs() < 1e-9), "{:?}", dy.iter().fold(0.0f64, |m, d| m.max(d.abs())));
    }

    #[test]
    fn mass_rate_vanishes() {
        let mut sys = system(64, droplet_params());
        let x = sys.grid().nodes();
        let c: Vec<f64> = x.iter().map(|x| 0.5 * (std::f64::consts::PI * x).sin()).collect();
        let u: Vec<f64> = x.iter().map(|x| 0.2 * (2.0 * std::f64::consts::PI * x).cos()).collect();
        let y = sys.initial_state(&vec![0.0; 64], &u, &c).unwrap();
        let mut dy = vec![0.0; y.len()];
        sys.rhs(0.0, &y, &mut dy);
        let rate: f64 = dy.chunks_exact(NC).map(|d| d[2]).sum::<f64>() * sys.grid().dx();
        let scale: f64 = dy.chunks_exact(NC).map(|d| d[2].abs()).sum::<f64>() * sys.grid().dx();
        assert!(rate.abs() <= 1e-12 * scale.max(1.0), "{rate}");
    }

    #[test]
    fn linearization_matches_directional_derivative() {
        let mut sys = system(30, ParamSet::new(0.1, 0.05, 0.05, 2e-3, 0.01));
        let x = sys.grid().nodes();
        let c: Vec<f64> = x.iter().map(|x| (3.0 * x).sin() * 0.8).collect();
        let u: Vec<f64> = x.iter().map(|x| 0.3 * x.cos()).collect();
        let p: Vec<f64> = x.iter().map(|x| 0.1 * (2.0 * x).sin()).collect();
        let y = sys.initial_state(&p, &u, &c).unwrap();
        let dir: Vec<f64> = (0..y.len()).map(|k| ((k * 37 % 17) as f64 - 8.0) / 8.0).collect();
        let mut f0 = vec![0.0; y.len()];
        sys.rhs(0.0, &y, &mut f0);
        let lin = sys.linearize(0.0, &y, &f0).unwrap();
        // (sigma D - J) x = r  =>  J x = sigma x - r
        let sigma = 1e3;
        let solver = lin.factor(sigma).unwrap();
        let mut x = vec![0.0; y.len()];
        let mut work = Vec::new();
        solver.solve(&dir, &mut x, &mut work);
        let jx: Vec<f64> = x.iter().zip(&dir).map(|(x, r)| sigma * x - r).collect();
        let eps = 1e-6;
        let (mut yp, mut ym) = (y.clone(), y.clone());
        for k in 0..y.len() {
            yp[k] += eps * x[k];
            ym[k] -= eps * x[k];
        }
        let (mut fp, mut fm) = (vec![0.0; y.len()], vec![0.0; y.len()]);
        sys.rhs(0.0, &yp, &mut fp);
        sys.rhs(0.0, &ym, &mut fm);
        let scale = jx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..y.len() {
            let fd = (fp[k] - fm[k]) / (2.0 * eps);
            assert!((fd - jx[k]).abs() <= 1e-5 * scale, "row {k}: {fd} vs {}", jx[k]);
        }
    }

    #[test]
    fn rhs_converges_at_second_order() {
        let ps = ParamSet::new(0.5, 0.1, 0.1, 1e-2, 0.0);
        let mut errs = Vec::new();
        for n in [250, 500, 1000] {
            let mut sys = system(n, ps);
            let g = *sys.grid();
            let y: Vec<f64> = g.nodes().iter().flat_map(|&x| profile(x).to_array()).collect();
            let mut dy = vec![0.0; y.len()];
            sys.rhs(0.0, &y, &mut dy);
            errs.push((g.dx(), diagnostics::max_abs_diff(&dy, &reference_rhs(&g, &ps))));
        }
        let order = diagnostics::convergence_order(&errs);
        assert!(order >= 1.9, "order {order}: {errs:?}");
    }

    fn profile(x: f64) -> State {
        let (s, c) = (std::f64::consts::PI * x).sin_cos();
        State::new(0.1 * s, 0.2 * c, 0.5 + 0.3 * s, 0.1 * c)
    }

    /// Continuous right-hand side `-f(Q)_x + S(Q, omega_x)` with `omega` from a
    /// spectrally accurate solve of the constraint, for a smooth periodic profile.
    fn reference_rhs(g: &Grid1D, ps: &ParamSet) -> Vec<f64> {
        let fe = FreeEnergy::QuarticDoubleWell;
        let x = g.nodes();
        let h = 1e-4;
        let mut out = Vec::new();
        // omega for c = 0.5 + 0.3 sin(pi x): single Fourier mode, k = pi
        let k = std::f64::consts::PI;
        let damp = 1.0 / (1.0 + ps.gamma * ps.beta * k * k);
        for &xi in &x {
            let fx = |x: f64| flux_unchecked(&profile(x), &fe, ps);
            let df = (fx(xi - 2.0 * h) - fx(xi - h) * 8.0 + fx(xi + h) * 8.0 - fx(xi + 2.0 * h)) * (1.0 / (12.0 * h));
            let omega_x = 0.3 * damp * k * (k * xi).cos();
            let s = source(&profile(xi), omega_x, 0.0, ps);
            out.extend_from_slice(&(s - df).to_array());
        }
        out
    }

    #[test]
    fn energy_rate_is_minus_the_friction() {
        let ps = ParamSet::new(0.3, 0.05, 1e-3, 1e-3, 0.0);
        let n = 80;
        let mut sys = system(n, ps);
        let x = sys.grid().nodes();
        let c: Vec<f64> = x.iter().map(|x| 0.7 * (std::f64::consts::PI * x).sin() + 0.2 * (3.0 * x).cos()).collect();
        let u: Vec<f64> = x.iter().map(|x| 0.4 + 0.3 * (2.0 * std::f64::consts::PI * x).cos()).collect();
        let p: Vec<f64> = x.iter().map(|x| 0.2 * (std::f64::consts::PI * x).cos()).collect();
        let mut y = sys.initial_state(&p, &u, &c).unwrap();
        for (k, q) in y.chunks_exact_mut(NC).enumerate() {
            q[3] += 0.1 * (k as f64 * 0.37).sin();
        }
        let mut f = vec![0.0; y.len()];
        sys.rhs(0.0, &y, &mut f);
        let eps = 1e-6;
        let shifted = |s: f64| -> Vec<f64> { y.iter().zip(&f).map(|(y, f)| y + s * f).collect() };
        let rate = (sys.observe(&shifted(eps)).energy - sys.observe(&shifted(-eps)).energy) / (2.0 * eps);
        let friction: f64 = y.chunks_exact(NC).map(|q| q[3] * q[3]).sum::<f64>() * sys.grid().dx() / 2.0;
        assert!((rate + friction).abs() <= 1e-6 * friction, "{rate} vs {}", -friction);
    }

    #[test]
    fn short_implicit_run_conserves_mass_and_dissipates() {
        let ps = ParamSet::new(1e-2, 1e-3, 1e-2, 1e-3, 0.0);
        let mut sys = system(100, ps);
        let x = sys.grid().nodes();
        let c: Vec<f64> = x.iter().map(|x| -(10.0 * (x.abs() - 0.5)).tanh()).collect();
        let y0 = sys.initial_state(&vec![0.0; 100], &vec![0.0; 100], &c).unwrap();
        let m0 = diagnostics::mass(&c, sys.grid());
        let cfg = IrkConfig { end_time: 0.01, ..IrkConfig::default() };
        let run = crate::implicit::run_implicit(y0, &mut sys, &cfg, &[], |_, _, _| {}).unwrap();
        let c1: Vec<f64> = run.y.chunks_exact(NC).map(|q| q[2]).collect();
        assert!((diagnostics::mass(&c1, sys.grid()) - m0).abs() <= 1e-12 * m0.abs().max(1.0));
        let e = run.log.energies();
        assert!(e.last().unwrap() < &e[0]);
    }
}
