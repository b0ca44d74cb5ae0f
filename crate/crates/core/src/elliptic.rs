//! Linear elliptic constraint `-gamma omega_xx + omega/beta = c/beta`.
//!
//! The three-point discretization is factorized once: Thomas elimination for
//! wall/extrapolation closures, plus a Sherman–Morrison rank-one correction
//! for the cyclic (periodic) matrix. Every solve is O(n).

use crate::error::SolverError;
use crate::params::{BoundaryKind, Grid1D};

/// LU factors of a tridiagonal matrix (no pivoting; the operators used here
/// are strictly diagonally dominant).
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    sub: Vec<f64>,
    /// Super-diagonal divided by the pivot of its row.
    sup_scaled: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl ThomasFactor {
    /// `sub[i]` multiplies `x[i-1]` in row `i` (`sub[0]` unused), `sup[i]`
    /// multiplies `x[i+1]` (`sup[n-1]` unused).
    pub fn new(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self, SolverError> {
        let n = diag.len();
        assert!(sub.len() == n && sup.len() == n, "tridiagonal bands must have equal length");
        let mut sup_scaled = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = diag[i] - if i > 0 { sub[i] * prev } else { 0.0 };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(SolverError::Singular { row: i });
            }
            inv_pivot[i] = 1.0 / pivot;
            prev = sup[i] * inv_pivot[i];
            sup_scaled[i] = prev;
        }
        Ok(ThomasFactor { sub: sub.to_vec(), sup_scaled, inv_pivot })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.sup_scaled[i] * x[i + 1];
        }
    }
}

/// Cyclic tridiagonal solve with constant off-diagonals `lower`/`upper`
/// including the corner entries, via Sherman–Morrison.
#[derive(Debug, Clone)]
pub struct CyclicFactor {
    inner: ThomasFactor,
    /// `B^{-1} u` for the rank-one update `A = B + u v^T`.
    z: Vec<f64>,
    v_last: f64,
    denom: f64,
}

impl CyclicFactor {
    pub fn new(lower: f64, diag: &[f64], upper: f64) -> Result<Self, SolverError> {
        let n = diag.len();
        // corner entries: A[0][n-1] = lower, A[n-1][0] = upper
        let corner_top = lower;
        let corner_bottom = upper;
        let shift = -diag[0];
        let mut d = diag.to_vec();
        d[0] -= shift;
        d[n - 1] -= corner_bottom * corner_top / shift;
        let sub = vec![lower; n];
        let sup = vec![upper; n];
        let inner = ThomasFactor::new(&sub, &d, &sup)?;
        let mut z = vec![0.0; n];
        z[0] = shift;
        z[n - 1] = corner_bottom;
        inner.solve_in_place(&mut z);
        let v_last = corner_top / shift;
        let denom = 1.0 + z[0] + v_last * z[n - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(SolverError::Singular { row: 0 });
        }
        Ok(CyclicFactor { inner, z, v_last, denom })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        self.inner.solve_in_place(x);
        let f = (x[0] + self.v_last * x[n - 1]) / self.denom;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= f * zi;
        }
    }
}

#[derive(Debug, Clone)]
enum Factorization {
    Open(ThomasFactor),
    Cyclic(CyclicFactor),
}

/// Factorized `-gamma D2 + I/beta` on a grid. Read-only after [`EllipticOperator::build`],
/// so one operator can be shared between threads.
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    grid: Grid1D,
    gamma: f64,
    beta: f64,
    factor: Factorization,
}

impl EllipticOperator {
    /// Periodic grids give a cyclic matrix; the other closures mirror the
    /// boundary value into the ghost cell (`omega_x = 0` on the boundary).
    pub fn build(grid: &Grid1D, gamma: f64, beta: f64) -> Result<Self, SolverError> {
        if !(gamma > 0.0 && beta > 0.0 && beta.is_finite()) {
            return Err(SolverError::Unsupported(format!(
                "elliptic operator needs gamma > 0 and finite beta > 0 (gamma = {gamma}, beta = {beta})"
            )));
        }
        let n = grid.n;
        let off = -gamma / (grid.dx() * grid.dx());
        let centre = -2.0 * off + 1.0 / beta;
        let factor = match grid.bc {
            BoundaryKind::Periodic => Factorization::Cyclic(CyclicFactor::new(off, &vec![centre; n], off)?),
            BoundaryKind::NonReflecting | BoundaryKind::WallNeumann => {
                let mut diag = vec![centre; n];
                diag[0] += off;
                diag[n - 1] += off;
                Factorization::Open(ThomasFactor::new(&vec![off; n], &diag, &vec![off; n])?)
            }
        };
        Ok(EllipticOperator { grid: *grid, gamma, beta, factor })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(diagonal, off-diagonal)` of the interior stencil.
    pub fn stencil(&self) -> (f64, f64) {
        let off = -self.gamma / (self.grid.dx() * self.grid.dx());
        (-2.0 * off + 1.0 / self.beta, off)
    }

    /// Solve into `omega`; `omega` doubles as the elimination workspace.
    pub fn solve_into(&self, c: &[f64], omega: &mut [f64]) {
        assert_eq!(c.len(), self.grid.n, "phase field length must match the grid");
        let ib = 1.0 / self.beta;
        for (o, ci) in omega.iter_mut().zip(c) {
            *o = ci * ib;
        }
        match &self.factor {
            Factorization::Open(f) => f.solve_in_place(omega),
            Factorization::Cyclic(f) => f.solve_in_place(omega),
        }
    }

    pub fn solve(&self, c: &[f64]) -> Vec<f64> {
        let mut omega = vec![0.0; c.len()];
        self.solve_into(c, &mut omega);
        omega
    }

    /// Apply the (unfactorized) operator, for residual checks.
    pub fn apply(&self, omega: &[f64], out: &mut [f64]) {
        let n = omega.len();
        let (centre, off) = self.stencil();
        for i in 0..n {
            let (l, r) = self.neighbours(omega, i);
            out[i] = centre * omega[i] + off * (l + r);
        }
    }

    #[inline]
    fn neighbours(&self, f: &[f64], i: usize) -> (f64, f64) {
        let n = f.len();
        match self.grid.bc {
            BoundaryKind::Periodic => (f[(i + n - 1) % n], f[(i + 1) % n]),
            _ => (f[i.saturating_sub(1)], f[(i + 1).min(n - 1)]),
        }
    }

    /// Second-order central derivative with the same boundary closure.
    pub fn gradient_into(&self, omega: &[f64], out: &mut [f64]) {
        let inv = 0.5 / self.grid.dx();
        for i in 0..omega.len() {
            let (l, r) = self.neighbours(omega, i);
            out[i] = (r - l) * inv;
        }
    }

    pub fn gradient(&self, omega: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; omega.len()];
        self.gradient_into(omega, &mut out);
        out
    }
}
