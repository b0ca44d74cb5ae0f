//! Three-stage Radau IIA (order 5) with simplified Newton iterations, an
//! embedded error estimate and step-size control.

use std::time::Instant;

use num_complex::Complex64;

use super::{ComplexSolver, IrkConfig, LinearSolver, Linearization, SemiDiscreteSystem};
use crate::diagnostics::{LogRow, TimeSeriesLog};
use crate::error::SolverError;

const SQRT_6: f64 = 2.449489742783178;

const ALPHA: f64 = 2.6810828736277521338957907432111121010270319565630;
const BETA: f64 = 3.0504301992474105694263776247875679044407041991795;
const GAMMA: f64 = 3.6378342527444957322084185135777757979459360868739;
const E0: f64 = -2.7623054547485993983499285952820549558040707846130;
const E1: f64 = 0.37993559825272887786874736408712686858426119657697;
const E2: f64 = -0.091629609865225789249276201199804926431531138001387;
const MU1: f64 = 0.15505102572168219018027159252941086080340525193433;
const MU2: f64 = 0.64494897427831780981972840747058913919659474806567;
const MU3: f64 = -0.84494897427831780981972840747058913919659474806567;
const MU4: f64 = -0.35505102572168219018027159252941086080340525193433;
const MU5: f64 = -0.48989794855663561963945681494117827839318949613133;

const C: [f64; 3] = [(4.0 - SQRT_6) / 10.0, (4.0 + SQRT_6) / 10.0, 1.0];

const T: [[f64; 3]; 3] = [
    [9.1232394870892942792e-02, -0.14125529502095420843, -3.0029194105147424492e-02],
    [0.24171793270710701896, 0.20412935229379993199, 0.38294211275726193779],
    [0.96604818261509293619, 1.0, 0.0],
];

const TI: [[f64; 3]; 3] = [
    [4.3255798900631553510, 0.33919925181580986954, 0.54177053993587487119],
    [-4.1787185915519047273, -0.32768282076106238708, 0.47662355450055045196],
    [-0.50287263494578687595, 2.5719269498556054292, -0.59603920482822492497],
];

const SAFETY: f64 = 0.9;
const JAC_REUSE_THETA: f64 = 1e-3;
const STEP_KEEP_RATIO: f64 = 1.2;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Outcome of one attempted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attempt {
    /// Newton converged; `err` is the scaled error estimate (accept if `<= 1`).
    Converged { err: f64, newton_iters: usize },
    /// Newton diverged, stalled, or produced non-finite values.
    NewtonFailed,
}

/// Integrator workspace (stage vectors and the collocation polynomial of the
/// last accepted step, used to start the next Newton iteration).
pub struct Radau5 {
    cfg: IrkConfig,
    n: usize,
    z: [Vec<f64>; 3],
    w: [Vec<f64>; 3],
    k: [Vec<f64>; 3],
    stage: Vec<f64>,
    rhs0: Vec<f64>,
    dw0: Vec<f64>,
    dw12: Vec<Complex64>,
    rhs12: Vec<Complex64>,
    work_re: Vec<f64>,
    work_c: Vec<Complex64>,
    scal: Vec<f64>,
    cont: [Vec<f64>; 3],
    h_prev: Option<f64>,
    eta: f64,
    theta: f64,
    /// Newton matrices for the step size they were built with.
    factors: Option<(f64, LinearSolver<f64>, ComplexSolver)>,
}

impl Radau5 {
    pub fn new(n: usize, cfg: IrkConfig) -> Self {
        let v = || vec![0.0; n];
        Radau5 {
            cfg,
            n,
            z: [v(), v(), v()],
            w: [v(), v(), v()],
            k: [v(), v(), v()],
            stage: v(),
            rhs0: v(),
            dw0: v(),
            dw12: vec![Complex64::new(0.0, 0.0); n],
            rhs12: vec![Complex64::new(0.0, 0.0); n],
            work_re: Vec::new(),
            work_c: Vec::new(),
            scal: v(),
            cont: [v(), v(), v()],
            h_prev: None,
            eta: 1.0,
            theta: 1.0,
            factors: None,
        }
    }

    /// Drop the cached Newton matrices, e.g. after a new linearization.
    pub fn reset_factors(&mut self) {
        self.factors = None;
    }

    /// Contraction rate of the last Newton iteration.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Solve the stage equations for a step of size `h` from `(t, y)` and
    /// estimate the local error. On convergence the new solution is
    /// `y + z3`, see [`Radau5::commit`].
    pub fn attempt<S: SemiDiscreteSystem + ?Sized>(
        &mut self,
        sys: &mut S,
        lin: &Linearization,
        t: f64,
        y: &[f64],
        f0: &[f64],
        h: f64,
        first_after_reject: bool,
    ) -> Result<Attempt, SolverError> {
        let (gam, alp, bet) = (GAMMA / h, ALPHA / h, BETA / h);
        if self.factors.as_ref().is_none_or(|f| f.0 != h) {
            self.factors = None;
            let (Ok(real), Ok(cplx)) = (lin.factor(gam), lin.factor(Complex64::new(alp, bet))) else {
                return Ok(Attempt::NewtonFailed);
            };
            self.factors = Some((h, real, cplx));
        }
        let (_, real, cplx) = self.factors.take().expect("factored above");
        let out = self.iterate(sys, &real, &cplx, t, y, f0, h, first_after_reject);
        self.factors = Some((h, real, cplx));
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn iterate<S: SemiDiscreteSystem + ?Sized>(
        &mut self,
        sys: &mut S,
        real: &LinearSolver<f64>,
        cplx: &ComplexSolver,
        t: f64,
        y: &[f64],
        f0: &[f64],
        h: f64,
        first_after_reject: bool,
    ) -> Result<Attempt, SolverError> {
        let n = self.n;
        let (gam, alp, bet) = (GAMMA / h, ALPHA / h, BETA / h);
        for i in 0..n {
            self.scal[i] = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs();
        }

        // starting values from the previous collocation polynomial
        match self.h_prev {
            Some(hp) => {
                let c3q = h / hp;
                let cq = [MU1 * c3q, MU2 * c3q, c3q];
                for i in 0..n {
                    let (a, b, c) = (self.cont[0][i], self.cont[1][i], self.cont[2][i]);
                    for s in 0..3 {
                        self.z[s][i] = cq[s] * (a + (cq[s] - MU4) * (b + (cq[s] - MU3) * c));
                    }
                }
            }
            None => {
                for s in 0..3 {
                    self.z[s].fill(0.0);
                }
            }
        }
        for i in 0..n {
            let z = [self.z[0][i], self.z[1][i], self.z[2][i]];
            for s in 0..3 {
                self.w[s][i] = TI[s][0] * z[0] + TI[s][1] * z[1] + TI[s][2] * z[2];
            }
        }

        let tol = self.cfg.newton_tol();
        self.eta = self.eta.max(f64::EPSILON).powf(0.8);
        self.theta = 0.0;
        let mut prev_norm = 0.0;
        let mut thq_old = 0.0;
        let mut converged_after = None;
        for iter in 1..=self.cfg.newton_max_iter {
            for s in 0..3 {
                for i in 0..n {
                    self.stage[i] = y[i] + self.z[s][i];
                }
                sys.rhs(t + C[s] * h, &self.stage, &mut self.k[s]);
            }
            if self.k.iter().any(|k| k.iter().any(|x| !x.is_finite())) {
                return Ok(Attempt::NewtonFailed);
            }
            for i in 0..n {
                let k = [self.k[0][i], self.k[1][i], self.k[2][i]];
                let tk = |r: usize| TI[r][0] * k[0] + TI[r][1] * k[1] + TI[r][2] * k[2];
                self.rhs0[i] = tk(0) - gam * self.w[0][i];
                let (w1, w2) = (self.w[1][i], self.w[2][i]);
                self.rhs12[i] = Complex64::new(tk(1) - alp * w1 + bet * w2, tk(2) - bet * w1 - alp * w2);
            }
            real.solve(&self.rhs0, &mut self.dw0, &mut self.work_re);
            cplx.solve(&self.rhs12, &mut self.dw12, &mut self.work_c);

            let mut sum = 0.0;
            for i in 0..n {
                let d = [self.dw0[i], self.dw12[i].re, self.dw12[i].im];
                self.w[0][i] += d[0];
                self.w[1][i] += d[1];
                self.w[2][i] += d[2];
                for s in 0..3 {
                    let dz = T[s][0] * d[0] + T[s][1] * d[1] + T[s][2] * d[2];
                    self.z[s][i] += dz;
                    let r = dz / self.scal[i];
                    sum += r * r;
                }
            }
            let norm = (sum / (3.0 * n as f64)).sqrt();
            if !norm.is_finite() {
                return Ok(Attempt::NewtonFailed);
            }
            if iter > 1 {
                let thq = norm / prev_norm;
                self.theta = if iter == 2 { thq } else { (thq * thq_old).sqrt() };
                thq_old = thq;
                if self.theta >= 0.99 {
                    return Ok(Attempt::NewtonFailed);
                }
                self.eta = self.theta / (1.0 - self.theta);
            }
            prev_norm = norm;
            if self.eta * norm <= tol || norm == 0.0 {
                converged_after = Some(iter);
                break;
            }
        }
        let Some(newton_iters) = converged_after else {
            return Ok(Attempt::NewtonFailed);
        };

        // embedded error estimate, filtered through (gamma/h - J)^{-1}
        let mut ez = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            ez[i] = gam * (E0 * self.z[0][i] + E1 * self.z[1][i] + E2 * self.z[2][i]);
            rhs[i] = ez[i] + f0[i];
        }
        let mut err = vec![0.0; n];
        real.solve(&rhs, &mut err, &mut self.work_re);
        let mut e = self.rms(&err);
        if e >= 1.0 && (self.h_prev.is_none() || first_after_reject) {
            for i in 0..n {
                self.stage[i] = y[i] + err[i];
            }
            let mut fpe = vec![0.0; n];
            sys.rhs(t, &self.stage, &mut fpe);
            for i in 0..n {
                rhs[i] = ez[i] + fpe[i];
            }
            real.solve(&rhs, &mut err, &mut self.work_re);
            e = self.rms(&err);
        }
        if !e.is_finite() {
            return Ok(Attempt::NewtonFailed);
        }
        Ok(Attempt::Converged { err: e, newton_iters })
    }

    fn rms(&self, v: &[f64]) -> f64 {
        let s: f64 = v.iter().zip(&self.scal).map(|(x, s)| (x / s) * (x / s)).sum();
        (s / self.n as f64).sqrt().max(1e-10)
    }

    /// Accept the converged step: `y += z3` and keep the collocation polynomial.
    pub fn commit(&mut self, y: &mut [f64], h: f64) {
        for i in 0..self.n {
            let (z0, z1, z2) = (self.z[0][i], self.z[1][i], self.z[2][i]);
            y[i] += z2;
            let c0 = (z1 - z2) / MU4;
            let c1 = ((z0 - z1) / MU5 - c0) / MU3;
            let c2 = c1 - ((z0 - z1) / MU5 - z0 / MU1) / MU2;
            self.cont[0][i] = c0;
            self.cont[1][i] = c1;
            self.cont[2][i] = c2;
        }
        self.h_prev = Some(h);
    }

    /// Step-size factor `h_new / h` for an error estimate `err`.
    pub fn step_factor(&self, err: f64, newton_iters: usize) -> f64 {
        let nit = self.cfg.newton_max_iter;
        let fac = SAFETY.min(SAFETY * (1 + 2 * nit) as f64 / (newton_iters + 2 * nit) as f64);
        let quot = (err.powf(0.25) / fac).clamp(FAC_MIN, FAC_MAX);
        1.0 / quot
    }
}

/// One Radau IIA step of fixed size `dt`; returns the new state and the
/// scaled error estimate.
pub fn radau5_step<S: SemiDiscreteSystem + ?Sized>(
    sys: &mut S,
    y: &[f64],
    t: f64,
    dt: f64,
    cfg: &IrkConfig,
) -> Result<(Vec<f64>, f64), SolverError> {
    let mut f0 = vec![0.0; y.len()];
    sys.rhs(t, y, &mut f0);
    let lin = sys.linearize(t, y, &f0)?;
    let mut stepper = Radau5::new(y.len(), *cfg);
    match stepper.attempt(sys, &lin, t, y, &f0, dt, false)? {
        Attempt::Converged { err, .. } => {
            let mut out = y.to_vec();
            stepper.commit(&mut out, dt);
            Ok((out, err))
        }
        Attempt::NewtonFailed => Err(SolverError::NewtonFailure { t, dt }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitRun {
    pub y: Vec<f64>,
    pub t: f64,
    pub log: TimeSeriesLog,
    pub accepted: usize,
    pub rejected: usize,
    pub newton_failures: usize,
    pub min_dt: f64,
    pub wall_time: f64,
}

/// Adaptive integration to `cfg.end_time`, stopping exactly at each
/// requested snapshot time. On failure the error is returned together with
/// the last accepted state.
pub fn run_implicit<S: SemiDiscreteSystem + ?Sized>(
    y0: Vec<f64>,
    sys: &mut S,
    cfg: &IrkConfig,
    snapshot_times: &[f64],
    mut on_snapshot: impl FnMut(&mut S, f64, &[f64]),
) -> Result<ImplicitRun, (SolverError, ImplicitRun)> {
    let started = Instant::now();
    let n = sys.dim();
    assert_eq!(y0.len(), n, "initial state has the wrong dimension");
    let end = cfg.end_time;
    let dt_max = cfg.dt_max();
    let mut targets: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t > 0.0 && t <= end).collect();
    targets.push(end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let mut run = ImplicitRun {
        y: y0,
        t: 0.0,
        log: TimeSeriesLog::default(),
        accepted: 0,
        rejected: 0,
        newton_failures: 0,
        min_dt: f64::INFINITY,
        wall_time: 0.0,
    };
    let row = |sys: &mut S, t: f64, dt: f64, y: &[f64], iters: usize| {
        let o = sys.observe(y);
        LogRow {
            t,
            dt,
            energy: o.energy,
            mass_c: o.mass_c,
            smax: 0.0,
            newton_iters: iters,
            l2_c_omega: o.l2_c_omega,
        }
    };
    let r0 = row(sys, 0.0, 0.0, &run.y, 0);
    run.log.push(r0);
    if snapshot_times.contains(&0.0) {
        on_snapshot(sys, 0.0, &run.y);
    }
    let mut next = 0;

    let mut stepper = Radau5::new(n, *cfg);
    let mut f0 = vec![0.0; n];
    sys.rhs(0.0, &run.y, &mut f0);
    let mut lin: Option<Linearization> = None;
    // whether `lin` was computed at the current state
    let mut fresh = false;
    let mut h = cfg.dt_init.min(dt_max);
    let mut after_reject = false;
    while run.t < end {
        let target = targets[next];
        let mut step = h.min(dt_max);
        let clipped = run.t + step >= target - 1e-12 * target.abs().max(1.0);
        if clipped {
            step = target - run.t;
        }
        if lin.is_none() {
            match sys.linearize(run.t, &run.y, &f0) {
                Ok(l) => lin = Some(l),
                Err(e) => return Err((e, finish(run, started))),
            }
            stepper.reset_factors();
            fresh = true;
        }
        let attempt = stepper.attempt(sys, lin.as_ref().unwrap(), run.t, &run.y, &f0, step, after_reject);
        let attempt = match attempt {
            Ok(a) => a,
            Err(e) => return Err((e, finish(run, started))),
        };
        match attempt {
            Attempt::Converged { err, newton_iters } if err <= 1.0 => {
                stepper.commit(&mut run.y, step);
                run.t = if clipped { target } else { run.t + step };
                run.accepted += 1;
                run.min_dt = run.min_dt.min(step);
                sys.rhs(run.t, &run.y, &mut f0);
                after_reject = false;
                let r = row(sys, run.t, step, &run.y, newton_iters);
                run.log.push(r);
                // keep the Jacobian while Newton contracts fast, and the step
                // size (hence the factorization) when it would barely change
                let keep_jac = stepper.theta() <= JAC_REUSE_THETA;
                if keep_jac {
                    fresh = false;
                } else {
                    lin = None;
                }
                let fac = stepper.step_factor(err, newton_iters);
                let grown = if keep_jac && (1.0..=STEP_KEEP_RATIO).contains(&fac) { step } else { step * fac };
                h = if clipped { h.max(grown) } else { grown };
                if clipped {
                    if snapshot_times.contains(&target) {
                        on_snapshot(sys, run.t, &run.y);
                    }
                    next += 1;
                }
            }
            Attempt::Converged { err, newton_iters } => {
                run.rejected += 1;
                after_reject = true;
                if !fresh {
                    lin = None;
                }
                h = if err.is_finite() { step * stepper.step_factor(err, newton_iters) } else { 0.5 * step };
            }
            Attempt::NewtonFailed => {
                run.newton_failures += 1;
                after_reject = true;
                if !fresh {
                    lin = None;
                }
                h = 0.5 * step;
            }
        }
        if h < cfg.dt_min {
            let t = run.t;
            return Err((SolverError::NewtonFailure { t, dt: h }, finish(run, started)));
        }
    }
    Ok(finish(run, started))
}

fn finish(mut run: ImplicitRun, started: Instant) -> ImplicitRun {
    run.wall_time = started.elapsed().as_secs_f64();
    run
}

#[cfg(test)]
mod tests {
    use super::super::{Linearization, Observation};
    use super::*;
    use crate::diagnostics::convergence_order;

    /// `y' = -lambda (y - sin t) + cos t`, exact solution `sin t` from `y(0) = 0`.
    struct Prothero {
        lambda: f64,
    }

    impl SemiDiscreteSystem for Prothero {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -self.lambda * (y[0] - t.sin()) + t.cos();
        }
        fn linearize(&mut self, _t: f64, _y: &[f64], _f0: &[f64]) -> Result<Linearization, SolverError> {
            let mut lin = Linearization::ring(1, 1, 0, 0);
            lin.neg_jac.add(0, 0, self.lambda);
            Ok(lin)
        }
        fn observe(&mut self, y: &[f64]) -> Observation {
            Observation { energy: 0.5 * y[0] * y[0], ..Default::default() }
        }
    }

    /// Linear 2x2 test system, exact solution by matrix exponential.
    struct Oscillator;

    impl SemiDiscreteSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
        fn linearize(&mut self, _t: f64, _y: &[f64], _f0: &[f64]) -> Result<Linearization, SolverError> {
            let mut lin = Linearization::ring(1, 2, 0, 0);
            lin.neg_jac.add(0, 1, -1.0);
            lin.neg_jac.add(1, 0, 1.0);
            Ok(lin)
        }
        fn observe(&mut self, y: &[f64]) -> Observation {
            Observation { energy: 0.5 * (y[0] * y[0] + y[1] * y[1]), ..Default::default() }
        }
    }

    fn fixed_step_error(lambda: f64, steps: usize, t_end: f64) -> f64 {
        let cfg = IrkConfig { newton_tol: Some(1e-14), rel_tol: 1e-12, abs_tol: 1e-12, newton_max_iter: 20, ..Default::default() };
        let mut sys = Prothero { lambda };
        let dt = t_end / steps as f64;
        let mut y = vec![0.0];
        for k in 0..steps {
            y = radau5_step(&mut sys, &y, k as f64 * dt, dt, &cfg).unwrap().0;
        }
        (y[0] - t_end.sin()).abs()
    }

    #[test]
    fn fifth_order_on_smooth_problem() {
        let data: Vec<(f64, f64)> = [4, 8, 16, 32].iter().map(|&s| (2.0 / s as f64, fixed_step_error(10.0, s, 2.0))).collect();
        let order = convergence_order(&data);
        assert!(order >= 4.7, "observed order {order}, data {data:?}");
    }

    #[test]
    fn stiff_problem_is_stable_and_accurate() {
        for lambda in [1e4, 1e8] {
            let err = fixed_step_error(lambda, 10, 1.0);
            assert!(err < 1e-6, "lambda {lambda}: {err}");
        }
    }

    #[test]
    fn adaptive_run_hits_snapshots() {
        let cfg = IrkConfig { end_time: 2.0, rel_tol: 1e-8, abs_tol: 1e-8, ..Default::default() };
        let mut sys = Oscillator;
        let mut seen = Vec::new();
        let run = run_implicit(vec![0.0, 1.0], &mut sys, &cfg, &[0.0, 0.5, 1.25], |_, t, _| seen.push(t)).unwrap();
        assert_eq!(seen, vec![0.0, 0.5, 1.25]);
        assert_eq!(run.t, 2.0);
        assert!((run.y[0] - 2.0f64.sin()).abs() < 1e-6 && (run.y[1] - 2.0f64.cos()).abs() < 1e-6);
        assert!(run.log.rows.windows(2).all(|w| w[1].t > w[0].t));
        assert!(run.log.rows.iter().all(|r| r.dt <= cfg.dt_max() * (1.0 + 1e-12)));
    }

    #[test]
    fn stiff_adaptive_run_takes_large_steps() {
        let cfg = IrkConfig { end_time: 3.0, ..Default::default() };
        let mut sys = Prothero { lambda: 1e8 };
        let run = run_implicit(vec![0.0], &mut sys, &cfg, &[], |_, _, _| {}).unwrap();
        assert!((run.y[0] - 3.0f64.sin()).abs() < 1e-5);
        assert!(run.accepted < 200, "{} steps", run.accepted);
    }
}
