//! Flux, source, flux Jacobian, characteristic polynomial, spectrum and
//! entropy pair of the conservative first-order system
//! `Q_t + f(Q)_x = S(Q, omega)` with `Q = (p, u, c, v)`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::free_energy::FreeEnergy;
use crate::params::ParamSet;
use crate::state::State;

/// Relative size of the imaginary part below which an eigenvalue counts as real.
pub const REAL_ROOT_TOL: f64 = 1e-9;

/// `f(Q) = (u/alpha, 3/4 u^2 + p + G(c), c u + v, (W'(c) + c/beta)/delta)`.
pub fn flux(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<State, DomainError> {
    fe.check(q.c)?;
    Ok(flux_unchecked(q, fe, ps))
}

#[inline]
pub(crate) fn flux_unchecked(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> State {
    let ib = ps.inv_beta();
    State {
        p: q.u / ps.alpha,
        u: 0.75 * q.u * q.u + q.p + fe.g_unchecked(q.c, ps.beta),
        c: q.c * q.u + q.v,
        v: (fe.wp_unchecked(q.c) + q.c * ib) / ps.delta,
    }
}

/// Source `S(Q, omega) = (0, c omega_x / beta + nu u_xx, 0, -v/delta + omega_x/(delta beta))`.
///
/// The friction term carries the damping sign `-v/delta` of the evolution
/// equation for the flux variable.
pub fn source(q: &State, omega_x: f64, u_xx: f64, ps: &ParamSet) -> State {
    let ib = ps.inv_beta();
    State {
        p: 0.0,
        u: q.c * omega_x * ib + ps.nu * u_xx,
        c: 0.0,
        v: (-q.v + omega_x * ib) / ps.delta,
    }
}

/// Analytic flux Jacobian `Df(Q)`.
pub fn flux_jacobian(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<Matrix4<f64>, DomainError> {
    fe.check(q.c)?;
    let ib = ps.inv_beta();
    let wpp = fe.wpp_unchecked(q.c);
    let gp = q.c * wpp + q.c * ib;
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, 1.0 / ps.alpha, 0.0, 0.0,
        1.0, 1.5 * q.u,      gp,  0.0,
        0.0, q.c,            q.u, 1.0,
        0.0, 0.0, (wpp + ib) / ps.delta, 0.0,
    );
    Ok(m)
}

/// Monic quartic `l^4 + a3 l^3 + a2 l^2 + a1 l + a0`, stored from the
/// leading coefficient down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic4 {
    pub coeffs: [f64; 5],
}

impl Quartic4 {
    pub fn monic(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Quartic4 { coeffs: [1.0, a3, a2, a1, a0] }
    }

    #[inline]
    pub fn eval(&self, l: f64) -> f64 {
        let [a4, a3, a2, a1, a0] = self.coeffs;
        (((a4 * l + a3) * l + a2) * l + a1) * l + a0
    }

    #[inline]
    fn eval_with_derivative(&self, l: f64) -> (f64, f64) {
        let [a4, a3, a2, a1, a0] = self.coeffs;
        let p = (((a4 * l + a3) * l + a2) * l + a1) * l + a0;
        let dp = ((4.0 * a4 * l + 3.0 * a3) * l + 2.0 * a2) * l + a1;
        (p, dp)
    }

    /// `p(-l)`, monic again since the degree is even.
    fn reflected(&self) -> Quartic4 {
        let [a4, a3, a2, a1, a0] = self.coeffs;
        Quartic4 { coeffs: [a4, -a3, a2, -a1, a0] }
    }

    pub fn companion(&self) -> Matrix4<f64> {
        let [_, a3, a2, a1, a0] = self.coeffs;
        #[rustfmt::skip]
        let m = Matrix4::new(
            0.0, 0.0, 0.0, -a0,
            1.0, 0.0, 0.0, -a1,
            0.0, 1.0, 0.0, -a2,
            0.0, 0.0, 1.0, -a3,
        );
        m
    }

    /// Fujiwara bound on the modulus of every root.
    pub fn root_bound(&self) -> f64 {
        let [_, a3, a2, a1, a0] = self.coeffs;
        2.0 * a3.abs().max(a2.abs().sqrt()).max(a1.abs().cbrt()).max((0.5 * a0.abs()).powf(0.25))
    }

    /// Roots via the eigenvalues of the companion matrix, sorted.
    pub fn roots(&self) -> [Complex64; 4] {
        let ev = self.companion().complex_eigenvalues();
        let mut r = [ev[0], ev[1], ev[2], ev[3]];
        sort_spectrum(&mut r);
        r
    }

    /// Largest real root by Newton's method from above. Only meaningful when
    /// every root is real; then the iteration decreases monotonically and every
    /// iterate is an upper bound.
    fn largest_real_root(&self) -> f64 {
        let mut l = self.root_bound();
        for _ in 0..200 {
            let (p, dp) = self.eval_with_derivative(l);
            if dp <= 0.0 || p <= 0.0 {
                break;
            }
            let step = p / dp;
            l -= step;
            if step <= 1e-13 * l.abs().max(1.0) {
                break;
            }
        }
        l
    }
}

/// Sort by real part, ties by imaginary part.
pub fn sort_spectrum(r: &mut [Complex64]) {
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Characteristic polynomial `det(Df - l I)`.
pub fn char_poly(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<Quartic4, DomainError> {
    fe.check(q.c)?;
    Ok(char_poly_unchecked(q, fe, ps))
}

#[inline]
fn char_poly_unchecked(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Quartic4 {
    let k = fe.wpp_unchecked(q.c) + ps.inv_beta();
    let (u, c) = (q.u, q.c);
    let (ia, id) = (1.0 / ps.alpha, 1.0 / ps.delta);
    Quartic4::monic(
        -2.5 * u,
        1.5 * u * u - k * (id + c * c) - ia,
        1.5 * u * id * k + u * ia,
        ia * id * k,
    )
}

/// Eigenvalues of the flux Jacobian, sorted, with a hyperbolicity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub values: [Complex64; 4],
    pub is_hyperbolic: bool,
}

impl Spectrum {
    fn from_values(values: [Complex64; 4]) -> Self {
        let is_hyperbolic = values.iter().all(|z| z.im.abs() <= REAL_ROOT_TOL * z.norm().max(1.0));
        Spectrum { values, is_hyperbolic }
    }

    pub fn max_abs_real(&self) -> f64 {
        self.values.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Roots of the characteristic polynomial from the companion matrix.
pub fn eigenvalues(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<Spectrum, DomainError> {
    Ok(Spectrum::from_values(char_poly(q, fe, ps)?.roots()))
}

/// Bound on the wave speeds at `q` for the CFL condition and the Rusanov
/// dissipation, together with the hyperbolicity flag.
///
/// Where the entropy is strictly convex (`W'' + 1/beta > 0`) the spectrum is
/// real and the extreme roots are found by monotone Newton iterations on the
/// characteristic polynomial; elsewhere the companion eigenvalues are used and
/// the modulus covers any complex pair.
#[inline]
pub fn max_wave_speed(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> (f64, bool) {
    let poly = char_poly_unchecked(q, fe, ps);
    if fe.wpp_unchecked(q.c) + ps.inv_beta() > 0.0 {
        let hi = poly.largest_real_root();
        let lo = -poly.reflected().largest_real_root();
        (hi.abs().max(lo.abs()), true)
    } else {
        let s = Spectrum::from_values(poly.roots());
        if s.is_hyperbolic {
            (s.max_abs_real(), true)
        } else {
            (s.max_modulus(), false)
        }
    }
}

/// Mathematical entropy `eta(Q) = alpha/2 p^2 + u^2/2 + W(c) + c^2/(2 beta) + delta/2 v^2`.
pub fn entropy_eta(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<f64, DomainError> {
    let w = fe.w(q.c)?;
    Ok(0.5 * ps.alpha * q.p * q.p + 0.5 * q.u * q.u + w + 0.5 * q.c * q.c * ps.inv_beta() + 0.5 * ps.delta * q.v * q.v)
}

/// Entropy flux `q(Q) = p u + u^3/2 + c (W' + c/beta) u + (W' + c/beta) v`.
pub fn entropy_q(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<f64, DomainError> {
    let m = fe.wp(q.c)? + q.c * ps.inv_beta();
    Ok(q.p * q.u + 0.5 * q.u * q.u * q.u + q.c * m * q.u + m * q.v)
}

/// Entropy variables `grad eta = (alpha p, u, W' + c/beta, delta v)`.
pub fn entropy_gradient(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<Vector4<f64>, DomainError> {
    let m = fe.wp(q.c)? + q.c * ps.inv_beta();
    Ok(Vector4::new(ps.alpha * q.p, q.u, m, ps.delta * q.v))
}

/// Diagonal of the entropy Hessian, `(alpha, 1, W'' + 1/beta, delta)`.
pub fn entropy_hessian_diag(q: &State, fe: &FreeEnergy, ps: &ParamSet) -> Result<[f64; 4], DomainError> {
    Ok([ps.alpha, 1.0, fe.wpp(q.c)? + ps.inv_beta(), ps.delta])
}

/// Parameter swept along the vertical axis of a sign plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Alpha,
    Delta,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Delta => "delta",
        }
    }

    pub fn apply(&self, base: &ParamSet, value: f64) -> ParamSet {
        let mut ps = *base;
        match self {
            SweepAxis::Alpha => ps.alpha = value,
            SweepAxis::Delta => ps.delta = value,
        }
        ps
    }
}

/// Request for a sign plot of the characteristic polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct SignGridSpec {
    pub fe: FreeEnergy,
    pub base: ParamSet,
    pub state: State,
    pub lambda_range: (f64, f64),
    pub n_lambda: usize,
    pub axis: SweepAxis,
    pub param_range: (f64, f64),
    pub n_param: usize,
}

/// `sgn p(lambda; Q)` over a (parameter, lambda) lattice, row-major by parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SignGrid {
    pub axis: SweepAxis,
    pub lambdas: Vec<f64>,
    pub params: Vec<f64>,
    pub signs: Vec<i8>,
}

impl SignGrid {
    pub fn row(&self, j: usize) -> &[i8] {
        let n = self.lambdas.len();
        &self.signs[j * n..(j + 1) * n]
    }

    /// Lambda positions (midpoints) where the sign flips along row `j`.
    pub fn sign_changes(&self, j: usize) -> Vec<f64> {
        let row = self.row(j);
        let mut out = Vec::new();
        let mut last: Option<(usize, i8)> = None;
        for (i, &s) in row.iter().enumerate() {
            if s == 0 {
                continue;
            }
            if let Some((k, t)) = last {
                if t != s {
                    out.push(0.5 * (self.lambdas[k] + self.lambdas[i]));
                }
            }
            last = Some((i, s));
        }
        out
    }

    /// Long-form CSV with header `lambda,param,sign`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "lambda,param,sign")?;
        for (j, &param) in self.params.iter().enumerate() {
            for (&l, &s) in self.lambdas.iter().zip(self.row(j)) {
                writeln!(w, "{l:?},{param:?},{s}")?;
            }
        }
        Ok(())
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn sign_grid(spec: &SignGridSpec) -> Result<SignGrid, DomainError> {
    spec.fe.check(spec.state.c)?;
    let lambdas = linspace(spec.lambda_range.0, spec.lambda_range.1, spec.n_lambda);
    let params = linspace(spec.param_range.0, spec.param_range.1, spec.n_param);
    let rows: Vec<Vec<i8>> = params
        .par_iter()
        .map(|&value| {
            let ps = spec.axis.apply(&spec.base, value);
            let poly = char_poly_unchecked(&spec.state, &spec.fe, &ps);
            lambdas.iter().map(|&l| sign(poly.eval(l))).collect()
        })
        .collect();
    Ok(SignGrid { axis: spec.axis, lambdas, params, signs: rows.concat() })
}

/// Sign-plot preset by name or alias (quartic energy, `beta = 0.01`).
pub fn sign_grid_preset(name: &str) -> Option<SignGridSpec> {
    let name = PRESET_ALIASES.iter().find(|(alias, _)| *alias == name).map_or(name, |(_, target)| target);
    let (u, c, axis, fixed) = match name {
        "rest-alpha" => (0.0, 1.0, SweepAxis::Alpha, 0.09),
        "rest-delta" => (0.0, 1.0, SweepAxis::Delta, 0.01),
        "left-alpha" => (-15.0, 1.0, SweepAxis::Alpha, 0.09),
        "left-delta" => (-15.0, 1.0, SweepAxis::Delta, 0.01),
        "right-alpha" => (12.0, 1.0, SweepAxis::Alpha, 0.01),
        "right-delta" => (12.0, 1.0, SweepAxis::Delta, 0.01),
        "spinodal-alpha" => (0.0, -0.5, SweepAxis::Alpha, 0.01),
        "spinodal-delta" => (0.0, -0.5, SweepAxis::Delta, 0.01),
        _ => return None,
    };
    // the fixed parameter is delta for alpha sweeps and alpha for delta sweeps
    let base = match axis {
        SweepAxis::Alpha => ParamSet::new(0.01, fixed, 0.01, 1e-3, 0.0),
        SweepAxis::Delta => ParamSet::new(fixed, 0.01, 0.01, 1e-3, 0.0),
    };
    let fe = FreeEnergy::QuarticDoubleWell;
    let state = State::new(0.0, u, c, 0.0);
    let param_range = (0.001, 0.01);
    let reach = linspace(param_range.0, param_range.1, 16)
        .into_iter()
        .map(|v| max_wave_speed(&state, &fe, &axis.apply(&base, v)).0)
        .fold(0.0, f64::max);
    let half = (1.25 * reach / 10.0).ceil() * 10.0;
    Some(SignGridSpec {
        fe,
        base,
        state,
        lambda_range: (-half, half),
        n_lambda: 800,
        axis,
        param_range,
        n_param: 400,
    })
}

/// Sign-plot presets: resting, left- and right-moving fluid at `c = 1`, and
/// a spinodal state, each swept in `alpha` or `delta`.
pub const SIGN_GRID_PRESETS: [&str; 8] = [
    "rest-alpha",
    "rest-delta",
    "left-alpha",
    "left-delta",
    "right-alpha",
    "right-delta",
    "spinodal-alpha",
    "spinodal-delta",
];

/// Short numbered names accepted for the presets above, in the same order.
pub const PRESET_ALIASES: [(&str, &str); 8] = [
    ("fig4", "rest-alpha"),
    ("fig5", "rest-delta"),
    ("fig6", "left-alpha"),
    ("fig7", "left-delta"),
    ("fig8", "right-alpha"),
    ("fig9", "right-delta"),
    ("fig10", "spinodal-alpha"),
    ("fig11", "spinodal-delta"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quartic() -> FreeEnergy {
        FreeEnergy::QuarticDoubleWell
    }

    #[test]
    fn flux_at_pure_phase() {
        let ps = ParamSet::new(0.3, 1.0, 0.01, 1e-3, 0.0);
        let f = flux(&State::new(0.0, 0.0, 1.0, 0.0), &quartic(), &ps).unwrap();
        assert_eq!(f.p, 0.0);
        assert_relative_eq!(f.u, 50.25, max_relative = 1e-14);
        assert_eq!(f.c, 0.0);
        assert_relative_eq!(f.v, 100.0, max_relative = 1e-14);
        let f = flux(&State::new(3.0, 0.0, 0.4, 2.0), &FreeEnergy::ConvexReciprocal, &ps).unwrap();
        assert_eq!(f.p, 0.0);
    }

    #[test]
    fn flux_rejects_inadmissible() {
        let ps = ParamSet::new(0.3, 1.0, 0.01, 1e-3, 0.0);
        assert!(flux(&State::new(0.0, 0.0, -0.1, 0.0), &FreeEnergy::ConvexReciprocal, &ps).is_err());
    }

    #[test]
    fn source_examples() {
        let ps = ParamSet::new(0.3, 0.0625, 0.1, 1e-3, 0.0);
        assert_eq!(source(&State::new(1.0, 2.0, 0.5, 0.0), 0.0, 0.0, &ps), State::ZERO);
        let s = source(&State::new(0.0, 0.0, 0.5, 1.0), 0.0, 0.0, &ps);
        assert_relative_eq!(s.v, -16.0, max_relative = 1e-14);
        let s = source(&State::new(0.0, 0.0, 2.0, 0.0), 0.5, 0.0, &ps);
        assert_relative_eq!(s.u, 10.0, max_relative = 1e-14);
    }

    #[test]
    fn jacobian_structure() {
        let ps = ParamSet::new(0.2, 0.3, 0.5, 1e-3, 0.0);
        let q = State::new(0.1, -0.7, 0.4, 0.2);
        let j = flux_jacobian(&q, &quartic(), &ps).unwrap();
        assert_eq!(j.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 5.0, 0.0, 0.0]);
        let wpp = quartic().wpp(0.4).unwrap();
        assert_relative_eq!(j[(3, 2)], (wpp + 2.0) / 0.3, max_relative = 1e-14);
    }

    #[test]
    fn biquadratic_at_rest() {
        let ps = ParamSet::new(0.5, 0.1, 0.3, 1e-3, 0.0);
        let p = char_poly(&State::new(1.0, 0.0, 0.3, 4.0), &quartic(), &ps).unwrap();
        assert_eq!(p.coeffs[1], 0.0);
        assert_eq!(p.coeffs[3], 0.0);
    }

    #[test]
    fn example_roots_are_two_symmetric_pairs() {
        let ps = ParamSet::new(0.01, 0.09, 0.01, 1e-3, 0.0);
        let s = eigenvalues(&State::new(0.0, 0.0, 1.0, 0.0), &quartic(), &ps).unwrap();
        assert!(s.is_hyperbolic);
        // closed form of the biquadratic
        let k: f64 = 2.0 + 100.0;
        let b = -k * (1.0 / 0.09 + 1.0) - 1.0 / 0.01;
        let c = k / (0.01 * 0.09);
        let disc = (b * b - 4.0 * c).sqrt();
        let outer = ((-b + disc) / 2.0).sqrt();
        let inner = ((-b - disc) / 2.0).sqrt();
        assert!(outer > inner && inner > 0.0);
        let r: Vec<f64> = s.values.iter().map(|z| z.re).collect();
        assert_relative_eq!(r[0], -outer, max_relative = 1e-10);
        assert_relative_eq!(r[1], -inner, max_relative = 1e-10);
        assert_relative_eq!(r[2], inner, max_relative = 1e-10);
        assert_relative_eq!(r[3], outer, max_relative = 1e-10);
    }

    #[test]
    fn fast_wave_speed_matches_spectrum() {
        for (u, c, alpha, delta, beta) in [
            (0.0, 1.0, 0.5, 0.0625, f64::INFINITY),
            (1.0, 1.0, 0.05, 0.0625, f64::INFINITY),
            (-0.4, 2.0, 0.1, 1e-6, f64::INFINITY),
            (3.0, 0.2, 0.01, 0.09, 0.01),
            (-15.0, 1.0, 0.002, 0.005, 0.01),
        ] {
            let fe = if c > 0.0 && beta.is_infinite() { FreeEnergy::ConvexReciprocal } else { quartic() };
            let ps = ParamSet::new(alpha, delta, beta, 1e-3, 0.0);
            let q = State::new(0.3, u, c, -0.1);
            let (fast, hyp) = max_wave_speed(&q, &fe, &ps);
            let s = eigenvalues(&q, &fe, &ps).unwrap();
            assert!(hyp && s.is_hyperbolic);
            assert_relative_eq!(fast, s.max_abs_real(), max_relative = 1e-9);
        }
    }

    #[test]
    fn nonconvex_state_falls_back_to_modulus() {
        // beta large, c in the spinodal region: W'' + 1/beta < 0
        let ps = ParamSet::new(0.1, 0.1, 100.0, 1e-3, 0.0);
        let q = State::new(0.0, 0.0, 0.0, 0.0);
        let (s, hyp) = max_wave_speed(&q, &quartic(), &ps);
        assert!(!hyp);
        let spec = eigenvalues(&q, &quartic(), &ps).unwrap();
        assert!(!spec.is_hyperbolic);
        assert_relative_eq!(s, spec.max_modulus(), max_relative = 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let ps = ParamSet::new(0.3, 0.2, 0.01, 1e-3, 0.0);
        let q = State::new(0.0, 0.0, 1.0, 0.0);
        assert_relative_eq!(entropy_eta(&q, &quartic(), &ps).unwrap(), 50.0, max_relative = 1e-14);
        assert_eq!(entropy_eta(&State::ZERO, &quartic(), &ps).unwrap(), 0.25);
        assert_eq!(entropy_q(&State::ZERO, &quartic(), &ps).unwrap(), 0.0);
    }

    #[test]
    fn compatibility_at_pure_phase() {
        for beta in [0.01, 0.3, 0.9] {
            let ps = ParamSet::new(0.3, 0.2, beta, 1e-3, 0.0);
            let q = State::new(0.0, 0.0, 1.0, 0.0);
            let grad = entropy_gradient(&q, &quartic(), &ps).unwrap();
            let lhs = flux_jacobian(&q, &quartic(), &ps).unwrap().transpose() * grad;
            let expect = [0.0, 1.0 / beta, 0.0, 1.0 / beta];
            for k in 0..4 {
                assert_relative_eq!(lhs[k], expect[k], max_relative = 1e-12, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn sign_grid_rows_count_roots() {
        let spec = SignGridSpec { n_lambda: 400, n_param: 20, ..sign_grid_preset("rest-alpha").unwrap() };
        let grid = sign_grid(&spec).unwrap();
        for j in 0..grid.params.len() {
            let ps = spec.axis.apply(&spec.base, grid.params[j]);
            let s = eigenvalues(&spec.state, &spec.fe, &ps).unwrap();
            let changes = grid.sign_changes(j);
            assert_eq!(changes.len(), 4);
            let dl = grid.lambdas[1] - grid.lambdas[0];
            for (x, z) in changes.iter().zip(s.values.iter()) {
                assert!((x - z.re).abs() <= dl);
            }
            // u = 0: the row is even in lambda
            let row = grid.row(j);
            let n = row.len();
            let mismatches = (0..n).filter(|&i| row[i] != row[n - 1 - i]).count();
            assert!(mismatches <= 4);
        }
    }

    #[test]
    fn sign_grid_csv_header() {
        let spec = SignGridSpec { n_lambda: 3, n_param: 2, ..sign_grid_preset("rest-delta").unwrap() };
        let grid = sign_grid(&spec).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "lambda,param,sign");
        assert_eq!(lines.len(), 1 + 6);
    }

    #[test]
    fn aliases_resolve_to_named_presets() {
        for ((alias, target), name) in PRESET_ALIASES.iter().zip(SIGN_GRID_PRESETS) {
            assert_eq!(*target, name);
            assert_eq!(sign_grid_preset(alias), sign_grid_preset(name));
        }
        assert!(sign_grid_preset("fig3").is_none());
    }
}
