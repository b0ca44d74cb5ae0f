use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::DomainError;
use crate::free_energy::FreeEnergy;

/// Conservative unknown `Q = (p, u, c, v)` at a point or cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    /// Pressure perturbation.
    pub p: f64,
    /// Velocity.
    pub u: f64,
    /// Phase field.
    pub c: f64,
    /// Flux variable.
    pub v: f64,
}

pub const COMPONENTS: [&str; 4] = ["p", "u", "c", "v"];

impl State {
    pub const ZERO: State = State { p: 0.0, u: 0.0, c: 0.0, v: 0.0 };

    #[inline]
    pub const fn new(p: f64, u: f64, c: f64, v: f64) -> Self {
        State { p, u, c, v }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.p, self.u, self.c, self.v]
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        State { p: a[0], u: a[1], c: a[2], v: a[3] }
    }

    #[inline]
    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        State { p: f(self.p), u: f(self.u), c: f(self.c), v: f(self.v) }
    }

    #[inline]
    pub fn zip(self, o: State, f: impl Fn(f64, f64) -> f64) -> Self {
        State { p: f(self.p, o.p), u: f(self.u, o.u), c: f(self.c, o.c), v: f(self.v, o.v) }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.u.is_finite() && self.c.is_finite() && self.v.is_finite()
    }

    /// Index of the first non-finite component, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.to_array().iter().position(|x| !x.is_finite())
    }

    pub fn check_admissible(&self, fe: &FreeEnergy) -> Result<(), DomainError> {
        fe.check(self.c)
    }

    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.p.abs().max(self.u.abs()).max(self.c.abs()).max(self.v.abs())
    }
}

impl Index<usize> for State {
    type Output = f64;
    #[inline]
    fn index(&self, k: usize) -> &f64 {
        match k {
            0 => &self.p,
            1 => &self.u,
            2 => &self.c,
            3 => &self.v,
            _ => panic!("state component {k} out of range"),
        }
    }
}

impl IndexMut<usize> for State {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        match k {
            0 => &mut self.p,
            1 => &mut self.u,
            2 => &mut self.c,
            3 => &mut self.v,
            _ => panic!("state component {k} out of range"),
        }
    }
}

impl Add for State {
    type Output = State;
    #[inline]
    fn add(self, o: State) -> State {
        State::new(self.p + o.p, self.u + o.u, self.c + o.c, self.v + o.v)
    }
}

impl Sub for State {
    type Output = State;
    #[inline]
    fn sub(self, o: State) -> State {
        State::new(self.p - o.p, self.u - o.u, self.c - o.c, self.v - o.v)
    }
}

impl Neg for State {
    type Output = State;
    #[inline]
    fn neg(self) -> State {
        State::new(-self.p, -self.u, -self.c, -self.v)
    }
}

impl Mul<f64> for State {
    type Output = State;
    #[inline]
    fn mul(self, a: f64) -> State {
        State::new(self.p * a, self.u * a, self.c * a, self.v * a)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    #[inline]
    fn mul(self, s: State) -> State {
        s * self
    }
}

impl AddAssign for State {
    #[inline]
    fn add_assign(&mut self, o: State) {
        *self = *self + o;
    }
}

impl SubAssign for State {
    #[inline]
    fn sub_assign(&mut self, o: State) {
        *self = *self - o;
    }
}
