//! Banded LU factorization with partial pivoting, for real and complex
//! entries, plus the bookkeeping that maps a periodic 1D stencil onto a band.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::SolverError;

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + PartialEq
{
    const ZERO: Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    const ZERO: f64 = 0.0;
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.re.abs() + self.im.abs()
    }
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Each row keeps
/// `kl` extra slots on the right for the fill-in created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    m: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(m: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { m, kl, ku, width, data: vec![T::ZERO; m * width] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku, "({i}, {j}) outside the band");
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if j + self.kl < i || j > i + self.ku {
            return T::ZERO;
        }
        self.data[self.slot(i, j)]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, x: T) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += x;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.m)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.m - 1);
                let mut s = T::ZERO;
                for j in lo..=hi {
                    s += self.get(i, j) * x[j];
                }
                s
            })
            .collect()
    }

    /// In-place LU with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu<T>, SolverError> {
        let (m, kl, ku) = (self.m, self.kl, self.ku);
        let mut piv = vec![0usize; m];
        for k in 0..m {
            let last_row = (k + kl).min(m - 1);
            let last_col = (k + kl + ku).min(m - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].modulus();
            for i in k + 1..=last_row {
                let v = self.data[self.slot(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(SolverError::Singular { row: k });
            }
            piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last_row {
                let s = self.slot(i, k);
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l == T::ZERO {
                    continue;
                }
                for j in k + 1..=last_col {
                    let (a, b) = (self.slot(i, j), self.slot(k, j));
                    let u = self.data[b];
                    self.data[a] -= l * u;
                }
            }
        }
        Ok(BandLu { a: self, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu<T> {
    a: BandMatrix<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    pub fn solve_in_place(&self, b: &mut [T]) {
        let a = &self.a;
        let (m, kl, ku) = (a.m, a.kl, a.ku);
        for k in 0..m {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(m - 1) {
                b[i] -= a.data[a.slot(i, k)] * bk;
            }
        }
        for i in (0..m).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + kl + ku).min(m - 1) {
                s -= a.data[a.slot(i, j)] * b[j];
            }
            b[i] = s / a.data[a.slot(i, i)];
        }
    }
}

/// Position of node `i` in the folded ordering `0, n-1, 1, n-2, ...`, which
/// keeps nodes that are close on the ring close in the ordering.
#[inline]
pub fn fold(i: usize, n: usize) -> usize {
    if 2 * i < n {
        2 * i
    } else {
        2 * (n - 1 - i) + 1
    }
}

/// Distance between two nodes on a ring of `n` nodes.
#[inline]
pub fn ring_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Greedy colouring of ring nodes so that nodes sharing a colour are more than
/// `2 * radius` apart: perturbing all of them at once leaves every stencil
/// (of that radius) touched by at most one perturbation.
pub fn ring_colouring(n: usize, radius: usize) -> Vec<Vec<usize>> {
    let spacing = 2 * radius + 1;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let slot = groups.iter_mut().find(|g| g.iter().all(|&j| ring_distance(i, j, n) >= spacing));
        match slot {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}
