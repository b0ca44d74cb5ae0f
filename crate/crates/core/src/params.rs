//! Parameter sets and the uniform 1D grid.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::free_energy::FreeEnergy;

/// Relaxation triple `(alpha, delta, beta)` plus the physical constants.
///
/// `beta = inf` switches the relaxation off: every `1/beta` contribution to
/// the flux and the sources vanishes. The source-free Riemann runs use it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    /// Artificial compressibility.
    pub alpha: f64,
    /// Friction.
    pub delta: f64,
    /// Relaxation of the capillarity term.
    pub beta: f64,
    /// Capillarity.
    pub gamma: f64,
    /// Viscosity.
    #[serde(default)]
    pub nu: f64,
}

impl ParamSet {
    pub fn new(alpha: f64, delta: f64, beta: f64, gamma: f64, nu: f64) -> Self {
        ParamSet { alpha, delta, beta, gamma, nu }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, x: f64, allow_inf: bool| {
            if x > 0.0 && (allow_inf || x.is_finite()) {
                Ok(())
            } else {
                Err(ConfigError::new(name, format!("must be a positive real, got {x}")))
            }
        };
        positive("params.alpha", self.alpha, false)?;
        positive("params.delta", self.delta, false)?;
        positive("params.beta", self.beta, true)?;
        positive("params.gamma", self.gamma, false)?;
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(ConfigError::new("params.nu", format!("must be nonnegative, got {}", self.nu)));
        }
        Ok(())
    }

    #[inline]
    pub fn inv_beta(&self) -> f64 {
        1.0 / self.beta
    }

    /// Whether `beta` satisfies the entropy-convexity bound for `fe`.
    /// Recorded only; nothing enforces it.
    pub fn is_hyperbolic_regime(&self, fe: &FreeEnergy) -> bool {
        match fe.beta_bound() {
            Some(bound) => self.beta < bound,
            None => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    /// Zero-order extrapolation (copy of the boundary cell).
    NonReflecting,
    /// Reflecting wall: `u = v = 0`, Neumann for `p`, `c` and `omega`.
    WallNeumann,
}

/// Uniform mesh on `[x_min, x_max]` with `n` cells (finite volumes) or
/// `n` nodes (finite differences, periodic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub bc: BoundaryKind,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize, bc: BoundaryKind) -> Result<Self, ConfigError> {
        let g = Grid1D { x_min, x_max, n, bc };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(ConfigError::new(
                "grid.x_min",
                format!("need finite x_min < x_max, got [{}, {}]", self.x_min, self.x_max),
            ));
        }
        if self.n < 4 {
            return Err(ConfigError::new("grid.n", format!("need at least 4 cells, got {}", self.n)));
        }
        Ok(())
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Cell centre `i` (finite-volume interpretation).
    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Node `i` of a periodic point grid (`x_max` is identified with `x_min`).
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.cell_center(i)).collect()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(-1.0, 1.0, 4, BoundaryKind::Periodic).is_ok());
        assert!(Grid1D::new(1.0, -1.0, 10, BoundaryKind::Periodic).is_err());
        let e = Grid1D::new(-1.0, 1.0, 3, BoundaryKind::Periodic).unwrap_err();
        assert_eq!(e.field, "grid.n");
        let g = Grid1D::new(-1.0, 1.0, 10, BoundaryKind::NonReflecting).unwrap();
        assert!((g.dx() - 0.2).abs() < 1e-15);
        assert!((g.cell_center(0) + 0.9).abs() < 1e-15);
        assert!((g.cell_center(5) + g.cell_center(4)).abs() < 1e-15);
    }

    #[test]
    fn param_validation() {
        assert!(ParamSet::new(0.1, 0.1, 0.1, 1e-3, 0.0).validate().is_ok());
        assert!(ParamSet::new(0.1, 0.1, f64::INFINITY, 1e-3, 0.0).validate().is_ok());
        assert_eq!(ParamSet::new(0.0, 0.1, 0.1, 1e-3, 0.0).validate().unwrap_err().field, "params.alpha");
        assert_eq!(ParamSet::new(0.1, 0.1, 0.1, 1e-3, -1.0).validate().unwrap_err().field, "params.nu");
        assert!(ParamSet::new(f64::INFINITY, 0.1, 0.1, 1e-3, 0.0).validate().is_err());
    }

    #[test]
    fn hyperbolic_regime_flag() {
        let fe = FreeEnergy::QuarticDoubleWell;
        assert!(ParamSet::new(0.1, 0.1, 0.5, 1e-3, 0.0).is_hyperbolic_regime(&fe));
        assert!(!ParamSet::new(0.1, 0.1, 10.0, 1e-3, 0.0).is_hyperbolic_regime(&fe));
        assert!(ParamSet::new(0.1, 0.1, 10.0, 1e-3, 0.0).is_hyperbolic_regime(&FreeEnergy::ConvexReciprocal));
    }
}
