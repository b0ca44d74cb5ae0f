//! Catalogue of the bulk free energies `W(c)` and the induced convective
//! potential `G(c)` with `G'(c) = c W''(c) + c / beta`.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Distance from `±1` below which the Flory–Huggins logarithm is rejected.
const LOG_EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FreeEnergy {
    /// `W(c) = (c^2 - 1)^2 / 4`.
    QuarticDoubleWell,
    /// `W(c) = theta/2 [(1+c)ln(1+c) + (1-c)ln(1-c)] - theta0/2 c^2`, `0 < theta < theta0`.
    FloryHugginsLog { theta: f64, theta0: f64 },
    /// `W(c) = 1/c` on `c > 0`.
    ConvexReciprocal,
    /// `W(c) = (c - 1)^2 (c - 2)^2`, wells at `c = 1` and `c = 2`.
    ShiftedDoubleWell,
}

impl FreeEnergy {
    pub fn name(&self) -> &'static str {
        match self {
            FreeEnergy::QuarticDoubleWell => "quartic double-well",
            FreeEnergy::FloryHugginsLog { .. } => "Flory-Huggins logarithmic",
            FreeEnergy::ConvexReciprocal => "convex reciprocal",
            FreeEnergy::ShiftedDoubleWell => "shifted double-well",
        }
    }

    /// Human-readable admissible interval used in error messages.
    pub fn interval_label(&self) -> &'static str {
        match self {
            FreeEnergy::QuarticDoubleWell | FreeEnergy::ShiftedDoubleWell => "(-inf, inf)",
            FreeEnergy::FloryHugginsLog { .. } => "(-1, 1)",
            FreeEnergy::ConvexReciprocal => "(0, inf)",
        }
    }

    /// Interval between the two pure phases, over which the hyperbolicity
    /// bound on `beta` is taken. `None` for convex energies.
    pub fn phase_interval(&self) -> Option<(f64, f64)> {
        match self {
            FreeEnergy::QuarticDoubleWell | FreeEnergy::FloryHugginsLog { .. } => Some((-1.0, 1.0)),
            FreeEnergy::ShiftedDoubleWell => Some((1.0, 2.0)),
            FreeEnergy::ConvexReciprocal => None,
        }
    }

    pub fn is_admissible(&self, c: f64) -> bool {
        if !c.is_finite() {
            return false;
        }
        match self {
            FreeEnergy::QuarticDoubleWell | FreeEnergy::ShiftedDoubleWell => true,
            FreeEnergy::FloryHugginsLog { .. } => c.abs() < 1.0 - LOG_EDGE,
            FreeEnergy::ConvexReciprocal => c > 0.0,
        }
    }

    pub fn check(&self, c: f64) -> Result<(), DomainError> {
        if self.is_admissible(c) {
            Ok(())
        } else {
            Err(DomainError { c, energy: self.name(), interval: self.interval_label() })
        }
    }

    pub fn w(&self, c: f64) -> Result<f64, DomainError> {
        self.check(c)?;
        Ok(self.w_unchecked(c))
    }

    pub fn wp(&self, c: f64) -> Result<f64, DomainError> {
        self.check(c)?;
        Ok(self.wp_unchecked(c))
    }

    pub fn wpp(&self, c: f64) -> Result<f64, DomainError> {
        self.check(c)?;
        Ok(self.wpp_unchecked(c))
    }

    /// Convective potential with normalization `G(0) = 0` (the `-2/c` pole
    /// of the reciprocal energy carries no extra constant).
    pub fn g(&self, c: f64, beta: f64) -> Result<f64, DomainError> {
        self.check(c)?;
        Ok(self.g_unchecked(c, beta))
    }

    /// `G'(c) = c W''(c) + c / beta`.
    pub fn gp(&self, c: f64, beta: f64) -> Result<f64, DomainError> {
        self.check(c)?;
        Ok(c * self.wpp_unchecked(c) + c / beta)
    }

    // The unchecked variants sit on the solver hot paths, where admissibility
    // has already been established for the whole state.

    #[inline]
    pub(crate) fn w_unchecked(&self, c: f64) -> f64 {
        match *self {
            FreeEnergy::QuarticDoubleWell => {
                let s = c * c - 1.0;
                0.25 * s * s
            }
            FreeEnergy::FloryHugginsLog { theta, theta0 } => {
                0.5 * theta * ((1.0 + c) * (1.0 + c).ln() + (1.0 - c) * (1.0 - c).ln())
                    - 0.5 * theta0 * c * c
            }
            FreeEnergy::ConvexReciprocal => 1.0 / c,
            FreeEnergy::ShiftedDoubleWell => {
                let s = (c - 1.0) * (c - 2.0);
                s * s
            }
        }
    }

    #[inline]
    pub(crate) fn wp_unchecked(&self, c: f64) -> f64 {
        match *self {
            FreeEnergy::QuarticDoubleWell => c * c * c - c,
            FreeEnergy::FloryHugginsLog { theta, theta0 } => {
                0.5 * theta * ((1.0 + c).ln() - (1.0 - c).ln()) - theta0 * c
            }
            FreeEnergy::ConvexReciprocal => -1.0 / (c * c),
            FreeEnergy::ShiftedDoubleWell => ((4.0 * c - 18.0) * c + 26.0) * c - 12.0,
        }
    }

    #[inline]
    pub(crate) fn wpp_unchecked(&self, c: f64) -> f64 {
        match *self {
            FreeEnergy::QuarticDoubleWell => 3.0 * c * c - 1.0,
            FreeEnergy::FloryHugginsLog { theta, theta0 } => theta / (1.0 - c * c) - theta0,
            FreeEnergy::ConvexReciprocal => 2.0 / (c * c * c),
            FreeEnergy::ShiftedDoubleWell => (12.0 * c - 36.0) * c + 26.0,
        }
    }

    #[inline]
    pub(crate) fn g_unchecked(&self, c: f64, beta: f64) -> f64 {
        let relax = 0.5 * c * c / beta;
        let core = match *self {
            FreeEnergy::QuarticDoubleWell => {
                let c2 = c * c;
                0.75 * c2 * c2 - 0.5 * c2
            }
            FreeEnergy::FloryHugginsLog { theta, theta0 } => {
                -0.5 * theta * (1.0 - c * c).ln() - 0.5 * theta0 * c * c
            }
            FreeEnergy::ConvexReciprocal => -2.0 / c,
            FreeEnergy::ShiftedDoubleWell => ((3.0 * c - 12.0) * c + 13.0) * c * c,
        };
        core + relax
    }

    /// `min over the phase interval of min(W'', 0)`; zero for convex energies.
    pub fn min_nonconvexity(&self) -> f64 {
        match *self {
            // W'' = 3c^2 - 1 is smallest at c = 0.
            FreeEnergy::QuarticDoubleWell => -1.0,
            // W'' = theta/(1-c^2) - theta0 is smallest at c = 0.
            FreeEnergy::FloryHugginsLog { theta, theta0 } => (theta - theta0).min(0.0),
            FreeEnergy::ConvexReciprocal => 0.0,
            // W'' = 12c^2 - 36c + 26 is smallest at c = 3/2.
            FreeEnergy::ShiftedDoubleWell => -1.0,
        }
    }

    /// Upper bound on `beta` that keeps the entropy convex, or `None` when
    /// every `beta > 0` does.
    pub fn beta_bound(&self) -> Option<f64> {
        let m = self.min_nonconvexity();
        if m < 0.0 {
            Some(-1.0 / m)
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if let FreeEnergy::FloryHugginsLog { theta, theta0 } = *self {
            if !(theta > 0.0 && theta < theta0) {
                return Err(format!("Flory-Huggins requires 0 < theta < theta0, got theta = {theta}, theta0 = {theta0}"));
            }
        }
        Ok(())
    }
}
