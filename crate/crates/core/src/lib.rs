//! Relaxed friction-type first-order approximation of the one-dimensional
//! Navier–Stokes–Cahn–Hilliard system.
//!
//! The crate bundles the free-energy catalogue, the characteristic analysis
//! of the hyperbolic first-order operator, an explicit MUSCL-Hancock
//! finite-volume engine, an implicit Radau IIA method-of-lines engine with a
//! Cahn–Hilliard reference solver, diagnostics and a scenario runner.

pub mod diagnostics;
pub mod eigen;
pub mod elliptic;
pub mod error;
pub mod free_energy;
pub mod fv;
pub mod implicit;
pub mod io;
pub mod params;
pub mod scenario;
pub mod state;

pub use error::{ConfigError, DomainError, Error, SolverError};
pub use free_energy::FreeEnergy;
pub use params::{BoundaryKind, Grid1D, ParamSet};
pub use state::State;
