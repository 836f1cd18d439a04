//! Minimum-residual (DPG) discretization of the 2D Laplace transmission
//! problem on ℝ², coupling an ultra-weak formulation inside a polygon with
//! boundary integral equations for the exterior.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: structured triangulations, red refinement, skeleton topology.
//! - [`spaces`]: lowest-order trial space and enriched P2/P2²/P1 test space.
//! - [`bem`]: Galerkin single- and double-layer matrices and layer potentials.
//! - [`assembly`]: the coupled bilinear form, test Gram matrix, load and
//!   normal equations.
//! - [`solver`]: SPD solve, error measures and the exterior field.
//! - [`jn`]: the classical Johnson–Nédélec coupling used as a cross-check.
//! - [`experiment`]: manufactured data and convergence runs.

pub mod assembly;
pub mod bem;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod jn;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use geometry::Point;
