//! Numerical laboratory for geometric phases of finite-dimensional,
//! parameterized quantum Hamiltonians.
//!
//! * [`linalg`]: small dense complex linear algebra.
//! * [`models`]: Hamiltonian families `H(λ) = H₀ + Σ λᵏ Gₖ` and eigenframes.
//! * [`paths`]: parameter-space loops, spherical charts, solid angles.
//! * [`gauge`]: smooth local gauges for band eigenframes.
//! * [`berry`]: Abelian connection, curvature and Berry phase.
//! * [`wilczek_zee`]: non-Abelian connection and holonomy of degenerate bands.
//! * [`adiabatic`]: Schrödinger evolution along a driven loop.
//! * [`aharonov_bohm`]: electric and magnetic Aharonov–Bohm phases.

pub mod adiabatic;
pub mod aharonov_bohm;
pub mod berry;
pub mod error;
pub mod gauge;
pub mod linalg;
pub mod models;
pub mod paths;
pub mod quadrature;
pub mod wilczek_zee;

pub use error::{Error, Result};
