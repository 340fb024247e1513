//! Spectral bounds for Schrödinger operators on the line and on infinite
//! cylinders `R x M`.
//!
//! The crate evaluates the closed-form constants of the one-dimensional
//! Keller bound, computes ground states of `-d²/ds² - V` by finite
//! differences, decomposes cylinder problems over the Laplace–Beltrami
//! modes of the compact factor `M`, solves the dual Gagliardo–Nirenberg–
//! Sobolev minimization to obtain the cylinder constant `Λ(μ)`, and locates
//! the threshold norm `μ*` at which optimal potentials stop being
//! functions of the axial variable alone.
//!
//! Modules follow the pipeline:
//!
//! * [`params`] — exponent bookkeeping and every closed-form constant;
//! * [`manifold`] — spectral description of the compact factor;
//! * [`line`] — 1D eigensolver, norms, scalings, radial shooting;
//! * [`cylinder`] — mode decomposition, dense 2D oracle, instability tests;
//! * [`variational`] — the dual problem, `Λ(μ)`, the rigidity functional,
//!   and the threshold search;
//! * [`verify`] — the acceptance suite shared by tests and the CLI.

pub mod cylinder;
pub mod error;
mod fourier;
pub mod grid;
pub mod line;
pub mod manifold;
pub mod params;
pub mod tridiag;
pub mod variational;
pub mod verify;

pub use error::{KltError, Result};
pub use grid::Grid1D;
pub use line::{SampledPotential1D, SpectralResult};
pub use manifold::ManifoldSpec;
pub use params::{InequalityParams, RigidityParams};
