//! Numerics for Hamilton-Jacobi equations with a Caputo time derivative,
//!
//! ```text
//! ∂ₜ^α u + H(t, x, u, Du) = 0   on (0, T] × 𝕋^d,     u(0, ·) = u₀,
//! ```
//!
//! with `0 < α ≤ 1` on the flat torus `𝕋^d = ℝ^d / ℤ^d` (`d ∈ {1, 2}`).
//!
//! The crate is organised bottom-up:
//!
//! - [`specialfun`]: Gamma, erfc, Mittag-Leffler and Wright functions, and the
//!   closed-form Caputo derivative of shifted powers.
//! - [`fracops`]: the L1 discretization of the Caputo derivative and quadrature
//!   evaluation of the nonlocal operators `K₀`, `J_r`, `K_r`.
//! - [`hamiltonian`]: Hamiltonians with their structural constants and the
//!   monotone Lax-Friedrichs numerical Hamiltonian.
//! - [`solver`]: the L1 / Lax-Friedrichs time-marching scheme.
//! - [`oracles`]: reference solutions and brute-force operators.
//! - [`verify`]: property checks over solver output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fracops;
pub mod hamiltonian;
pub mod oracles;
pub mod quad;
pub mod solver;
pub mod specialfun;
pub mod verify;

pub use error::{Error, Result};
pub use fracops::{FractionalOrder, QuadratureConfig, TimeGrid, TimeSignal};
pub use hamiltonian::{BuiltinHamiltonian, HamiltonianSpec, SpeedField, VelocityField};
pub use solver::{GridFunction, InitialProfile, ProblemSpec, SolveResult, Stepping, TorusGrid};
pub use verify::CheckReport;

/// Version of this crate, echoed in result metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
