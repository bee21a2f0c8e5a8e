//! Classical mechanics in a phase space whose position/momentum Poisson
//! bracket is deformed to `{X, P} = 1 + beta P^2` (and its translation
//! invariant three-dimensional counterpart), the structure behind a minimal
//! measurable length.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: deformation parameters, canonical representations of the
//!   deformed variables and a finite-difference Poisson bracket engine.
//! * [`dynamics`]: the Hamiltonian models, Hamilton's equations and a fixed
//!   step RK4 integrator with energy diagnostics.
//! * [`legendre`]: velocity/momentum inversion, Lagrangians and actions.
//! * [`frames`]: deformed Galilean boosts (Euclidean rotations in the
//!   `(u t, x)` plane) and Lorentz boosts with an effective light speed.
//! * [`constants`]: SI constants and the effective-scale estimates.
//! * [`scenario`]: configuration, CSV/JSON output and invariant check suites
//!   used by the `gup` binary.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod frames;
pub mod legendre;
pub mod scenario;

pub use algebra::{CanonicalState, CanonicalState1D, CanonicalState3D, DeformationParameters};
pub use error::{Error, Result};
