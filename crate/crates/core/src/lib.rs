//! Numerical laboratory for oscillatory-integral delta measures and
//! time-sliced propagator kernels.
//!
//! The crate is organized in layers:
//!
//! * [`numerics`] — quadrature, extrapolation, root finding, and tridiagonal
//!   linear algebra shared by everything above;
//! * [`stationary`] — finite-ε stationary-phase functionals and their
//!   pairings;
//! * [`lattice`] — time-sliced actions, their derivatives, and classical
//!   paths;
//! * [`propagator`] — kernel evaluation: closed forms, slice-by-slice
//!   contraction, direct quadrature, composition, and expectation values;
//! * [`control`] — refinement ladders over the slice count and the scale
//!   invariance checks built on them.
//!
//! Everything here is deterministic: the same inputs produce bit-identical
//! outputs, and no function touches global state.

pub mod control;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod propagator;
pub mod stationary;

pub use error::{Error, Result};
