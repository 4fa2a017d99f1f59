//! Combinatorial invariants of complexity-one torus actions.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: exact integer linear algebra (determinants, Smith and Hermite
//!   normal forms, kernels, primitive vectors).
//! * [`weights`]: weight systems of tangent representations at fixed points and
//!   their Cramer coefficients.
//! * [`sponge`]: regular cell complexes modelled on the `(n-2)`-skeleton of the
//!   `A_{n-1}` fan, with validation and cellular homology.
//! * [`chardata`]: characteristic data (sponge, characteristic map, local Euler
//!   signs) and its validators.
//! * [`quasitoric`]: reduction of quasitoric characteristic pairs to
//!   complexity-one data.
//! * [`classify`]: equivalence of characteristic data.
//! * [`catalog`]: built-in worked examples.
//! * [`format`]: JSON interchange formats.

pub mod catalog;
pub mod chardata;
pub mod classify;
pub mod error;
pub mod format;
pub mod lattice;
pub mod poset;
pub mod quasitoric;
pub mod report;
pub mod sponge;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{IntMatrix, IntVector};
