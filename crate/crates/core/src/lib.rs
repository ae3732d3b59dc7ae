//! Finite-sample adaptive surrogate confidence bands for the normal-means model
//! `Y_i = f_i + σ ε_i` over nested linear subspaces.
//!
//! The crate is organized bottom-up:
//!
//! - [`specfun`]: Gaussian and chi-square distribution functions and the
//!   tuning constants `κ`, `Q`, `E`.
//! - [`subspace`]: orthonormal bases, projections, `Ω` and nested scales.
//! - [`surrogate`]: the surrogate map, spoiler classification and tuning rules.
//! - [`bands`]: Bonferroni, subspace and adaptive band constructors.
//! - [`bounds`]: closed-form lower bounds and rates.
//! - [`simulate`]: seeded, replayable Monte Carlo verification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod bounds;
pub mod error;
pub mod simulate;
pub mod specfun;
pub mod subspace;
pub mod surrogate;

pub use bands::{Band, BandParams};
pub use error::{Error, Result};
pub use specfun::{NoncentralChi2, Prob};
pub use subspace::{DesignGrid, NestedScale, Subspace, SubspaceSpec};
pub use surrogate::{SurrogateSet, SurrogateTuning, TuningRule};
