//! Exact geometry-of-numbers toolkit for weighted singular vectors.
//!
//! The crate is organised as a small numeric tower ([`scalar`]) under a lattice
//! layer ([`lattice`]), with three applications on top: weighted-box counting
//! scenes ([`counting`]), the diagonal flow and weighted approximation
//! ([`flow`]), and the self-affine tree of rational vectors ([`fractal`]).
//!
//! Flow times are restricted to the grid `t = k * ln(lambda)` with rational
//! `k`, which keeps every matrix entry of the form `c * m^(p/q)` and lets set
//! memberships be decided exactly. Anything that cannot be decided exactly is
//! reported as uncertain rather than guessed.

pub mod counting;
pub mod error;
pub mod flow;
pub mod fractal;
pub mod lattice;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
