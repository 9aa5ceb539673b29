//! Numerical laboratory for products of orthogonal projections.
//!
//! The crate builds finite-dimensional families of closed subspaces, runs
//! cyclic/random/explicit projection trajectories over them, measures
//! regularity diagnostics (witness gaps, principal angles, fitted rates),
//! evaluates the Johnson-graph divergence condition on 4-tuples, and
//! assembles transport plans that move a unit vector across an orthonormal
//! chain through products of line projections.
//!
//! Modules map onto the subsystems:
//! - [`subspace`]: subspace arithmetic (span, project, join, complement,
//!   intersect, principal angles, distance).
//! - [`schedule`]: index schedules, trajectories, and their diagnostics.
//! - [`regularity`]: witness-gap eigen searches and dichotomy scans.
//! - [`johnson`]: the J(K,4) graph, covers, walks, and symbol sequences.
//! - [`gallery`]: named example configurations at finite truncation.
//! - [`transport`]: words over operator alphabets, the projection ladder,
//!   block transport, and chained divergence demos.
//! - [`appendix`]: perturbed isomorphism bounds, almost-orthonormal
//!   extraction, and almost-orthogonality estimates.
//! - [`harness`]: batch experiment runner with CSV/JSON reports and replay.

pub mod appendix;
pub mod error;
pub mod gallery;
pub mod harness;
pub mod johnson;
mod linalg;
mod parallel;
pub mod regularity;
pub mod rng;
pub mod schedule;
pub mod subspace;
pub mod transport;

pub use error::Error;
pub use subspace::{AngleProfile, Subspace, Vector};

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
