//! Directional elephant random walk on the triangular lattice.
//!
//! Each step of the walk is one of the six unit vectors `{±1, ±ω, ±ω²}`.
//! Step `n + 1` looks at a uniformly chosen earlier step and, with
//! probability `p/2` each, copies or reverses it; with probability `1 - p` it
//! is a fresh uniform direction.
//!
//! The crate provides:
//!
//! - [`lattice`]: exact Eisenstein-integer positions and the sign/axis
//!   factorisation of a direction;
//! - [`walk`]: a literal full-history sampler and an equivalent
//!   constant-memory sampler driven by the closed-form step kernel;
//! - [`oracle`]: the exact law of the direction counts for small horizons;
//! - [`urn`]: the axis urn, the fair-sign streams and the sampler built from
//!   them;
//! - [`harness`]: Monte Carlo experiments for the law of large numbers, the
//!   Gaussian limit, sign independence and axis equidistribution;
//! - [`cli`]: the file-producing commands behind the `erwhex` binary.

pub mod cli;
pub mod counts;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod stats;
pub mod urn;
pub mod walk;

pub use counts::{CountVector, CountVector3, CountVector6};
pub use error::{Error, Result};
pub use lattice::{Axis, Direction, LatticePoint, Sign};
pub use walk::{Trajectory, WalkParams};
