//! Exact combinatorics of ellipsoid embedding obstructions.
//!
//! Everything here is computed over exact rationals, optionally carrying an
//! infinitesimal tilt (`p/q + eps` for an unspecified small `eps > 0`), so
//! that every floor, ceiling, lattice-point count and index is decided
//! exactly and independently of the size of the perturbation.
//!
//! Module map:
//! - [`exact`] — perturbed rationals, Fibonacci numbers, golden-ratio tests;
//! - [`capacity`] — the `c0` capacity staircase below `tau^4` and the catalog
//!   of known stabilized values and bounds;
//! - [`index`] — Fredholm half-indices of punctured genus-zero curves and of
//!   orbit cylinders, and the action threshold a curve forces on the ball;
//! - [`ech`] — ECH gradings by lattice-point counting, ECH partitions by
//!   extremal lattice paths, gluing coefficients, cylinder rule-outs;
//! - [`stabilize`] — the stabilization criterion: index condition plus an
//!   exhaustive decomposition search, yielding conditional lower bounds;
//! - [`building`] — certificates for the inductive gluing construction,
//!   their verifier, and the constructor for the degree-`m` family.
//!
//! The core is generic over the backing integer type through the [`Scalar`]
//! trait; the aliases below fix the default arbitrary-precision choice.

pub mod building;
pub mod capacity;
pub mod ech;
mod error;
pub mod exact;
pub mod index;
pub mod stabilize;

pub use error::Error;
pub use exact::{PerturbedRat, Scalar, Tilt};

/// Default backing integer: arbitrary precision, so Fibonacci endpoints and
/// glued-curve counts never overflow.
pub type Int = num_bigint::BigInt;
/// Exact rational over [`Int`].
pub type Rat = num_rational::Ratio<Int>;
/// Perturbed rational over [`Int`].
pub type PRat = exact::PerturbedRat<Int>;

/// Machine-word variants, adequate for small hand computations.
pub type Rat64 = num_rational::Ratio<i64>;
pub type PRat64 = exact::PerturbedRat<i64>;
