//! Linear-programming bounds for spherical codes and kissing numbers.
//!
//! The crate covers the classical Delsarte bound and its cap-refined
//! extension: exact polynomial certificates, spherical geometry computed from
//! Gram matrices, grid-certified bounds on the local sums `h_m`, and an LP
//! search for admissible polynomials.

pub mod builtins;
pub mod cli;
pub mod delsarte;
pub mod error;
pub mod gegenbauer;
pub mod geometry;
pub mod hbounds;
pub mod polyalg;
pub mod polysearch;
pub mod report;

pub use error::{Error, Result};
pub use polyalg::{Polynomial, Rational};
