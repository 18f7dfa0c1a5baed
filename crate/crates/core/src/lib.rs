//! Construction and analysis of pretty good measurements for quantum ensembles.
//!
//! The crate builds the square-root ("pretty good") measurement for finite
//! ensembles and its generalization to arbitrary outcome partitions, evaluates
//! the expected gain of measurements under positive score functions, and checks
//! the associated near-optimality inequalities numerically:
//!
//! - optimal expected gain does not exceed the square root of the gain of the
//!   pretty good measurement,
//! - the mean square error of the pretty good measurement is at most twice the
//!   optimal mean square error, and at most four times the prior's second
//!   moment.
//!
//! Continuous parameter spaces are realized as finite grids with mass-at-node
//! weights, so every integral in the theory becomes a finite weighted sum.
//! Bosonic ensembles are realized in a truncated Fock space with the
//! displacement convention `alpha = (x1 + i*x2)/sqrt(2)`.
//!
//! Modules mirror the pipeline: [`linalg`] (Hermitian kernels), [`ensemble`]
//! (parameterized state families), [`gpgm`] (measurement construction),
//! [`score`] (positive score functions), [`gain`] (expected gain and MSE),
//! [`optimal`] (optimal-measurement solvers and certificates), [`ovm`]
//! (finite-partition operator-valued measure calculus), [`io`] (file formats)
//! and [`sweep`] (seeded experiment corpora).

pub mod bosonic;
pub mod ensemble;
mod error;
pub mod gain;
pub mod gpgm;
pub mod io;
pub mod linalg;
pub mod optimal;
pub mod ovm;
mod rng;
pub mod score;
pub mod selftest;
pub mod sweep;

pub use error::{Error, Result};
