//! Exact evaluation and empirical verification of Kloosterman-type exponential
//! sums, their bilinear averages, square criteria for rational functions over
//! F_q, and the distribution of squarefree numbers in arithmetic progressions.

pub mod bilinear;
pub mod error;
pub mod expsum;
pub mod harness;
pub mod modarith;
pub mod rng;
pub mod sqfree;
pub mod square_lemmas;

pub use error::{LabError, Result};
