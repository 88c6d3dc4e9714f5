//! Exact computations on the Farey group acting on the projective line.
//!
//! * [`arith`]: extended rationals, unimodular matrices, circle arcs.
//! * [`farey`]: mediant-interleaved Farey sequences and Stern–Brocot descent.
//! * [`minkowski`]: the question-mark function, its extension to `ℝ ∪ {∞}`
//!   and the associated probability measure.
//! * [`group`]: reduced words, spheres of the word metric, Farey tiles.
//! * [`orbit`]: orbit counts on word spheres, their limits, the random-walk
//!   convolution and the stationarity identity.

pub mod arith;
pub mod error;
pub mod farey;
pub mod group;
pub mod minkowski;
pub mod orbit;

pub use arith::{Arc, ExtRational, IntMatrix2};
pub use error::{Error, Result};
