//! Exact arithmetic on the projective line: reduced extended rationals,
//! unimodular integer matrices acting by Möbius maps, and closed circle arcs.

mod arc;
mod matrix;
mod rational;

pub use arc::{cyclically_ordered, Arc};
pub use matrix::IntMatrix2;
pub use rational::{q, ExtRational};
