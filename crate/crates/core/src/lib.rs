//! Arithmetic and geometric model of irrationally indifferent attractors.
//!
//! The crate computes continued-fraction data and Brjuno/Herman invariants of
//! a rotation number, builds the model attractor through the tiling
//! recursion, runs the model dynamics and checks the renormalisation relation.

pub mod acceptance;
pub mod arithmetic;
pub mod bigreal;
pub mod coords;
pub mod dynamics;
pub mod brjuno;
pub mod error;
pub mod geometry;
pub mod renorm;
pub mod ext_real;
pub mod tiling;

pub use error::{Error, Result};
