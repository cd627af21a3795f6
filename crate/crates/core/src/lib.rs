//! Semiclassical limits of Evans' critical states for one-dimensional
//! periodic Hamiltonians `H(x, p) = ½(P + p)² + V(x)`.
//!
//! The crate computes the classical level and its Mather measure, the formal
//! expansion of the viscous cell problem, its numerical solution at finite
//! `h`, the Wigner distribution of the resulting state on the momentum
//! lattice, and the stationary-phase quantities that govern the limit.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases fix the double-precision types used by the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cell;
pub mod classical;
pub mod error;
pub mod expansion;
pub mod jet;
pub mod numerics;
pub mod oscillatory;
pub mod potential;
pub mod wigner;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Potential64 = potential::Potential<f64>;
pub type ClassicalLevel64 = classical::ClassicalLevel<f64>;
pub type ExpansionSeries64 = expansion::ExpansionSeries<f64>;
pub type CellSolution64 = cell::CellSolution<f64>;
pub type EvansState64 = cell::EvansState<f64>;
pub type WignerTable64 = wigner::WignerTable<f64>;
pub type TestSymbol64 = classical::TestSymbol<f64>;
