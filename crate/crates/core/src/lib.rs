//! Certified evaluation of generalized Brjuno functions
//! `Φ(x) = Σ s(i) (η_0⋯η_{i-1})^ν u(η_i)` over expanding full-branch maps,
//! verification of the structural conditions on the map and weight, and the
//! constructive inversion `y ↦ x` with `Φ(x) = y`.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration formats and
//! the command-line tool live in the companion `brjuno` crate.

#![no_std]

extern crate alloc;

pub mod arith;
pub mod brjuno;
pub mod cf;
mod error;
pub mod inversion;
pub mod map;
pub mod weight;

pub use arith::{Dyadic, Interval, Rational};
pub use error::Error;
