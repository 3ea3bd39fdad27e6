//! Numerics for testing whether integer multiples of the Eguchi-Hanson metric
//! on the blow-up of C² at the origin are balanced.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the plot bundle
//! and the command-line front end live in the companion `ehbal` crate.

#![no_std]

extern crate alloc;

pub mod epsilon;
pub mod error;
pub mod geometry;
pub mod moments;
pub mod obstruction;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
