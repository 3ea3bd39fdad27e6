//! File formats, plot bundle, parallel drivers and the command-line front end
//! for the `ehbal-core` numerics.

pub mod atomic;
pub mod cli;
pub mod error;
pub mod figure;
pub mod formats;
pub mod grid;
pub mod orthogonality;
pub mod parallel;

pub use error::{AppError, Result};
