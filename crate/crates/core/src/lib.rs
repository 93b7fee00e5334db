//! Exact transition kernels for discrete and continuous TASEP variants via
//! Grothendieck-type symmetric functions, with brute-force and Monte Carlo
//! cross-checks.

pub mod cli;
pub mod error;
pub mod exactalg;
pub mod kernels;
pub mod multipoint;
pub mod operators;
pub mod partitions;
pub mod simulate;
pub mod tableaux;
pub mod validate;

pub use error::{Error, Result};
pub use partitions::{Partition, SkewShape};
