//! Partially exchangeable random partitions of the positive integers.
//!
//! Exact partition probability functions and their shift operator, samplers
//! for the fixed-frequency Chinese restaurant and the paintbox, and the Markov
//! chain followed by cluster frequencies under shifts.

pub mod chain;
pub mod cli;
pub mod engine;
pub mod error;
pub mod partition;
pub mod rng;
pub mod samplers;
pub mod stats;

pub use error::{Error, Result};
