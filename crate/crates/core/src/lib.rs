//! One permutation hashing for sparse binary data.
//!
//! A single random permutation of the feature space is split into `k` equal
//! bins; each set is summarized by the smallest permuted index in every bin.
//! The crate covers sketch construction, resemblance estimation, exact and
//! approximate theory for the empty-bin and matched-bin counts, b-bit
//! expansion for linear learners, LSH banding, and Monte Carlo validation.
//! See `examples/` for one runnable program per capability.

pub mod cli;
pub mod codec;
pub mod datamodel;
pub mod error;
pub mod encoding;
pub mod estimate;
pub mod learner;
pub mod lsh;
pub mod montecarlo;
pub mod permutation;
pub mod rng;
pub mod sketch;
pub mod theory;

pub use error::{Error, Result};
