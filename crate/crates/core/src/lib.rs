// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod energies;
pub mod error;
pub mod evolver;
pub mod foliation;
pub mod nullform;
pub mod oracle;
pub mod quadrature;
pub mod scenarios;
pub mod tails;

pub use error::{Error, Result};
pub use foliation::{default_height, CompactMap, HeightFunction};
pub use config::RunConfig;
pub use evolver::{evolve, GridState, RunArtifact};
