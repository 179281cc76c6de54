//! Bivariate binomial conditionals distribution.

pub mod cli;
pub mod dist;
pub mod error;
pub mod infer;
pub mod params;
pub mod sample;
pub mod special;

pub use error::{Error, Result};
pub use params::Params;
