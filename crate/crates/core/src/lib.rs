pub mod cli;
pub mod error;
pub mod features;
pub mod harness;
pub mod kernels;
pub mod krr;
pub mod qmc;
pub mod seed;

pub use error::{Error, Result};
