pub mod analysis;
pub mod cli;
pub mod compressed;
pub mod dense;
pub mod error;
pub mod io;
pub mod lowrank;
pub mod operator;
pub mod par;
pub mod problems;
pub mod regularization;
pub mod rng;
pub mod sparse;
pub mod wavelet;

pub use error::{Error, Result};
