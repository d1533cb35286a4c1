pub mod cli;
pub mod duality;
pub mod error;
pub mod fenchel;
pub mod laplace;
pub mod moments;
pub mod potential;
pub mod weights;

pub use error::{Error, Result};
