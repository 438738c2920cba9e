pub mod audit;
pub mod cli;
pub mod compositor;
pub mod dataset_io;
pub mod error;
pub mod geometry3d;
pub mod sampler;
pub mod textraster;
pub mod warp;

pub use error::{Error, Result};
