//! Encoder-decoder approximation of operators between function spaces,
//! discretized on uniform grids.

pub mod approximator;
pub mod architecture;
pub mod codec;
pub mod covering;
pub mod error;
pub mod funcspace;
pub mod harness;
pub mod linalg;

pub use error::{EdapError, Result};
