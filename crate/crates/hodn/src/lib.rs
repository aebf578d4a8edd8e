//! Higher order digital nets from digit-interlaced polynomial lattice point
//! sets: arithmetic over F_b[x], point generation, the worst-case-error
//! criterion, component-by-component search, and randomized integration.

pub mod cbc;
pub mod criterion;
pub mod fft;
pub mod error;
pub mod galois;
pub mod interlace;
pub mod kernel;
pub mod pointset;
pub mod randomize;
pub mod weights;

pub use error::{HodnError, Result};
