//! Exact computations on error-correcting codes: parameters and spoiling,
//! code-point geometry, fractal dimensions, partition functions and KMS
//! values, and cylinder measures.

pub mod cli;
pub mod code;
pub mod error;
pub mod fractal;
pub mod io;
pub mod measures;
pub mod numeric;
pub mod plane;
pub mod spoiling;
pub mod thermo;

pub use code::{Code, CodeParams, GeneratorMatrix, Word};
pub use error::{Error, ErrorKind, Result};
