pub mod error;
pub mod evolve;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod prepare;
pub mod states;
pub mod tof;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
