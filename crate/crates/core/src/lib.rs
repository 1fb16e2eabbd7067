//! Complexified supersymmetric partners of the square well and of the
//! plane-wave superpotentials, with numerical spectra and transfer-matrix
//! scattering.
//!
//! Units follow `ħ = 2m = 1`, so `E = k²` and `H = -d²/dx² + V(x)`.

pub mod cli;
pub mod error;
pub mod field;
pub mod output;
pub mod scattering;
pub mod spectral;
pub mod states;
pub mod susy;
pub mod tridiag;

pub use error::{Error, Result};
pub use field::{ComplexField, Constant};
pub use num_complex::Complex64;
