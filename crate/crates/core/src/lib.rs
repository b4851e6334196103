#![no_std]
//! Incomplete Srivastava triple hypergeometric matrix functions.
//!
//! The crate evaluates the lower and upper incomplete variants of the triple
//! series `H_A`, `H_B`, `H_C` with commuting matrix parameters, along with the
//! matrix special functions they are built from: gamma and incomplete gamma,
//! Pochhammer symbols, confluent and Gauss series, Humbert functions, Bessel
//! and Laguerre matrix functions. The [`harness`] module checks the identities
//! these functions satisfy and reports residuals.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command line
//! live in the companion `triplehyp-cli` crate.

// f64 math goes through `num_traits::Float`; when dev-dependencies enable
// its std feature those imports go unused, hence the local allows.
extern crate alloc;

pub mod error;
pub mod expm;
pub mod gamma;
pub mod harness;
pub mod hyp;
pub mod matrix;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod triple;

pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use num_complex::Complex64;
pub use series::{EvalResult, SeriesControl};
pub use triple::{Family, ParamSet, Role, TriplePoint, Variant};
