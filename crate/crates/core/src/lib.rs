//! Hybrid dealiasing: FFT-based linear convolutions in which the zero padding
//! is partly explicit and partly accounted for implicitly.
//!
//! The building blocks are padded FFT kernels that produce the spectrum of a
//! zero-padded sequence one residue block at a time ([`pfft`]), a
//! one-dimensional convolution driver ([`conv1d`]) and a recursive
//! multidimensional driver ([`convnd`]). [`tuner`] picks the subtransform
//! size empirically and [`oracle`] holds brute-force references.

pub mod bench;
pub mod dft;
pub mod conv1d;
pub mod convnd;
pub mod error;
pub mod mult;
pub mod oracle;
pub mod pfft;
pub mod plan;
pub mod tuner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
