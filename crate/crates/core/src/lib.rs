//! Activation functions as mode spectra of a one-dimensional field.
//!
//! The sigmoid is split into a step carrier plus a decaying *gap*
//! `g(z) = σ(z) − θ(z)`. The gap is transformed onto a wavenumber lattice,
//! attenuated by a mode-diagonal Bogoliubov channel and transformed back,
//! giving a family of activations between the sigmoid (no loss) and the
//! perceptron step (total loss). The [`network`] module measures what that
//! degradation does to gradient descent on small networks.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, plotting and
//! the command-line runner live in the `modeloss` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod activations;
pub mod bogoliubov;
mod error;
mod fft;
pub mod network;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};

pub use num_complex::Complex64;
