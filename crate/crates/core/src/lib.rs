//! Dense GAN toolkit core.
//!
//! Everything in this crate is pure computation over in-memory values: matrix
//! arithmetic, seeded sampling, IDX parsing, reverse-mode gradients for dense
//! networks, adversarial training, PCA, latent interpolation, the model byte
//! format and the inference engine. File IO, the CLI and timing live in the
//! `lerpgan` companion crate.
//!
//! The crate is `no_std` with `alloc`. The `std` feature only turns on runtime
//! CPU feature detection for the dense kernels; results are bit-identical
//! either way.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dataio;
mod error;
pub mod gan;
pub mod infer;
pub mod latent;
pub mod modelfmt;
pub mod nn;
pub mod pca;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{Matrix, Rng};
