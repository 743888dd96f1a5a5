//! Core algorithms for no-reference audio-visual quality estimation.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`visual`] and [`audio`] turn decoded luma frames and mono PCM into
//!    per-frame feature matrices (90 visual rows, 25 spectral rows).
//! 2. [`fusion`] aligns the two matrices on the audio time axis, stacks them
//!    into a 115-row audiovisual matrix and builds one-hot quality-group
//!    targets from opinion scores.
//! 3. [`neural`] pretrains two sparse autoencoders (115→60→25) and a softmax
//!    head, stacks them and fine-tunes end to end.
//! 4. [`scoring`] maps the 4-row probability output to a clip score.
//!
//! [`cv`] runs k-fold evaluation over pre-extracted clips and [`distortion`]
//! synthesizes degraded stimuli with pseudo opinion scores.
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature is
//! enabled; `std` only switches on runtime SIMD dispatch in the GEMM kernels.
//! All file and CLI handling lives in the companion `avq` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod audio;
pub mod cv;
pub mod distortion;
mod error;
pub mod fusion;
pub mod matrix;
pub mod media;
pub mod neural;
pub mod scoring;
pub mod stats;
pub mod visual;

pub use error::{Error, Result};
pub use matrix::Matrix;
