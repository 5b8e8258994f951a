//! Truncated Fock-space simulation kernel for quantum illumination under
//! photon loss.
//!
//! The crate builds the entangled probe states, the probabilistic loss and
//! thermal-reflectivity channels, the standard and superposed-order protocol
//! outputs, and the quantum Chernoff machinery used to score them. Everything
//! here is deterministic, allocation-only (`no_std` + `alloc` compatible),
//! and free of global state; IO and sweep orchestration live in the
//! companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channels;
pub mod chernoff;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod states;

pub use error::{CoreError, Result};
pub use linalg::{Complex64, ComplexMatrix, EigDecomposition, DEFAULT_CLAMP};
