//! Sweep runner, CSV emission, configuration, and the acceptance suite for
//! the protocol simulator in `qi-core`.

pub mod acceptance;
pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;

pub use config::{Overrides, SimConfig};
pub use error::{Result, SimError};
