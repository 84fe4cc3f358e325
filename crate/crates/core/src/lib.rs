//! Semiclassical quantization of rough symbols on a periodic grid.

pub mod commutators;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod quantize;
pub mod speed_profiles;

pub use error::{LabError, Result};
pub use grid::{GridFunction, GridSpec, SpectrumFunction};
