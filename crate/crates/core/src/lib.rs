//! Quantum harmonic analysis on a discretized phase space: Young and Orlicz
//! machinery, A-quantization, Schatten-Orlicz norms and a numerical lab for
//! convolution and multiplication inequalities.

pub mod error;
pub mod lab;
pub mod orlicz;
pub mod phasegrid;
pub mod schatten;
pub mod toeplitz;
pub mod weyl;
pub mod young;

pub use error::{Error, Result};
pub use phasegrid::{make_grid, GridSpec, PhaseSymbol, WaveFunction, C64};
pub use weyl::QuantizationIndex;
pub use young::{QuasiYoungFunction, YoungFunction};
