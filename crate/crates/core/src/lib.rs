//! Subdata selection for large linear-regression datasets.
//!
//! The deterministic leverage-score selector lives next to IBOSS, OSS and
//! uniform sampling behind [`selectors::SelectorSpec`]. [`bench`] repeats the
//! simulation, timing and bootstrap studies; [`io`] and [`cli`] wrap the
//! library for command-line use.

pub mod bench;
pub mod cli;
pub mod datagen;
pub mod error;
pub mod io;
pub mod linalg;
pub mod regression;
pub mod selectors;

pub use error::{Result, SubdataError};
pub use linalg::DataMatrix;
