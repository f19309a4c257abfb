//! Oscillator Ising machine solver library.
//!
//! Minimizes Ising/MaxCut objectives by integrating a network of coupled
//! Kuramoto oscillators under sub-harmonic injection locking, with
//! annealing schedules, hardware-faithful coupling quantization,
//! exact and Tabu-search oracles, and an ensemble benchmark harness.

pub mod bench;
pub mod dynamics;
pub mod error;
pub mod hardware;
pub mod oracle;
pub mod problem;
pub mod readout;
pub mod schedule;

pub use error::{Error, Result};
