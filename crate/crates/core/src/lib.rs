//! ADC dynamic-performance calibration toolkit.
//!
//! The crate has two halves that share one numerical core:
//!
//! * **Analysis path**: synthesize or load a digitized capture
//!   ([`signal::SampleBlock`]), turn it into a single-sided power spectrum
//!   ([`analysis::power_spectrum`]) and compute the five standard dynamic
//!   parameters (SNR, SINAD, ENOB, THD, SFDR) with harmonic identification
//!   and alias folding ([`analysis::analyze`]).
//! * **Accelerator model**: a deterministic cycle-level simulator of a
//!   host-memory read / process / write-back loop around a pipelined
//!   streaming FFT ([`pipeline`]), used to reproduce throughput, latency
//!   and speedup figures without hardware.
//!
//! All arithmetic is 64-bit floating point and every entry point is
//! deterministic: the same inputs (including RNG seeds) produce
//! bit-identical outputs.

pub mod analysis;
pub mod fft;
pub mod io;
pub mod pipeline;
pub mod signal;

mod error;

pub use error::{Error, Result};
