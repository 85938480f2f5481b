//! Spectral-gating noise reduction and companion DSP toolkit.
//!
//! The crate is `no_std`-compatible (`alloc` required); file I/O, the CLI,
//! and the benchmark harness live in the `specgate` companion crate.
//!
//! Modules:
//! - [`fft`], [`window`], [`stft`], [`grid`]: transforms and numeric kernels
//! - [`gate`]: stationary and non-stationary spectral gating
//! - [`baselines`]: Wiener, iterative Wiener (LPC), Savitzky-Golay,
//!   spectral subtraction
//! - [`metrics`]: SDR, SegSNR, STA/LTA onset detection, peak detection,
//!   ROC/AUC
//! - [`datagen`]: seeded synthetic signals (noise, tones, spikes, onsets)

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod datagen;
pub mod fft;
pub mod gate;
pub mod grid;
pub mod metrics;
pub mod rng;
pub mod signal;
pub mod stft;
pub mod window;

mod error;

pub use error::Error;
pub use signal::Signal;
pub use stft::{to_db, Spectrogram, StftParams};

pub type Result<T> = core::result::Result<T, Error>;
