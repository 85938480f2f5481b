//! Tapering windows and the constant overlap-add (COLA) check.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Window function identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Periodic Hann, COLA-valid at hop = len/2, len/4, ...
    Hann,
    /// All ones, COLA-valid at hop = len (and divisors of len).
    Rectangular,
}

impl Window {
    /// Evaluate the window over `len` samples.
    pub fn evaluate(self, len: usize) -> Vec<f64> {
        match self {
            Window::Hann => (0..len)
                .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
                .collect(),
            Window::Rectangular => vec![1.0; len],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        }
    }
}

impl core::str::FromStr for Window {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hann" => Ok(Window::Hann),
            "rectangular" | "rect" | "boxcar" => Ok(Window::Rectangular),
            _ => Err(crate::Error::InvalidParams("unknown window")),
        }
    }
}

/// Maximum relative deviation of the overlap-added window from a constant,
/// measured over one hop period in the fully-overlapped interior.
pub fn cola_deviation(window: &[f64], hop: usize) -> f64 {
    let len = window.len();
    debug_assert!(hop >= 1 && hop <= len);
    // Sum of all shifted copies covering interior position p in [0, hop).
    let mut sums = vec![0.0; hop];
    let mut shift = 0;
    while shift < len {
        for p in 0..hop {
            let idx = shift + p;
            if idx < len {
                sums[p] += window[idx];
            }
        }
        shift += hop;
    }
    let mean = sums.iter().sum::<f64>() / hop as f64;
    if mean <= 0.0 {
        return f64::infinity();
    }
    sums.iter()
        .map(|s| (s - mean).abs() / mean)
        .fold(0.0, f64::max)
}

/// True when the window/hop pair reconstructs a constant to within 1e-10.
pub fn is_cola(window: &[f64], hop: usize) -> bool {
    cola_deviation(window, hop) <= 1e-10
}
