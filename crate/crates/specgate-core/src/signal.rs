//! Multi-channel time-domain signal.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Multi-channel audio/time-series data with a sample rate.
///
/// Invariants enforced on construction: at least one channel, all channels
/// equal length, positive sample rate, all samples finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl Signal {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParams("sample_rate must be positive"));
        }
        if channels.is_empty() || channels[0].is_empty() {
            return Err(Error::EmptyInput);
        }
        let len = channels[0].len();
        for ch in &channels {
            if ch.len() != len {
                return Err(Error::ShapeMismatch);
            }
            if ch.iter().any(|s| !s.is_finite()) {
                return Err(Error::InvalidInput("non-finite sample"));
            }
        }
        Ok(Signal {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Signal::new(vec![samples], sample_rate)
    }

    pub fn zeros(channels: usize, len: usize, sample_rate: u32) -> Result<Self> {
        Signal::new(vec![vec![0.0; len]; channels], sample_rate)
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channel(&self, idx: usize) -> &[f64] {
        &self.channels[idx]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    /// RMS over all channels.
    pub fn rms(&self) -> f64 {
        let total: f64 = self
            .channels
            .iter()
            .flat_map(|ch| ch.iter())
            .map(|s| s * s)
            .sum();
        let n = self.len() * self.num_channels();
        (total / n as f64).sqrt()
    }

    /// Apply a per-channel transform, preserving rate and channel count.
    pub fn map_channels<F>(&self, mut f: F) -> Result<Signal>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let mut out = Vec::with_capacity(self.num_channels());
        for ch in &self.channels {
            out.push(f(ch)?);
        }
        Signal::new(out, self.sample_rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_channels() {
        let err = Signal::new(vec![vec![0.0; 4], vec![0.0; 5]], 8000).unwrap_err();
        assert_eq!(err, Error::ShapeMismatch);
    }

    #[test]
    fn rejects_zero_rate_and_empty() {
        assert_eq!(
            Signal::mono(vec![1.0], 0).unwrap_err(),
            Error::InvalidParams("sample_rate must be positive")
        );
        assert_eq!(Signal::mono(vec![], 8000).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn rejects_non_finite() {
        let err = Signal::mono(vec![0.0, f64::NAN], 8000).unwrap_err();
        assert_eq!(err, Error::InvalidInput("non-finite sample"));
    }

    #[test]
    fn rms_of_constant() {
        let s = Signal::mono(vec![0.5; 100], 8000).unwrap();
        assert!((s.rms() - 0.5).abs() < 1e-12);
    }
}
