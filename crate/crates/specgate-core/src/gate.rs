//! Spectral gating: per-frequency noise thresholds, binary mask, triangular
//! mask smoothing, and reconstruction. Stationary mode derives thresholds
//! from global statistics of a noise clip (or the signal itself);
//! non-stationary mode tracks a drifting noise floor with sliding-window
//! statistics.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{conv2d_same, sliding_stats};
use crate::stft::{istft, stft, StftParams, DB_EPSILON};
use crate::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateMode {
    Stationary,
    NonStationary,
}

/// All gate hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    pub stft: StftParams,
    /// Standard deviations above the mean for the threshold (k).
    pub n_std_thresh: f64,
    /// Proportion of below-threshold energy to remove, in [0, 1].
    pub prop_decrease: f64,
    /// Frequency extent of mask smoothing, Hz.
    pub freq_mask_smooth_hz: f64,
    /// Time extent of mask smoothing, ms.
    pub time_mask_smooth_ms: f64,
    pub mode: GateMode,
    /// Sliding statistics window for non-stationary mode, ms.
    pub noise_window_ms: f64,
    pub smoothing_enabled: bool,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            stft: StftParams::default_audio(),
            n_std_thresh: 1.5,
            prop_decrease: 1.0,
            freq_mask_smooth_hz: 500.0,
            time_mask_smooth_ms: 50.0,
            mode: GateMode::Stationary,
            noise_window_ms: 1000.0,
            smoothing_enabled: true,
        }
    }
}

impl GateConfig {
    pub fn nonstationary() -> Self {
        GateConfig {
            mode: GateMode::NonStationary,
            ..GateConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.stft.validate()?;
        if !(0.0..=1.0).contains(&self.prop_decrease) {
            return Err(Error::InvalidParams("prop_decrease must be in [0, 1]"));
        }
        if self.freq_mask_smooth_hz < 0.0 || self.time_mask_smooth_ms < 0.0 {
            return Err(Error::InvalidParams("smoothing extents must be >= 0"));
        }
        if self.mode == GateMode::NonStationary && self.noise_window_ms <= 0.0 {
            return Err(Error::InvalidParams("noise_window_ms must be positive"));
        }
        Ok(())
    }

    /// Sliding window length in frames for non-stationary mode, forced odd.
    pub fn noise_window_frames(&self, sample_rate: u32) -> usize {
        let frames = (self.noise_window_ms * sample_rate as f64
            / (1000.0 * self.stft.hop_length as f64))
            .round() as usize;
        let frames = frames.max(1);
        if frames % 2 == 0 {
            frames + 1
        } else {
            frames
        }
    }
}

/// Per-frequency noise statistics in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProfile {
    pub mu_db: Vec<f64>,
    pub sigma_db: Vec<f64>,
    pub thresh_db: Vec<f64>,
}

/// Time-frequency gain mask; binary before smoothing, in [0, 1] after.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    values: Vec<Vec<f64>>,
}

impl Mask {
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }
}

/// Per-frequency mean, population standard deviation, and threshold
/// mu + k*sigma over a dB spectrogram grid (rows = frequency).
pub fn estimate_noise_profile(noise_spec_db: &[Vec<f64>], k: f64) -> Result<NoiseProfile> {
    if noise_spec_db.is_empty() || noise_spec_db[0].is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut mu_db = Vec::with_capacity(noise_spec_db.len());
    let mut sigma_db = Vec::with_capacity(noise_spec_db.len());
    let mut thresh_db = Vec::with_capacity(noise_spec_db.len());
    for row in noise_spec_db {
        let t = row.len() as f64;
        let mu = row.iter().sum::<f64>() / t;
        let var = row.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / t;
        let sigma = var.sqrt();
        mu_db.push(mu);
        sigma_db.push(sigma);
        thresh_db.push(mu + k * sigma);
    }
    Ok(NoiseProfile {
        mu_db,
        sigma_db,
        thresh_db,
    })
}

/// Binary mask: 1 where the dB value strictly exceeds the per-frequency
/// threshold.
pub fn build_mask_stationary(sig_spec_db: &[Vec<f64>], profile: &NoiseProfile) -> Result<Mask> {
    if sig_spec_db.len() != profile.thresh_db.len() {
        return Err(Error::ShapeMismatch);
    }
    let values = sig_spec_db
        .iter()
        .zip(&profile.thresh_db)
        .map(|(row, &thresh)| {
            row.iter()
                .map(|&v| if v > thresh { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(Mask { values })
}

/// Binary mask against a local threshold: sliding mean + k * sliding std
/// per (frequency, frame).
pub fn build_mask_nonstationary(
    sig_spec_db: &[Vec<f64>],
    k: f64,
    window_frames: usize,
) -> Result<Mask> {
    let (means, stds) = sliding_stats(sig_spec_db, window_frames)?;
    let values = sig_spec_db
        .iter()
        .zip(means.iter().zip(&stds))
        .map(|(row, (mrow, srow))| {
            row.iter()
                .zip(mrow.iter().zip(srow))
                .map(|(&v, (&mu, &sigma))| {
                    if v > mu + k * sigma {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(Mask { values })
}

/// Separable triangular smoothing kernel, normalized to sum 1.
///
/// Half-extents: n_grad_freq = round(freq_smooth_hz / bin_hz),
/// n_grad_time = round(time_smooth_ms * sample_rate / (1000 * hop)).
/// Degenerate extents collapse to the 1x1 identity kernel.
pub fn smoothing_kernel(
    freq_smooth_hz: f64,
    time_smooth_ms: f64,
    sample_rate: u32,
    stft: &StftParams,
) -> Vec<Vec<f64>> {
    let bin_hz = stft.bin_hz(sample_rate);
    let n_grad_freq = (freq_smooth_hz.max(0.0) / bin_hz).round() as usize;
    let n_grad_time =
        (time_smooth_ms.max(0.0) * sample_rate as f64 / (1000.0 * stft.hop_length as f64)).round()
            as usize;
    let tri = |n: usize| -> Vec<f64> {
        if n == 0 {
            return vec![1.0];
        }
        (0..=2 * n)
            .map(|i| 1.0 - ((i as f64 - n as f64) / n as f64).abs())
            .collect()
    };
    let lf = tri(n_grad_freq);
    let lt = tri(n_grad_time);
    let z: f64 = lf.iter().sum::<f64>() * lt.iter().sum::<f64>();
    lf.iter()
        .map(|&f| lt.iter().map(|&t| f * t / z).collect())
        .collect()
}

fn smooth_mask(mask: Mask, kernel: &[Vec<f64>]) -> Result<Mask> {
    if kernel.len() == 1 && kernel[0].len() == 1 {
        return Ok(mask);
    }
    let mut values = conv2d_same(mask.values(), kernel)?;
    for row in &mut values {
        for v in row.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    }
    Ok(Mask { values })
}

/// Full gating pipeline: STFT, dB conversion, threshold mask, optional
/// smoothing, gain `1 - prop_decrease * (1 - M)` applied to the complex
/// STFT, inverse transform. Channels are processed independently; a
/// single-channel noise clip broadcasts across signal channels.
pub fn apply_gate(signal: &Signal, noise: Option<&Signal>, config: &GateConfig) -> Result<Signal> {
    config.validate()?;
    if let Some(noise) = noise {
        if noise.sample_rate() != signal.sample_rate() {
            return Err(Error::RateMismatch);
        }
        if noise.num_channels() != 1 && noise.num_channels() != signal.num_channels() {
            return Err(Error::ShapeMismatch);
        }
    }

    let mut spec = stft(signal, &config.stft)?;
    let sig_db = spec.magnitude_db(DB_EPSILON);

    let noise_db = match (config.mode, noise) {
        (GateMode::Stationary, Some(n)) => Some(stft(n, &config.stft)?.magnitude_db(DB_EPSILON)),
        _ => None,
    };

    let kernel = smoothing_kernel(
        config.freq_mask_smooth_hz,
        config.time_mask_smooth_ms,
        signal.sample_rate(),
        &config.stft,
    );

    for ch in 0..signal.num_channels() {
        let mask = match config.mode {
            GateMode::Stationary => {
                let noise_grid = match &noise_db {
                    Some(grids) => &grids[if grids.len() == 1 { 0 } else { ch }],
                    None => &sig_db[ch],
                };
                let profile = estimate_noise_profile(noise_grid, config.n_std_thresh)?;
                build_mask_stationary(&sig_db[ch], &profile)?
            }
            GateMode::NonStationary => {
                let window_frames = config.noise_window_frames(signal.sample_rate());
                build_mask_nonstationary(&sig_db[ch], config.n_std_thresh, window_frames)?
            }
        };
        let mask = if config.smoothing_enabled {
            smooth_mask(mask, &kernel)?
        } else {
            mask
        };
        let grid = spec.channel_mut(ch);
        for (row, mrow) in grid.iter_mut().zip(mask.values()) {
            for (v, &m) in row.iter_mut().zip(mrow) {
                let gain = 1.0 - config.prop_decrease * (1.0 - m);
                *v *= gain;
            }
        }
    }
    istft(&spec)
}
