//! Short-time Fourier transform and overlap-add inverse.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fft::Fft;
use crate::window::{is_cola, Window};
use crate::{Error, Result, Signal};

/// Stability offset added before taking log magnitudes (-240 dB floor).
pub const DB_EPSILON: f64 = 1e-12;

/// Transform parameters. Frames are centered: the input is reflect-padded by
/// `n_fft/2` on both ends so frame `t` is centered at sample `t * hop_length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftParams {
    pub n_fft: usize,
    pub win_length: usize,
    pub hop_length: usize,
    pub window: Window,
}

impl StftParams {
    pub fn new(n_fft: usize, win_length: usize, hop_length: usize, window: Window) -> Self {
        StftParams {
            n_fft,
            win_length,
            hop_length,
            window,
        }
    }

    /// n_fft 1024, full-length Hann window, hop n_fft/4.
    pub fn default_audio() -> Self {
        StftParams::new(1024, 1024, 256, Window::Hann)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hop_length == 0
            || self.hop_length > self.win_length
            || self.win_length > self.n_fft
        {
            return Err(Error::InvalidParams(
                "require 0 < hop_length <= win_length <= n_fft",
            ));
        }
        let w = self.window.evaluate(self.win_length);
        if !is_cola(&w, self.hop_length) {
            return Err(Error::InvalidParams("window/hop pair is not COLA"));
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// Frequency resolution in Hz.
    pub fn bin_hz(&self, sample_rate: u32) -> f64 {
        sample_rate as f64 / self.n_fft as f64
    }
}

/// One-sided complex STFT grid per channel, `bins x frames`, plus the
/// parameters and original length needed to invert it.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    /// values[channel][bin][frame]
    values: Vec<Vec<Vec<Complex64>>>,
    params: StftParams,
    sample_rate: u32,
    original_len: usize,
}

impl Spectrogram {
    pub fn num_channels(&self) -> usize {
        self.values.len()
    }

    pub fn bins(&self) -> usize {
        self.values[0].len()
    }

    pub fn frames(&self) -> usize {
        self.values[0][0].len()
    }

    pub fn params(&self) -> &StftParams {
        &self.params
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn channel(&self, ch: usize) -> &[Vec<Complex64>] {
        &self.values[ch]
    }

    pub fn channel_mut(&mut self, ch: usize) -> &mut [Vec<Complex64>] {
        &mut self.values[ch]
    }

    /// Magnitude in dB per channel: 20*log10(|S| + epsilon).
    pub fn magnitude_db(&self, epsilon: f64) -> Vec<Vec<Vec<f64>>> {
        self.values
            .iter()
            .map(|ch| {
                ch.iter()
                    .map(|row| row.iter().map(|v| 20.0 * (v.norm() + epsilon).log10()).collect())
                    .collect()
            })
            .collect()
    }
}

/// 20*log10(magnitude + epsilon).
pub fn to_db(magnitude: f64, epsilon: f64) -> Result<f64> {
    if magnitude < 0.0 || !magnitude.is_finite() {
        return Err(Error::InvalidInput("magnitude must be finite and >= 0"));
    }
    if epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive"));
    }
    Ok(20.0 * (magnitude + epsilon).log10())
}

fn reflect_index(i: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let mut i = i.rem_euclid(period);
    if i >= len as isize {
        i = period - i;
    }
    i as usize
}

/// Centered one-sided STFT of every channel.
pub fn stft(signal: &Signal, params: &StftParams) -> Result<Spectrogram> {
    params.validate()?;
    if signal.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_fft = params.n_fft;
    let hop = params.hop_length;
    let pad = n_fft / 2;
    let len = signal.len();
    let padded_len = len + 2 * pad;
    let n_frames = 1 + (padded_len - n_fft) / hop;
    let bins = params.bins();

    let window = params.window.evaluate(params.win_length);
    let win_offset = (n_fft - params.win_length) / 2;
    let plan = Fft::new(n_fft);

    let mut values = Vec::with_capacity(signal.num_channels());
    for ch in signal.channels() {
        let mut grid = vec![vec![Complex64::new(0.0, 0.0); n_frames]; bins];
        let mut frame = vec![Complex64::new(0.0, 0.0); n_fft];
        for t in 0..n_frames {
            let start = t as isize * hop as isize - pad as isize;
            frame.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (j, &w) in window.iter().enumerate() {
                let src = reflect_index(start + (win_offset + j) as isize, len);
                frame[win_offset + j] = Complex64::new(ch[src] * w, 0.0);
            }
            plan.forward(&mut frame);
            for (b, row) in grid.iter_mut().enumerate() {
                row[t] = frame[b];
            }
        }
        values.push(grid);
    }
    Ok(Spectrogram {
        values,
        params: *params,
        sample_rate: signal.sample_rate(),
        original_len: len,
    })
}

/// Weighted overlap-add inverse; restores the pre-padding length.
pub fn istft(spec: &Spectrogram) -> Result<Signal> {
    let params = &spec.params;
    params.validate()?;
    let n_fft = params.n_fft;
    let hop = params.hop_length;
    let pad = n_fft / 2;
    let n_frames = spec.frames();
    let bins = spec.bins();
    let out_padded = (n_frames - 1) * hop + n_fft;

    let window = params.window.evaluate(params.win_length);
    let win_offset = (n_fft - params.win_length) / 2;
    let plan = Fft::new(n_fft);

    let mut channels = Vec::with_capacity(spec.num_channels());
    for ch in 0..spec.num_channels() {
        let grid = spec.channel(ch);
        let mut acc = vec![0.0f64; out_padded];
        let mut norm = vec![0.0f64; out_padded];
        let mut frame = vec![Complex64::new(0.0, 0.0); n_fft];
        for t in 0..n_frames {
            // Rebuild the full spectrum from the one-sided half.
            for b in 0..bins {
                frame[b] = grid[b][t];
            }
            for b in bins..n_fft {
                frame[b] = grid[n_fft - b][t].conj();
            }
            plan.inverse(&mut frame);
            let start = t * hop;
            for (j, &w) in window.iter().enumerate() {
                let idx = start + win_offset + j;
                acc[idx] += frame[win_offset + j].re * w;
                norm[idx] += w * w;
            }
        }
        let mut out = Vec::with_capacity(spec.original_len);
        for i in 0..spec.original_len {
            let idx = i + pad;
            let n = norm[idx];
            out.push(if n > 1e-12 { acc[idx] / n } else { 0.0 });
        }
        channels.push(out);
    }
    Signal::new(channels, spec.sample_rate)
}
