//! Conventional comparison filters: local-statistics Wiener, iterative
//! Wiener with LPC, Savitzky-Golay smoothing, and spectral subtraction.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fft::Fft;
use crate::stft::{istft, stft, StftParams};
use crate::window::Window;
use crate::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WienerParams {
    /// Sliding window length in samples, odd and >= 3.
    pub window_size: usize,
}

impl Default for WienerParams {
    fn default() -> Self {
        WienerParams { window_size: 15 }
    }
}

impl WienerParams {
    fn validate(&self) -> Result<()> {
        if self.window_size < 3 || self.window_size % 2 == 0 {
            return Err(Error::InvalidParams("window_size must be odd and >= 3"));
        }
        Ok(())
    }
}

/// Local-statistics Wiener filter:
/// `x_hat[n] = mu_n + max(0, var_n - nu2) / var_n * (y[n] - mu_n)`
/// with `nu2` the mean of all local variances. Where `var_n <= nu2` the
/// output is the local mean. Windows truncate at the edges.
pub fn wiener_filter(signal: &Signal, params: &WienerParams) -> Result<Signal> {
    params.validate()?;
    if signal.len() < params.window_size {
        return Err(Error::InputTooShort);
    }
    let half = params.window_size / 2;
    signal.map_channels(|samples| {
        let n = samples.len();
        let mut means = Vec::with_capacity(n);
        let mut vars = Vec::with_capacity(n);
        for i in 0..n {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let win = &samples[lo..=hi];
            let count = win.len() as f64;
            let mu = win.iter().sum::<f64>() / count;
            let var = win.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / count;
            means.push(mu);
            vars.push(var);
        }
        let nu2 = vars.iter().sum::<f64>() / n as f64;
        Ok((0..n)
            .map(|i| {
                if vars[i] > nu2 {
                    let gain = (vars[i] - nu2) / vars[i];
                    means[i] + gain * (samples[i] - means[i])
                } else {
                    means[i]
                }
            })
            .collect())
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterWienerParams {
    /// Analysis frame length in samples (50% overlap-add).
    pub frame_size: usize,
    pub lpc_order: usize,
    /// Noise-estimate smoothing factor in (0, 1).
    pub alpha: f64,
    /// Speech/silence decision factor: a frame is speech when its mean
    /// energy exceeds `energy_threshold` times the running noise estimate.
    pub energy_threshold: f64,
    pub iterations: usize,
}

impl IterWienerParams {
    /// 32 ms frames, LPC order 10, alpha 0.9, threshold factor 1.5,
    /// 3 iterations.
    pub fn for_rate(sample_rate: u32) -> Self {
        let frame = ((0.032 * sample_rate as f64).round() as usize).max(32);
        IterWienerParams {
            frame_size: frame + frame % 2,
            lpc_order: 10,
            alpha: 0.9,
            energy_threshold: 1.5,
            iterations: 3,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lpc_order == 0 || self.lpc_order >= self.frame_size {
            return Err(Error::InvalidParams("require 0 < lpc_order < frame_size"));
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::InvalidParams("alpha must be in (0, 1)"));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParams("iterations must be >= 1"));
        }
        Ok(())
    }
}

/// IIR noise-estimate update for a silence frame:
/// `P_n <- alpha * P_n + (1 - alpha) * frame_energy`.
pub fn update_noise_estimate(p_n: f64, alpha: f64, frame_energy: f64) -> f64 {
    alpha * p_n + (1.0 - alpha) * frame_energy
}

/// Frequency-domain Wiener gain `P_x / (P_x + P_n)`; in [0, 1) for
/// positive noise power.
pub fn wiener_gain(p_x: f64, p_n: f64) -> f64 {
    p_x / (p_x + p_n)
}

/// LPC coefficients `a[1..=order]` (prediction polynomial
/// `A(z) = 1 + sum a_k z^-k`) and the per-sample prediction error power,
/// via the autocorrelation method and Levinson-Durbin. Returns None for a
/// zero-energy frame.
pub fn lpc_coefficients(frame: &[f64], order: usize) -> Option<(Vec<f64>, f64)> {
    let n = frame.len();
    let mut r = vec![0.0; order + 1];
    for (k, rk) in r.iter_mut().enumerate() {
        *rk = frame[..n - k]
            .iter()
            .zip(&frame[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
    }
    if r[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = r[0];
    for i in 1..=order {
        let mut acc = r[i];
        for j in 1..i {
            acc += a[j] * r[i - j];
        }
        let reflection = -acc / err;
        let prev = a.clone();
        for j in 1..i {
            a[j] = prev[j] + reflection * prev[i - j];
        }
        a[i] = reflection;
        err *= 1.0 - reflection * reflection;
        if err <= 0.0 {
            return None;
        }
    }
    Some((a[1..].to_vec(), err))
}

/// All-pole power spectrum `g2 / |A(e^{jw})|^2` sampled at `n_bins` DFT
/// frequencies.
fn allpole_spectrum(lpc: &[f64], g2: f64, n_bins: usize, plan: &Fft) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n_bins];
    buf[0] = Complex64::new(1.0, 0.0);
    for (k, &c) in lpc.iter().enumerate() {
        buf[(k + 1) % n_bins] += Complex64::new(c, 0.0);
    }
    plan.forward(&mut buf);
    buf.iter()
        .map(|v| {
            let denom = v.norm_sqr().max(1e-12);
            g2 / denom
        })
        .collect()
}

/// Iterative Wiener: frame-wise LPC spectral estimation with a
/// frequency-domain Wiener gain, noise tracked through silence frames,
/// 50% overlap-add reconstruction.
pub fn iterative_wiener(signal: &Signal, params: &IterWienerParams) -> Result<Signal> {
    params.validate()?;
    if signal.len() < params.frame_size {
        return Err(Error::InputTooShort);
    }
    let frame_len = params.frame_size;
    let hop = frame_len / 2;
    let window = Window::Hann.evaluate(frame_len);
    let plan = Fft::new(frame_len);

    signal.map_channels(|samples| {
        let n = samples.len();
        let n_frames = n.div_ceil(hop);
        let padded = (n_frames - 1) * hop + frame_len;
        let mut acc = vec![0.0; padded];
        let mut norm = vec![0.0; padded];
        // Noise estimate primed from the first frame.
        let mut p_n: Option<f64> = None;
        for f in 0..n_frames {
            let start = f * hop;
            let frame: Vec<f64> = (0..frame_len)
                .map(|j| {
                    let idx = start + j;
                    if idx < n {
                        samples[idx] * window[j]
                    } else {
                        0.0
                    }
                })
                .collect();
            let energy = frame.iter().map(|v| v * v).sum::<f64>() / frame_len as f64;
            let noise_power = *p_n.get_or_insert(energy.max(1e-12));
            let is_speech = energy > params.energy_threshold * noise_power;
            if !is_speech {
                p_n = Some(update_noise_estimate(noise_power, params.alpha, energy));
            }
            let noise_power = p_n.unwrap();

            let rounds = if is_speech { params.iterations } else { 1 };
            let mut spectrum: Vec<Complex64> =
                frame.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            plan.forward(&mut spectrum);
            let mut estimate = frame.clone();
            let mut filtered = spectrum.clone();
            for _ in 0..rounds {
                let Some((lpc, g2)) = lpc_coefficients(&estimate, params.lpc_order) else {
                    // Zero-energy frame: nothing to reconstruct.
                    filtered = vec![Complex64::new(0.0, 0.0); frame_len];
                    break;
                };
                let p_x = allpole_spectrum(&lpc, g2, frame_len, &plan);
                filtered = spectrum
                    .iter()
                    .zip(&p_x)
                    .map(|(s, &px)| s * wiener_gain(px, noise_power))
                    .collect();
                let mut time = filtered.clone();
                plan.inverse(&mut time);
                estimate = time.iter().map(|v| v.re).collect();
            }
            let mut time = filtered;
            plan.inverse(&mut time);
            for j in 0..frame_len {
                acc[start + j] += time[j].re * window[j];
                norm[start + j] += window[j] * window[j];
            }
        }
        Ok((0..n)
            .map(|i| if norm[i] > 1e-12 { acc[i] / norm[i] } else { 0.0 })
            .collect())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SavGolParams {
    /// Window length 2m+1, odd.
    pub window_size: usize,
    pub poly_order: usize,
}

impl Default for SavGolParams {
    fn default() -> Self {
        SavGolParams {
            window_size: 11,
            poly_order: 3,
        }
    }
}

/// Solve a small symmetric linear system by Gaussian elimination with
/// partial pivoting.
fn solve_dense(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &c| m[a][col].abs().total_cmp(&m[c][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Least-squares fit of a degree-`order` polynomial to `(xs, ys)`;
/// returns the polynomial coefficients (constant term first).
fn polyfit(xs: &[f64], ys: &[f64], order: usize) -> Option<Vec<f64>> {
    let terms = order + 1;
    let mut ata = vec![vec![0.0; terms]; terms];
    let mut atb = vec![0.0; terms];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut powers = vec![1.0; terms];
        for k in 1..terms {
            powers[k] = powers[k - 1] * x;
        }
        for i in 0..terms {
            for j in 0..terms {
                ata[i][j] += powers[i] * powers[j];
            }
            atb[i] += powers[i] * y;
        }
    }
    solve_dense(ata, atb)
}

/// Interior convolution coefficients c_{-m}..c_{m} for the given window
/// and polynomial order: the least-squares fit evaluated at the window
/// center.
pub fn savgol_coefficients(window_size: usize, poly_order: usize) -> Result<Vec<f64>> {
    if window_size % 2 == 0 || poly_order >= window_size {
        return Err(Error::InvalidParams("require odd window_size > poly_order"));
    }
    let m = (window_size / 2) as isize;
    let xs: Vec<f64> = (-m..=m).map(|j| j as f64).collect();
    // c_j is the weight of y_j in the fitted value at x = 0, i.e. the
    // constant coefficient when fitting a unit impulse at j.
    let mut coeffs = Vec::with_capacity(window_size);
    for j in 0..window_size {
        let mut ys = vec![0.0; window_size];
        ys[j] = 1.0;
        let poly =
            polyfit(&xs, &ys, poly_order).ok_or(Error::InvalidParams("singular fit"))?;
        coeffs.push(poly[0]);
    }
    Ok(coeffs)
}

/// Savitzky-Golay smoothing: interior samples by convolution with the
/// least-squares coefficients; edges by refitting on the truncated
/// one-sided window (order clamped to the available points).
pub fn savitzky_golay(signal: &Signal, params: &SavGolParams) -> Result<Signal> {
    if params.window_size % 2 == 0 || params.poly_order >= params.window_size {
        return Err(Error::InvalidParams("require odd window_size > poly_order"));
    }
    if signal.len() < params.window_size {
        return Err(Error::InputTooShort);
    }
    let m = params.window_size / 2;
    let coeffs = savgol_coefficients(params.window_size, params.poly_order)?;
    signal.map_channels(|samples| {
        let n = samples.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i >= m && i + m < n {
                let acc: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c * samples[i - m + k])
                    .sum();
                out.push(acc);
            } else {
                let lo = i.saturating_sub(m);
                let hi = (i + m).min(n - 1);
                let xs: Vec<f64> = (lo..=hi).map(|j| j as f64 - i as f64).collect();
                let order = params.poly_order.min(xs.len() - 1);
                let poly = polyfit(&xs, &samples[lo..=hi], order)
                    .ok_or(Error::InvalidParams("singular fit"))?;
                out.push(poly[0]);
            }
        }
        Ok(out)
    })
}

/// Magnitude floor rule of spectral subtraction.
pub fn subtract_magnitude(noisy: f64, noise_estimate: f64) -> f64 {
    (noisy - noise_estimate).max(0.0)
}

/// Spectral subtraction: subtract the noise clip's mean magnitude
/// spectrum per bin, floor at zero, keep the noisy phase.
pub fn spectral_subtraction(
    signal: &Signal,
    noise: &Signal,
    params: &StftParams,
) -> Result<Signal> {
    if signal.sample_rate() != noise.sample_rate() {
        return Err(Error::RateMismatch);
    }
    if noise.num_channels() != 1 && noise.num_channels() != signal.num_channels() {
        return Err(Error::ShapeMismatch);
    }
    let mut spec = stft(signal, params)?;
    let noise_spec = stft(noise, params)?;
    // Mean magnitude per bin for each noise channel.
    let noise_mean: Vec<Vec<f64>> = (0..noise_spec.num_channels())
        .map(|ch| {
            noise_spec
                .channel(ch)
                .iter()
                .map(|row| row.iter().map(|v| v.norm()).sum::<f64>() / row.len() as f64)
                .collect()
        })
        .collect();
    for ch in 0..spec.num_channels() {
        let est = &noise_mean[if noise_mean.len() == 1 { 0 } else { ch }];
        for (bin, row) in spec.channel_mut(ch).iter_mut().enumerate() {
            for v in row.iter_mut() {
                let mag = v.norm();
                if mag > 0.0 {
                    *v *= subtract_magnitude(mag, est[bin]) / mag;
                }
            }
        }
    }
    istft(&spec)
}
