//! Seeded synthetic test material: calibrated SNR mixing, white/pink noise,
//! tone bursts, amplitude-modulated noise scenes, spike recordings, and
//! step-onset events. Every generator is a pure function of its spec and
//! seed (see [`crate::rng`] for the RNG contract).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fft::Fft;
use crate::rng::Rng;
use crate::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    White,
    Pink,
}

/// Scale `noise` (tiled or truncated to the clean length) so that
/// 10*log10(P_clean / P_noise) equals `snr_db` over the full clip, using
/// RMS powers. Returns `(clean + scaled_noise, scaled_noise)` so callers
/// keep a ground-truth noise clip.
pub fn mix_at_snr(clean: &Signal, noise: &Signal, snr_db: f64) -> Result<(Signal, Signal)> {
    if clean.sample_rate() != noise.sample_rate() {
        return Err(Error::RateMismatch);
    }
    if noise.num_channels() != 1 && noise.num_channels() != clean.num_channels() {
        return Err(Error::ShapeMismatch);
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidInput("snr_db must be finite"));
    }
    let len = clean.len();
    // Tile/truncate each noise channel to the clean length.
    let fitted: Vec<Vec<f64>> = (0..clean.num_channels())
        .map(|ch| {
            let src = noise.channel(if noise.num_channels() == 1 { 0 } else { ch });
            (0..len).map(|i| src[i % src.len()]).collect()
        })
        .collect();

    let clean_power: f64 = clean
        .channels()
        .iter()
        .flat_map(|c| c.iter())
        .map(|s| s * s)
        .sum::<f64>()
        / (len * clean.num_channels()) as f64;
    let noise_power: f64 = fitted
        .iter()
        .flat_map(|c| c.iter())
        .map(|s| s * s)
        .sum::<f64>()
        / (len * clean.num_channels()) as f64;
    if clean_power == 0.0 || noise_power == 0.0 {
        return Err(Error::InvalidInput("zero-power clean or noise"));
    }
    let scale = (clean_power / noise_power / 10f64.powf(snr_db / 10.0)).sqrt();

    let scaled: Vec<Vec<f64>> = fitted
        .iter()
        .map(|c| c.iter().map(|s| s * scale).collect())
        .collect();
    let mixed: Vec<Vec<f64>> = clean
        .channels()
        .iter()
        .zip(&scaled)
        .map(|(c, n)| c.iter().zip(n).map(|(a, b)| a + b).collect())
        .collect();
    Ok((
        Signal::new(mixed, clean.sample_rate())?,
        Signal::new(scaled, clean.sample_rate())?,
    ))
}

/// Unit-RMS white (i.i.d. Gaussian) or pink (1/f magnitude-shaped) noise.
/// Pink shaping zeroes the DC bin.
pub fn gen_noise(kind: NoiseKind, duration_s: f64, sample_rate: u32, seed: u64) -> Result<Signal> {
    let n = (duration_s * sample_rate as f64).round() as usize;
    if n == 0 {
        return Err(Error::InvalidInput("duration too short"));
    }
    let mut rng = Rng::new(seed);
    let mut samples: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    if kind == NoiseKind::Pink {
        let mut spec: Vec<Complex64> =
            samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let plan = Fft::new(n);
        plan.forward(&mut spec);
        spec[0] = Complex64::new(0.0, 0.0);
        for k in 1..n {
            // Mirror bins share the same shaping so the result stays real.
            let freq_index = k.min(n - k) as f64;
            spec[k] *= 1.0 / freq_index.sqrt();
        }
        plan.inverse(&mut spec);
        samples = spec.iter().map(|v| v.re).collect();
    }
    let rms = (samples.iter().map(|s| s * s).sum::<f64>() / n as f64).sqrt();
    for s in &mut samples {
        *s /= rms;
    }
    Signal::mono(samples, sample_rate)
}

/// Bursts of a dense tone comb: tones from `f0` to `f1` spaced `step_hz`,
/// gated on for `on_s` then off for `off_s`, repeating. Peak amplitude is
/// normalized to about 0.5.
pub fn tone_bursts(
    sample_rate: u32,
    duration_s: f64,
    f0: f64,
    f1: f64,
    step_hz: f64,
    on_s: f64,
    off_s: f64,
) -> Vec<f64> {
    let n = (duration_s * sample_rate as f64).round() as usize;
    let mut freqs = Vec::new();
    let mut f = f0;
    while f <= f1 + 1e-9 {
        freqs.push(f);
        f += step_hz;
    }
    let amp = 0.5 / (freqs.len() as f64).sqrt();
    let period = on_s + off_s;
    (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate as f64;
            if t % period < on_s {
                freqs
                    .iter()
                    .map(|&fr| (2.0 * PI * fr * t).sin())
                    .sum::<f64>()
                    * amp
            } else {
                0.0
            }
        })
        .collect()
}

/// Synthetic non-stationary scene: tonal bursts plus noise whose power is
/// amplitude-modulated by a slow raised-cosine envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub duration_s: f64,
    pub sample_rate: u32,
    /// Global SNR of clean vs modulated noise, dB.
    pub snr_db: f64,
    /// Envelope modulation depth in [0, 1]; 0 keeps the noise stationary.
    pub mod_depth: f64,
    /// Raised-cosine envelope period, seconds.
    pub envelope_period_s: f64,
    pub noise_kind: NoiseKind,
    pub seed: u64,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            duration_s: 10.0,
            sample_rate: 16000,
            snr_db: 0.0,
            mod_depth: 0.9,
            envelope_period_s: 10.0,
            noise_kind: NoiseKind::White,
            seed: 0,
        }
    }
}

/// Returns `(clean, noise)` where `clean + noise` realizes the scene.
/// The noise envelope peaks at half the envelope period.
pub fn gen_tone_and_am_noise_scene(params: &SceneParams) -> Result<(Signal, Signal)> {
    if !(0.0..=1.0).contains(&params.mod_depth) {
        return Err(Error::InvalidParams("mod_depth must be in [0, 1]"));
    }
    let sr = params.sample_rate;
    // Short bursts with a low duty cycle: the clean content must look
    // transient inside the gate's sliding noise window, like song
    // syllables over a slowly swelling noise bed.
    let clean = Signal::mono(
        tone_bursts(sr, params.duration_s, 1000.0, 2000.0, 31.25, 0.15, 0.85),
        sr,
    )?;
    let base = gen_noise(params.noise_kind, params.duration_s, sr, params.seed)?;
    let depth = params.mod_depth;
    let modulated: Vec<f64> = base
        .channel(0)
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let t = i as f64 / sr as f64;
            let env = (1.0 - depth)
                + depth * 0.5 * (1.0 - (2.0 * PI * t / params.envelope_period_s).cos());
            s * env
        })
        .collect();
    let noise = Signal::mono(modulated, sr)?;
    let (_, scaled_noise) = mix_at_snr(&clean, &noise, params.snr_db)?;
    Ok((clean, scaled_noise))
}

/// Parametric synthetic extracellular recording.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeRecordingSpec {
    pub duration_s: f64,
    pub sample_rate: u32,
    pub n_units: usize,
    /// Mean firing rate per unit, Hz.
    pub spike_rate_hz: f64,
    /// Width of the biphasic template's positive lobe, ms.
    pub template_width_ms: f64,
    /// Spike peak amplitude range (inclusive), arbitrary units.
    pub amplitude_range: (f64, f64),
    /// Standard deviation of the Gaussian noise floor.
    pub noise_floor_amplitude: f64,
    /// Faint distant units contributing to the background.
    pub n_background_units: usize,
    /// Peak amplitude of background-unit templates.
    pub background_amplitude: f64,
    pub seed: u64,
}

impl Default for SpikeRecordingSpec {
    fn default() -> Self {
        SpikeRecordingSpec {
            duration_s: 60.0,
            sample_rate: 20000,
            n_units: 10,
            spike_rate_hz: 2.0,
            template_width_ms: 0.5,
            amplitude_range: (75.0, 150.0),
            noise_floor_amplitude: 10.0,
            n_background_units: 50,
            background_amplitude: 20.0,
            seed: 0,
        }
    }
}

/// Biphasic template (difference of two offset Gaussians) normalized to
/// peak absolute value 1, with the index of that peak.
fn biphasic_template(width_ms: f64, sample_rate: u32) -> (Vec<f64>, usize) {
    let sigma1 = width_ms / 1000.0 * sample_rate as f64 / 2.0;
    let sigma2 = sigma1 * 1.8;
    let offset = sigma1 * 2.2;
    let half = (sigma2 * 4.0 + offset).ceil() as isize;
    let center = half as f64;
    let raw: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let x = i as f64 - center;
            let a = (-x * x / (2.0 * sigma1 * sigma1)).exp();
            let y = x - offset;
            let b = 0.6 * (-y * y / (2.0 * sigma2 * sigma2)).exp();
            a - b
        })
        .collect();
    let (peak_idx, peak) = raw
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, v)| (i, *v))
        .unwrap();
    (raw.iter().map(|v| v / peak).collect(), peak_idx)
}

/// Generate a recording and its exact ground-truth spike times
/// `(time_s, unit_index)`. Truth times point at the template peak sample.
pub fn gen_spike_recording(spec: &SpikeRecordingSpec) -> Result<(Signal, Vec<(f64, usize)>)> {
    if spec.amplitude_range.0 <= 0.0 || spec.amplitude_range.1 < spec.amplitude_range.0 {
        return Err(Error::InvalidParams("amplitude range must be positive and ordered"));
    }
    if spec.spike_rate_hz < 0.0 {
        return Err(Error::InvalidParams("spike rate must be >= 0"));
    }
    let sr = spec.sample_rate;
    let n = (spec.duration_s * sr as f64).round() as usize;
    if n == 0 {
        return Err(Error::InvalidInput("duration too short"));
    }
    let mut rng = Rng::new(spec.seed);
    let mut samples = vec![0.0f64; n];
    let mut truth: Vec<(f64, usize)> = Vec::new();

    let place_train =
        |samples: &mut [f64], rng: &mut Rng, rate: f64, amp: f64, width_ms: f64| -> Vec<usize> {
            let (template, peak_idx) = biphasic_template(width_ms, sr);
            let mut peaks = Vec::new();
            if rate <= 0.0 {
                return peaks;
            }
            let mut t = rng.exponential(rate);
            while t < spec.duration_s {
                let peak_sample = (t * sr as f64).round() as isize;
                let start = peak_sample - peak_idx as isize;
                for (j, &v) in template.iter().enumerate() {
                    let idx = start + j as isize;
                    if idx >= 0 && (idx as usize) < samples.len() {
                        samples[idx as usize] += amp * v;
                    }
                }
                if peak_sample >= 0 && (peak_sample as usize) < samples.len() {
                    peaks.push(peak_sample as usize);
                }
                t += rng.exponential(rate);
            }
            peaks
        };

    for unit in 0..spec.n_units {
        let amp = rng.uniform_range(spec.amplitude_range.0, spec.amplitude_range.1);
        let width = spec.template_width_ms * rng.uniform_range(0.8, 1.2);
        let peaks = place_train(&mut samples, &mut rng, spec.spike_rate_hz, amp, width);
        for p in peaks {
            truth.push((p as f64 / sr as f64, unit));
        }
    }
    for _ in 0..spec.n_background_units {
        let amp = rng.uniform_range(0.3, 1.0) * spec.background_amplitude;
        let width = spec.template_width_ms * rng.uniform_range(0.8, 1.5);
        place_train(&mut samples, &mut rng, spec.spike_rate_hz, amp, width);
    }
    for s in &mut samples {
        *s += rng.normal() * spec.noise_floor_amplitude;
    }
    truth.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok((Signal::mono(samples, sr)?, truth))
}

/// Seismic-like event: a low-amplitude noise floor with a decaying
/// oscillatory wavelet of `amplitude_ratio` times the pre-onset RMS
/// starting at `onset_s`.
pub fn gen_onset_event(
    duration_s: f64,
    onset_s: f64,
    amplitude_ratio: f64,
    sample_rate: u32,
    seed: u64,
) -> Result<Signal> {
    if !(0.0 < onset_s && onset_s < duration_s) {
        return Err(Error::InvalidParams("require 0 < onset_s < duration_s"));
    }
    let sr = sample_rate;
    let n = (duration_s * sr as f64).round() as usize;
    let mut rng = Rng::new(seed);
    let floor = 0.01;
    let mut samples: Vec<f64> = (0..n).map(|_| rng.normal() * floor).collect();
    let onset_idx = (onset_s * sr as f64).round() as usize;
    let pre_rms = (samples[..onset_idx].iter().map(|s| s * s).sum::<f64>()
        / onset_idx as f64)
        .sqrt();
    let amp = amplitude_ratio * pre_rms;
    let freq = 8.0;
    let tau = 2.0;
    for i in onset_idx..n {
        let t = (i - onset_idx) as f64 / sr as f64;
        samples[i] += amp * (-t / tau).exp() * (2.0 * PI * freq * t).sin();
    }
    Signal::mono(samples, sr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{sta_lta_onset, StaLtaParams};

    #[test]
    fn mix_equal_power_at_zero_db() {
        let clean = Signal::mono(vec![0.1; 1000], 8000).unwrap();
        let noise_samples: Vec<f64> =
            (0..1000).map(|i| if i % 2 == 0 { 0.4 } else { -0.4 }).collect();
        let noise = Signal::mono(noise_samples, 8000).unwrap();
        let (_, scaled) = mix_at_snr(&clean, &noise, 0.0).unwrap();
        assert!((scaled.rms() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn mix_twenty_db_power_ratio() {
        let mut rng = Rng::new(1);
        let clean = Signal::mono((0..4000).map(|_| rng.normal() * 0.2).collect(), 8000).unwrap();
        let noise = Signal::mono((0..4000).map(|_| rng.normal()).collect(), 8000).unwrap();
        let (_, scaled) = mix_at_snr(&clean, &noise, 20.0).unwrap();
        let ratio = clean.rms().powi(2) / scaled.rms().powi(2);
        assert!((ratio - 100.0).abs() < 1e-9 * 100.0);
    }

    #[test]
    fn mix_self_consistency() {
        let mut rng = Rng::new(2);
        let clean = Signal::mono((0..8000).map(|_| rng.normal() * 0.3).collect(), 8000).unwrap();
        let noise = Signal::mono((0..3000).map(|_| rng.normal()).collect(), 8000).unwrap();
        for &target in &[-5.0, 0.0, 7.5, 15.0] {
            let (mixed, scaled) = mix_at_snr(&clean, &noise, target).unwrap();
            let recovered: Vec<f64> = mixed
                .channel(0)
                .iter()
                .zip(scaled.channel(0))
                .map(|(m, s)| m - s)
                .collect();
            let cp: f64 = recovered.iter().map(|s| s * s).sum();
            let np: f64 = scaled.channel(0).iter().map(|s| s * s).sum();
            let measured = 10.0 * (cp / np).log10();
            assert!((measured - target).abs() < 1e-9, "target {target}: {measured}");
        }
    }

    #[test]
    fn mix_rejects_zero_power() {
        let clean = Signal::mono(vec![0.0; 100], 8000).unwrap();
        let noise = Signal::mono(vec![0.1; 100], 8000).unwrap();
        assert!(mix_at_snr(&clean, &noise, 0.0).is_err());
        assert!(mix_at_snr(&noise, &clean, 0.0).is_err());
    }

    #[test]
    fn noise_deterministic_per_seed() {
        let a = gen_noise(NoiseKind::Pink, 0.5, 8000, 9).unwrap();
        let b = gen_noise(NoiseKind::Pink, 0.5, 8000, 9).unwrap();
        assert_eq!(a.channel(0), b.channel(0));
        let c = gen_noise(NoiseKind::Pink, 0.5, 8000, 10).unwrap();
        assert_ne!(a.channel(0), c.channel(0));
    }

    /// Mean power spectral density per octave band, in dB.
    fn octave_band_psd_db(signal: &Signal, bands: &[(f64, f64)]) -> Vec<f64> {
        let samples = signal.channel(0);
        let n = samples.len();
        let mut spec: Vec<Complex64> =
            samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        Fft::new(n).forward(&mut spec);
        let bin_hz = signal.sample_rate() as f64 / n as f64;
        bands
            .iter()
            .map(|&(lo, hi)| {
                let k0 = (lo / bin_hz).ceil() as usize;
                let k1 = ((hi / bin_hz).floor() as usize).min(n / 2);
                let power: f64 = (k0..k1).map(|k| spec[k].norm_sqr()).sum();
                10.0 * (power / (k1 - k0) as f64).log10()
            })
            .collect()
    }

    const OCTAVES: [(f64, f64); 6] = [
        (125.0, 250.0),
        (250.0, 500.0),
        (500.0, 1000.0),
        (1000.0, 2000.0),
        (2000.0, 4000.0),
        (4000.0, 8000.0),
    ];

    #[test]
    fn white_noise_flat_psd_across_octaves() {
        let sig = gen_noise(NoiseKind::White, 10.0, 16000, 3).unwrap();
        let psd = octave_band_psd_db(&sig, &OCTAVES);
        let mean = psd.iter().sum::<f64>() / psd.len() as f64;
        for (i, p) in psd.iter().enumerate() {
            assert!((p - mean).abs() <= 1.5, "band {i}: {} vs mean {mean}", p);
        }
    }

    #[test]
    fn pink_noise_drops_three_db_per_octave() {
        let sig = gen_noise(NoiseKind::Pink, 10.0, 16000, 3).unwrap();
        let psd = octave_band_psd_db(&sig, &OCTAVES);
        for pair in psd.windows(2) {
            let drop = pair[0] - pair[1];
            assert!((drop - 3.0).abs() <= 1.0, "octave drop {drop}");
        }
    }

    #[test]
    fn scene_zero_depth_is_stationary() {
        let params = SceneParams {
            duration_s: 2.0,
            mod_depth: 0.0,
            seed: 5,
            ..SceneParams::default()
        };
        let (_, noise) = gen_tone_and_am_noise_scene(&params).unwrap();
        // Compare early/late RMS windows: constant envelope.
        let n = noise.len();
        let q = n / 4;
        let rms = |s: &[f64]| (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
        let early = rms(&noise.channel(0)[..q]);
        let late = rms(&noise.channel(0)[n - q..]);
        assert!((early / late - 1.0).abs() < 0.1);
    }

    #[test]
    fn scene_envelope_peaks_at_mid_period() {
        let params = SceneParams {
            duration_s: 10.0,
            envelope_period_s: 10.0,
            mod_depth: 0.9,
            seed: 5,
            ..SceneParams::default()
        };
        let (_, noise) = gen_tone_and_am_noise_scene(&params).unwrap();
        let sr = noise.sample_rate() as usize;
        let rms = |s: &[f64]| (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
        let mid = rms(&noise.channel(0)[4 * sr..6 * sr]);
        let edge = rms(&noise.channel(0)[..sr]);
        assert!(mid > 3.0 * edge, "mid {mid} edge {edge}");
    }

    #[test]
    fn spikes_zero_rate_is_background_only() {
        let spec = SpikeRecordingSpec {
            duration_s: 1.0,
            spike_rate_hz: 0.0,
            n_background_units: 0,
            seed: 1,
            ..SpikeRecordingSpec::default()
        };
        let (sig, truth) = gen_spike_recording(&spec).unwrap();
        assert!(truth.is_empty());
        // Pure Gaussian floor.
        assert!(sig.rms() < 3.0 * spec.noise_floor_amplitude);
    }

    #[test]
    fn spike_truth_aligns_with_clean_extrema() {
        let spec = SpikeRecordingSpec {
            duration_s: 10.0,
            n_units: 1,
            spike_rate_hz: 1.0,
            noise_floor_amplitude: 0.0,
            n_background_units: 0,
            seed: 7,
            ..SpikeRecordingSpec::default()
        };
        let (sig, truth) = gen_spike_recording(&spec).unwrap();
        assert!((5..=20).contains(&truth.len()), "{} spikes", truth.len());
        let samples = sig.channel(0);
        let sr = sig.sample_rate() as f64;
        let tol = (0.2e-3 * sr).round() as usize;
        for &(t, _) in &truth {
            let idx = (t * sr).round() as usize;
            let lo = idx.saturating_sub(tol);
            let hi = (idx + tol).min(samples.len() - 1);
            let local_max = samples[lo..=hi]
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()));
            // The truth sample is the local extremum (no overlap at 1 Hz).
            assert!((samples[idx].abs() - local_max).abs() < 1e-9);
        }
    }

    #[test]
    fn spike_degenerate_amplitude_range() {
        let spec = SpikeRecordingSpec {
            duration_s: 10.0,
            n_units: 3,
            spike_rate_hz: 1.0,
            amplitude_range: (100.0, 100.0),
            noise_floor_amplitude: 0.0,
            n_background_units: 0,
            seed: 8,
            ..SpikeRecordingSpec::default()
        };
        let (sig, truth) = gen_spike_recording(&spec).unwrap();
        let samples = sig.channel(0);
        let sr = sig.sample_rate() as f64;
        for &(t, _) in &truth {
            let idx = (t * sr).round() as usize;
            // Isolated peaks sit at exactly the common amplitude;
            // overlapping spikes may superpose.
            assert!(samples[idx].abs() <= 300.0 + 1e-9);
        }
        let max = samples.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(max >= 100.0 - 1e-9);
    }

    #[test]
    fn onset_event_ratio_one_is_undetectable() {
        let sig = gen_onset_event(20.0, 10.0, 1.0, 100, 3).unwrap();
        let params = StaLtaParams {
            sta_s: 0.5,
            lta_s: 5.0,
            trigger_ratio: 4.0,
        };
        assert_eq!(sta_lta_onset(&sig, &params).unwrap(), None);
    }

    #[test]
    fn onset_event_ratio_ten_triggers_near_onset() {
        let sig = gen_onset_event(20.0, 10.0, 10.0, 100, 3).unwrap();
        let params = StaLtaParams {
            sta_s: 0.5,
            lta_s: 5.0,
            trigger_ratio: 4.0,
        };
        let onset = sta_lta_onset(&sig, &params).unwrap().unwrap();
        assert!((10.0..=10.5).contains(&onset), "onset {onset}");
    }

    #[test]
    fn onset_event_deterministic() {
        let a = gen_onset_event(5.0, 2.0, 8.0, 100, 11).unwrap();
        let b = gen_onset_event(5.0, 2.0, 8.0, 100, 11).unwrap();
        assert_eq!(a.channel(0), b.channel(0));
    }

    #[test]
    fn onset_event_rejects_bad_onset() {
        assert!(gen_onset_event(5.0, 0.0, 8.0, 100, 1).is_err());
        assert!(gen_onset_event(5.0, 5.0, 8.0, 100, 1).is_err());
    }
}
