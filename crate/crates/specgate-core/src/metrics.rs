//! Evaluation metrics: SDR, segmental SNR, STA/LTA onset detection,
//! threshold peak detection, and ROC/AUC for event detectors.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, Signal};

/// SegSNR segment length when none is given.
pub const DEFAULT_SEGMENT_MS: f64 = 30.0;
/// SegSNR clamp range; keeps silent segments from diverging.
pub const DEFAULT_SEGSNR_CLAMP: (f64, f64) = (-10.0, 35.0);

/// Named metric values with per-item and aggregate statistics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    entries: Vec<(String, Vec<f64>)>,
}

impl MetricsReport {
    pub fn new() -> Self {
        MetricsReport::default()
    }

    /// Append a value under a metric name, preserving insertion order.
    pub fn push(&mut self, name: &str, value: f64) {
        if let Some((_, values)) = self.entries.iter_mut().find(|(n, _)| n == name) {
            values.push(value);
        } else {
            self.entries.push((String::from(name), alloc::vec![value]));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn metrics(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(n, v)| (n.as_str(), v.as_slice()))
    }

    pub fn values(&self, name: &str) -> Option<&[f64]> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn mean(&self, name: &str) -> Option<f64> {
        self.values(name).map(mean)
    }

    /// Standard error of the mean (sample std / sqrt(n)); None for n < 2.
    pub fn sem(&self, name: &str) -> Option<f64> {
        self.values(name).and_then(sem)
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sem(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    Some(var.sqrt() / (n as f64).sqrt())
}

fn check_pair(clean: &Signal, estimate: &Signal) -> Result<()> {
    if clean.sample_rate() != estimate.sample_rate() {
        return Err(Error::RateMismatch);
    }
    if clean.len() != estimate.len() || clean.num_channels() != estimate.num_channels() {
        return Err(Error::ShapeMismatch);
    }
    Ok(())
}

/// Source-to-distortion ratio: 10*log10(sum x^2 / sum (x - x_hat)^2).
/// A zero residual returns +infinity.
pub fn sdr(clean: &Signal, estimate: &Signal) -> Result<f64> {
    check_pair(clean, estimate)?;
    let mut signal_power = 0.0;
    let mut residual_power = 0.0;
    for (c, e) in clean.channels().iter().zip(estimate.channels()) {
        for (x, y) in c.iter().zip(e) {
            signal_power += x * x;
            residual_power += (x - y) * (x - y);
        }
    }
    if signal_power == 0.0 {
        return Err(Error::InvalidReference("all-zero clean signal"));
    }
    if residual_power == 0.0 {
        return Ok(f64::infinity());
    }
    Ok(10.0 * (signal_power / residual_power).log10())
}

/// Mean of per-segment SNRs, each clamped to `[clamp.0, clamp.1]` dB.
/// A trailing partial segment is discarded.
pub fn segsnr(
    clean: &Signal,
    estimate: &Signal,
    segment_ms: f64,
    clamp: (f64, f64),
) -> Result<f64> {
    check_pair(clean, estimate)?;
    let seg_len = (segment_ms * clean.sample_rate() as f64 / 1000.0) as usize;
    if seg_len == 0 || clean.len() < seg_len {
        return Err(Error::InputTooShort);
    }
    let n_segments = clean.len() / seg_len;
    let mut total = 0.0;
    let mut count = 0usize;
    for (c, e) in clean.channels().iter().zip(estimate.channels()) {
        for s in 0..n_segments {
            let lo = s * seg_len;
            let hi = lo + seg_len;
            let mut sp = 0.0;
            let mut rp = 0.0;
            for i in lo..hi {
                sp += c[i] * c[i];
                let d = c[i] - e[i];
                rp += d * d;
            }
            let snr = if rp == 0.0 {
                f64::infinity()
            } else if sp == 0.0 {
                f64::neg_infinity()
            } else {
                10.0 * (sp / rp).log10()
            };
            total += snr.clamp(clamp.0, clamp.1);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// STA/LTA trigger parameters: trailing short/long window lengths in
/// seconds and the ratio that marks an onset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaLtaParams {
    pub sta_s: f64,
    pub lta_s: f64,
    pub trigger_ratio: f64,
}

impl Default for StaLtaParams {
    fn default() -> Self {
        StaLtaParams {
            sta_s: 0.5,
            lta_s: 10.0,
            trigger_ratio: 4.0,
        }
    }
}

/// First time (seconds) the trailing STA/LTA ratio of squared samples
/// exceeds the trigger, evaluated once the LTA window is fully populated.
pub fn sta_lta_onset(signal: &Signal, params: &StaLtaParams) -> Result<Option<f64>> {
    if !(params.lta_s > params.sta_s && params.sta_s > 0.0) {
        return Err(Error::InvalidParams("require lta_s > sta_s > 0"));
    }
    let sr = signal.sample_rate() as f64;
    let sta_len = (params.sta_s * sr).round() as usize;
    let lta_len = (params.lta_s * sr).round() as usize;
    if sta_len == 0 || lta_len > signal.len() {
        return Err(Error::InputTooShort);
    }
    let samples = signal.channel(0);
    // Prefix sums of squared samples for O(1) trailing averages.
    let mut ps = Vec::with_capacity(samples.len() + 1);
    ps.push(0.0);
    for &s in samples {
        ps.push(ps.last().unwrap() + s * s);
    }
    for i in (lta_len - 1)..samples.len() {
        let sta = (ps[i + 1] - ps[i + 1 - sta_len]) / sta_len as f64;
        let lta = (ps[i + 1] - ps[i + 1 - lta_len]) / lta_len as f64;
        if lta > 0.0 && sta / lta > params.trigger_ratio {
            return Ok(Some(i as f64 / sr));
        }
    }
    Ok(None)
}

/// Absolute difference between STA/LTA onsets of two recordings of the
/// same event. `Err(MissedDetection)` when the evaluated signal never
/// triggers; `Err(InvalidReference)` when the clean one does not.
pub fn onset_error(clean: &Signal, denoised: &Signal, params: &StaLtaParams) -> Result<f64> {
    let reference = sta_lta_onset(clean, params)?
        .ok_or(Error::InvalidReference("no onset in clean signal"))?;
    let detected = sta_lta_onset(denoised, params)?.ok_or(Error::MissedDetection)?;
    Ok((detected - reference).abs())
}

/// Times (seconds) of local maxima of the absolute z-scored signal above
/// `threshold_z`, with greedy suppression of neighbors closer than
/// `min_separation_ms` (the larger peak wins).
pub fn detect_peaks(
    signal: &Signal,
    threshold_z: f64,
    min_separation_ms: f64,
) -> Result<Vec<f64>> {
    let sr = signal.sample_rate() as f64;
    let min_sep = (min_separation_ms * sr / 1000.0).round() as usize;
    if min_sep == 0 {
        return Err(Error::InvalidParams("min_separation must be >= 1 sample"));
    }
    let samples = signal.channel(0);
    let n = samples.len() as f64;
    let mu = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mu) * (s - mu)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(Error::InvalidInput("zero-variance signal"));
    }
    let sigma = var.sqrt();
    let z: Vec<f64> = samples.iter().map(|s| ((s - mu) / sigma).abs()).collect();

    // Candidate local maxima above threshold.
    let mut candidates: Vec<usize> = Vec::new();
    for i in 0..z.len() {
        let left = if i > 0 { z[i - 1] } else { f64::neg_infinity() };
        let right = if i + 1 < z.len() {
            z[i + 1]
        } else {
            f64::neg_infinity()
        };
        if z[i] > threshold_z && z[i] > left && z[i] >= right {
            candidates.push(i);
        }
    }
    // Greedy suppression, larger peaks first.
    candidates.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    'outer: for &c in &candidates {
        for &k in &kept {
            if c.abs_diff(k) < min_sep {
                continue 'outer;
            }
        }
        kept.push(c);
    }
    kept.sort_unstable();
    Ok(kept.into_iter().map(|i| i as f64 / sr).collect())
}

/// ROC curve points ordered by false positive rate, with trapezoidal AUC.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// (false_positive_rate, true_positive_rate)
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC over event detections at descending thresholds.
///
/// Per threshold, detections are greedily matched (nearest first) to
/// distinct ground-truth events within `match_tolerance_ms`. The negative
/// class is counted as opportunity windows:
/// `duration / tolerance - positives`.
pub fn roc_auc(
    detections_per_threshold: &[Vec<f64>],
    ground_truth_times: &[f64],
    match_tolerance_ms: f64,
    signal_duration_s: f64,
) -> Result<RocCurve> {
    if ground_truth_times.is_empty() {
        return Err(Error::InvalidReference("empty ground truth"));
    }
    if match_tolerance_ms <= 0.0 || signal_duration_s <= 0.0 {
        return Err(Error::InvalidParams("tolerance and duration must be positive"));
    }
    let tol = match_tolerance_ms / 1000.0;
    let n_pos = ground_truth_times.len() as f64;
    let negatives = (signal_duration_s / tol - n_pos).max(1.0);

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(detections_per_threshold.len() + 2);
    for detections in detections_per_threshold {
        let (tp, fp) = match_events(detections, ground_truth_times, tol);
        let tpr = tp as f64 / n_pos;
        let fpr = (fp as f64 / negatives).min(1.0);
        points.push((fpr, tpr));
    }
    points.push((0.0, 0.0));
    points.push((1.0, 1.0));
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut auc = 0.0;
    for pair in points.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        auc += (x1 - x0) * (y0 + y1) * 0.5;
    }
    Ok(RocCurve {
        points,
        auc: auc.clamp(0.0, 1.0),
    })
}

/// Greedy nearest-first matching of detections to distinct truths within
/// tolerance; returns (true positives, false positives).
fn match_events(detections: &[f64], truths: &[f64], tol_s: f64) -> (usize, usize) {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (di, &d) in detections.iter().enumerate() {
        for (ti, &t) in truths.iter().enumerate() {
            let dist = (d - t).abs();
            if dist <= tol_s {
                pairs.push((dist, di, ti));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut det_used = alloc::vec![false; detections.len()];
    let mut truth_used = alloc::vec![false; truths.len()];
    let mut tp = 0usize;
    for (_, di, ti) in pairs {
        if !det_used[di] && !truth_used[ti] {
            det_used[di] = true;
            truth_used[ti] = true;
            tp += 1;
        }
    }
    (tp, detections.len() - tp)
}
