//! Wall-clock timing harness: warm-up, repetition statistics (median and
//! IQR, raw samples retained so means can be recomputed), realtime
//! factors, and batch thread-scaling sweeps.
//!
//! Timing never alters outputs: every repetition's output is compared
//! bit-for-bit against the first, and a mismatch is an error. The
//! harness itself is single-threaded; parallelism under test lives
//! inside the runner.

use std::time::Instant;

use rayon::prelude::*;
use specgate_core::Signal;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("runner failed: {0}")]
    Runner(specgate_core::Error),
    #[error("runner output differs between repetitions")]
    NonDeterministic,
    #[error("invalid benchmark parameters: {0}")]
    InvalidParams(&'static str),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub algorithm: String,
    pub length_s: f64,
    pub threads: usize,
    pub repetitions: usize,
    pub median_ms: f64,
    pub iqr_ms: f64,
    pub realtime_factor: f64,
    /// Raw per-repetition wall times, in measurement order.
    pub samples_ms: Vec<f64>,
}

/// Interpolated percentile of a sorted sample, p in [0, 1].
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// (median, IQR) of raw samples; IQR is 0 for a single sample.
pub fn median_iqr(samples: &[f64]) -> (f64, f64) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = percentile(&sorted, 0.5);
    let iqr = percentile(&sorted, 0.75) - percentile(&sorted, 0.25);
    (median, iqr)
}

/// Signal duration over median wall time; > 1 means faster than
/// realtime.
pub fn realtime_factor(duration_s: f64, median_ms: f64) -> f64 {
    duration_s / (median_ms / 1000.0)
}

fn signals_identical(a: &Signal, b: &Signal) -> bool {
    a.sample_rate() == b.sample_rate()
        && a.channels().len() == b.channels().len()
        && a.channels().iter().zip(b.channels()).all(|(x, y)| {
            x.len() == y.len()
                && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits())
        })
}

/// Time one runner on one signal: `warmup` untimed iterations, then
/// `repetitions` measured ones.
pub fn time_algorithm<F>(
    algorithm: &str,
    runner: F,
    signal: &Signal,
    repetitions: usize,
    warmup: usize,
) -> Result<BenchResult, BenchError>
where
    F: Fn(&Signal) -> specgate_core::Result<Signal>,
{
    if repetitions == 0 {
        return Err(BenchError::InvalidParams("repetitions must be >= 1"));
    }
    for _ in 0..warmup {
        runner(signal).map_err(BenchError::Runner)?;
    }
    let mut samples_ms = Vec::with_capacity(repetitions);
    let mut reference: Option<Signal> = None;
    for _ in 0..repetitions {
        let start = Instant::now();
        let out = runner(signal).map_err(BenchError::Runner)?;
        samples_ms.push(start.elapsed().as_secs_f64() * 1000.0);
        match &reference {
            None => reference = Some(out),
            Some(r) => {
                if !signals_identical(r, &out) {
                    return Err(BenchError::NonDeterministic);
                }
            }
        }
    }
    let (median_ms, iqr_ms) = median_iqr(&samples_ms);
    Ok(BenchResult {
        algorithm: algorithm.into(),
        length_s: signal.duration_s(),
        threads: 1,
        repetitions,
        median_ms,
        iqr_ms,
        realtime_factor: realtime_factor(signal.duration_s(), median_ms),
        samples_ms,
    })
}

/// Batch throughput at each thread count. `length_s` and the realtime
/// factor cover the whole batch; outputs must be bit-identical across
/// thread counts.
pub fn thread_scaling_sweep<F>(
    algorithm: &str,
    runner: F,
    batch: &[Signal],
    thread_counts: &[usize],
    repetitions: usize,
) -> Result<Vec<BenchResult>, BenchError>
where
    F: Fn(&Signal) -> specgate_core::Result<Signal> + Sync,
{
    if repetitions == 0 || batch.is_empty() || thread_counts.is_empty() {
        return Err(BenchError::InvalidParams(
            "need a batch, thread counts, and repetitions >= 1",
        ));
    }
    let total_s: f64 = batch.iter().map(Signal::duration_s).sum();
    let mut results = Vec::with_capacity(thread_counts.len());
    let mut reference: Option<Vec<Signal>> = None;
    for &threads in thread_counts {
        if threads == 0 {
            return Err(BenchError::InvalidParams("thread count must be >= 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?;
        let mut samples_ms = Vec::with_capacity(repetitions);
        let mut last: Option<Vec<Signal>> = None;
        for _ in 0..repetitions {
            let start = Instant::now();
            let outputs: Result<Vec<Signal>, specgate_core::Error> =
                pool.install(|| batch.par_iter().map(&runner).collect());
            let outputs = outputs.map_err(BenchError::Runner)?;
            samples_ms.push(start.elapsed().as_secs_f64() * 1000.0);
            last = Some(outputs);
        }
        let outputs = last.expect("at least one repetition");
        match &reference {
            None => reference = Some(outputs),
            Some(r) => {
                if r.len() != outputs.len()
                    || !r.iter().zip(&outputs).all(|(a, b)| signals_identical(a, b))
                {
                    return Err(BenchError::NonDeterministic);
                }
            }
        }
        let (median_ms, iqr_ms) = median_iqr(&samples_ms);
        results.push(BenchResult {
            algorithm: algorithm.into(),
            length_s: total_s,
            threads,
            repetitions,
            median_ms,
            iqr_ms,
            realtime_factor: realtime_factor(total_s, median_ms),
            samples_ms,
        });
    }
    Ok(results)
}

/// CSV with one row per result; raw samples joined by ';' in the last
/// column.
pub fn bench_csv(results: &[BenchResult]) -> String {
    let mut out =
        String::from("algorithm,length_s,threads,median_ms,iqr_ms,realtime_factor,samples_ms\n");
    for r in results {
        let samples = r
            .samples_ms
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{},{},{},{:.3},{:.3},{:.3},{}\n",
            r.algorithm, r.length_s, r.threads, r.median_ms, r.iqr_ms, r.realtime_factor, samples
        ));
    }
    out
}
