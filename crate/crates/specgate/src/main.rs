//! Command-line front end: `denoise`, `mix`, `eval`, and `bench`
//! subcommands over the library. Data and paths go to stdout,
//! diagnostics to stderr. Exit codes: 0 success, 2 bad arguments,
//! 3 I/O failure, 4 processing failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use specgate::bench::{bench_csv, thread_scaling_sweep, time_algorithm, BenchResult};
use specgate::report::{report_to_csv, report_to_json};
use specgate::wav::{read_wav, write_wav, WavFormat};
use specgate_core::baselines::{
    iterative_wiener, savitzky_golay, spectral_subtraction, wiener_filter, IterWienerParams,
    SavGolParams, WienerParams,
};
use specgate_core::datagen::{gen_noise, mix_at_snr, NoiseKind};
use specgate_core::gate::{apply_gate, GateConfig, GateMode};
use specgate_core::metrics::{self, MetricsReport, StaLtaParams};
use specgate_core::window::Window;
use specgate_core::{Signal, StftParams};

#[derive(Parser)]
#[command(name = "specgate", version, about = "Spectral-gating noise reduction toolkit")]
struct Cli {
    /// Emit errors as machine-readable JSON on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker pool size for batch commands (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Denoise a WAV file.
    Denoise(DenoiseArgs),
    /// Mix a clean recording with noise at a target SNR.
    Mix(MixArgs),
    /// Evaluate clean/denoised pairs and emit a metrics report.
    Eval(EvalArgs),
    /// Time the algorithms over a signal-length ladder.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    SpectralGate,
    SpectralGateNonstationary,
    Wiener,
    IterativeWiener,
    Savgol,
    Specsub,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::SpectralGate => "spectral-gate",
            Algorithm::SpectralGateNonstationary => "spectral-gate-nonstationary",
            Algorithm::Wiener => "wiener",
            Algorithm::IterativeWiener => "iterative-wiener",
            Algorithm::Savgol => "savgol",
            Algorithm::Specsub => "specsub",
        }
    }
}

/// Tunable parameters shared by `denoise` and `bench`. All optional so a
/// config file can fill in anything not given as a flag.
#[derive(Args, Clone, Default)]
struct ParamArgs {
    #[arg(long)]
    n_fft: Option<usize>,
    #[arg(long)]
    win_length: Option<usize>,
    #[arg(long)]
    hop_length: Option<usize>,
    /// Threshold in noise standard deviations above the mean.
    #[arg(long)]
    n_std_thresh: Option<f64>,
    /// Proportion of below-threshold energy to remove, in [0, 1].
    #[arg(long)]
    prop_decrease: Option<f64>,
    #[arg(long)]
    freq_mask_smooth_hz: Option<f64>,
    #[arg(long)]
    time_mask_smooth_ms: Option<f64>,
    #[arg(long)]
    noise_window_size_nonstationary_ms: Option<f64>,
    /// Disable mask smoothing entirely.
    #[arg(long)]
    no_smoothing: bool,
    /// Sample window for the wiener and savgol baselines.
    #[arg(long)]
    window: Option<usize>,
    /// Polynomial order for the savgol baseline.
    #[arg(long)]
    poly_order: Option<usize>,
}

#[derive(Args)]
struct DenoiseArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Noise-only WAV for the noise profile (default: the input itself).
    #[arg(long)]
    noise: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "spectral-gate")]
    algorithm: Algorithm,
    /// Output sample format (default: same as input).
    #[arg(long)]
    format: Option<WavFormat>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct MixArgs {
    clean: PathBuf,
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    snr_db: Option<f64>,
    /// Noise WAV; when absent, noise is generated from --noise-kind.
    #[arg(long)]
    noise: Option<PathBuf>,
    #[arg(long)]
    noise_kind: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of `<stem>.clean.wav` / `<stem>.denoised.wav` pairs.
    /// Optional extras per stem: `.noisy.wav` (improvement metrics),
    /// `.events.txt` (event times in seconds, for ROC AUC).
    #[arg(long)]
    dir: PathBuf,
    /// JSON report path (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// CSV report path.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    segment_ms: Option<f64>,
    /// Event-match tolerance for ROC AUC, ms.
    #[arg(long)]
    events_tol_ms: Option<f64>,
    /// Also report STA/LTA onset error per pair.
    #[arg(long)]
    onsets: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated signal lengths in seconds.
    #[arg(long, default_value = "1,10")]
    lengths: String,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    /// Comma-separated algorithm names (default: all).
    #[arg(long)]
    algorithms: Option<String>,
    #[arg(long)]
    sample_rate: Option<u32>,
    /// Batch size for the multi-thread throughput rows.
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

struct CliError {
    code: u8,
    message: String,
}

fn usage_err(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

fn io_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError {
        code: 3,
        message: format!("{context}: {e}"),
    }
}

fn proc_err(e: impl std::fmt::Display) -> CliError {
    CliError {
        code: 4,
        message: format!("processing failed: {e}"),
    }
}

/// Flat `key = value` config file; `#` starts a comment. Keys mirror the
/// long flag names without the leading dashes.
struct ConfigFile {
    map: BTreeMap<String, String>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text =
                fs::read_to_string(path).map_err(|e| io_err("reading config file", e))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| usage_err(format!("config line {}: expected key=value", lineno + 1)))?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(ConfigFile { map })
    }

    /// Config value for `key`, parsed; flags are merged by the caller via
    /// `Option::or`.
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| usage_err(format!("config key '{key}': {e}"))),
        }
    }

    /// Unknown keys are rejected.
    fn finish(self) -> Result<(), CliError> {
        if let Some(key) = self.map.keys().next() {
            return Err(usage_err(format!("unknown config key '{key}'")));
        }
        Ok(())
    }
}

/// All parameters after merging flags over config values over defaults.
#[derive(Clone)]
struct Resolved {
    gate: GateConfig,
    wiener_window: usize,
    savgol: SavGolParams,
}

impl Resolved {
    fn merge(args: &ParamArgs, cfg: &mut ConfigFile) -> Result<Self, CliError> {
        let defaults = GateConfig::default();
        let n_fft = args.n_fft.or(cfg.take("n-fft")?).unwrap_or(defaults.stft.n_fft);
        let win_length = args
            .win_length
            .or(cfg.take("win-length")?)
            .unwrap_or(n_fft.min(defaults.stft.win_length));
        let hop_length = args
            .hop_length
            .or(cfg.take("hop-length")?)
            .unwrap_or(win_length / 4);
        let no_smoothing =
            args.no_smoothing || cfg.take("no-smoothing")?.unwrap_or(false);
        let gate = GateConfig {
            stft: StftParams::new(n_fft, win_length, hop_length, Window::Hann),
            n_std_thresh: args
                .n_std_thresh
                .or(cfg.take("n-std-thresh")?)
                .unwrap_or(defaults.n_std_thresh),
            prop_decrease: args
                .prop_decrease
                .or(cfg.take("prop-decrease")?)
                .unwrap_or(defaults.prop_decrease),
            freq_mask_smooth_hz: args
                .freq_mask_smooth_hz
                .or(cfg.take("freq-mask-smooth-hz")?)
                .unwrap_or(defaults.freq_mask_smooth_hz),
            time_mask_smooth_ms: args
                .time_mask_smooth_ms
                .or(cfg.take("time-mask-smooth-ms")?)
                .unwrap_or(defaults.time_mask_smooth_ms),
            mode: GateMode::Stationary,
            noise_window_ms: args
                .noise_window_size_nonstationary_ms
                .or(cfg.take("noise-window-size-nonstationary-ms")?)
                .unwrap_or(defaults.noise_window_ms),
            smoothing_enabled: !no_smoothing,
        };
        let wiener_window = args
            .window
            .or(cfg.take("window")?)
            .unwrap_or(WienerParams::default().window_size);
        let savgol = SavGolParams {
            window_size: wiener_window.max(3) | 1,
            poly_order: args
                .poly_order
                .or(cfg.take("poly-order")?)
                .unwrap_or(SavGolParams::default().poly_order),
        };
        Ok(Resolved {
            gate,
            wiener_window,
            savgol,
        })
    }

    fn summary(&self, algorithm: Algorithm) -> String {
        let mut s = String::new();
        match algorithm {
            Algorithm::SpectralGate | Algorithm::SpectralGateNonstationary => {
                let g = &self.gate;
                let _ = write!(
                    s,
                    "n_fft={} win={} hop={} k={} prop={} smooth={}x{}ms",
                    g.stft.n_fft,
                    g.stft.win_length,
                    g.stft.hop_length,
                    g.n_std_thresh,
                    g.prop_decrease,
                    g.freq_mask_smooth_hz,
                    g.time_mask_smooth_ms
                );
                if algorithm == Algorithm::SpectralGateNonstationary {
                    let _ = write!(s, " window={}ms", g.noise_window_ms);
                }
            }
            Algorithm::Wiener => {
                let _ = write!(s, "window={}", self.wiener_window);
            }
            Algorithm::Savgol => {
                let _ = write!(
                    s,
                    "window={} poly_order={}",
                    self.savgol.window_size, self.savgol.poly_order
                );
            }
            Algorithm::IterativeWiener | Algorithm::Specsub => {
                let _ = write!(s, "defaults");
            }
        }
        s
    }
}

fn run_algorithm(
    algorithm: Algorithm,
    signal: &Signal,
    noise: Option<&Signal>,
    params: &Resolved,
) -> specgate_core::Result<Signal> {
    match algorithm {
        Algorithm::SpectralGate => {
            let config = GateConfig {
                mode: GateMode::Stationary,
                ..params.gate
            };
            apply_gate(signal, noise, &config)
        }
        Algorithm::SpectralGateNonstationary => {
            let config = GateConfig {
                mode: GateMode::NonStationary,
                ..params.gate
            };
            apply_gate(signal, noise, &config)
        }
        Algorithm::Wiener => wiener_filter(
            signal,
            &WienerParams {
                window_size: params.wiener_window.max(3) | 1,
            },
        ),
        Algorithm::IterativeWiener => {
            iterative_wiener(signal, &IterWienerParams::for_rate(signal.sample_rate()))
        }
        Algorithm::Savgol => savitzky_golay(signal, &params.savgol),
        Algorithm::Specsub => {
            let fallback;
            let noise = match noise {
                Some(n) => n,
                None => {
                    fallback = signal.clone();
                    &fallback
                }
            };
            spectral_subtraction(signal, noise, &params.gate.stft)
        }
    }
}

fn cmd_denoise(args: &DenoiseArgs, cfg: &mut ConfigFile) -> Result<(), CliError> {
    let params = Resolved::merge(&args.params, cfg)?;
    let (input, input_fmt) =
        read_wav(&args.input).map_err(|e| io_err("reading input", e))?;
    let noise = match &args.noise {
        Some(path) => Some(read_wav(path).map_err(|e| io_err("reading noise", e))?.0),
        None => None,
    };
    let start = Instant::now();
    let output =
        run_algorithm(args.algorithm, &input, noise.as_ref(), &params).map_err(proc_err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let format = args.format.unwrap_or(input_fmt);
    let clipped =
        write_wav(&args.output, &output, format).map_err(|e| io_err("writing output", e))?;
    if clipped > 0 {
        eprintln!("warning: {clipped} samples clipped on write");
    }
    eprintln!(
        "{} [{}] {:.2}s audio in {:.3}s ({:.1}x realtime)",
        args.algorithm.name(),
        params.summary(args.algorithm),
        input.duration_s(),
        elapsed,
        input.duration_s() / elapsed.max(1e-9),
    );
    println!("{}", args.output.display());
    Ok(())
}

fn parse_noise_kind(s: &str) -> Result<NoiseKind, CliError> {
    match s {
        "white" => Ok(NoiseKind::White),
        "pink" => Ok(NoiseKind::Pink),
        other => Err(usage_err(format!("unknown noise kind '{other}'"))),
    }
}

fn measured_snr_db(clean: &Signal, noise: &Signal) -> f64 {
    20.0 * (clean.rms() / noise.rms()).log10()
}

fn cmd_mix(args: &MixArgs, cfg: &mut ConfigFile) -> Result<(), CliError> {
    let snr_db = args
        .snr_db
        .or(cfg.take("snr-db")?)
        .ok_or_else(|| usage_err("--snr-db is required"))?;
    let seed = args.seed.or(cfg.take("seed")?).unwrap_or(0);
    let kind_name = args
        .noise_kind
        .clone()
        .or(cfg.take("noise-kind")?)
        .unwrap_or_else(|| "white".into());

    let (clean, _) = read_wav(&args.clean).map_err(|e| io_err("reading clean input", e))?;
    let sr = clean.sample_rate();
    // Source noise long enough that a 1 s clip disjoint from the mixed
    // span exists without re-tiling the same samples.
    let noise = match &args.noise {
        Some(path) => read_wav(path).map_err(|e| io_err("reading noise", e))?.0,
        None => gen_noise(
            parse_noise_kind(&kind_name)?,
            clean.duration_s() + 1.0,
            sr,
            seed,
        )
        .map_err(proc_err)?,
    };
    let (mixed, scaled_noise) = mix_at_snr(&clean, &noise, snr_db).map_err(proc_err)?;
    // Disjoint 1 s clip: the tiled source continued past the mixed span,
    // at the same scale.
    let gain = scaled_noise.rms()
        / {
            let truncated: Vec<f64> = (0..clean.len())
                .map(|i| noise.channel(0)[i % noise.len()])
                .collect();
            (truncated.iter().map(|v| v * v).sum::<f64>() / truncated.len() as f64).sqrt()
        };
    let clip_samples: Vec<f64> = (0..sr as usize)
        .map(|i| noise.channel(0)[(clean.len() + i) % noise.len()] * gain)
        .collect();
    let noise_clip = Signal::mono(clip_samples, sr).map_err(proc_err)?;

    fs::create_dir_all(&args.output).map_err(|e| io_err("creating output directory", e))?;
    let stem = args
        .clean
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("mix");
    let path_of = |suffix: &str| args.output.join(format!("{stem}.{suffix}.wav"));
    let write = |path: &Path, signal: &Signal| -> Result<(), CliError> {
        write_wav(path, signal, WavFormat::Float32)
            .map(|_| ())
            .map_err(|e| io_err("writing output", e))
    };
    write(&path_of("mixed"), &mixed)?;
    write(&path_of("noise"), &scaled_noise)?;
    write(&path_of("noiseclip"), &noise_clip)?;

    // Self-check from the written artifacts.
    let (clean_back, _) = read_wav(&args.clean).map_err(|e| io_err("re-reading", e))?;
    let (noise_back, _) = read_wav(path_of("noise")).map_err(|e| io_err("re-reading", e))?;
    let recomputed = measured_snr_db(&clean_back, &noise_back);

    let manifest_path = args.output.join(format!("{stem}.manifest.json"));
    let manifest = json!({
        "clean": args.clean.display().to_string(),
        "mixed": path_of("mixed").display().to_string(),
        "noise": path_of("noise").display().to_string(),
        "noise_clip": path_of("noiseclip").display().to_string(),
        "snr_db": snr_db,
        "recomputed_snr_db": recomputed,
        "seed": seed,
        "level_basis": "rms",
        "sample_rate": sr,
    });
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("serializable"),
    )
    .map_err(|e| io_err("writing manifest", e))?;
    println!("{}", manifest_path.display());
    Ok(())
}

struct EvalPair {
    stem: String,
    clean: PathBuf,
    denoised: PathBuf,
    noisy: Option<PathBuf>,
    events: Option<PathBuf>,
}

fn collect_pairs(dir: &Path) -> Result<Vec<EvalPair>, CliError> {
    let mut stems: BTreeMap<String, (bool, bool)> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err("reading eval directory", e))? {
        let name = entry
            .map_err(|e| io_err("reading eval directory", e))?
            .file_name();
        let name = name.to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".clean.wav") {
            stems.entry(stem.into()).or_default().0 = true;
        } else if let Some(stem) = name.strip_suffix(".denoised.wav") {
            stems.entry(stem.into()).or_default().1 = true;
        }
    }
    let unmatched: Vec<String> = stems
        .iter()
        .filter(|(_, (c, d))| !(*c && *d))
        .map(|(stem, (c, _))| {
            format!(
                "{stem}: missing {}",
                if *c { "denoised" } else { "clean" }
            )
        })
        .collect();
    if !unmatched.is_empty() {
        return Err(usage_err(format!(
            "unmatched eval pairs:\n  {}",
            unmatched.join("\n  ")
        )));
    }
    if stems.is_empty() {
        return Err(usage_err("no *.clean.wav/*.denoised.wav pairs found"));
    }
    Ok(stems
        .into_keys()
        .map(|stem| {
            let optional = |suffix: &str| {
                let p = dir.join(format!("{stem}.{suffix}"));
                p.exists().then_some(p)
            };
            EvalPair {
                clean: dir.join(format!("{stem}.clean.wav")),
                denoised: dir.join(format!("{stem}.denoised.wav")),
                noisy: optional("noisy.wav"),
                events: optional("events.txt"),
                stem,
            }
        })
        .collect())
}

/// Peak detections over a descending z-score threshold ladder, for ROC.
fn detection_ladder(signal: &Signal) -> specgate_core::Result<Vec<Vec<f64>>> {
    (1..=30)
        .rev()
        .map(|i| metrics::detect_peaks(signal, i as f64 * 0.5, 1.0))
        .collect()
}

fn eval_one(
    pair: &EvalPair,
    segment_ms: f64,
    events_tol_ms: f64,
    onsets: bool,
) -> Result<Vec<(&'static str, f64)>, CliError> {
    let read = |p: &Path| read_wav(p).map(|(s, _)| s).map_err(|e| io_err("reading pair", e));
    let clean = read(&pair.clean)?;
    let denoised = read(&pair.denoised)?;
    let mut values: Vec<(&'static str, f64)> = Vec::new();
    let sdr = metrics::sdr(&clean, &denoised).map_err(proc_err)?;
    let segsnr = metrics::segsnr(&clean, &denoised, segment_ms, metrics::DEFAULT_SEGSNR_CLAMP)
        .map_err(proc_err)?;
    values.push(("sdr", sdr));
    values.push(("segsnr", segsnr));
    if let Some(noisy_path) = &pair.noisy {
        let noisy = read(noisy_path)?;
        let sdr_noisy = metrics::sdr(&clean, &noisy).map_err(proc_err)?;
        let segsnr_noisy =
            metrics::segsnr(&clean, &noisy, segment_ms, metrics::DEFAULT_SEGSNR_CLAMP)
                .map_err(proc_err)?;
        values.push(("sdr_improvement", sdr - sdr_noisy));
        values.push(("segsnr_improvement", segsnr - segsnr_noisy));
    }
    if let Some(events_path) = &pair.events {
        let text =
            fs::read_to_string(events_path).map_err(|e| io_err("reading events", e))?;
        let truth: Vec<f64> = text
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| usage_err(format!("bad event time '{t}': {e}")))
            })
            .collect::<Result<_, _>>()?;
        let ladder = detection_ladder(&denoised).map_err(proc_err)?;
        let roc = metrics::roc_auc(&ladder, &truth, events_tol_ms, denoised.duration_s())
            .map_err(proc_err)?;
        values.push(("roc_auc", roc.auc));
    }
    if onsets {
        let err = metrics::onset_error(&clean, &denoised, &StaLtaParams::default())
            .map_err(proc_err)?;
        values.push(("onset_error_s", err));
    }
    Ok(values)
}

fn cmd_eval(args: &EvalArgs, cfg: &mut ConfigFile, threads: usize) -> Result<(), CliError> {
    let segment_ms = args
        .segment_ms
        .or(cfg.take("segment-ms")?)
        .unwrap_or(metrics::DEFAULT_SEGMENT_MS);
    let events_tol_ms = args.events_tol_ms.or(cfg.take("events-tol-ms")?).unwrap_or(2.0);
    let pairs = collect_pairs(&args.dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| proc_err(e.to_string()))?;
    // Parallel per pair; the report is assembled in input order.
    let results: Vec<Result<Vec<(&'static str, f64)>, CliError>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|pair| eval_one(pair, segment_ms, events_tol_ms, args.onsets))
            .collect()
    });
    let mut report = MetricsReport::new();
    for (pair, result) in pairs.iter().zip(results) {
        let values =
            result.map_err(|e| CliError { code: e.code, message: format!("{}: {}", pair.stem, e.message) })?;
        for (name, value) in values {
            report.push(name, value);
        }
    }
    let json_text = report_to_json(&report).map_err(proc_err)?;
    match &args.output {
        Some(path) => {
            fs::write(path, &json_text).map_err(|e| io_err("writing report", e))?;
            println!("{}", path.display());
        }
        None => println!("{json_text}"),
    }
    if let Some(path) = &args.csv {
        let csv_text = report_to_csv(&report).map_err(proc_err)?;
        fs::write(path, csv_text).map_err(|e| io_err("writing CSV report", e))?;
        println!("{}", path.display());
    }
    eprintln!("evaluated {} pairs", pairs.len());
    Ok(())
}

fn cmd_bench(args: &BenchArgs, cfg: &mut ConfigFile, threads: usize) -> Result<(), CliError> {
    let params = Resolved::merge(&args.params, cfg)?;
    let reps = args.reps.or(cfg.take("reps")?).unwrap_or(5);
    let warmup = args.warmup.or(cfg.take("warmup")?).unwrap_or(2);
    let sample_rate = args.sample_rate.or(cfg.take("sample-rate")?).unwrap_or(16000);
    let batch_size = args.batch.or(cfg.take("batch")?).unwrap_or(32);
    let seed = args.seed.or(cfg.take("seed")?).unwrap_or(0);
    let lengths: Vec<f64> = args
        .lengths
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| usage_err(format!("bad length '{t}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    let algorithms: Vec<Algorithm> = match args.algorithms.as_deref() {
        None => vec![
            Algorithm::SpectralGate,
            Algorithm::SpectralGateNonstationary,
            Algorithm::Wiener,
            Algorithm::IterativeWiener,
            Algorithm::Savgol,
            Algorithm::Specsub,
        ],
        Some(list) => list
            .split(',')
            .map(|name| {
                Algorithm::from_str(name.trim(), true)
                    .map_err(|e| usage_err(format!("bad algorithm '{name}': {e}")))
            })
            .collect::<Result<_, _>>()?,
    };

    let mut results: Vec<BenchResult> = Vec::new();
    for &length_s in &lengths {
        let signal =
            gen_noise(NoiseKind::White, length_s, sample_rate, seed).map_err(proc_err)?;
        let batch: Vec<Signal> = (0..batch_size)
            .map(|i| gen_noise(NoiseKind::White, length_s, sample_rate, seed + 1 + i as u64))
            .collect::<specgate_core::Result<_>>()
            .map_err(proc_err)?;
        for &algorithm in &algorithms {
            let runner =
                |s: &Signal| run_algorithm(algorithm, s, None, &params);
            let single = time_algorithm(algorithm.name(), runner, &signal, reps, warmup)
                .map_err(proc_err)?;
            eprintln!(
                "{} {}s x1 thread: median {:.1} ms ({:.1}x realtime)",
                algorithm.name(),
                length_s,
                single.median_ms,
                single.realtime_factor
            );
            results.push(single);
            if threads > 1 {
                let sweep =
                    thread_scaling_sweep(algorithm.name(), runner, &batch, &[threads], reps)
                        .map_err(proc_err)?;
                for r in &sweep {
                    eprintln!(
                        "{} {}s batch of {} x{} threads: median {:.1} ms ({:.1}x realtime)",
                        algorithm.name(),
                        length_s,
                        batch_size,
                        r.threads,
                        r.median_ms,
                        r.realtime_factor
                    );
                }
                results.extend(sweep);
            }
        }
    }
    let csv = bench_csv(&results);
    match &args.output {
        Some(path) => {
            fs::write(path, csv).map_err(|e| io_err("writing benchmark CSV", e))?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = ConfigFile::load(cli.config.as_deref())?;
    let threads = cli
        .threads
        .or(cfg.take("threads")?)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    if threads == 0 {
        return Err(usage_err("--threads must be >= 1"));
    }
    match &cli.command {
        Command::Denoise(args) => cmd_denoise(args, &mut cfg)?,
        Command::Mix(args) => cmd_mix(args, &mut cfg)?,
        Command::Eval(args) => cmd_eval(args, &mut cfg, threads)?,
        Command::Bench(args) => cmd_bench(args, &mut cfg, threads)?,
    }
    cfg.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json {
                eprintln!(
                    "{}",
                    json!({ "error": e.message, "code": e.code })
                );
            } else {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
