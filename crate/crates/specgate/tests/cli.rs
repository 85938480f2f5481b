//! End-to-end tests of the `specgate` binary: exit codes, artifacts,
//! config/flag precedence, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use specgate::wav::{read_wav, write_wav, WavFormat};
use specgate_core::Signal;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specgate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn tone_wav(dir: &Path, name: &str, len: usize, sr: u32) -> PathBuf {
    let samples: Vec<f64> = (0..len)
        .map(|i| {
            let t = i as f64 / sr as f64;
            (0.4 * (2.0 * std::f64::consts::PI * 440.0 * t).sin() as f32) as f64
        })
        .collect();
    let path = dir.join(name);
    write_wav(&path, &Signal::mono(samples, sr).unwrap(), WavFormat::Float32).unwrap();
    path
}

#[test]
fn denoise_default_contract() {
    let dir = tempfile::tempdir().unwrap();
    let input = tone_wav(dir.path(), "in.wav", 16000, 16000);
    let output = dir.path().join("out.wav");
    let out = run(&[
        "denoise",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    // stdout carries the output path.
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        output.to_str().unwrap()
    );
    let (result, _) = read_wav(&output).unwrap();
    let (orig, _) = read_wav(&input).unwrap();
    assert_eq!(result.len(), orig.len());
    assert_eq!(result.sample_rate(), orig.sample_rate());
}

#[test]
fn denoise_prop_decrease_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = tone_wav(dir.path(), "in.wav", 8000, 16000);
    let output = dir.path().join("out.wav");
    let out = run(&[
        "denoise",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
        "--prop-decrease",
        "0",
    ]);
    assert_code(&out, 0);
    let (orig, _) = read_wav(&input).unwrap();
    let (result, _) = read_wav(&output).unwrap();
    for (a, b) in orig.channel(0).iter().zip(result.channel(0)) {
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn denoise_savgol_quadratic_ramp() {
    let dir = tempfile::tempdir().unwrap();
    // Quadratic with exactly f32-representable samples.
    let samples: Vec<f64> = (0..200)
        .map(|i| ((i as f64) - 100.0).powi(2) / 16384.0)
        .collect();
    let input = dir.path().join("ramp.wav");
    write_wav(
        &input,
        &Signal::mono(samples.clone(), 8000).unwrap(),
        WavFormat::Float32,
    )
    .unwrap();
    let output = dir.path().join("out.wav");
    let out = run(&[
        "denoise",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
        "--algorithm",
        "savgol",
        "--window",
        "5",
        "--poly-order",
        "2",
    ]);
    assert_code(&out, 0);
    let (result, _) = read_wav(&output).unwrap();
    for i in 2..198 {
        assert!(
            (result.channel(0)[i] - samples[i]).abs() <= 1e-9,
            "sample {i}"
        );
    }
}

#[test]
fn denoise_missing_input_exit_3_with_json_error() {
    let out = run(&["--json", "denoise", "/nonexistent/x.wav", "-o", "/tmp/y.wav"]);
    assert_code(&out, 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(parsed["code"], 3);
    assert!(parsed["error"].is_string());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = tone_wav(dir.path(), "in.wav", 8000, 16000);
    let config = dir.path().join("specgate.conf");
    std::fs::write(&config, "prop-decrease = 0 # identity\n").unwrap();
    let output = dir.path().join("out.wav");

    // Config alone: identity.
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "denoise",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let (orig, _) = read_wav(&input).unwrap();
    let (result, _) = read_wav(&output).unwrap();
    let diff: f64 = orig
        .channel(0)
        .iter()
        .zip(result.channel(0))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-6);

    // Flag overrides config: full gating attenuates something.
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "denoise",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
        "--prop-decrease",
        "1",
    ]);
    assert_code(&out, 0);
    let (result, _) = read_wav(&output).unwrap();
    let diff: f64 = orig
        .channel(0)
        .iter()
        .zip(result.channel(0))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff > 1e-6);
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = tone_wav(dir.path(), "in.wav", 4000, 16000);
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "not-a-real-key = 7\n").unwrap();
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "denoise",
        input.to_str().unwrap(),
        "-o",
        dir.path().join("out.wav").to_str().unwrap(),
    ]);
    assert_code(&out, 2);
}

#[test]
fn mix_manifest_self_check_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    // Quiet fixture so the 0 dB noise never clips on write.
    let samples: Vec<f64> = (0..32000)
        .map(|i| {
            let t = i as f64 / 16000.0;
            ((0.1 * (2.0 * std::f64::consts::PI * 440.0 * t).sin()) as f32) as f64
        })
        .collect();
    let clean = dir.path().join("clean.wav");
    write_wav(
        &clean,
        &Signal::mono(samples, 16000).unwrap(),
        WavFormat::Float32,
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = run(&[
            "mix",
            clean.to_str().unwrap(),
            "-o",
            out_dir.to_str().unwrap(),
            "--snr-db",
            "0",
            "--seed",
            "7",
        ]);
        assert_code(&out, 0);
    }
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_a.join("clean.manifest.json")).unwrap(),
    )
    .unwrap();
    let recomputed = manifest["recomputed_snr_db"].as_f64().unwrap();
    assert!(recomputed.abs() <= 1e-6, "recomputed {recomputed}");
    // Same seed twice: byte-identical artifacts.
    for name in ["clean.mixed.wav", "clean.noise.wav", "clean.noiseclip.wav"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    // The noise clip is 1 s long.
    let (clip, _) = read_wav(out_a.join("clean.noiseclip.wav")).unwrap();
    assert_eq!(clip.len(), 16000);
}

#[test]
fn mix_missing_noise_file_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let clean = tone_wav(dir.path(), "clean.wav", 8000, 16000);
    let out = run(&[
        "mix",
        clean.to_str().unwrap(),
        "-o",
        dir.path().join("out").to_str().unwrap(),
        "--snr-db",
        "0",
        "--noise",
        "/nonexistent/noise.wav",
    ]);
    assert_code(&out, 3);
}

#[test]
fn eval_identical_pair_hits_sentinels() {
    let dir = tempfile::tempdir().unwrap();
    let signal_path = tone_wav(dir.path(), "x.clean.wav", 16000, 16000);
    std::fs::copy(&signal_path, dir.path().join("x.denoised.wav")).unwrap();
    let json_path = dir.path().join("report.json");
    let csv_path = dir.path().join("report.csv");
    let out = run(&[
        "eval",
        "--dir",
        dir.path().to_str().unwrap(),
        "-o",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["sdr"]["items"][0], serde_json::json!("inf"));
    assert_eq!(report["segsnr"]["items"][0].as_f64(), Some(35.0));
    // CSV carries the same numbers.
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("sdr,0,inf"));
    assert!(csv.contains("segsnr,0,35.0"));
}

#[test]
fn eval_unmatched_pair_exit_2_with_listing() {
    let dir = tempfile::tempdir().unwrap();
    tone_wav(dir.path(), "only.clean.wav", 8000, 16000);
    let out = run(&["eval", "--dir", dir.path().to_str().unwrap()]);
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("only"));
}

#[test]
fn bench_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let out = bin()
        .args([
            "--threads",
            "2",
            "bench",
            "--lengths",
            "0.2,0.4",
            "--reps",
            "2",
            "--warmup",
            "0",
            "--algorithms",
            "wiener",
            "--batch",
            "4",
            "-o",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_code(&out, 0);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    // Header + (single + multi) rows per length.
    assert_eq!(lines.len(), 5, "{csv}");
    assert!(lines[0].starts_with("algorithm,length_s,threads,median_ms,iqr_ms,realtime_factor"));
    assert!(lines[1].starts_with("wiener,0.2,1,"));
    // Multi-thread rows cover the whole batch (4 x 0.2 s).
    assert!(lines[2].starts_with("wiener,0.8,2,"));
}
