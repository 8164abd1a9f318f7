//! Drives the `svad` binary through the encode / corrupt / decode file pipeline.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use svad_ntc::formats;
use svad_ntc::rng::derive_stream;
use svad_ntc::rs::pack_bits;
use tempfile::TempDir;

fn svad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svad"))
        .args(args)
        .output()
        .expect("spawn svad")
}

fn ok(args: &[&str]) -> String {
    let out = svad(args);
    assert!(
        out.status.success(),
        "svad {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn file(&self, name: &str, bytes: &[u8]) -> String {
        let p = self.path(name);
        std::fs::write(&p, bytes).unwrap();
        s(&p)
    }
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn samples(path: &Path) -> Vec<f64> {
    formats::decode_sample_file(&std::fs::read(path).unwrap()).unwrap()
}

fn random_bytes(seed: u64, n: usize) -> Vec<u8> {
    let mut rng = derive_stream(seed, &[]);
    (0..n).map(|_| rng.next_u64() as u8).collect()
}

#[test]
fn eight_bits_become_48_samples() {
    let w = Work::new();
    let input = w.file("in.bin", &[0b1011_0010]);
    let out = w.path("out.ntcs");
    let summary = ok(&["encode", &input, "--out", &s(&out)]);
    assert!(summary.contains("encoded 8 data bits -> 24 encoder inputs -> 48 channel symbols"), "{summary}");
    let x = samples(&out);
    assert_eq!(x.len(), 48);
    assert!(x.iter().all(|v| v.abs() == 1.0));
    let manifest = std::fs::read_to_string(w.path("out.ntcs.manifest")).unwrap();
    for line in ["generators=7,5", "lock=lower", "ntc=6", "data_bits=8", "input_format=raw"] {
        assert!(manifest.lines().any(|l| l == line), "{manifest}");
    }
}

#[test]
fn empty_input_gives_empty_sample_file() {
    let w = Work::new();
    let input = w.file("empty", &[]);
    let out = w.path("out.ntcs");
    ok(&["encode", &input, "--out", &s(&out)]);
    assert!(samples(&out).is_empty());
    let back = w.path("back");
    ok(&["decode", &s(&out), "--out", &s(&back)]);
    assert!(std::fs::read(&back).unwrap().is_empty());
}

#[test]
fn noiseless_round_trip_is_byte_identical() {
    let w = Work::new();
    let data = random_bytes(11, 300);
    let cases: [&[&str]; 5] = [
        &[],
        &["--lock", "higher"],
        &["--lock", "none"],
        &["--generators", "6,5", "--lock", "none"],
        &["--generators", "171,133", "--ntc", "2"],
    ];
    for (i, flags) in cases.iter().enumerate() {
        let input = w.file(&format!("in{i}"), &data);
        let enc = s(&w.path(&format!("enc{i}.ntcs")));
        let noisy = s(&w.path(&format!("noisy{i}.ntcs")));
        let back = w.path(&format!("back{i}"));
        ok(&[&["encode", input.as_str(), "--out", enc.as_str()][..], flags].concat());
        // decode straight from the encoder output, then via a noiseless corrupt step
        ok(&["decode", &enc, "--out", &s(&back)]);
        assert_eq!(std::fs::read(&back).unwrap(), data, "flags {flags:?}");
        ok(&["corrupt", &enc, "--out", &noisy, "--sigma", "0"]);
        ok(&["decode", &noisy, "--out", &s(&back)]);
        assert_eq!(std::fs::read(&back).unwrap(), data, "flags {flags:?}");
    }
}

#[test]
fn ntcf_input_round_trips_as_ntcf() {
    let w = Work::new();
    let bits: Vec<u8> = derive_stream(5, &[]).bits(77);
    let input = w.file("in.ntcf", &formats::encode_bit_file(&bits));
    let enc = s(&w.path("enc.ntcs"));
    let back = w.path("back.ntcf");
    ok(&["encode", &input, "--out", &enc]);
    assert_eq!(samples(Path::new(&enc)).len(), 77 * 6);
    ok(&["decode", &enc, "--out", &s(&back)]);
    assert_eq!(formats::decode_bit_file(&std::fs::read(&back).unwrap()).unwrap(), bits);
}

#[test]
fn corrupt_with_zero_sigma_is_identity() {
    let w = Work::new();
    let input = w.file("in", &random_bytes(2, 40));
    let enc = w.path("enc.ntcs");
    let noisy = w.path("noisy.ntcs");
    ok(&["encode", &input, "--out", &s(&enc)]);
    ok(&["corrupt", &s(&enc), "--out", &s(&noisy), "--sigma", "0", "--seed", "9"]);
    assert_eq!(samples(&enc), samples(&noisy));
}

#[test]
fn corrupt_is_deterministic_in_the_seed() {
    let w = Work::new();
    let input = w.file("in", &random_bytes(3, 40));
    let enc = s(&w.path("enc.ntcs"));
    ok(&["encode", &input, "--out", &enc]);
    let run = |name: &str, seed: &str| {
        let out = w.path(name);
        ok(&["corrupt", &enc, "--out", &s(&out), "--ebno", "2", "--seed", seed]);
        std::fs::read(out).unwrap()
    };
    let a = run("a.ntcs", "4");
    assert_eq!(a, run("b.ntcs", "4"));
    assert_ne!(a, run("c.ntcs", "5"));
}

#[test]
fn zero_db_per_symbol_noise_has_variance_one_half() {
    let w = Work::new();
    // 166_667 data bits encode to 1_000_002 samples
    let bits = derive_stream(4, &[]).bits(166_667);
    let input = w.file("in.ntcf", &formats::encode_bit_file(&bits));
    let enc = w.path("enc.ntcs");
    let noisy = w.path("noisy.ntcs");
    ok(&["encode", &input, "--out", &s(&enc)]);
    ok(&["corrupt", &s(&enc), "--out", &s(&noisy), "--ebno", "0", "--normalization", "symbol"]);
    let (clean, dirty) = (samples(&enc), samples(&noisy));
    assert!(clean.len() >= 1_000_000);
    let n = clean.len() as f64;
    let diffs: Vec<f64> = clean.iter().zip(&dirty).map(|(c, d)| d - c).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    assert!((var - 0.5).abs() <= 0.01, "variance {var}");
}

#[test]
fn worked_example_sample_file_decodes_to_1000() {
    let w = Work::new();
    let mr = [0.7, 0.8, 0.9, -0.7, -0.7, 0.6, 0.4, -0.8];
    let input = w.file("mr.ntcs", &formats::encode_sample_file(&mr));
    let out = w.path("mr.ntcf");
    let summary = ok(&["decode", &input, "--out", &s(&out), "--generators", "6,5", "--lock", "none", "--metric", "soft"]);
    assert_eq!(formats::decode_bit_file(&std::fs::read(&out).unwrap()).unwrap(), [1, 0, 0, 0]);
    assert!(summary.contains("final path metric 2.48"), "{summary}");
}

#[test]
fn six_db_file_pipeline_residual_is_small() {
    let w = Work::new();
    let data = random_bytes(6, 12_500);
    let input = w.file("in", &data);
    let enc = s(&w.path("enc.ntcs"));
    let noisy = s(&w.path("noisy.ntcs"));
    let back = w.path("back");
    ok(&["encode", &input, "--out", &enc]);
    ok(&["corrupt", &enc, "--out", &noisy, "--ebno", "6", "--seed", "2016"]);
    ok(&["decode", &noisy, "--out", &s(&back)]);
    let decoded = std::fs::read(&back).unwrap();
    let errors: u32 = data.iter().zip(&decoded).map(|(a, b)| (a ^ b).count_ones()).sum();
    assert!(errors <= 20, "{errors} residual errors over 1e5 bits");
}

#[test]
fn manifest_flags_override() {
    let w = Work::new();
    let input = w.file("in", &random_bytes(7, 16));
    let enc = s(&w.path("enc.ntcs"));
    let back = w.path("back");
    ok(&["encode", &input, "--out", &enc, "--lock", "higher"]);
    ok(&["decode", &enc, "--out", &s(&back), "--output-format", "ntcf"]);
    assert_eq!(
        formats::decode_bit_file(&std::fs::read(&back).unwrap()).unwrap(),
        svad_ntc::rs::unpack_bits(&random_bytes(7, 16), 128)
    );
    // the wrong lock reads the wrong number of steps per data bit
    let out = svad(&["decode", &enc, "--out", &s(&back), "--lock", "none"]);
    assert_eq!(code_of(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    let w = Work::new();
    let out = s(&w.path("out"));

    let bad_magic = w.file("bad.ntcs", b"NOPE\x01\0\0\0\0\0\0\0\0");
    assert_eq!(code_of(&svad(&["decode", &bad_magic, "--out", &out])), 3);
    assert_eq!(code_of(&svad(&["corrupt", &bad_magic, "--out", &out, "--sigma", "1"])), 3);

    let wrong_version = w.file("v2.ntcs", b"NTCS\x02\0\0\0\0\0\0\0\0");
    assert_eq!(code_of(&svad(&["corrupt", &wrong_version, "--out", &out, "--sigma", "1"])), 3);

    let odd = w.file("odd.ntcs", &formats::encode_sample_file(&[1.0, 1.0, -1.0]));
    assert_eq!(code_of(&svad(&["decode", &odd, "--out", &out, "--lock", "none"])), 3);

    let bad_bits = w.file("bad.ntcf", b"NTCF\x01\x09\0\0\0\0\0\0\0\xff");
    assert_eq!(code_of(&svad(&["encode", &bad_bits, "--out", &out])), 3);

    let missing = s(&w.path("missing"));
    assert_eq!(code_of(&svad(&["encode", &missing, "--out", &out])), 2);
    let unwritable = s(&w.path("no/such/dir/out"));
    let input = w.file("in", &[1]);
    assert_eq!(code_of(&svad(&["encode", &input, "--out", &unwritable])), 2);

    let invalid = svad(&["encode", &input, "--out", &out, "--generators", "8,5"]);
    assert_eq!(code_of(&invalid), 1);
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("--generators"));
    assert_eq!(code_of(&svad(&["encode", &input, "--out", &out, "--lock", "side"])), 1);
    assert_eq!(code_of(&svad(&["encode", &input, "--out", &out, "--lock", "none", "--ntc", "3"])), 1);
    assert_eq!(code_of(&svad(&["corrupt", &input, "--out", &out])), 1);
    assert_eq!(code_of(&svad(&["frobnicate"])), 1);
    assert_eq!(code_of(&svad(&["--help"])), 0);
    assert_eq!(code_of(&svad(&["--version"])), 0);
}

#[test]
fn raw_output_needs_whole_bytes() {
    let w = Work::new();
    let input = w.file("in.ntcf", &formats::encode_bit_file(&[1, 0, 1]));
    let enc = s(&w.path("enc.ntcs"));
    ok(&["encode", &input, "--out", &enc]);
    let out = svad(&["decode", &enc, "--out", &s(&w.path("x")), "--output-format", "raw"]);
    assert_eq!(code_of(&out), 3);
    let eight = w.file("eight.ntcf", &formats::encode_bit_file(&[1, 0, 1, 1, 0, 0, 1, 0]));
    let enc8 = s(&w.path("enc8.ntcs"));
    let back = w.path("back");
    ok(&["encode", &eight, "--out", &enc8]);
    ok(&["decode", &enc8, "--out", &s(&back), "--output-format", "raw"]);
    assert_eq!(std::fs::read(back).unwrap(), pack_bits(&[1, 0, 1, 1, 0, 0, 1, 0]));
}
