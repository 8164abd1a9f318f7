//! Drives the `svad` sweep, ntc-study and trellis commands.

use std::process::{Command, Output};

use svad_ntc::harness::CSV_HEADER;

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

#[test]
fn single_point_sweep_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let table = ok(&["sweep", "--bits", "1000", "--ebno", "10", "--schemes", "svad", "--out", csv.to_str().unwrap()]);
    assert!(table.contains("total"), "{table}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cols[..6], ["10", "svad", "1000", "0", "0.00000e0", "2016"]);
    assert!(cols[6].contains("gen=7/5;lock=lower;ntc=6;metric=soft;norm=symbol"), "{}", cols[6]);
}

#[test]
fn sweep_output_is_deterministic_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        ok(&[
            "sweep", "--bits", "20000", "--ebno", "0..3:1.5", "--schemes", "svad,rs,uncoded,hard-viterbi",
            "--frame-bits", "3000", "--seed", "77", "--workers", workers, "--out", path.to_str().unwrap(),
        ]);
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "3"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 3 * 4);
}

#[test]
fn dat_output_writes_one_file_per_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("fig");
    ok(&["sweep", "--bits", "2000", "--ebno", "1,2", "--format", "dat", "--out", prefix.to_str().unwrap()]);
    for scheme in ["svad", "rs"] {
        let text = std::fs::read_to_string(dir.path().join(format!("fig.{scheme}.dat"))).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 2, "{text}");
        assert!(rows[0].starts_with("1 ") && rows[1].starts_with("2 "));
    }
    assert_eq!(svad(&["sweep", "--bits", "10", "--format", "dat"]).status.code(), Some(1));
}

#[test]
fn sweep_rejects_bad_flags() {
    let bad_scheme = svad(&["sweep", "--schemes", "svad,ldpc"]);
    assert_eq!(bad_scheme.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_scheme.stderr).contains("--schemes"));
    let bad_rs = svad(&["sweep", "--rs", "255,256"]);
    assert_eq!(bad_rs.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_rs.stderr).contains("--rs"));
    assert_eq!(svad(&["sweep", "--ebno", "5..1"]).status.code(), Some(1));
    assert_eq!(svad(&["sweep", "--bits", "0"]).status.code(), Some(1));
    assert_eq!(svad(&["sweep", "--workers", "0", "--bits", "10"]).status.code(), Some(1));
}

#[test]
fn ntc_study_rows_per_count() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ntc.csv");
    ok(&["ntc-study", "--bits", "3000", "--ebno", "2", "--ntc-values", "0..2,6", "--out", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let params: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(params.len(), 4);
    for (p, n) in params.iter().zip([0, 1, 2, 6]) {
        assert!(p.contains(&format!(";ntc={n};")), "{p}");
    }
    assert_eq!(svad(&["ntc-study", "--lock", "none", "--bits", "10"]).status.code(), Some(1));
}

#[test]
fn trellis_dump() {
    let lower = ok(&["trellis", "--generators", "7,5", "--lock", "lower"]);
    let rows: Vec<&str> = lower.lines().filter(|l| l.starts_with('S')).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().filter(|r| r.ends_with("excluded")).all(|r| r.starts_with("S3 ")));
    assert!(lower.contains("excluded states S3"));
    assert!(lower.contains("catastrophic: no"));
    assert_eq!(lower, ok(&["trellis"]));

    let example = ok(&["trellis", "--generators", "6,5"]);
    assert!(example.contains("catastrophic: yes"));

    let wide = ok(&["trellis", "--generators", "171,133", "--lock", "none"]);
    assert_eq!(wide.lines().filter(|l| l.starts_with('S')).count(), 128);
    assert!(wide.contains("excluded states none"));

    let invalid = svad(&["trellis", "--generators", "7,9"]);
    assert_eq!(invalid.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("--generators"));
}
