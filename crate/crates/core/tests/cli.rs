use std::path::Path;
use std::process::Command;

use mrng::cli::{repro_with, ReproOutcome, RunManifest, Scale, SuiteSizes};
use mrng::{BitStream, GeneratorConfig, MrngStream};

const SMALL: [&str; 6] = ["--n-pairs", "4", "--rounds", "3", "--precision", "1200"];

fn small_config() -> GeneratorConfig {
    GeneratorConfig {
        n_pairs: 4,
        rounds: 3,
        precision_digits: 1200,
        ..GeneratorConfig::desk()
    }
}

fn mrng(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mrng"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn gen_bits_formats_agree_with_library() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["gen-bits", "--count", "1001", "--out", "bits.txt"];
    args.extend(SMALL);
    assert!(mrng(&args, dir.path()).status.success());
    args[4] = "bits.bin";
    args.extend(["--format", "packed", "--workers", "3"]);
    assert!(mrng(&args, dir.path()).status.success());

    let expected = MrngStream::new(small_config()).unwrap().take_bits(1001);
    let ascii = std::fs::read_to_string(dir.path().join("bits.txt")).unwrap();
    assert_eq!(ascii.trim_end().parse::<BitStream>().unwrap(), expected);
    let packed = std::fs::read(dir.path().join("bits.bin")).unwrap();
    assert_eq!(packed, expected.to_packed());

    let m = RunManifest::read(&dir.path().join("bits.bin.manifest")).unwrap();
    assert!(m.success);
    assert_eq!(m.command, "gen-bits");
    assert_eq!(m.config, small_config());
    assert_eq!(m.count("bits"), Some(1001));
    assert_eq!(m.params["format"], "packed");
}

#[test]
fn gen_digits_writes_decimal_text() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["gen-digits", "--count", "500", "--out", "d.txt"];
    args.extend(SMALL);
    assert!(mrng(&args, dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("d.txt")).unwrap();
    let digits = text.trim_end();
    assert_eq!(digits.len(), 500);
    assert!(digits.bytes().all(|b| b.is_ascii_digit()));
    let m = RunManifest::read(&dir.path().join("d.txt.manifest")).unwrap();
    // four bits per digit plus rejected nibbles
    assert!(m.count("bits_consumed").unwrap() >= 2000);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("gen.conf"),
        "# small run\nn_pairs = 9\nrounds = 3\nprecision_digits = 1200\n",
    )
    .unwrap();
    let out = mrng(
        &["gen-bits", "--config", "gen.conf", "--n-pairs", "4", "--count", "64", "--out", "b.txt"],
        dir.path(),
    );
    assert!(out.status.success());
    let m = RunManifest::read(&dir.path().join("b.txt.manifest")).unwrap();
    assert_eq!(m.config, small_config());
}

#[test]
fn test_command_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["test", "--suite", "all", "--strings", "3", "--count", "5000", "--out", "r.csv"];
    args.extend(SMALL);
    let out = mrng(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "test,ls,strings,passed,failed,failed_percent,alpha");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("transitions,8001,3,"));
    for name in ["r.strings.csv", "r.distribution.csv", "r.histogram.csv", "r.pairs.csv", "r.txt"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let pairs = std::fs::read_to_string(dir.path().join("r.pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 101);
    let report = std::fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert!(report.contains("Pentads test"));
    let m = RunManifest::read(&dir.path().join("r.csv.manifest")).unwrap();
    assert_eq!(m.count("pairs"), Some(5000));
    assert_eq!(m.outputs.len(), 6);
}

#[test]
fn errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_skip = mrng(&["gen-bits", "--skip", "10", "--count", "8", "--out", "b"], dir.path());
    assert_eq!(bad_skip.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_skip.stderr).contains("skip_digits"));

    std::fs::write(dir.path().join("bad.conf"), "n_pairs = 4\nwidth = 3\n").unwrap();
    let bad_key = mrng(&["gen-bits", "--config", "bad.conf", "--count", "8", "--out", "b"], dir.path());
    assert_eq!(bad_key.status.code(), Some(1));

    let missing = mrng(&["gen-bits", "--config", "nope.conf", "--count", "8", "--out", "b"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    assert!(!dir.path().join("b").exists());
}

#[test]
fn full_scale_repro_needs_confirmation() {
    let dir = tempfile::tempdir().unwrap();
    let out = mrng(&["repro", "--scale", "paper", "--out", "full"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let plan = String::from_utf8_lossy(&out.stdout);
    assert!(plan.contains("precision_digits = 100000"));
    assert!(plan.contains("--confirm"));
    assert!(!dir.path().join("full").exists());
}

#[test]
fn repro_writes_side_by_side_tables() {
    let dir = tempfile::tempdir().unwrap();
    let sizes = SuiteSizes {
        chi_strings: 2,
        dist_strings: 20,
        dist_ls: 1000,
        pairs: 10_000,
    };
    let outcome = repro_with(small_config(), sizes, Scale::Desk, dir.path(), false, 1).unwrap();
    let ReproOutcome::Completed(m, checks) = outcome else {
        panic!("desk scale runs without confirmation");
    };
    // 5 batch bands, 3 ones bands, cell range and symmetry
    assert_eq!(checks.len(), 10);
    assert_eq!(m.count("pairs"), Some(10_000));
    let t1 = std::fs::read_to_string(dir.path().join("t1_pairs.csv")).unwrap();
    assert_eq!(t1.lines().count(), 46);
    assert!(t1.lines().nth(1).unwrap().starts_with("0,1,0.00999,"));
    let t2 = std::fs::read_to_string(dir.path().join("t2_ties.csv")).unwrap();
    assert_eq!(t2.lines().count(), 11);
    let t3 = std::fs::read_to_string(dir.path().join("t3_chi_square.csv")).unwrap();
    assert!(t3.contains("transitions,8001,951,49,"));
    let t4 = std::fs::read_to_string(dir.path().join("t4_ones.csv")).unwrap();
    assert!(t4.contains("68.26,68.27,"));
    assert!(dir.path().join("summary.txt").exists());
    assert!(RunManifest::read(&dir.path().join("repro.manifest")).unwrap().success);
}
