//! End-to-end tests of the binary: flag parsing, exit codes, file formats,
//! and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn mdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn tradeoff_tiny_run_produces_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tradeoff.csv");
    let run = mdm(&[
        "tradeoff",
        "--dim",
        "2",
        "--lmax",
        "0",
        "--p-grid",
        "0:0.75:4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");

    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,lambda_max,F,G,L_star,N,iterations,G_bk_at_F,delta_G"
    );
    assert_eq!(lines.count(), 4);

    // p = 0 row: F = G = 1/2
    let first = text.lines().nth(1).unwrap();
    let cols: Vec<f64> = first
        .split(',')
        .take(4)
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(cols[0], 0.0);
    assert!((cols[2] - 0.5).abs() < 1e-9);
    assert!((cols[3] - 0.5).abs() < 1e-9);
}

#[test]
fn tradeoff_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let run = mdm(&[
            "tradeoff",
            "--dim",
            "24",
            "--lmax",
            "4",
            "--p-grid",
            "0:0.9:7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(run.status.code(), Some(0));
    }
    assert_eq!(read(&a), read(&b));
}

#[test]
fn malformed_grid_is_a_usage_error() {
    let run = mdm(&["tradeoff", "--p-grid", "0:2:10"]);
    assert_eq!(run.status.code(), Some(1));
    let run = mdm(&["tradeoff", "--p-grid", "nonsense"]);
    assert_eq!(run.status.code(), Some(1));
    let run = mdm(&["no-such-command"]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn baselines_satisfy_gaussian_relation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("baselines.csv");
    let run = mdm(&[
        "baselines",
        "--r-grid",
        "0:2:21",
        "--x-grid",
        "0.1:0.9:9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));

    let text = read(&out);
    assert_eq!(text.lines().next().unwrap(), "kind,parameter,F,G");
    let mut bk = 0;
    let mut subtracted = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let f: f64 = cols[2].parse().unwrap();
        let g: f64 = cols[3].parse().unwrap();
        let g_curve = 1.0 / (1.0 + 1.0 / (4.0 * f * (1.0 - f)));
        match cols[0] {
            "bk" => {
                bk += 1;
                assert!((g - g_curve).abs() < 1e-12);
            }
            "subtracted" => {
                subtracted += 1;
                // photon subtraction sits strictly below the Gaussian curve
                assert!(g < g_curve);
            }
            other => panic!("unexpected kind {other}"),
        }
    }
    assert_eq!((bk, subtracted), (21, 9));
}

#[test]
fn baselines_empty_grids_give_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("baselines.csv");
    let run = mdm(&[
        "baselines",
        "--r-grid",
        "0:2:0",
        "--x-grid",
        "0:0.9:0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(read(&out), "kind,parameter,F,G\n");
}

#[test]
fn state_command_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let run = mdm(&[
        "state",
        "--dim",
        "40",
        "--lmax",
        "3",
        "--target-f",
        "0.8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");

    let state_text = read(&dir.path().join("state.txt"));
    assert!(state_text.starts_with('#'));
    let data_lines = state_text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(data_lines, 40);

    let report = read(&dir.path().join("gaussianity.txt"));
    assert!(report.contains("witness:"));
    let report_csv = read(&dir.path().join("gaussianity.csv"));
    assert!(report_csv.starts_with("a,c,witness,"));

    let delta = read(&dir.path().join("delta_c.csv"));
    assert_eq!(delta.lines().next().unwrap(), "n,c_n,c_tmsv_n,delta_c_n");
    assert_eq!(delta.lines().count(), 41);
}

#[test]
fn state_rejects_unreachable_target() {
    let dir = tempfile::tempdir().unwrap();
    let run = mdm(&[
        "state",
        "--dim",
        "4",
        "--lmax",
        "2",
        "--target-f",
        "0.99",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("unreachable"), "stderr: {stderr}");

    let run = mdm(&["state", "--target-f", "0.3"]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn channel_flags_and_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("channel.csv");
    let run = mdm(&[
        "channel",
        "--dim",
        "16",
        "--lmax",
        "2",
        "--p-grid",
        "0:0.999:6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let text = read(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "p,f_av,f_gauss,r_star,cap_flag,f_opt,delta_f,artifact_flag"
    );
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let delta_f: f64 = first[6].parse().unwrap();
    assert!(delta_f.abs() < 1e-9);
    assert_eq!(first[7], "0");
    // at this small dimension the p -> 1 end is a truncation artifact
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    let delta_f: f64 = last[6].parse().unwrap();
    assert!(delta_f < 0.0);
    assert_eq!(last[7], "1");
}

#[test]
fn verify_passes_and_corrupt_hook_fails() {
    let run = mdm(&["verify", "--mc-samples", "20000"]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert_eq!(stdout.matches("PASS").count(), 7);

    let run = mdm(&["verify", "--mc-samples", "20000", "--corrupt"]);
    assert_eq!(run.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("FAIL small_n_crosscheck"));
}

#[test]
fn dump_emits_square_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("block.csv");
    let run = mdm(&[
        "dump", "--kind", "rf", "--l", "1", "--dim", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let text = read(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.split(',').count() == 5));
    // (0,0) entry of the |L| = 1 output block
    let first: f64 = text.lines().next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - 0.25).abs() < 1e-15);
}

#[test]
fn help_exits_zero() {
    let run = mdm(&["--help"]);
    assert_eq!(run.status.code(), Some(0));
}
