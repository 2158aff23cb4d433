//! End-to-end runs of the `modeloss` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use modeloss::csv;
use modeloss::kv::parse_channel_descriptor;
use modeloss_core::spectral::Grid;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modeloss"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn line_value(text: &str, prefix: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("{text}"));
    line[prefix.len()..].trim().parse().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn spectrum_outputs_and_convergence() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("fresh/nested");
    let out = run(&dir, &["spectrum"]);
    assert!(out.status.success());
    let coarse = line_value(&stdout(&out), "max rel_err (extrapolated):");
    assert!(coarse < 1e-3);

    let rows = csv::read_oracle(&read(&dir, "gap_oracle.csv")).unwrap();
    assert!(rows.iter().all(|r| (0.1..=10.0).contains(&r.k) && r.rel_err < 1e-3));
    let spectrum = csv::read_spectrum(&read(&dir, "gap_spectrum.csv"), Grid::default()).unwrap();
    assert_eq!(spectrum, modeloss_core::spectral::transform_gap(&Grid::default()));
    let samples = csv::read_columns(&read(&dir, "gap_samples.csv"), csv::GAP_SAMPLES_HEADER).unwrap();
    assert_eq!(samples.len(), 4096);
    assert_eq!(read(&dir, "gap_spectrum.svg").matches("<polyline").count(), 2);
    assert!(read(&dir, "config.resolved").contains("grid.N = 4096"));

    let fine_dir = tmp.path().join("fine");
    let fine = run(&fine_dir, &["spectrum", "--set", "grid.N=8192"]);
    assert!(line_value(&stdout(&fine), "max rel_err (extrapolated):") < coarse);
    assert!(
        line_value(&stdout(&fine), "max rel_err (rectangle rule):")
            < line_value(&stdout(&out), "max rel_err (rectangle rule):")
    );
}

#[test]
fn reruns_are_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let commands: [&[&str]; 4] = [
        &["spectrum"],
        &["channel", "--set", "channel.profile=thermal", "--compose", "3"],
        &["degrade", "--set", "channel.iota=0,0.5,1"],
        &["train-sweep", "--set", "sweep.levels=0,1", "--set", "sweep.seeds=0-3"],
    ];
    for args in commands {
        assert!(run(dir, args).status.success());
        let first: Vec<(String, Vec<u8>)> = csv_snapshot(dir);
        assert!(run(dir, args).status.success());
        assert_eq!(first, csv_snapshot(dir), "{args:?}");
    }
}

fn csv_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn channel_residuals_and_occupation() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = stdout(&run(dir, &["channel", "--set", "channel.iota=0"]));
    assert!(out.contains("commutator residual: 0\n"), "{out}");

    let out = stdout(&run(dir, &["channel", "--set", "channel.iota=0.5", "--compose", "2"]));
    assert!(out.contains("commutator residual: 0.75\n"), "{out}");
    let ch = parse_channel_descriptor(&read(dir, "channel.kv")).unwrap();
    assert_eq!(ch.loss()[0], 0.75);

    let ten_pi = format!("grid.L={:?}", 10.0 * std::f64::consts::PI);
    let out = stdout(&run(dir, &["channel", "--set", "channel.profile=thermal", "--set", &ten_pi]));
    let occ = line_value(out.lines().last().unwrap().split(" (").next().unwrap(), "occupation at k = 1:");
    assert!((occ - 0.58198).abs() < 1e-5, "{out}");

    let rows = csv::read_columns(&read(dir, "channel_modes.csv"), csv::CHANNEL_HEADER).unwrap();
    assert!(rows.iter().all(|r| (r[1] * r[1] - r[2] * r[2] - r[3]).abs() < 1e-12));
}

#[test]
fn degrade_endpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = stdout(&run(dir, &["degrade", "--set", "channel.iota=0,0.5,1"]));
    let lines: Vec<&str> = out.lines().collect();
    let dev = |line: &str| -> f64 {
        let part = line.split("max |f - sigmoid| ").nth(1).unwrap();
        part.split(' ').next().unwrap().parse().unwrap()
    };
    assert!(lines[0].starts_with("iota_0.0: loss_fraction 0 ") && dev(lines[0]) < 1e-6);
    assert!(lines[1].starts_with("iota_0.5: loss_fraction 0.5 "));
    assert!(lines[2].starts_with("iota_1.0: loss_fraction 1 ") && lines[2].ends_with("exact step: yes"));

    let (z, f, _) = csv::read_degraded(&read(dir, "degraded_iota_1.0.csv")).unwrap();
    assert!(z.iter().zip(&f).all(|(&z, &f)| f == modeloss_core::activations::step(z)));
    let svg = read(dir, "degraded.svg");
    assert_eq!(svg.matches("<g>").count(), 2);
    assert_eq!(svg.matches("<polyline").count(), 6);
}

#[test]
fn train_sweep_endpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(dir, &["train-sweep", "--set", "sweep.levels=0,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("iota 0: median epochs 1783 "), "{text}");
    assert!(text.contains("iota 1: median epochs never "), "{text}");
    assert!(text.lines().last().unwrap().starts_with("PASS"), "{text}");

    let records = csv::read_sweep(&read(dir, "sweep.csv")).unwrap();
    assert_eq!(records.len(), 20);
    assert_eq!(records.iter().filter(|r| r.epochs_to_threshold.is_none()).count(), 3 + 5);
    assert!(read(dir, "trainability.svg").matches("<g>").count() == 3);

    let single = run(dir, &["train-sweep", "--set", "sweep.levels=0", "--seed", "2"]);
    assert!(single.status.success());
    assert_eq!(csv::read_sweep(&read(dir, "sweep.csv")).unwrap().len(), 1);
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# small grid\ngrid.N = 1024\ngrid.L = 20\n").unwrap();
    let dir = tmp.path().join("out");
    let out = run(&dir, &["spectrum", "--config", cfg.to_str().unwrap(), "--set", "grid.N=2048"]);
    assert!(out.status.success());
    let resolved = read(&dir, "config.resolved");
    assert!(resolved.contains("grid.N = 2048") && resolved.contains("grid.L = 20"));
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for args in [
        &["train-sweep", "--set", "task.name=mnist"][..],
        &["channel", "--set", "channel.profile=bandstop"],
        &["spectrum", "--set", "no.such=key"],
        &["spectrum", "--set", "grid.N=1000"],
        &["frobnicate"],
    ] {
        let out = run(dir, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let blocker = dir.join("file");
    fs::write(&blocker, "").unwrap();
    let out = run(&blocker.join("sub"), &["spectrum", "--set", "grid.N=64"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_each_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["verify"]);
    let text = stdout(&out);
    for id in 1..=9 {
        assert!(text.contains(&format!("[{id}]")), "{text}");
    }
    let failed = text.lines().filter(|l| l.starts_with("FAIL")).count();
    assert_eq!(out.status.code(), Some(if failed == 0 { 0 } else { 1 }));
}
