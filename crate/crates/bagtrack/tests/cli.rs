use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bagtrack::synth::{generate_sequence, SyntheticScenario};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bagtrack"))
}

fn still_sequence(dir: &Path, frames: usize) -> PathBuf {
    let seq = dir.join("still");
    generate_sequence(&SyntheticScenario::linear("still", frames, (0.0, 0.0)), &seq).unwrap();
    seq
}

fn track(seq: &Path, out: &Path, extra: &[&str], threads: &str) -> Output {
    bin()
        .env("TRACKER_THREADS", threads)
        .args(["track", "--frames"])
        .arg(seq)
        .args(["--init", "40,100,40,40", "--gt"])
        .arg(seq.join("gt.csv"))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn track_is_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let seq = still_sequence(tmp.path(), 8);
    let outs: Vec<PathBuf> = (0..3).map(|i| tmp.path().join(format!("r{i}.csv"))).collect();
    for (out, threads) in outs.iter().zip(["1", "1", "3"]) {
        let o = track(&seq, out, &["--seed", "1"], threads);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8(o.stdout).unwrap();
        assert!(stdout.trim().starts_with("mean_error="), "{stdout}");
    }
    let first = std::fs::read(&outs[0]).unwrap();
    assert_eq!(first, std::fs::read(&outs[1]).unwrap());
    assert_eq!(first, std::fs::read(&outs[2]).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 8);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let seq = still_sequence(tmp.path(), 4);
    let cfg = tmp.path().join("t.cfg");
    std::fs::write(&cfg, "alpha = 0.9\nK = 4\nseed = 3\n").unwrap();
    let out = tmp.path().join("r.csv");
    let o = track(&seq, &out, &["--config", cfg.to_str().unwrap(), "--alpha", "0", "--bag-size", "2"], "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let echo = text.lines().find(|l| l.starts_with("# config=")).unwrap();
    assert!(echo.contains("alpha=0;") && echo.contains("K=2;") && echo.contains("seed=3"), "{echo}");
}

#[test]
fn alpha_zero_and_half_both_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let seq = still_sequence(tmp.path(), 5);
    for a in ["0", "0.5"] {
        let o = track(&seq, &tmp.path().join(format!("a{a}.csv")), &["--alpha", a], "1");
        assert!(o.status.success());
    }
}

#[test]
fn missing_init_is_a_usage_error() {
    let o = bin().args(["track", "--frames", "."]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--init"));
}

#[test]
fn bad_inputs_exit_nonzero_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["track", "--init", "0,0,4,4", "--frames"])
        .arg(tmp.path().join("nowhere"))
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nowhere"));

    let seq = still_sequence(tmp.path(), 3);
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "alpha = 1.5\n").unwrap();
    let o = track(&seq, &tmp.path().join("x.csv"), &["--config", cfg.to_str().unwrap()], "1");
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn overlays_and_resize() {
    let tmp = tempfile::tempdir().unwrap();
    let seq = still_sequence(tmp.path(), 3);
    let dump = tmp.path().join("overlays");
    let out = tmp.path().join("r.csv");
    let o = track(&seq, &out, &["--resize", "160x120", "--dump-overlays", dump.to_str().unwrap()], "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let frame = bagtrack::pgm::read_frame(&dump.join("overlay_0001.pgm")).unwrap();
    assert_eq!((frame.width(), frame.height()), (160, 120));
    assert!(frame.pixels().iter().any(|&v| v == 1.0));
    let report = bagtrack::report::read_report(&out).unwrap();
    assert_eq!(report.rows[0].bbox.w, 20.0);
}

#[test]
fn ablation_counts_rows_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("suite");
    still_sequence(&root, 4);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = bin()
            .args(["ablation", "--scenarios"])
            .arg(&root)
            .args(["--alphas", "0,0.5,1", "--bag-sizes", "10", "--seeds", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    let rows: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("still,0,10,7,"));
    assert_eq!(a.lines().filter(|l| l.starts_with("# mean,")).count(), 3);
    assert_eq!(a, run("b.csv"));
}

#[test]
fn generate_writes_the_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["generate", "--scenario", "static", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = bagtrack::manifest::SequenceManifest::load(&tmp.path().join("static")).unwrap();
    assert_eq!(m.frame_paths.len(), 60);
    let o = bin()
        .args(["generate", "--scenario", "nope", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(!o.status.success());
}
