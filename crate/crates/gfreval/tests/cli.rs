//! End-to-end tests of the command-line surface, driving the real binary on
//! a synthetic corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gfreval"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn gfreval");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Generates a corpus with a binary set (for polarity) and an ordinal set.
fn synth_corpus(dir: &Path, runs: usize) -> Vec<PathBuf> {
    run_ok(
        bin()
            .arg("synth")
            .arg("--out-dir")
            .arg(dir)
            .args(["--topics", "12", "--depth", "15", "--seed", "7"])
            .args(["--runs", &runs.to_string()])
            .args(["--sets", "stance:nominal:2,band:ordinal:4"]),
    );
    (0..runs)
        .map(|r| dir.join(format!("run{r:02}.txt")))
        .collect()
}

#[test]
fn eval_pipeline_produces_scores() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 2);

    let stdout = run_ok(
        bin()
            .arg("eval")
            .args(["--run".as_ref(), runs[0].as_os_str()])
            .args(["--run".as_ref(), runs[1].as_os_str()])
            .args([
                "--membership".as_ref(),
                dir.path().join("membership.tsv").as_os_str(),
            ])
            .args([
                "--targets".as_ref(),
                dir.path().join("targets.tsv").as_os_str(),
            ])
            .args([
                "--attrsets".as_ref(),
                dir.path().join("attrsets.tsv").as_os_str(),
            ])
            .args(["--qrels".as_ref(), dir.path().join("qrels.txt").as_os_str()])
            .args(["--divergence", "stance=jsd,band=nmd"]),
    );
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "run,topic,measure,value");
    assert!(stdout.contains("GF-JSD-stance@10"));
    assert!(stdout.contains("GF-NMD-band@10"));
    assert!(stdout.contains("ERR@10"));
    assert!(stdout.contains("iRBU@10"));
    assert!(stdout.contains("ERR+GF-JSD-stance+GF-NMD-band@10"));
    assert!(stdout.contains("run00,ALL,"));
    assert!(stdout.contains("run01,ALL,"));
    // Values are 6-decimal fixed.
    let sample = lines[1].rsplit(',').next().unwrap();
    assert_eq!(sample.split('.').nth(1).unwrap().len(), 6);
}

#[test]
fn eval_weights_and_utility_flags() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 1);
    let stdout = run_ok(
        bin()
            .arg("eval")
            .args(["--run".as_ref(), runs[0].as_os_str()])
            .args([
                "--membership".as_ref(),
                dir.path().join("membership.tsv").as_os_str(),
            ])
            .args([
                "--targets".as_ref(),
                dir.path().join("targets.tsv").as_os_str(),
            ])
            .args([
                "--attrsets".as_ref(),
                dir.path().join("attrsets.tsv").as_os_str(),
            ])
            .args(["--qrels".as_ref(), dir.path().join("qrels.txt").as_os_str()])
            .args(["--utility", "irbu"])
            .args(["--weights", "0.5,0.5,0"]),
    );
    // Zero-weighted band set is dropped from the combined measure name.
    assert!(stdout.contains("iRBU+GF-JSD-stance@10"));
}

#[test]
fn eval_rejects_err_decay_without_qrels() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 1);
    let out = bin()
        .arg("eval")
        .args(["--run".as_ref(), runs[0].as_os_str()])
        .args([
            "--membership".as_ref(),
            dir.path().join("membership.tsv").as_os_str(),
        ])
        .args([
            "--targets".as_ref(),
            dir.path().join("targets.tsv").as_os_str(),
        ])
        .args([
            "--attrsets".as_ref(),
            dir.path().join("attrsets.tsv").as_os_str(),
        ])
        .args(["--decay", "err"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn format_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path(), 1);
    let bad = dir.path().join("bad_run.txt");
    std::fs::write(&bad, "t0001 Q0 d0001 1 not-a-score\n").unwrap();
    let out = bin()
        .arg("eval")
        .args(["--run".as_ref(), bad.as_os_str()])
        .args([
            "--membership".as_ref(),
            dir.path().join("membership.tsv").as_os_str(),
        ])
        .args([
            "--targets".as_ref(),
            dir.path().join("targets.tsv").as_os_str(),
        ])
        .args([
            "--attrsets".as_ref(),
            dir.path().join("attrsets.tsv").as_os_str(),
        ])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad_run.txt:1"), "stderr was: {stderr}");
}

#[test]
fn polarity_emits_signed_scores() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 1);
    let stdout = run_ok(
        bin()
            .arg("polarity")
            .args(["--run".as_ref(), runs[0].as_os_str()])
            .args([
                "--membership".as_ref(),
                dir.path().join("membership.tsv").as_os_str(),
            ])
            .args([
                "--attrsets".as_ref(),
                dir.path().join("attrsets.tsv").as_os_str(),
            ])
            .args(["--attrset", "stance"]),
    );
    assert!(stdout.contains("DeltaGF-JSD-stance@10"));
    assert!(stdout.contains(",ALL,"));

    // Non-binary set is an evaluation error.
    let out = bin()
        .arg("polarity")
        .args(["--run".as_ref(), runs[0].as_os_str()])
        .args([
            "--membership".as_ref(),
            dir.path().join("membership.tsv").as_os_str(),
        ])
        .args([
            "--attrsets".as_ref(),
            dir.path().join("attrsets.tsv").as_os_str(),
        ])
        .args(["--attrset", "band"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn baselines_emit_measure_family() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 1);
    let stdout = run_ok(
        bin()
            .arg("baselines")
            .args(["--run".as_ref(), runs[0].as_os_str()])
            .args([
                "--membership".as_ref(),
                dir.path().join("membership.tsv").as_os_str(),
            ])
            .args([
                "--targets".as_ref(),
                dir.path().join("targets.tsv").as_os_str(),
            ])
            .args([
                "--attrsets".as_ref(),
                dir.path().join("attrsets.tsv").as_os_str(),
            ])
            .args(["--qrels".as_ref(), dir.path().join("qrels.txt").as_os_str()]),
    );
    for measure in [
        "SkewMin-stance@10",
        "SkewMax-band@10",
        "NDKL-stance@10",
        "ABR-band@10",
        "ECE-stance=v1@10",
        "ECEN-band=v4@10",
        "nDCG@10",
    ] {
        assert!(stdout.contains(measure), "missing {measure}");
    }
}

#[test]
fn baselines_intent_measures() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 1);
    // Hand-made intents for two topics.
    let intents = dir.path().join("intents.tsv");
    let run_text = std::fs::read_to_string(&runs[0]).unwrap();
    let first_item = run_text
        .lines()
        .find(|l| l.starts_with("t0001 "))
        .unwrap()
        .split_whitespace()
        .nth(2)
        .unwrap();
    std::fs::write(
        &intents,
        format!(
            "t0001\ti1\t0.6\nt0001\ti2\t0.4\nt0001\ti1\t{first_item}\t3\nt0001\ti2\t{first_item}\t1\n"
        ),
    )
    .unwrap();
    let out = bin()
        .arg("baselines")
        .args(["--run".as_ref(), runs[0].as_os_str()])
        .args([
            "--membership".as_ref(),
            dir.path().join("membership.tsv").as_os_str(),
        ])
        .args([
            "--targets".as_ref(),
            dir.path().join("targets.tsv").as_os_str(),
        ])
        .args([
            "--attrsets".as_ref(),
            dir.path().join("attrsets.tsv").as_os_str(),
        ])
        .args(["--intents".as_ref(), intents.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("IntentRec@10"));
    assert!(stdout.contains("D-nDCG@10"));
    assert!(stdout.contains("D#-nDCG@10"));
    // Topics without intent data are skipped with a warning.
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no intent data"));
}

#[test]
fn tau_between_measures() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 6);
    let scores = dir.path().join("scores.csv");
    let mut cmd = bin();
    cmd.arg("eval");
    for r in &runs {
        cmd.args(["--run".as_ref(), r.as_os_str()]);
    }
    run_ok(
        cmd.args([
            "--membership".as_ref(),
            dir.path().join("membership.tsv").as_os_str(),
        ])
        .args([
            "--targets".as_ref(),
            dir.path().join("targets.tsv").as_os_str(),
        ])
        .args([
            "--attrsets".as_ref(),
            dir.path().join("attrsets.tsv").as_os_str(),
        ])
        .args(["--qrels".as_ref(), dir.path().join("qrels.txt").as_os_str()])
        .args(["--out".as_ref(), scores.as_os_str()]),
    );
    let stdout = run_ok(
        bin()
            .arg("tau")
            .args(["--matrix".as_ref(), scores.as_os_str()])
            .args(["--measure-a", "GF-JSD-stance@10"])
            .args(["--measure-b", "ERR@10"]),
    );
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "measure_a,measure_b,n,tau,ci_low,ci_high"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "6");
    let tau: f64 = row[3].parse().unwrap();
    assert!((-1.0..=1.0).contains(&tau));
}

#[test]
fn discpower_from_long_and_wide_input() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 4);
    let scores = dir.path().join("scores.csv");
    let mut cmd = bin();
    cmd.arg("eval");
    for r in &runs {
        cmd.args(["--run".as_ref(), r.as_os_str()]);
    }
    run_ok(
        cmd.args([
            "--membership".as_ref(),
            dir.path().join("membership.tsv").as_os_str(),
        ])
        .args([
            "--targets".as_ref(),
            dir.path().join("targets.tsv").as_os_str(),
        ])
        .args([
            "--attrsets".as_ref(),
            dir.path().join("attrsets.tsv").as_os_str(),
        ])
        .args(["--qrels".as_ref(), dir.path().join("qrels.txt").as_os_str()])
        .args(["--out".as_ref(), scores.as_os_str()]),
    );

    // Ambiguous measure set without --measure: evaluation error.
    let out = bin()
        .arg("discpower")
        .args(["--matrix".as_ref(), scores.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);

    let curve = dir.path().join("curve.csv");
    let stdout = run_ok(
        bin()
            .arg("discpower")
            .args(["--matrix".as_ref(), scores.as_os_str()])
            .args(["--measure", "ERR@10"])
            .args(["--trials", "300", "--seed", "11", "--threads", "4"])
            .args(["--curve-out".as_ref(), curve.as_os_str()]),
    );
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "system_a,system_b,observed_diff,p_value");
    assert_eq!(lines.len(), 1 + 6, "C(4,2) pairs");
    let curve_text = std::fs::read_to_string(&curve).unwrap();
    assert!(curve_text.starts_with("alpha,fraction\n0.001,"));
    assert_eq!(curve_text.lines().count(), 1 + 200);

    // Same seed, different thread count: identical output.
    let stdout2 = run_ok(
        bin()
            .arg("discpower")
            .args(["--matrix".as_ref(), scores.as_os_str()])
            .args(["--measure", "ERR@10"])
            .args(["--trials", "300", "--seed", "11", "--threads", "1"]),
    );
    assert_eq!(stdout, stdout2);

    // Wide matrix input.
    let wide = dir.path().join("wide.csv");
    std::fs::write(&wide, "topic,s1,s2\nt1,0.1,0.9\nt2,0.2,0.8\nt3,0.15,0.7\n").unwrap();
    let stdout = run_ok(
        bin()
            .arg("discpower")
            .args(["--matrix".as_ref(), wide.as_os_str()])
            .args(["--trials", "100"]),
    );
    assert!(stdout.lines().count() == 2);
}

#[test]
fn rerank_filters_and_reorders() {
    let dir = tempfile::tempdir().unwrap();
    let runs = synth_corpus(dir.path(), 1);
    let reranked = dir.path().join("reranked.txt");
    run_ok(
        bin()
            .arg("rerank")
            .args(["--run".as_ref(), runs[0].as_os_str()])
            .args([
                "--by-rating".as_ref(),
                dir.path().join("ratings.tsv").as_os_str(),
            ])
            .args([
                "--unique-owner".as_ref(),
                dir.path().join("owners.tsv").as_os_str(),
            ])
            .args(["--k", "10"])
            .args(["--out".as_ref(), reranked.as_os_str()]),
    );
    let text = std::fs::read_to_string(&reranked).unwrap();
    assert!(text.contains(" run00-rating-uc"));

    // The output parses back as a run; owners are unique per topic.
    let owners_text = std::fs::read_to_string(dir.path().join("owners.tsv")).unwrap();
    let owners: std::collections::BTreeMap<&str, &str> = owners_text
        .lines()
        .map(|l| {
            let mut it = l.split('\t');
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let mut per_topic: std::collections::BTreeMap<&str, Vec<&str>> = Default::default();
    for line in text.lines() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        per_topic.entry(fields[0]).or_default().push(fields[2]);
    }
    for (_, items) in per_topic {
        assert!(items.len() <= 10);
        let mut seen = std::collections::BTreeSet::new();
        for item in items {
            assert!(seen.insert(owners[item]), "owner repeated in topic");
        }
    }

    // Without any action the command refuses to run.
    let out = bin()
        .arg("rerank")
        .args(["--run".as_ref(), runs[0].as_os_str()])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn synth_is_deterministic_across_invocations() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth_corpus(a.path(), 1);
    synth_corpus(b.path(), 1);
    for name in [
        "attrsets.tsv",
        "membership.tsv",
        "targets.tsv",
        "qrels.txt",
        "run00.txt",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical synth invocations");
    }
}
