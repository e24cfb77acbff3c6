use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topic-floor"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// 120 docs: O docs mention Berlin, T docs Paris; the rest is shared filler.
fn write_corpus(dir: &Path, single_class: bool) -> PathBuf {
    let mut lines = String::new();
    for i in 0..120 {
        let label = if single_class || i % 2 == 0 { "O" } else { "T" };
        let name = if i % 2 == 0 { "Berlin" } else { "Paris" };
        let filler: Vec<String> = (0..12).map(|j| format!("w{}", (i * 7 + j * 3) % 25)).collect();
        let text = format!("{name} {} .", filler.join(" "));
        lines.push_str(&format!(
            "{{\"id\":\"d{i}\",\"text\":\"{text}\",\"label\":\"{label}\",\"ne_spans\":[{{\"start\":0,\"end\":{},\"type\":\"LOC\"}}]}}\n",
            name.len()
        ));
    }
    let path = dir.join("corpus.jsonl");
    std::fs::write(&path, lines).unwrap();
    path
}

#[test]
fn masking_is_byte_stable() {
    let tmp = TempDir::new().unwrap();
    write_corpus(tmp.path(), false);
    ok(tmp.path(), &["mask-ne", "--corpus", "corpus.jsonl", "--out-dir", "a"]);
    ok(tmp.path(), &["mask-ne", "--corpus", "corpus.jsonl", "--out-dir", "b"]);
    for f in ["masked_ne.jsonl", "mask_ne.json"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        if f.ends_with(".jsonl") {
            assert_eq!(a, b, "{f}");
        } else {
            // Only the output directory differs between the two reports.
            let a = String::from_utf8(a).unwrap().replace("\"a\"", "\"b\"");
            assert_eq!(a.as_bytes(), b.as_slice(), "{f}");
        }
    }
    let masked = std::fs::read_to_string(tmp.path().join("a/masked_ne.jsonl")).unwrap();
    assert!(masked.lines().all(|l| l.contains("[LOC]") && l.contains("\"mask\":\"ne\"")));
    assert!(tmp.path().join("a/mask_ne.meta.json").exists());
}

#[test]
fn train_eval_writes_the_four_way_matrix() {
    let tmp = TempDir::new().unwrap();
    write_corpus(tmp.path(), false);
    ok(tmp.path(), &["mask-ne", "--corpus", "corpus.jsonl", "--out-dir", "o"]);
    ok(
        tmp.path(),
        &["train-eval", "--corpus", "corpus.jsonl", "--masked", "o/masked_ne.jsonl", "--out-dir", "o", "--epochs", "100"],
    );
    let csv = std::fs::read_to_string(tmp.path().join("o/matrix.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rows, ["u-u", "u-m", "m-u", "m-m"]);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("o/train_eval.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "train-eval");
    assert_eq!(report["config"]["train"]["epochs"], 100);
    assert_eq!(report["inputs"].as_object().unwrap().len(), 2);

    let out = ok(tmp.path(), &["attribute", "--model", "o/model_unmasked.json", "--test", "corpus.jsonl", "--out-dir", "o"]);
    assert!(out.lines().any(|l| l.starts_with("O: berlin")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("T: paris")), "{out}");
}

#[test]
fn ner_eval_prints_scores() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("gold.jsonl"),
        r#"{"id":"a","ne_spans":[{"start":0,"end":4,"type":"PER"},{"start":10,"end":16,"type":"LOC"},{"start":20,"end":27,"type":"ORG"}]}
{"id":"b","ne_spans":[{"start":0,"end":5,"type":"LOC"}]}
"#,
    )
    .unwrap();
    std::fs::write(
        tmp.path().join("pred.jsonl"),
        r#"{"id":"a","ne_spans":[{"start":0,"end":4,"type":"PER"},{"start":10,"end":16,"type":"ORG"}]}
{"id":"b","ne_spans":[{"start":0,"end":5,"type":"LOC"}]}
"#,
    )
    .unwrap();
    let out = ok(tmp.path(), &["ner-eval", "--gold", "gold.jsonl", "--pred", "pred.jsonl"]);
    assert!(out.contains("overall  P 0.6667  R 0.5000  F1 0.5714"), "{out}");
    assert!(tmp.path().join("out/ner_eval.json").exists());
}

#[test]
fn single_class_floor_is_one_and_config_file_applies() {
    let tmp = TempDir::new().unwrap();
    write_corpus(tmp.path(), true);
    std::fs::write(
        tmp.path().join("run.toml"),
        "seed = 5\noutput_dir = \"res\"\n[corpus]\npath = \"corpus.jsonl\"\n[lda]\niterations = 60\nburn_in = 10\nmin_doc_freq = 1\n[sweep]\nns = [1, 2, 3]\nreplicates = 2\n",
    )
    .unwrap();
    let out = ok(tmp.path(), &["topic-floor", "--config", "run.toml", "--jobs", "2"]);
    assert!(out.contains("topic floor 1.0000"), "{out}");
    let curve = std::fs::read_to_string(tmp.path().join("res/curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("source,n,seed,avg_align"));
    // 3 ns x 2 replicates, plus 3 mean rows.
    assert_eq!(curve.lines().count(), 1 + 6 + 3);
    assert!(curve.lines().skip(1).all(|l| l.ends_with(",1")));
}

#[test]
fn external_assignment_joins_the_curve() {
    let tmp = TempDir::new().unwrap();
    write_corpus(tmp.path(), false);
    let assignment: String = (0..120).map(|i| format!("d{i}\t{}\n", if i < 6 && i % 2 == 0 { -1 } else { i % 2 })).collect();
    std::fs::write(tmp.path().join("bertopic.tsv"), assignment).unwrap();
    let out = ok(
        tmp.path(),
        &[
            "topic-floor", "--corpus", "corpus.jsonl", "--ns", "2", "--replicates", "1",
            "--set", "lda.iterations=40", "--set", "lda.burn_in=5", "--set", "lda.min_doc_freq=1",
            "--assignment", "bert=bertopic.tsv",
        ],
    );
    assert!(out.contains("bert n=3"), "{out}");
    assert!(out.contains("topic floor 1.0000 (bert n=3)"), "{out}");

    let out = ok(
        tmp.path(),
        &["assign-import", "--corpus", "corpus.jsonl", "--assignment", "bertopic.tsv", "--relabel-out", "topics.jsonl"],
    );
    assert!(out.starts_with("3 topics, avg_align 1.0000"), "{out}");
    let relabeled = std::fs::read_to_string(tmp.path().join("topics.jsonl")).unwrap();
    assert!(relabeled.contains("\"label\":\"topic_2\""));
}

#[test]
fn exit_codes_follow_error_class() {
    let tmp = TempDir::new().unwrap();
    write_corpus(tmp.path(), false);
    let code = |args: &[&str]| run(tmp.path(), args).status.code();
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["ingest"]), Some(2));
    assert_eq!(code(&["ingest", "--corpus", "missing.jsonl"]), Some(3));
    std::fs::write(tmp.path().join("bad.jsonl"), "{not json\n").unwrap();
    assert_eq!(code(&["ingest", "--corpus", "bad.jsonl"]), Some(4));
    assert_eq!(code(&["mask-pos", "--corpus", "corpus.jsonl"]), Some(6));
    assert_eq!(code(&["split", "--corpus", "corpus.jsonl", "--ratio", "1,0,0"]), Some(8));
    assert_eq!(code(&["ingest", "--corpus", "corpus.jsonl", "--set", "lda.nonsense=1"]), Some(4));
}

#[test]
fn split_files_partition_the_corpus() {
    let tmp = TempDir::new().unwrap();
    write_corpus(tmp.path(), false);
    let out = ok(tmp.path(), &["split", "--corpus", "corpus.jsonl", "--ratio", "0.5,0.25,0.25", "--seed", "4"]);
    assert!(out.starts_with("train 60 / dev 30 / test 30"), "{out}");
    let lines: usize = ["train", "dev", "test"]
        .iter()
        .map(|s| std::fs::read_to_string(tmp.path().join(format!("out/{s}.jsonl"))).unwrap().lines().count())
        .sum();
    assert_eq!(lines, 120);
}
