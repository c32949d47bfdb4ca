//! End-to-end tests of the `care` binary against the bundled demo corpus.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn care(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_care"))
        .args(args)
        .current_dir(workspace_root())
        .env("CARE_LOG", "error")
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn annotate_reproduces_the_committed_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("annotations.jsonl");
    let output = care(&[
        "annotate",
        "--posts",
        "demo/posts.jsonl",
        "--comments",
        "demo/comments.jsonl",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let golden = read(&workspace_root().join("demo/expected_annotations.jsonl"));
    assert_eq!(read(&out), golden);

    // Re-running with explicit single-threaded execution is byte-identical.
    let out2 = dir.path().join("annotations2.jsonl");
    let output = care(&[
        "annotate",
        "--posts",
        "demo/posts.jsonl",
        "--comments",
        "demo/comments.jsonl",
        "--parallelism",
        "1",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert_eq!(read(&out2), golden);
}

#[test]
fn config_file_run_matches_flag_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("annotations.jsonl");
    let output = care(&[
        "annotate",
        "--config",
        "demo/config.toml",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let golden = read(&workspace_root().join("demo/expected_annotations.jsonl"));
    assert_eq!(read(&out), golden);
}

#[test]
fn raising_threshold_yields_a_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out5 = dir.path().join("t5.jsonl");
    let out6 = dir.path().join("t6.jsonl");
    for (t, path) in [("5", &out5), ("6", &out6)] {
        let output = care(&[
            "annotate",
            "--config",
            "demo/config.toml",
            "--threshold",
            t,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let ids = |s: &str| -> HashSet<String> {
        s.lines()
            .map(|l| {
                serde_json::from_str::<serde_json::Value>(l).unwrap()["post_id"]
                    .as_str()
                    .unwrap()
                    .to_string()
            })
            .collect()
    };
    let at5 = ids(&read(&out5));
    let at6 = ids(&read(&out6));
    assert!(at6.is_subset(&at5), "{at6:?} vs {at5:?}");
    assert!(at6.contains("p01")); // six supporting comments
    assert!(!at6.contains("p02")); // five supporting comments
}

#[test]
fn per_class_threshold_unlocks_sparse_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("annotations.jsonl");
    let output = care(&[
        "annotate",
        "--config",
        "demo/config.toml",
        "--class-threshold",
        "scared=3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let content = read(&out);
    assert!(
        content.contains(r#"{"post_id":"p08","labels":["scared"],"support":{"scared":3}}"#),
        "{content}"
    );
}

#[test]
fn exclusions_suppress_matches() {
    let dir = tempfile::tempdir().unwrap();
    let excl = dir.path().join("exclusions.tsv");
    std::fs::write(&excl, "demonstrative\tfunny\nleading-exaggerators\tfunny\n").unwrap();
    let out = dir.path().join("annotations.jsonl");
    let output = care(&[
        "annotate",
        "--config",
        "demo/config.toml",
        "--exclusions",
        excl.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    // p02 loses its "funny" support and drops below threshold.
    assert!(!read(&out).contains("\"p02\""));
}

#[test]
fn ensemble_adds_external_path_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ensemble.jsonl");
    let output = care(&[
        "annotate",
        "--config",
        "demo/config.toml",
        "--ensemble",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let content = read(&out);
    // scared support is 3 on the CARE side but 4 externally (t_ext = 4).
    assert!(
        content.contains(
            r#"{"post_id":"p08","labels":["scared"],"care_support":{"scared":3},"external_support":{"scared":4}}"#
        ),
        "{content}"
    );
    // The short post never appears even with enough comment support.
    assert!(!content.contains("\"p06\""));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("curiosity"), "{stdout}");
}

#[test]
fn eval_agreement_matches_hand_computed_table() {
    let output = care(&[
        "eval",
        "agreement",
        "--gold",
        "demo/gold.jsonl",
        "--annotations",
        "demo/expected_annotations.jsonl",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    let expected = "\
k\tany_care\tall_care\tother
1\t100.0\t100.0\t33.3
2\t100.0\t100.0\t0.0
3\t66.7\t66.7\t0.0
";
    assert_eq!(stdout, expected);
}

#[test]
fn eval_kappa_matches_hand_computed_value() {
    let output = care(&["eval", "kappa", "--gold", "demo/gold.jsonl"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    // amused: 8 posts, present votes (0,2,0,2,0,0,0,1) among 3 raters.
    assert!(stdout.contains("amused\t0.2421"), "{stdout}");
    assert!(stdout.contains("excited\tdegenerate"), "{stdout}");
}

#[test]
fn eval_sweep_emits_csv_for_all_thresholds() {
    let output = care(&[
        "eval",
        "sweep",
        "--gold",
        "demo/gold.jsonl",
        "--posts",
        "demo/posts.jsonl",
        "--comments",
        "demo/comments.jsonl",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("t,class,precision,recall"));
    // 10 thresholds x 7 classes.
    assert_eq!(stdout.lines().count(), 1 + 10 * 7);
    assert!(stdout.contains("5,amused,1.000000,1.000000"), "{stdout}");
}

#[test]
fn eval_fp_reports_confirmed_pairs() {
    let output = care(&[
        "eval",
        "fp",
        "--gold",
        "demo/gold.jsonl",
        "--posts",
        "demo/posts.jsonl",
        "--comments",
        "demo/comments.jsonl",
        "--min-support",
        "2",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("demonstrative\tfunny\tamused\t2\t0.0000"),
        "{stdout}"
    );
    // Pairs supported by a single post are suppressed at min-support 2.
    assert!(!stdout.contains("\t1\t"), "{stdout}");
}

#[test]
fn eval_intersect_is_total_on_identical_inputs() {
    let output = care(&[
        "eval",
        "intersect",
        "--annotated",
        "demo/expected_annotations.jsonl",
        "--predicted",
        "demo/expected_annotations.jsonl",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("average\t\t\t100.0"), "{stdout}");
}

#[test]
fn export_writes_training_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("training.jsonl");
    let output = care(&[
        "export",
        "--annotations",
        "demo/expected_annotations.jsonl",
        "--posts",
        "demo/posts.jsonl",
        "--out",
        out.to_str().unwrap(),
        "--valence",
    ]);
    assert!(output.status.success());
    let content = read(&out);
    assert_eq!(content.lines().count(), 6);
    assert!(content.contains(r#""labels":["positive"]"#));
    assert!(content.contains(r#""labels":["negative"]"#));
}

#[test]
fn expand_and_review_apply_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("cand_lex.tsv");
    let pat = dir.path().join("cand_pat.tsv");
    let output = care(&[
        "expand",
        "--posts",
        "demo/posts.jsonl",
        "--comments",
        "demo/comments.jsonl",
        "--annotations",
        "demo/expected_annotations.jsonl",
        "--out-lexicon",
        lex.to_str().unwrap(),
        "--out-patterns",
        pat.to_str().unwrap(),
        "--f-lexicon",
        "3",
        "--f-pattern",
        "2",
    ]);
    assert!(output.status.success(), "{output:?}");
    // The demo leftovers are function-word chatter: no lexicon candidates,
    // cross-class pattern candidates sorted by total frequency.
    assert_eq!(read(&lex), "");
    let pat_content = read(&pat);
    assert!(pat_content.starts_with("this\t4\t"), "{pat_content}");

    let out_lex = dir.path().join("lexicon.tsv");
    let out_pat = dir.path().join("patterns.care");
    let output = care(&[
        "review-apply",
        "--review",
        "demo/review.txt",
        "--out-lexicon",
        out_lex.to_str().unwrap(),
        "--out-patterns",
        out_pat.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    assert!(read(&out_lex).contains("dope\tapproving\texpansion"));
    assert!(read(&out_pat).contains("made-me:"));
}

#[test]
fn exit_codes_distinguish_validation_from_io() {
    // Missing file: i/o error, exit 2.
    let output = care(&[
        "annotate",
        "--posts",
        "/nonexistent/posts.jsonl",
        "--comments",
        "demo/comments.jsonl",
        "--out",
        "/tmp/never.jsonl",
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");

    // Missing required flag: validation, exit 1.
    let output = care(&[
        "annotate",
        "--comments",
        "demo/comments.jsonl",
        "--out",
        "/tmp/x",
    ]);
    assert_eq!(output.status.code(), Some(1));

    // Unknown flag: usage error, exit 1.
    let output = care(&["annotate", "--frobnicate"]);
    assert_eq!(output.status.code(), Some(1));

    // Malformed corpus content: validation, exit 1.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("posts.jsonl");
    std::fs::write(&bad, "not json\n").unwrap();
    let output = care(&[
        "annotate",
        "--posts",
        bad.to_str().unwrap(),
        "--comments",
        "demo/comments.jsonl",
        "--out",
        "/tmp/never.jsonl",
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");

    // Invalid threshold in config invariants: validation, exit 1.
    let output = care(&[
        "annotate",
        "--config",
        "demo/config.toml",
        "--threshold",
        "0",
        "--out",
        "/tmp/never.jsonl",
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");

    // Help exits 0.
    let output = care(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn count_instantiations_reports_scale() {
    let output = care(&[
        "count-instantiations",
        "--n-patterns",
        "23",
        "--n-indicators",
        "163",
        "--n-exaggerators",
        "37",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("expressions    3749"));
    assert!(stdout.contains("instantiations 138713"));

    // Defaults derive the counts from the seed artifacts.
    let output = care(&["count-instantiations"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("patterns       6"), "{stdout}");
}
