//! End-to-end tests of the command-line interface: exit codes, output
//! formats, seed and thread behavior, and the file formats it reads and
//! writes.

use std::path::Path;
use std::process::{Command, Output};

use ptlab::ensemble::EnsembleKind;
use ptlab::matrix::read_matrix_dump;
use ptlab::word::Symbol;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).expect("write config");
    path.to_str().expect("utf8 path").to_owned()
}

// ---------------------------------------------------------------------------
// Partition listing
// ---------------------------------------------------------------------------

#[test]
fn partitions_reports_counts_and_lists_elements() {
    let cases = [
        (["pairings", "3"], "15"),
        (["eps-pairings", "3"], "6"),
        (["noncrossing", "4"], "14"),
        (["nc12", "4"], "9"),
        (["admissible", "3"], "7"),
        (["set-partitions", "4"], "15"),
    ];
    for ([family, size], count) in cases {
        let output = run(&["partitions", "--family", family, "--size", size]);
        assert!(output.status.success(), "{family} failed");
        assert_eq!(stdout_of(&output).trim(), count, "count of {family}");
        assert!(
            stderr_of(&output).contains("elements"),
            "{family} summary line missing"
        );
    }

    let listed = run(&["partitions", "--family", "noncrossing", "--size", "3", "--list"]);
    assert!(listed.status.success());
    let lines: Vec<String> = stdout_of(&listed).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 5, "one line per partition");
    assert!(lines.iter().any(|l| l.contains("(1,2,3)")), "{lines:?}");
}

// ---------------------------------------------------------------------------
// Exact Weingarten values
// ---------------------------------------------------------------------------

#[test]
fn wg_exact_prints_rationals_and_symbolic_json() {
    let at_dim = run(&["wg", "exact", "--m", "2", "--parts", "2", "--dim", "16"]);
    assert!(at_dim.status.success());
    assert_eq!(stdout_of(&at_dim).trim(), "-1/4080");

    let symbolic = run(&["wg", "exact", "--parts", "2", "--symbolic"]);
    assert!(symbolic.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&stdout_of(&symbolic)).expect("valid JSON");
    assert_eq!(value["cycle_type"], serde_json::json!([2]));
    assert_eq!(value["numerator"], serde_json::json!(["-1"]));
    assert_eq!(value["denominator"], serde_json::json!(["0", "-1", "0", "1"]));
    assert!(value["display"].as_str().expect("display").contains("M^3"));

    // Padding with fixed points: --m 3 --parts 2 means the class (2,1).
    let padded = run(&["wg", "exact", "--m", "3", "--parts", "2", "--dim", "8"]);
    assert!(padded.status.success());
    assert_eq!(stdout_of(&padded).trim(), "-1/3780"); // -1/((64-1)(64-4))

    let overfull = run(&["wg", "exact", "--m", "2", "--parts", "2,2", "--dim", "8"]);
    assert_eq!(overfull.status.code(), Some(2), "parts exceeding m are an error");
}

#[test]
fn wg_entry_moment_evaluates_index_patterns() {
    let output = run(&["wg", "entry-moment", "--word", "1.1 2.2 1.1* 2.2*", "--dim", "8"]);
    assert!(output.status.success());
    assert_eq!(stdout_of(&output).trim(), "1/63");

    // A single unconjugated entry has zero mean.
    let unbalanced = run(&["wg", "entry-moment", "--word", "1.1", "--dim", "8"]);
    assert!(unbalanced.status.success());
    assert_eq!(stdout_of(&unbalanced).trim(), "0");

    let garbage = run(&["wg", "entry-moment", "--word", "1.x", "--dim", "8"]);
    assert_eq!(garbage.status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------------

#[test]
fn predict_emits_exact_rows_for_an_experiment_config() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(
        dir.path(),
        "limit.json",
        r#"{"experiment":"limit_distribution","ensemble":{"kind":"wishart","n":64},"dims":[[4,4],[4,8]],"max_order":2,"samples":8,"seed":1}"#,
    );

    let csv = run(&["predict", "--config", &config]);
    assert!(csv.status.success());
    let text = stdout_of(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("word,b,d,value_re,value_im,exact"));
    let rows: Vec<&str> = lines.collect();
    // Two ladder rungs, each with two moments and one cumulant label.
    assert_eq!(rows.len(), 6);
    assert!(
        rows.iter().any(|r| r.starts_with("AG AG,4,4,1.25,0,5/4")),
        "second moment at the square rung: {rows:?}"
    );
    assert!(
        rows.iter().any(|r| r.starts_with("AG AG,4,8,1.5,0,3/2")),
        "second moment depends on the rung shape: {rows:?}"
    );

    let json = run(&["predict", "--config", &config, "--format", "json"]);
    assert!(json.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&json)).expect("valid JSON");
    assert_eq!(value.as_array().expect("array").len(), 6);
    assert_eq!(value[0]["word"], serde_json::json!("AG"));
}

#[test]
fn predict_transforms_a_plain_moment_functional() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(
        dir.path(),
        "functional.json",
        r#"{
            "A": [1.0, 0.0], "A*": [1.0, 0.0],
            "A A": [1.25, 0.0], "A A*": [1.25, 0.0],
            "A* A": [1.25, 0.0], "A* A*": [1.25, 0.0]
        }"#,
    );

    let output = run(&["predict", "--config", &config, "--word", "AG A"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&output)).expect("valid JSON");
    assert_eq!(value["cumulants"]["A A"], serde_json::json!([0.25, 0.0]));
    assert_eq!(
        value["pt_moments"],
        serde_json::json!([[1.0, 0.0], [1.25, 0.0], [1.75, 0.0], [2.625, 0.0]])
    );
    assert_eq!(
        value["pt_cumulants"],
        serde_json::json!([[1.0, 0.0], [0.25, 0.0], [0.0, 0.0], [0.0, 0.0]])
    );
    assert_eq!(value["words"]["AG A"], serde_json::json!([1.0, 0.0]));

    // The functional path is JSON-only.
    let as_csv = run(&["predict", "--config", &config, "--format", "csv"]);
    assert_eq!(as_csv.status.code(), Some(2));

    // A missing sub-moment is a configuration error, not a silent zero.
    let partial = write_config(dir.path(), "partial.json", r#"{"A A": [1.25, 0.0]}"#);
    let missing = run(&["predict", "--config", &partial]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr_of(&missing).contains("not derivable"));
}

// ---------------------------------------------------------------------------
// Verification runs
// ---------------------------------------------------------------------------

#[test]
fn verify_blocks_accepts_direct_flags_and_passes() {
    let output = run(&["verify", "blocks", "--word", "GG", "--grid", "4,8,16,32"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    let header = text.lines().next().expect("header");
    assert_eq!(
        header,
        "p,q,join_blocks,classifier_verdict,reason,fitted_exponent,leading_coefficient"
    );
    assert_eq!(text.lines().count(), 5, "header plus one row per (p,q) pair");
    let survivors = text.lines().filter(|l| l.contains("survives")).count();
    assert_eq!(survivors, 3);
    assert!(stderr_of(&output).contains("all pass"));

    // Three letters: six sign-respecting pairings, thirty-six rows, and
    // one surviving term per admissible partition of six points.
    let bigger = run(&["verify", "blocks", "--m", "3", "--word", "GGG", "--grid", "4,8,16,32"]);
    assert_eq!(bigger.status.code(), Some(0));
    let bigger_text = stdout_of(&bigger);
    assert_eq!(bigger_text.lines().count(), 37);
    let bigger_survivors = bigger_text
        .lines()
        .filter(|l| l.contains("survives"))
        .count();
    assert_eq!(bigger_survivors, 7);

    // The direct-flag form needs the full description: a word without a
    // grid (or neither) is a usage error.
    let no_grid = run(&["verify", "blocks", "--word", "GG"]);
    assert_eq!(no_grid.status.code(), Some(2));
    assert!(stderr_of(&no_grid).contains("--grid"));
    let neither = run(&["verify", "blocks"]);
    assert_eq!(neither.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_separate_failure_kinds() {
    let dir = tempfile::tempdir().expect("temp dir");

    // A passing statistical run exits 0.
    let good = write_config(
        dir.path(),
        "good.json",
        r#"{"experiment":"entry_moments","dim":4,"max_order":2,"samples":4000,"seed":1}"#,
    );
    let pass = run(&["verify", "entry-moments", "--config", &good]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(stderr_of(&pass).contains("all pass"));

    // A fixed non-scalar matrix is not rotation invariant, so the
    // invariance probe must report failing rows and exit 1.
    let rigid = write_config(
        dir.path(),
        "rigid.json",
        r#"{
            "experiment":"invariance",
            "ensemble":{"kind":"fixed","matrix":[[[5.0,0.0],[0.0,0.0]],[[0.0,0.0],[-3.0,0.0]]]},
            "dims":[[2,1]],
            "samples":64,
            "seed":2,
            "words":["AT A"]
        }"#,
    );
    let fail = run(&["verify", "invariance", "--config", &rigid]);
    assert_eq!(fail.status.code(), Some(1), "stderr: {}", stderr_of(&fail));
    assert!(stderr_of(&fail).contains("FAILED"));

    // Unreadable config, unknown experiment tag, kind mismatch: all usage
    // errors.
    let missing = run(&["verify", "entry-moments", "--config", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = write_config(dir.path(), "bad.json", r#"{"experiment":"unknown"}"#);
    let unknown = run(&["verify", "entry-moments", "--config", &bad]);
    assert_eq!(unknown.status.code(), Some(2));
    let mismatched = run(&["verify", "freeness", "--config", &good]);
    assert_eq!(mismatched.status.code(), Some(2));
    assert!(stderr_of(&mismatched).contains("another kind"));

    // The structural table takes no seed.
    let seeded_blocks = run(&["verify", "blocks", "--word", "GG", "--seed", "7"]);
    assert_eq!(seeded_blocks.status.code(), Some(2));
}

#[test]
fn verify_seed_override_and_formats() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(
        dir.path(),
        "em.json",
        r#"{"experiment":"entry_moments","dim":4,"max_order":2,"samples":2000,"seed":3}"#,
    );

    let base = run(&["verify", "entry-moments", "--config", &config]);
    assert_eq!(base.status.code(), Some(0));
    let base_text = stdout_of(&base);
    assert!(base_text.starts_with(
        "experiment,word,b,d,samples,seed,predicted_re,predicted_im,estimated_re,estimated_im,std_error,tolerance,pass"
    ));
    assert!(base_text.contains(",3,"), "rows carry the config seed");

    // Same run again: byte-identical stdout.
    let again = run(&["verify", "entry-moments", "--config", &config]);
    assert_eq!(base.stdout, again.stdout);

    // Seed override changes the estimates but not the layout.
    let reseeded = run(&["verify", "entry-moments", "--config", &config, "--seed", "5"]);
    assert_eq!(reseeded.status.code(), Some(0));
    let reseeded_text = stdout_of(&reseeded);
    assert_ne!(base_text, reseeded_text);
    assert_eq!(base_text.lines().count(), reseeded_text.lines().count());
    assert!(reseeded_text.contains(",5,"), "rows carry the override seed");

    // JSON format parses and matches the row count.
    let json = run(&["verify", "entry-moments", "--config", &config, "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&json)).expect("valid JSON");
    assert_eq!(
        rows.as_array().expect("array").len(),
        base_text.lines().count() - 1
    );
    assert_eq!(rows[0]["experiment"], serde_json::json!("entry_moments"));

    // --out writes the same report to a file instead of stdout.
    let out_path = dir.path().join("report.csv");
    let to_file = run(&[
        "verify",
        "entry-moments",
        "--config",
        &config,
        "--out",
        out_path.to_str().expect("utf8"),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(stdout_of(&to_file).is_empty());
    let written = std::fs::read_to_string(&out_path).expect("report file");
    assert_eq!(written, base_text);
}

// ---------------------------------------------------------------------------
// Matrix dumps
// ---------------------------------------------------------------------------

#[test]
fn simulate_writes_a_readable_draw() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(dir.path(), "ens.json", r#"{"kind":"wishart","n":32}"#);
    let dump = dir.path().join("draw.fptm");

    let output = run(&[
        "simulate",
        "--config",
        &config,
        "--b",
        "4",
        "--d",
        "4",
        "--symbol",
        "G",
        "--seed",
        "11",
        "--sample",
        "2",
        "--out",
        dump.to_str().expect("utf8"),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));

    let mut reader = std::fs::File::open(&dump).expect("dump file");
    let (matrix, b) = read_matrix_dump(&mut reader).expect("valid dump");
    assert_eq!(b, 4);
    assert_eq!((matrix.rows(), matrix.cols()), (16, 16));

    // The dump is exactly the library-side draw with the same coordinates.
    let expected = EnsembleKind::Wishart { n: 32 }
        .sample(16, 11, 1, 2)
        .expect("draw")
        .apply_symbol(Symbol::PartialRight, 4, 4)
        .expect("flip");
    assert_eq!(matrix.max_abs_diff(&expected), 0.0);

    // Simulation without a destination is an error rather than binary
    // noise on stdout.
    let no_out = run(&["simulate", "--config", &config, "--b", "4", "--d", "4"]);
    assert_eq!(no_out.status.code(), Some(2));
}
