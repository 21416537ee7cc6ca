//! End-to-end runs of the `procmine` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use procmine::eventlog::EventLog;
use procmine::ingest::export_xes;

fn procmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_procmine"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_log(dir: &Path, name: &str, traces: &[Vec<&str>]) -> PathBuf {
    let file = dir.join(name);
    std::fs::write(&file, export_xes(&EventLog::from_activity_traces(traces))).unwrap();
    file
}

fn receipt() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/receipt.xes")
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(procmine(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(procmine(&["discover", "--algorithm", "alpha"]).status.code(), Some(1));
    assert_eq!(procmine(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_is_a_data_error() {
    let out = procmine(&["stats", "--input", "/nonexistent/log.xes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn discover_conform_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let train = write_log(dir.path(), "train.xes", &[vec!["a", "b", "d"], vec!["a", "c", "d"]]);
    let log = write_log(
        dir.path(),
        "log.xes",
        &[vec!["a", "b", "d"], vec!["a", "c", "d"], vec!["a", "d"]],
    );
    let model = dir.path().join("net.json");
    let out = procmine(&[
        "discover",
        "--algorithm",
        "alpha",
        "--input",
        path(&train),
        "--model-out",
        path(&model),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let report = dir.path().join("report.tsv");
    let args = [
        "conform",
        "--method",
        "token",
        "--input",
        path(&log),
        "--model",
        path(&model),
        "--report-out",
        path(&report),
    ];
    assert_eq!(procmine(&args).status.code(), Some(0));
    let tsv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "case_id\tproduced\tconsumed\tmissing\tremaining\tfitness");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("2\t3\t3\t1\t1\t"), "{}", lines[3]);

    let out = procmine(&["evaluate", "--input", path(&log), "--model", path(&model), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = json.to_string();
    for key in ["fitness", "precision", "generalization", "simplicity"] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn alignment_report_lists_moves() {
    let dir = tempfile::tempdir().unwrap();
    let train = write_log(dir.path(), "train.xes", &[vec!["a", "b", "c"]]);
    let test = write_log(dir.path(), "test.xes", &[vec!["a", "c"]]);
    let model = dir.path().join("net.json");
    let args = [
        "discover",
        "--algorithm",
        "imdf",
        "--input",
        path(&train),
        "--model-out",
        path(&model),
    ];
    assert_eq!(procmine(&args).status.code(), Some(0));
    let out = procmine(&[
        "conform",
        "--method",
        "alignment",
        "--input",
        path(&test),
        "--model",
        path(&model),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("case_id\tcost\tfitness\talignment\n"), "{stdout}");
    assert!(stdout.contains("\t10\t"), "{stdout}");
    assert!(stdout.contains("('>>', 'b')"), "{stdout}");
}

#[test]
fn outputs_are_deterministic() {
    let runs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|threads| {
            Command::new(env!("CARGO_BIN_EXE_procmine"))
                .env("PROCMINE_THREADS", threads)
                .args(["sna", "--metric", "handover", "--json", "--input", path(&receipt())])
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);

    let first = procmine(&["discover", "--algorithm", "imdf", "--input", path(&receipt())]);
    let second = procmine(&["discover", "--algorithm", "imdf", "--input", path(&receipt())]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn render_reads_model_documents() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("net.json");
    let dot = dir.path().join("net.dot");
    let input = receipt();
    let args = [
        "discover",
        "--algorithm",
        "alpha",
        "--input",
        path(&input),
        "--model-out",
        path(&model),
    ];
    assert_eq!(procmine(&args).status.code(), Some(0));
    assert_eq!(
        procmine(&["render", "--input", path(&model), "--dot-out", path(&dot)])
            .status
            .code(),
        Some(0)
    );
    let golden =
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/receipt_alpha.dot"))
            .unwrap();
    assert_eq!(std::fs::read_to_string(&dot).unwrap(), golden);
}
