//! End-to-end tests of the `counterfact` binary: exit codes, determinism,
//! output formats, and flag plumbing, all against the committed fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Build a command with a clean backend environment so an ambient endpoint
/// cannot leak into routing decisions.
fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_counterfact"));
    cmd.env_remove("COUNTERFACT_ENDPOINT");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn counterfact")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Parse JSONL output, skipping `#` comment lines.
fn records(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect()
}

fn demo_explain(extra: &[&str]) -> Command {
    let mut cmd = bin();
    cmd.arg("explain")
        .arg("--config")
        .arg(fixtures().join("demo/config.toml"))
        .arg("--fever")
        .arg(fixtures().join("demo/corpus.jsonl"))
        .args(extra);
    cmd
}

#[test]
fn explain_demo_end_to_end() {
    let out = run(&mut demo_explain(&["--no-timestamp"]));
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let recs = records(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["claim_id"], "75397");
    assert_eq!(recs[1]["claim_id"], "229349");
    for r in &recs {
        assert_eq!(r["status"], "ok");
    }
    assert_eq!(
        recs[0]["cf_a"],
        "If we were to say 'Black panther is an upcoming American superhero film based on \
         the marvel comics character of the same name' instead of 'exclusively a comic \
         book', the claim would be correct."
    );
    let summary = stderr(&out);
    assert!(summary.contains("2 record(s), 2 ok, 0 failed"), "{summary}");
}

#[test]
fn explain_output_is_deterministic() {
    let a = run(&mut demo_explain(&["--no-timestamp"]));
    let b = run(&mut demo_explain(&["--no-timestamp"]));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "byte-identical reruns");

    let p1 = run(&mut demo_explain(&["--no-timestamp", "--jobs", "3"]));
    let p2 = run(&mut demo_explain(&["--no-timestamp", "--jobs", "3"]));
    assert_eq!(p1.status.code(), Some(0), "stderr: {}", stderr(&p1));
    assert_eq!(p1.stdout, p2.stdout, "byte-identical parallel reruns");
}

#[test]
fn parallel_output_is_sorted_by_claim_id() {
    let out = run(&mut demo_explain(&["--no-timestamp", "--jobs", "2"]));
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> =
        records(&out).iter().map(|r| r["claim_id"].as_str().unwrap().to_string()).collect();
    // input order is 75397, 229349; the parallel path re-sorts by id
    assert_eq!(ids, vec!["229349".to_string(), "75397".to_string()]);
}

#[test]
fn timestamp_header_present_by_default_and_suppressible() {
    let with = run(&mut demo_explain(&[]));
    assert_eq!(with.status.code(), Some(0));
    let first = stdout(&with).lines().next().unwrap().to_string();
    assert!(first.starts_with("# generated "), "{first}");
    assert!(first.contains("by counterfact "), "{first}");

    let without = run(&mut demo_explain(&["--no-timestamp"]));
    assert!(!stdout(&without).starts_with('#'));
}

#[test]
fn forms_subset_renders_only_requested_forms() {
    let out = run(&mut demo_explain(&["--no-timestamp", "--forms", "cf-a"]));
    assert_eq!(out.status.code(), Some(0));
    for r in records(&out) {
        assert!(r["cf_a"].is_string(), "{r}");
        assert!(r["cf_n"].is_null(), "{r}");
        assert!(r["cf_m"].is_null(), "{r}");
    }
    let bad = run(&mut demo_explain(&["--forms", "cf-z"]));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn fixture_miss_is_a_record_error_not_a_crash() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let mut lines = std::fs::read_to_string(fixtures().join("demo/corpus.jsonl")).unwrap();
    lines.push_str(
        "{\"id\":\"999\",\"claim\":\"Uncovered claim.\",\"label\":\"REFUTED\",\
         \"evidence_text\":\"Uncovered evidence.\",\"evidence_count\":1}\n",
    );
    std::fs::write(&corpus, lines).unwrap();

    let mut cmd = bin();
    cmd.arg("explain")
        .arg("--config")
        .arg(fixtures().join("demo/config.toml"))
        .arg("--fever")
        .arg(&corpus)
        .arg("--no-timestamp");
    let strict = run(&mut cmd);
    assert_eq!(strict.status.code(), Some(1), "stderr: {}", stderr(&strict));
    let recs = records(&strict);
    assert_eq!(recs.len(), 3, "all records processed despite the failure");
    assert!(recs[2]["status"].as_str().unwrap().starts_with("error:"), "{}", recs[2]);

    let mut cmd = bin();
    cmd.arg("explain")
        .arg("--config")
        .arg(fixtures().join("demo/config.toml"))
        .arg("--fever")
        .arg(&corpus)
        .arg("--no-timestamp")
        .arg("--keep-going");
    let lenient = run(&mut cmd);
    assert_eq!(lenient.status.code(), Some(0), "stderr: {}", stderr(&lenient));
    assert_eq!(records(&lenient).len(), 3);
}

#[test]
fn baseline_reproduces_reference_rows() {
    for (method, want_75397, want_229349) in [
        (
            "ext",
            "Black Panther is set to be released in the United States on February 16, 2018, \
             in IMAX.",
            "The initialism, LGBT, is intended to emphasize a diversity of sexuality and \
             gender identity-based cultures.",
        ),
        (
            "abs",
            "Black Panther is an upcoming American superhero film based on the Marvel Comics \
             character of the same name.",
            "It is an adaptation of the initialism LGB, which was used to replace the term \
             gay in reference to the LGBT community.",
        ),
    ] {
        let mut cmd = bin();
        cmd.arg("baseline")
            .arg("--config")
            .arg(fixtures().join("demo/config.toml"))
            .arg("--fever")
            .arg(fixtures().join("demo/corpus.jsonl"))
            .arg("--method")
            .arg(method)
            .arg("--no-timestamp");
        let out = run(&mut cmd);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        let recs = records(&out);
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0]["method"], method);
        assert_eq!(recs[0]["explanation"], want_75397, "{method}");
        assert_eq!(recs[1]["explanation"], want_229349, "{method}");
    }
}

#[test]
fn baseline_rejects_unknown_method() {
    let mut cmd = bin();
    cmd.arg("baseline")
        .arg("--config")
        .arg(fixtures().join("demo/config.toml"))
        .arg("--fever")
        .arg(fixtures().join("demo/corpus.jsonl"))
        .arg("--method")
        .arg("tldr");
    let out = run(&mut cmd);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--method"), "{}", stderr(&out));
}

#[test]
fn ingest_roundtrips_and_reports_line_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("nested/dir/corpus.jsonl");

    let mut cmd = bin();
    cmd.arg("ingest")
        .arg("--fever")
        .arg(fixtures().join("demo/corpus.jsonl"))
        .arg("--out")
        .arg(&out_path);
    let out = run(&mut cmd);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert!(written.starts_with("# generated "));
    let original = std::fs::read_to_string(fixtures().join("demo/corpus.jsonl")).unwrap();
    let body: String = written.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert_eq!(body, original, "ingest is canonical and lossless");

    // a file with one broken line: reported, skipped, exit 1 unless lenient
    let broken = dir.path().join("broken.jsonl");
    std::fs::write(&broken, format!("{}{{not json\n", original)).unwrap();
    let mut cmd = bin();
    cmd.arg("ingest").arg("--fever").arg(&broken);
    let strict = run(&mut cmd);
    assert_eq!(strict.status.code(), Some(1));
    assert!(stderr(&strict).contains("line error"), "{}", stderr(&strict));

    let mut cmd = bin();
    cmd.arg("ingest").arg("--fever").arg(&broken).arg("--keep-going");
    assert_eq!(run(&mut cmd).status.code(), Some(0));

    let mut cmd = bin();
    cmd.arg("ingest").arg("--fever").arg(dir.path().join("missing.jsonl"));
    assert_eq!(run(&mut cmd).status.code(), Some(2));
}

#[test]
fn sampling_is_seeded_and_requires_a_seed() {
    let no_seed = run(&mut demo_explain(&["--sample", "1"]));
    assert_eq!(no_seed.status.code(), Some(2));
    assert!(stderr(&no_seed).contains("seed"), "{}", stderr(&no_seed));

    let a = run(&mut demo_explain(&["--no-timestamp", "--sample", "1", "--seed", "7"]));
    let b = run(&mut demo_explain(&["--no-timestamp", "--sample", "1", "--seed", "7"]));
    assert_eq!(a.status.code(), Some(0), "stderr: {}", stderr(&a));
    assert_eq!(records(&a).len(), 1);
    assert_eq!(a.stdout, b.stdout);

    let too_many = run(&mut demo_explain(&["--sample", "5", "--seed", "7"]));
    assert_eq!(too_many.status.code(), Some(2));
}

#[test]
fn stats_report_covers_errors_and_survey() {
    let mut cmd = bin();
    cmd.arg("stats")
        .arg("--annotations")
        .arg(fixtures().join("stats/annotations.csv"))
        .arg("--survey")
        .arg(fixtures().join("stats/survey.csv"))
        .arg("--no-timestamp");
    let out = run(&mut cmd);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();

    assert!(report.get("generated_at").is_none());
    let errors = &report["errors"];
    assert_eq!(errors["total"], 500);
    assert_eq!(errors["valid"], 350);
    assert_eq!(errors["overall_correctness"], 0.7);
    assert!(errors["note"].is_string());

    let survey = &report["survey"];
    assert_eq!(survey["responses"], 60);
    assert_eq!(survey["excluded"], 2);
    let rankings = survey["average_rankings"].as_object().unwrap();
    let sum: f64 = rankings.values().map(|v| v.as_f64().unwrap()).sum();
    assert!((sum - 6.0).abs() < 1e-9, "rank means sum to {sum}");
    assert_eq!(survey["crosstabs"].as_array().unwrap().len(), 3);

    // timestamp field appears unless suppressed
    let mut cmd = bin();
    cmd.arg("stats").arg("--annotations").arg(fixtures().join("stats/annotations.csv"));
    let stamped = run(&mut cmd);
    let report: Value = serde_json::from_str(&stdout(&stamped)).unwrap();
    assert!(report["generated_at"].is_string());
}

#[test]
fn stats_group_by_filters_crosstabs() {
    let mut cmd = bin();
    cmd.arg("stats")
        .arg("--survey")
        .arg(fixtures().join("stats/survey.csv"))
        .arg("--group-by")
        .arg("overall")
        .arg("--no-timestamp");
    let out = run(&mut cmd);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let crosstabs = report["survey"]["crosstabs"].as_array().unwrap();
    assert_eq!(crosstabs.len(), 1);
    assert_eq!(crosstabs[0]["group_by"], "overall");

    let mut cmd = bin();
    cmd.arg("stats")
        .arg("--survey")
        .arg(fixtures().join("stats/survey.csv"))
        .arg("--group-by")
        .arg("nope");
    assert_eq!(run(&mut cmd).status.code(), Some(2));
}

#[test]
fn env_endpoint_routes_all_tasks_by_default() {
    // no config file; the env var supplies the default endpoint; the
    // unreachable port turns into per-record failures, not a config error
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_counterfact"));
    cmd.arg("explain")
        .arg("--fever")
        .arg(fixtures().join("demo/corpus.jsonl"))
        .arg("--no-timestamp")
        .env("COUNTERFACT_ENDPOINT", "http://127.0.0.1:9");
    let out = run(&mut cmd);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    let recs = records(&out);
    assert_eq!(recs.len(), 2, "records still written");
    for r in &recs {
        assert!(r["status"].as_str().unwrap().starts_with("error:"), "{r}");
    }
}

#[test]
fn explain_without_any_backend_is_a_config_error() {
    let mut cmd = bin();
    cmd.arg("explain").arg("--fever").arg(fixtures().join("demo/corpus.jsonl"));
    let out = run(&mut cmd);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no backend routed"), "{}", stderr(&out));
}
