use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const HEADER: &str = "Task ID,Project ID,Task Registration Start Date,Task Registration End Date,Task Submission End Date,Monetary Prize,Total Monetary Prize,Task Type,Technology,Platforms,Task Requirement,Registrations,Submissions,Valid Submissions,Task Status";

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crowdsched")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn row(id: &str, project: &str, tr: &str, tre: &str, ts: &str, prize: u32, vs: u32) -> String {
    let status = if vs == 0 { "Failed" } else { "Completed" };
    format!("{id},{project},{tr},{tre},{ts},{prize},{prize},Code,Java,Web,build things,5,{vs},{vs},{status}")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn ingest_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.csv");
    fs::write(&f, format!("{HEADER}\n")).unwrap();
    let o = run(&["ingest", "--dataset", path(&f)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("0 tasks"));
}

#[test]
fn ingest_counts_match_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("three.csv");
    let rows = [
        row("a", "p", "2015-01-01", "2015-01-03", "2015-01-08", 100, 1),
        row("b", "p", "2015-01-05", "2015-01-06", "2015-01-20", 400, 0),
        row("c", "q", "2015-02-01", "2015-02-04", "2015-02-04", 250, 2),
    ];
    fs::write(&f, format!("{HEADER}\n{}\n", rows.join("\n"))).unwrap();
    let o = run(&["ingest", "--dataset", path(&f), "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tasks"], 3);
    assert_eq!(v["projects"], 2);
    assert_eq!(v["failed"], 1);
    assert_eq!(v["first_date"], "2015-01-01");
    assert_eq!(v["last_date"], "2015-02-04");
    assert_eq!(v["duration_days"]["min"], 3.0);
    assert_eq!(v["duration_days"]["max"], 15.0);
    assert_eq!(v["max_prize_diff"], 300.0);
}

#[test]
fn ingest_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.csv");
    fs::write(&f, HEADER.replace(",Monetary Prize", "") + "\n").unwrap();
    let o = run(&["ingest", "--dataset", path(&f)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("Monetary Prize"));
    let o = run(&["ingest", "--dataset", path(&dir.path().join("missing.csv"))]);
    assert_eq!(code(&o), 2);
    let o = run(&["ingest"]);
    assert_eq!(code(&o), 3);
}

/// Quiet tasks posted one at a time succeed; a burst of overlapping tasks fails.
fn separable_dataset(dir: &Path) -> PathBuf {
    let base = 5844; // 2016-01-01
    let mut rows = Vec::new();
    for i in 0..200 {
        let tr = base + i * 6;
        rows.push(row(&format!("q{i}"), "quiet", &day(tr), &day(tr + 2), &day(tr + 5), 300, 1));
    }
    for i in 0..200 {
        let tr = base + 1300 + i / 8;
        rows.push(row(&format!("b{i}"), "burst", &day(tr), &day(tr + 12), &day(tr + 20), 300, 0));
    }
    let f = dir.join("separable.csv");
    fs::write(&f, format!("{HEADER}\n{}\n", rows.join("\n"))).unwrap();
    f
}

// Calendar date `n` days after 2000-01-01.
fn day(n: i64) -> String {
    let mut y = 2000;
    let mut n = n;
    loop {
        let len = if y % 4 == 0 && (y % 100 != 0 || y % 400 == 0) { 366 } else { 365 };
        if n < len {
            break;
        }
        n -= len;
        y += 1;
    }
    let leap = y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
    let months = [31, if leap { 29 } else { 28 }, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
    let mut m = 0;
    while n >= months[m] {
        n -= months[m];
        m += 1;
    }
    format!("{y:04}-{:02}-{:02}", m + 1, n + 1)
}

#[test]
fn train_learns_a_separable_rule_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let data = separable_dataset(dir.path());
    let m1 = dir.path().join("m1.txt");
    let m2 = dir.path().join("m2.txt");
    let report = dir.path().join("report.json");
    let common = ["--dataset", path(&data), "--labels", "task-status", "--folds", "5", "--seed", "3"];
    let o = run(&[&["train", "--model-out", path(&m1), "--report", path(&report)][..], &common[..]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("±"));
    let r = read_json(&report);
    assert!(r["mean_loss"].as_f64().unwrap() < 0.05, "{r}");
    assert_eq!(r["fold_losses"].as_array().unwrap().len(), 5);
    let o = run(&[&["train", "--model-out", path(&m2), "--threads", "3"][..], &common[..]].concat());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());

    let o = run(&["train", "--dataset", path(&fixture("small5.csv")), "--model-out", path(&m2), "--folds", "10"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

fn schedule(dir: &Path, name: &str, extra: &[&str]) -> (Output, PathBuf) {
    let out = dir.join(name);
    let csv = fixture(&format!("{name}.csv"));
    let deps = fixture(&format!("{name}.deps"));
    let model = fixture("mock_model.txt");
    let mut args = vec!["schedule", "--dataset", path(&csv), "--dependencies", path(&deps), "--model", path(&model)];
    args.extend(["--out", path(&out), "--generations", "40", "--population", "40"]);
    args.extend_from_slice(extra);
    let o = run(&args);
    (o, out)
}

#[test]
fn single_task_project() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("one.csv");
    fs::write(&f, format!("{HEADER}\n{}\n", row("solo", "p", "2015-03-01", "2015-03-04", "2015-03-10", 500, 1))).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "schedule", "--dataset", path(&f), "--model", path(&fixture("mock_model.txt")), "--out", path(&out),
        "--population", "8", "--generations", "5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = read_json(&out.join("pareto.json"));
    let front = v["front"].as_array().unwrap();
    assert_eq!(front.len(), 1);
    assert_eq!(front[0]["fitness"]["duration"], 9);
}

#[test]
fn diagnostics_agree_with_an_independent_open_task_count() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = schedule(dir.path(), "motivating19", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["pareto.json", "front.csv", "diagnostics.csv", "plot_duration_failure.csv", "plot_duration_similarity.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    // Registration windows from the dataset, in task order.
    let catalog = crowdsched::model::parse_dataset(fs::File::open(fixture("motivating19.csv")).unwrap()).unwrap();
    let windows: Vec<i64> = catalog.tasks.iter().map(|t| t.registration_window()).collect();
    let v = read_json(&out.join("pareto.json"));
    for member in v["front"].as_array().unwrap() {
        let starts: Vec<i64> = member["starts"].as_array().unwrap().iter().map(|s| s.as_i64().unwrap()).collect();
        for (i, diag) in member["diagnostics"].as_array().unwrap().iter().enumerate() {
            let day = starts[i];
            let open = (0..starts.len()).filter(|&j| j != i && starts[j] <= day && day < starts[j] + windows[j]).count();
            assert_eq!(diag["open_tasks"].as_u64().unwrap() as usize, open, "task {i}");
            assert_eq!(diag["start"].as_i64().unwrap(), day);
            let chosen = diag["chosen_day"].as_i64().unwrap();
            assert!((day..=day + 2).contains(&chosen));
        }
    }
    let rows = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 19 * v["front"].as_array().unwrap().len());
}

#[test]
fn no_similarity_zeroes_the_cost_objective() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = schedule(dir.path(), "motivating19", &["--no-similarity"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = read_json(&out.join("pareto.json"));
    assert_eq!(v["similarity"], false);
    for m in v["front"].as_array().unwrap() {
        assert_eq!(m["fitness"]["similarity_cost"], 0.0);
        assert_eq!(m["starts"], m["genes"]);
    }
    let plot = fs::read_to_string(out.join("plot_duration_similarity.csv")).unwrap();
    assert!(plot.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn model_and_project_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("old.txt");
    fs::write(&bad, "crowdsched-model v0\n").unwrap();
    let out = dir.path().join("o");
    let (csv, deps) = (fixture("small5.csv"), fixture("small5.deps"));
    let base = ["schedule", "--dataset", path(&csv), "--dependencies", path(&deps), "--out", path(&out)];
    let o = run(&[&base[..], &["--model", path(&bad)]].concat());
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let model = fixture("mock_model.txt");
    let o = run(&[&base[..], &["--model", path(&model), "--horizon", "3"]].concat());
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    let o = run(&[&base[..], &["--model", path(&model), "--population", "5"]].concat());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# quick run\ngenerations = 3\npopulation=10\nseed=11\nno-similarity=true\n").unwrap();
    let (o, out) = schedule(dir.path(), "small5", &["--config", path(&cfg), "--seed", "12"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = read_json(&out.join("pareto.json"));
    assert_eq!(v["seed"], 12);
    assert_eq!(v["similarity"], false);
    // The file's generations lost to the explicit flag set by the helper (40).
    assert_eq!(v["generations"].as_array().unwrap().len(), 41);

    fs::write(&cfg, "colour=blue\n").unwrap();
    let (o, _) = schedule(dir.path(), "small5", &["--config", path(&cfg)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("colour"));
}

fn oracle(dir: &Path, csv: &Path, deps: Option<&Path>, extra: &[&str]) -> (Output, PathBuf) {
    let out = dir.join("oracle");
    let model = fixture("mock_model.txt");
    let mut args = vec!["oracle-check", "--dataset", path(csv), "--model", path(&model), "--out", path(&out)];
    if let Some(d) = deps {
        args.extend(["--dependencies", path(d)]);
    }
    args.extend_from_slice(extra);
    (run(&args), out)
}

#[test]
fn oracle_check_single_task_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("one.csv");
    fs::write(&f, format!("{HEADER}\n{}\n", row("solo", "p", "2015-03-01", "2015-03-02", "2015-03-05", 500, 1))).unwrap();
    let (o, out) = oracle(dir.path(), &f, None, &["--generations", "10", "--population", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = read_json(&out.join("comparison.json"));
    assert_eq!(c["nondominated_fraction"], 1.0);
    assert_eq!(c["hypervolume_ratio"], 1.0);
    assert_eq!(c["regret"], serde_json::json!([0.0, 0.0, 0.0]));
}

#[test]
fn oracle_check_small_fixture_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = oracle(dir.path(), &fixture("small5.csv"), Some(&fixture("small5.deps")), &[]);
    assert!(matches!(code(&o), 0 | 7), "{}", stderr(&o));
    let c = read_json(&out.join("comparison.json"));
    let passed = c["nondominated_fraction"].as_f64().unwrap() >= 0.95 && c["hypervolume_ratio"].as_f64().unwrap() >= 0.95;
    assert_eq!(code(&o) == 0, passed);
    assert!(out.join("exact_front.csv").exists());

    // Impossible thresholds force the violation exit.
    let (o, _) = oracle(dir.path(), &fixture("small5.csv"), Some(&fixture("small5.deps")), &["--min-hv-ratio", "1.5"]);
    assert_eq!(code(&o), 7);

    let big = dir.path().join("ten.csv");
    let rows: Vec<String> = (0..10).map(|i| row(&format!("t{i}"), "p", "2015-03-01", "2015-03-02", "2015-03-03", 100, 1)).collect();
    fs::write(&big, format!("{HEADER}\n{}\n", rows.join("\n"))).unwrap();
    let (o, _) = oracle(dir.path(), &big, None, &[]);
    assert_eq!(code(&o), 6, "{}", stderr(&o));
}
