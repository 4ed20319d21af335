use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CASCADE: &str = r#"{
  "n": 7,
  "arcs": [
    {"from": 0, "to": 1, "slack": 1},
    {"from": 1, "to": 2, "slack": 5},
    {"from": 1, "to": 3, "slack": 2},
    {"from": 3, "to": 2, "slack": 1}
  ],
  "deviations": [5, 1, 0, 0, 0, 0, 0],
  "weights": [1, 1, 1, 1, 1, 1, 1],
  "completion_times": [100, 100, 100, 100, 100, 100, 100],
  "anticipation_bounds": [0, 0, 0, 0, 0, 0, 0]
}
"#;

const ANTICIPATION_PAIR: &str = r#"{
  "n": 2,
  "arcs": [{"from": 0, "to": 1, "slack": 0}],
  "deviations": [3, 0],
  "anticipation_bounds": [2, 0],
  "alpha": 1000,
  "beta": 1
}
"#;

fn cfrecover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfrecover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_cascade() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "cascade.json", CASCADE);
    let sol = dir.path().join("sol.json");
    let out = cfrecover(&["solve", s(&inst), "--out", s(&sol)]);
    assert!(out.status.success());
    let line = stdout(&out);
    assert!(line.contains(" z=12 "), "{line}");
    assert!(line.contains("u=[5,4,1,2,0,0,0]"), "{line}");
    let written = std::fs::read_to_string(&sol).unwrap();
    assert!(written.contains("\"objective_value\": 12.0"));
}

#[test]
fn zero_bounds_leave_delay_solution_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "cascade.json", CASCADE);
    let out = cfrecover(&["solve", s(&inst), "--mode", "anticipation-delay"]);
    assert!(out.status.success());
    let line = stdout(&out);
    assert!(
        line.contains(" z=12 ") && line.contains("sum_x=0"),
        "{line}"
    );
}

#[test]
fn missing_due_dates_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "cascade.json", CASCADE);
    let out = cfrecover(&["solve", s(&inst), "--objective", "lateness"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing due_dates"));
}

#[test]
fn unreadable_or_unknown_input_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfrecover(&["solve", s(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let inst = write(
        dir.path(),
        "extra.json",
        r#"{"n": 1, "arcs": [], "deviations": [0], "speed": 3}"#,
    );
    let out = cfrecover(&["solve", s(&inst)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let out = cfrecover(&[
            "generate",
            "--n",
            "50",
            "--p",
            "0",
            "--seed",
            "11",
            "--count",
            "3",
            "--out",
            s(out_dir),
        ]);
        assert!(out.status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for name in names {
        let x = std::fs::read(a.join(&name)).unwrap();
        let y = std::fs::read(b.join(&name)).unwrap();
        assert_eq!(x, y);
        let text = String::from_utf8(x).unwrap();
        assert_eq!(text.matches("\"slack\"").count(), 2450);
        assert!(text.contains("\"algorithm\": \"chacha8-seed_from_u64\""));
    }

    let sparse = dir.path().join("sparse");
    let out = cfrecover(&["generate", "--n", "10", "--p", "0.99", "--out", s(&sparse)]);
    assert!(out.status.success());
    let file = std::fs::read_dir(&sparse).unwrap().next().unwrap().unwrap();
    let text = std::fs::read_to_string(file.path()).unwrap();
    assert_eq!(text.matches("\"slack\"").count(), 1);
}

#[test]
fn verify_cascade_all_objectives() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "cascade.json", CASCADE);
    for obj in ["total-delay", "weighted-delay", "makespan"] {
        for mode in ["delay", "anticipation-delay"] {
            let out = cfrecover(&["verify", s(&inst), "--objective", obj, "--mode", mode]);
            assert!(out.status.success(), "{obj} {mode}: {}", stdout(&out));
        }
    }
}

#[test]
fn verify_anticipation_pair() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "pair.json", ANTICIPATION_PAIR);
    let out = cfrecover(&["verify", s(&inst), "--mode", "anticipation-delay"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("engine: 4002") && text.contains("oracle: 4002"),
        "{text}"
    );
    assert!(text.contains("complementarity: ok"));
}

#[test]
fn verify_rejects_corrupted_plan() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "cascade.json", CASCADE);
    let sol = dir.path().join("sol.json");
    assert!(cfrecover(&["solve", s(&inst), "--out", s(&sol)])
        .status
        .success());
    let good = std::fs::read_to_string(&sol).unwrap();
    let out = cfrecover(&["verify", s(&inst), "--plan", s(&sol)]);
    assert!(out.status.success());

    // Vehicle 1 back to its observed deviation: arc (0, 1) breaks.
    let bad = good.replacen(
        "\"u\": [\n    5.0,\n    4.0",
        "\"u\": [\n    5.0,\n    1.0",
        1,
    );
    assert_ne!(bad, good);
    let bad_path = write(dir.path(), "bad.json", &bad);
    let out = cfrecover(&["verify", s(&inst), "--plan", s(&bad_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("arc (0,1)"), "{}", stdout(&out));
}

#[test]
fn verify_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("g");
    assert!(
        cfrecover(&["generate", "--n", "120", "--p", "0.5", "--out", s(&out_dir)])
            .status
            .success()
    );
    let file = std::fs::read_dir(&out_dir)
        .unwrap()
        .next()
        .unwrap()
        .unwrap();
    let out = cfrecover(&["verify", s(&file.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("refusing"));
}

#[test]
fn bench_rows_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = cfrecover(&[
            "bench",
            "--sizes",
            "50",
            "--sparsities",
            "0",
            "--reps",
            "10",
            "--repeats",
            "1",
            "--out",
            s(&path),
        ]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains("DEV total-delay"));
        std::fs::read_to_string(path).unwrap()
    };
    let first = run("a.csv");
    let second = run("b.csv");

    let mut reader = csv::Reader::from_reader(first.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "kind",
            "p",
            "n",
            "objective",
            "mode",
            "rep",
            "seed",
            "time_ms_mean",
            "time_ms_median",
            "oracle_ms",
            "z",
            "z_prime",
            "dev_pct",
            "error"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.iter().filter(|r| &r[0] == "run").count(), 80);
    assert_eq!(rows.iter().filter(|r| &r[0] == "mean").count(), 8);
    for r in rows
        .iter()
        .filter(|r| &r[0] == "run" && &r[4] == "anticipation-delay")
    {
        let dev: f64 = r[12].parse().unwrap();
        assert!(dev >= -1e-9);
        assert!(r[7].split('.').nth(1).unwrap().len() == 3);
    }

    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.drain(7..10);
                f.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&first), strip(&second));
}
