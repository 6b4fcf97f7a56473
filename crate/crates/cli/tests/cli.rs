use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const MOVE_ONE_BALL: &str = r#"def move_one_ball(arr):
    if len(arr) == 0: return True
    sorted_arr = sorted(arr)
    if arr == sorted_arr: return True
    for i in range(1, len(arr)):
        if arr[i:] + arr[:i] == sorted_arr:
            return True
    return False
"#;

fn mist(dir: &Path, args: &[&str]) -> Output {
    mist_with(dir, args, &[], None)
}

fn mist_with(dir: &Path, args: &[&str], env: &[(&str, &str)], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mist"));
    cmd.args(args)
        .current_dir(dir)
        .env_remove("MIST_WORKERS")
        .env_remove("MIST_TIMEOUT_S")
        .env_remove("MIST_RUNNER")
        .envs(env.iter().copied())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn mist");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// T1 kills m1 and m2, T2 kills m2 and m3, T3 kills m1, T4 kills nothing.
fn write_matrix(dir: &Path) -> PathBuf {
    let kills: [&[usize]; 4] = [&[1, 2], &[2, 3], &[1], &[]];
    let mut csv = String::from("test_id,mutant_id,status,duration_s\n");
    for (t, row) in kills.iter().enumerate() {
        csv.push_str(&format!("T{},@source,PASS,0.0\n", t + 1));
        for m in 1..=6 {
            let status = if row.contains(&m) { "FAIL" } else { "PASS" };
            csv.push_str(&format!("T{},m{m},{status},0.0\n", t + 1));
        }
    }
    let path = dir.join("matrix.csv");
    std::fs::write(&path, csv).unwrap();
    path
}

#[test]
fn score_of_the_four_by_six_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_matrix(dir.path());
    assert_eq!(stdout(&mist(dir.path(), &["score", "matrix.csv"])), "0.5\n");
    assert_eq!(stdout(&mist(dir.path(), &["score", "matrix.csv", "--suite", "T3"])), format!("{}\n", 1.0 / 6.0));
    let o = mist(dir.path(), &["score", "matrix.csv", "--suite", "T9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn select_minimize_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    write_matrix(dir.path());
    let sel: serde_json::Value = serde_json::from_str(&stdout(&mist(dir.path(), &["select", "matrix.csv", "-k", "2"]))).unwrap();
    assert_eq!(sel["order"], serde_json::json!(["T1", "T2"]));
    assert_eq!(sel["gains"], serde_json::json!([2.0, 1.0]));
    assert_eq!(sel["score"], serde_json::json!(0.5));

    let min: serde_json::Value =
        serde_json::from_str(&stdout(&mist(dir.path(), &["minimize", "matrix.csv", "--suite", "T1,T2,T3,T4"]))).unwrap();
    assert_eq!(min["order"], serde_json::json!(["T1", "T2"]));

    let curve = stdout(&mist(dir.path(), &["curve", "matrix.csv", "--order", "T3,T1,T2"]));
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "step,test_id,marginal_gain,cumulative_score");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,T3,1"));
    assert!(lines[2].starts_with("2,T1,1"));
    assert!(lines[3].starts_with("3,T2,1,0.5"));
}

#[test]
fn mutate_finds_the_loop_start_mutant() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("src.py"), MOVE_ONE_BALL).unwrap();
    let out = stdout(&mist(dir.path(), &["mutate", "src.py", "--categories", "crp"]));
    let ms: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert!(ms.iter().all(|m| m["category"] == "CRP"));
    assert!(ms.iter().any(|m| m["mutated_source"].as_str().unwrap().contains("range(2, len(arr))")));
    let limited: Vec<serde_json::Value> =
        serde_json::from_str(&stdout(&mist(dir.path(), &["mutate", "src.py", "--limit", "3"]))).unwrap();
    assert_eq!(limited.len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mist(dir.path(), &["mutate", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(mist(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(mist(dir.path(), &["score", "missing.csv"]).status.code(), Some(2));
    std::fs::write(dir.path().join("src.py"), MOVE_ONE_BALL).unwrap();
    assert_eq!(mist(dir.path(), &["mutate", "src.py", "--categories", "XYZ"]).status.code(), Some(2));
    let bad_env = mist_with(dir.path(), &["reward", "--show-config"], &[("MIST_WORKERS", "many")], None);
    assert_eq!(bad_env.status.code(), Some(2));
    std::fs::write(dir.path().join("bad.toml"), "alpah = 1.0\n").unwrap();
    assert_eq!(mist(dir.path(), &["reward", "--show-config", "--config", "bad.toml"]).status.code(), Some(2));
}

#[test]
fn show_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let defaults = stdout(&mist(dir.path(), &["reward", "--show-config"]));
    for key in [
        "alpha", "beta", "rho_base", "gamma", "k_max", "r_fail_suite", "r_fail_method", "pool_scaling",
        "truncate_on_failure", "quality_cap", "sigma_eps", "quality_strict_equality", "quality_exception",
        "quality_approximate", "quality_membership", "quality_truth", "timeout_s", "workers",
    ] {
        assert!(defaults.lines().any(|l| l.starts_with(&format!("{key} = "))), "missing {key}");
    }
    std::fs::write(dir.path().join("c.toml"), &defaults).unwrap();
    assert_eq!(stdout(&mist(dir.path(), &["reward", "--show-config", "--config", "c.toml"])), defaults);

    // env beats file, flag beats env
    std::fs::write(dir.path().join("w.toml"), "workers = 3\nbeta = 1.0\n").unwrap();
    let env = mist_with(dir.path(), &["reward", "--show-config", "--config", "w.toml"], &[("MIST_WORKERS", "5")], None);
    let shown = stdout(&env);
    assert!(shown.contains("workers = 5"));
    assert!(shown.contains("beta = 1.0"));
    let flag = mist_with(
        dir.path(),
        &["reward", "--show-config", "--config", "w.toml", "--workers", "7"],
        &[("MIST_WORKERS", "5")],
        None,
    );
    assert!(stdout(&flag).contains("workers = 7"));
}

#[test]
fn advantages_are_normalised() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&mist(dir.path(), &["advantages", "1", "-1"]));
    assert_eq!(out, "1\n-1\n");
    assert_eq!(stdout(&mist(dir.path(), &["advantages", "2", "2", "2"])), "0\n0\n0\n");
    assert_eq!(mist(dir.path(), &["advantages"]).status.code(), Some(2));
}

#[test]
fn repair_reads_standard_input() {
    let dir = tempfile::tempdir().unwrap();
    let reply = "Here you go:\n```python\nx = 1\ny = (2 +\n```\n";
    assert_eq!(stdout(&mist_with(dir.path(), &["repair"], &[], Some(reply))), "x = 1\n");
    let hopeless = mist_with(dir.path(), &["repair", "--raw"], &[], Some("def f(:\n"));
    assert_eq!(hopeless.status.code(), Some(1));
    assert!(!hopeless.stderr.is_empty());
}

#[test]
fn prompt_substitutes_both_fields() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q.txt"), "Add two numbers.").unwrap();
    std::fs::write(dir.path().join("s.py"), "def add(a, b):\n    return a + b").unwrap();
    let out = stdout(&mist(dir.path(), &["prompt", "--question", "q.txt", "--solution", "s.py"]));
    assert!(out.contains("Add two numbers."));
    assert!(out.contains("def add(a, b):"));
}

#[test]
fn missing_runner_is_an_infrastructure_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("src.py"), MOVE_ONE_BALL).unwrap();
    std::fs::write(
        p.join("suite.py"),
        "import unittest\n\nclass T(unittest.TestCase):\n    def test_a(self):\n        self.assertTrue(move_one_ball([]))\n",
    )
    .unwrap();
    std::fs::write(p.join("mutants.json"), stdout(&mist(p, &["mutate", "src.py", "--limit", "2"]))).unwrap();
    let o = mist(
        p,
        &["reward", "src.py", "suite.py", "--mutants", "mutants.json", "--runner", "/definitely/not/a/runner"],
    );
    assert_eq!(o.status.code(), Some(3));
}

fn shim() -> Option<String> {
    let ok = Command::new("python3").arg("--version").output().map(|o| o.status.success()).unwrap_or(false);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/shim.py");
    ok.then(|| format!("python3 -u {}", path.display()))
}

#[test]
fn rerank_through_the_runner() {
    let Some(runner) = shim() else {
        eprintln!("python3 not available, skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("good.py"), MOVE_ONE_BALL).unwrap();
    std::fs::write(p.join("bad.py"), "def move_one_ball(arr):\n    return arr == sorted(arr)\n").unwrap();
    std::fs::write(
        p.join("s1.py"),
        "import unittest\n\nclass A(unittest.TestCase):\n    def test_sorted(self):\n        self.assertTrue(move_one_ball([1, 2]))\n",
    )
    .unwrap();
    std::fs::write(
        p.join("s2.py"),
        "import unittest\n\nclass B(unittest.TestCase):\n    def test_shift(self):\n        self.assertTrue(move_one_ball([2, 1]))\n",
    )
    .unwrap();
    std::fs::write(
        p.join("rerank.json"),
        r#"{"candidates": [{"id": "bad", "path": "bad.py"}, {"id": "good", "path": "good.py"}],
            "suites": [{"id": "s1", "path": "s1.py"}, {"id": "s2", "path": "s2.py"}]}"#,
    )
    .unwrap();
    let out = stdout(&mist_with(p, &["rerank", "rerank.json"], &[("MIST_RUNNER", &runner)], None));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["grid"], serde_json::json!([[1, 0], [1, 1]]));
    assert_eq!(v["scores"], serde_json::json!([1, 2]));
    assert_eq!(v["selected"], "good");
}
