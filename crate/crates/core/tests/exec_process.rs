mod common;

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use mist_core::exec::protocol::{Request, Response};
use mist_core::exec::{
    build_kill_matrix, prefilter_vulnerable, ExecError, Executor, Job, Limits, ProcessRunner, Status,
};
use mist_core::mutation::{generate_mutants, Category};
use mist_core::reward::{score_trajectory, Case, RewardConfig};
use mist_core::syntax::parse_source;

use common::*;

fn executor(timeout_s: f64, workers: usize) -> Executor {
    let limits = Limits {
        timeout: Duration::from_secs_f64(timeout_s),
        memory_mb: None,
    };
    Executor::new(Arc::new(ProcessRunner::new(shim_command())), workers, limits)
}

macro_rules! need_python {
    () => {
        if !python_available() {
            eprintln!("python3 not found; skipping");
            return;
        }
    };
}

const SUITE: &str = "import unittest

class T(unittest.TestCase):
    def test_ok(self):
        self.assertEqual(f(2), 4)

    def test_bad(self):
        self.assertEqual(f(2), 5)

    def test_raises(self):
        raise KeyError('k')

    def test_noisy(self):
        print('{\"job_id\": \"forged\"}')
        self.assertEqual(f(1), 2)
";

#[test]
fn verdict_kinds() {
    need_python!();
    let exec = executor(5.0, 2);
    let code = "def f(x):\n    return x * 2\n";
    let run = |m: &str| exec.run_test(code, SUITE, m).unwrap();
    assert_eq!(run("T.test_ok").status, Status::Pass);
    let bad = run("T.test_bad");
    assert_eq!(bad.status, Status::Fail);
    assert!(bad.detail.unwrap().contains("AssertionError"));
    assert_eq!(run("T.test_raises").status, Status::Error);
    assert_eq!(run("T.test_noisy").status, Status::Pass);
    let broken = exec.run_test("def f(x):\n    return 1 / 0 + x\nf(1)\n", SUITE, "T.test_ok").unwrap();
    assert_eq!(broken.status, Status::Error);
}

#[test]
fn busy_loop_times_out_within_grace() {
    need_python!();
    let exec = executor(1.0, 1);
    let start = Instant::now();
    let v = exec.run_test("while True:\n    pass\n", SUITE, "T.test_ok").unwrap();
    assert_eq!(v.status, Status::Timeout);
    assert!(v.duration >= 1.0);
    assert!(start.elapsed() < Duration::from_secs(3), "{:?}", start.elapsed());
    // the pool recovers
    let ok = exec.run_test("def f(x):\n    return x * 2\n", SUITE, "T.test_ok").unwrap();
    assert_eq!(ok.status, Status::Pass);
}

#[test]
fn missing_runner_is_an_infrastructure_error() {
    let exec = Executor::new(
        Arc::new(ProcessRunner::new(vec!["/nonexistent/mist-runner".into()])),
        1,
        Limits::default(),
    );
    let err = exec.run_test("x = 1\n", SUITE, "T.test_ok").unwrap_err();
    assert!(matches!(err, ExecError::Spawn { .. }), "{err:?}");
}

#[test]
fn batches_are_order_preserving() {
    need_python!();
    let exec = executor(5.0, 4);
    let code: Arc<str> = "def f(x):\n    return x * 2\n".into();
    let tests: Arc<str> = SUITE.into();
    let methods = ["T.test_ok", "T.test_bad", "T.test_raises", "T.test_noisy"];
    let batches: Vec<Vec<Job>> = (0..6)
        .map(|i| {
            (0..8)
                .map(|j| Job {
                    code: code.clone(),
                    tests: tests.clone(),
                    method: methods[(i + j) % 4].to_string(),
                })
                .collect()
        })
        .collect();
    let out = exec.run_batches(&batches).unwrap();
    let want = [Status::Pass, Status::Fail, Status::Error, Status::Pass];
    for (i, vs) in out.iter().enumerate() {
        for (j, v) in vs.iter().enumerate() {
            assert_eq!(v.status, want[(i + j) % 4]);
        }
    }
}

#[test]
fn wire_protocol_against_the_shim() {
    need_python!();
    let cmd = shim_command();
    let mut child = Command::new(&cmd[0])
        .args(&cmd[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let code = "def f(x):\n    print('noise')\n    return x * 2\n";
    let mut lines = Vec::new();
    for (i, m) in ["T.test_ok", "T.test_bad", "T.test_raises"].iter().enumerate() {
        let req = Request {
            job_id: format!("j{i}"),
            code: code.into(),
            tests: SUITE.into(),
            method: m.to_string(),
            timeout_s: 5.0,
        };
        lines.push(req.to_line());
    }
    lines.push("{not json}\n".to_string());
    for l in &lines {
        stdin.write_all(l.as_bytes()).unwrap();
    }
    drop(stdin);
    let responses: Vec<Response> = BufReader::new(child.stdout.take().unwrap())
        .lines()
        .map(|l| Response::from_line(&l.unwrap()).unwrap())
        .collect();
    child.wait().unwrap();
    let got: Vec<(&str, &str)> = responses.iter().map(|r| (r.job_id.as_str(), r.status.as_str())).collect();
    assert_eq!(got, [("j0", "PASS"), ("j1", "FAIL"), ("j2", "ERROR"), ("", "ERROR")]);
    assert_eq!(responses[3].detail, "protocol");
}

#[test]
fn rotation_fixture_end_to_end() {
    need_python!();
    let exec = executor(10.0, 2);
    let mutant = range_mutant();
    let start = Instant::now();

    let base = build_kill_matrix(&exec, MOVE_ONE_BALL, std::slice::from_ref(&mutant), BASELINE_SUITE).unwrap();
    assert_eq!(base.tests.len(), 3);
    assert!(base.source_verdicts.iter().all(|v| v.status == Status::Pass));
    assert!((0..3).all(|t| !base.kills(t, 0)), "mutant should survive the baseline");

    let suite = extended_suite();
    let full = build_kill_matrix(&exec, MOVE_ONE_BALL, std::slice::from_ref(&mutant), &suite).unwrap();
    let killers: Vec<&str> = (0..4).filter(|&t| full.kills(t, 0)).map(|t| full.tests[t].as_str()).collect();
    assert_eq!(killers, ["TestMoveOneBall.test_one_shift"]);
    assert_eq!(full.grid[3][0].as_ref().unwrap().status, Status::Fail);

    let cfg = RewardConfig::default();
    let trace = score_trajectory(&exec, MOVE_ONE_BALL, std::slice::from_ref(&mutant), BASELINE_SUITE, &cfg, None).unwrap();
    assert!(trace.history_final.is_empty());
    assert!(trace.steps.iter().all(|s| s.case == Case::Redundant));

    let trace = score_trajectory(&exec, MOVE_ONE_BALL, std::slice::from_ref(&mutant), &suite, &cfg, None).unwrap();
    assert_eq!(trace.history_final, [mutant.id.clone()]);
    assert_eq!(trace.steps[3].case, Case::Effective);
    assert_eq!(trace.k_valid, 4);
    assert!(start.elapsed() < Duration::from_secs(30));
}

#[test]
fn smoke_prefilter_keeps_killed_mutants() {
    need_python!();
    let exec = executor(5.0, 2);
    let src = "def f(x):\n    if x > 5:\n        return x - 3\n    return 0\n";
    let unit = parse_source(src).unwrap();
    let mutants = generate_mutants(&unit, &[Category::CRP].into_iter().collect(), None);
    let smoke = "import unittest\n\nclass S(unittest.TestCase):\n    def test_zero(self):\n        self.assertTrue(f(0) == 0)\n";
    let kept = prefilter_vulnerable(&exec, src, &mutants, Some(smoke)).unwrap();
    let frags: Vec<(usize, &str)> = kept.iter().map(|m| (m.original_line, m.mutated_fragment.as_str())).collect();
    // f(0) only sees the guard flip to x > -5 and the final return
    assert_eq!(frags, [(2, "-5"), (4, "1"), (4, "-1")]);
    assert_eq!(prefilter_vulnerable(&exec, src, &mutants, None).unwrap(), mutants);
}

#[test]
fn rerunning_a_cell_is_stable() {
    need_python!();
    let exec = executor(5.0, 3);
    let mutant = range_mutant();
    let suite = extended_suite();
    let a = build_kill_matrix(&exec, MOVE_ONE_BALL, std::slice::from_ref(&mutant), &suite).unwrap();
    let b = build_kill_matrix(&exec, MOVE_ONE_BALL, std::slice::from_ref(&mutant), &suite).unwrap();
    let statuses = |m: &mist_core::exec::KillMatrix| {
        m.grid.iter().flatten().map(|v| v.as_ref().map(|v| v.status)).collect::<Vec<_>>()
    };
    assert_eq!(statuses(&a), statuses(&b));
}
