#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use mist_core::mutation::{generate_mutants, Category, Mutant};
use mist_core::syntax::parse_source;

pub const MOVE_ONE_BALL: &str = r#"def move_one_ball(arr):
    """
    Determine if it is possible to get a sorted array
    by performing right shift operations.
    Ex: [3, 4, 5, 1, 2] -> True (2 shifts)
    Ex: [3, 5, 4, 1, 2] -> False
    """
    if len(arr) == 0: return True
    sorted_arr = sorted(arr)
    if arr == sorted_arr: return True
    
    # Check all possible rotations
    for i in range(1, len(arr)):
        if arr[i:] + arr[:i] == sorted_arr:
            return True
    return False
"#;

pub const BASELINE_SUITE: &str = "import unittest


class TestMoveOneBall(unittest.TestCase):
    def test_sorted(self):
        self.assertTrue(move_one_ball([1, 2, 3, 4, 5]))

    def test_two_shifts(self):
        self.assertTrue(move_one_ball([3, 4, 5, 1, 2]))

    def test_large(self):
        self.assertTrue(move_one_ball([10, 20, 30, 40, 50, 60, 70, 80, 90, 100]))
";

pub const ONE_SHIFT_TEST: &str = "
    def test_one_shift(self):
        self.assertTrue(move_one_ball([2, 1]))
";

pub fn extended_suite() -> String {
    format!("{BASELINE_SUITE}{ONE_SHIFT_TEST}")
}

/// The CRP mutant that starts the rotation loop at 2.
pub fn range_mutant() -> Mutant {
    let unit = parse_source(MOVE_ONE_BALL).unwrap();
    generate_mutants(&unit, &[Category::CRP].into_iter().collect(), None)
        .into_iter()
        .find(|m| m.mutated_source.contains("for i in range(2, len(arr)):"))
        .expect("range mutant")
}

pub fn python_available() -> bool {
    Command::new("python3")
        .arg("-c")
        .arg("pass")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

pub fn shim_command() -> Vec<String> {
    let shim = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shim.py");
    vec!["python3".into(), "-u".into(), shim.to_string_lossy().into_owned()]
}

/// Evaluates `expr` with `source` loaded in a fresh interpreter and returns
/// its repr.
pub fn python_eval(source: &str, expr: &str) -> String {
    let script = format!("{source}\nprint(repr({expr}))\n");
    let out = Command::new("python3").arg("-c").arg(&script).output().expect("python3 runs");
    String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr)
}
