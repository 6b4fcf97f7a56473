use std::collections::HashSet;

use rustpython_ast::{Expr, Stmt};

use crate::syntax::SourceUnit;

/// A `test*` method of a unit-test class, identified as `Class.method`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestMethod {
    pub id: String,
    pub class_name: String,
    pub name: String,
    /// Source text of the method definition.
    pub source: String,
}

fn base_is_test_case(base: &Expr, known: &HashSet<String>) -> bool {
    match base {
        Expr::Name(n) => n.id.as_str() == "TestCase" || known.contains(n.id.as_str()),
        Expr::Attribute(a) => a.attr.as_str() == "TestCase",
        _ => false,
    }
}

/// Test methods of a module in source order: methods named `test*` defined
/// directly in module-level classes deriving from `TestCase` (directly or
/// through another test class of the same module). A module that does not
/// parse has no tests.
pub fn discover_tests(module: &str) -> Vec<TestMethod> {
    let Ok(unit) = SourceUnit::parse(module) else {
        return Vec::new();
    };
    let mut known = HashSet::new();
    let mut out = Vec::new();
    for stmt in unit.suite() {
        let Stmt::ClassDef(class) = stmt else { continue };
        if !class.bases.iter().any(|b| base_is_test_case(b, &known)) {
            continue;
        }
        known.insert(class.name.to_string());
        let mut seen = HashSet::new();
        for item in &class.body {
            let (name, range) = match item {
                Stmt::FunctionDef(f) => (f.name.as_str(), f.range),
                Stmt::AsyncFunctionDef(f) => (f.name.as_str(), f.range),
                _ => continue,
            };
            if !name.starts_with("test") {
                continue;
            }
            let method = TestMethod {
                id: format!("{}.{}", class.name, name),
                class_name: class.name.to_string(),
                name: name.to_string(),
                source: module[range.start().to_usize()..range.end().to_usize()].to_string(),
            };
            if seen.insert(name.to_string()) {
                out.push(method);
            } else if let Some(prev) = out.iter_mut().find(|m| m.id == method.id) {
                // redefinition keeps the first slot, as a class dict would
                *prev = method;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_methods_in_order() {
        let src = "\
import unittest
from unittest import TestCase

class A(unittest.TestCase):
    def setUp(self):
        pass
    def test_b(self):
        self.assertEqual(1, 1)
    def test_a(self):
        pass
    def helper(self):
        pass

class B(A):
    def test_c(self):
        pass

class C(TestCase):
    def test_d(self):
        pass

class NotATest:
    def test_e(self):
        pass
";
        let ids: Vec<String> = discover_tests(src).into_iter().map(|m| m.id).collect();
        assert_eq!(ids, ["A.test_b", "A.test_a", "B.test_c", "C.test_d"]);
        assert!(discover_tests(src)[0].source.starts_with("def test_b(self):"));
    }

    #[test]
    fn unparseable_module_has_no_tests() {
        assert!(discover_tests("class T(unittest.TestCase):\n    def test_x(self:\n").is_empty());
    }
}
