//! Assertion-primitive quality heuristic for a single test method.

use rustpython_ast::{CmpOp, Expr, Stmt};
use serde::{Deserialize, Serialize};

use crate::syntax::SourceUnit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssertionKind {
    StrictEquality,
    Exception,
    Approximate,
    Membership,
    Truth,
}

/// Weight of each assertion primitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityTable {
    pub strict_equality: f64,
    pub exception: f64,
    pub approximate: f64,
    pub membership: f64,
    pub truth: f64,
}

impl Default for QualityTable {
    fn default() -> Self {
        QualityTable {
            strict_equality: 1.0,
            exception: 1.2,
            approximate: 1.0,
            membership: 0.7,
            truth: 0.4,
        }
    }
}

impl QualityTable {
    pub fn weight(&self, kind: AssertionKind) -> f64 {
        match kind {
            AssertionKind::StrictEquality => self.strict_equality,
            AssertionKind::Exception => self.exception,
            AssertionKind::Approximate => self.approximate,
            AssertionKind::Membership => self.membership,
            AssertionKind::Truth => self.truth,
        }
    }
}

pub fn classify_method(name: &str) -> Option<AssertionKind> {
    use AssertionKind::*;
    Some(match name {
        "assertEqual" | "assertEquals" | "assertNotEqual" | "assertNotEquals" | "assertIs" | "assertIsNot"
        | "assertIsNone" | "assertIsNotNone" => StrictEquality,
        "assertRaises" | "assertRaisesRegex" | "assertRaisesRegexp" | "assertWarns" | "assertWarnsRegex" => Exception,
        "assertAlmostEqual" | "assertAlmostEquals" | "assertNotAlmostEqual" | "assertCountEqual" | "assertListEqual"
        | "assertTupleEqual" | "assertDictEqual" | "assertSetEqual" | "assertSequenceEqual" | "assertMultiLineEqual" => {
            Approximate
        }
        "assertIn" | "assertNotIn" | "assertIsInstance" | "assertNotIsInstance" | "assertGreater"
        | "assertGreaterEqual" | "assertLess" | "assertLessEqual" | "assertRegex" | "assertNotRegex"
        | "assertDictContainsSubset" => Membership,
        "assertTrue" | "assertFalse" | "assert_" | "failUnless" | "failIf" => Truth,
        _ => return None,
    })
}

fn classify_assert(test: &Expr) -> AssertionKind {
    match test {
        Expr::Compare(c) if c.ops.len() == 1 => match c.ops[0] {
            CmpOp::Eq | CmpOp::NotEq | CmpOp::Is | CmpOp::IsNot => AssertionKind::StrictEquality,
            _ => AssertionKind::Membership,
        },
        Expr::Compare(_) => AssertionKind::Membership,
        Expr::Call(call) => match call.func.as_ref() {
            Expr::Name(n) if n.id.as_str() == "isinstance" => AssertionKind::Membership,
            _ => AssertionKind::Truth,
        },
        _ => AssertionKind::Truth,
    }
}

fn visit_expr(e: &Expr, out: &mut Vec<AssertionKind>) {
    if let Expr::Call(call) = e {
        if let Expr::Attribute(a) = call.func.as_ref() {
            if let Some(kind) = classify_method(a.attr.as_str()) {
                out.push(kind);
            }
        }
        visit_expr(&call.func, out);
        for arg in &call.args {
            visit_expr(arg, out);
        }
        for kw in &call.keywords {
            visit_expr(&kw.value, out);
        }
    }
}

fn visit_body(body: &[Stmt], out: &mut Vec<AssertionKind>) {
    for s in body {
        match s {
            Stmt::Expr(e) => visit_expr(&e.value, out),
            Stmt::Assert(a) => out.push(classify_assert(&a.test)),
            Stmt::With(w) => {
                for item in &w.items {
                    visit_expr(&item.context_expr, out);
                }
                visit_body(&w.body, out);
            }
            Stmt::For(f) => {
                visit_body(&f.body, out);
                visit_body(&f.orelse, out);
            }
            Stmt::While(w) => {
                visit_body(&w.body, out);
                visit_body(&w.orelse, out);
            }
            Stmt::If(i) => {
                visit_body(&i.body, out);
                visit_body(&i.orelse, out);
            }
            Stmt::Try(t) => {
                visit_body(&t.body, out);
                for h in &t.handlers {
                    let rustpython_ast::ExceptHandler::ExceptHandler(h) = h;
                    visit_body(&h.body, out);
                }
                visit_body(&t.orelse, out);
                visit_body(&t.finalbody, out);
            }
            Stmt::FunctionDef(f) => visit_body(&f.body, out),
            Stmt::AsyncFunctionDef(f) => visit_body(&f.body, out),
            _ => {}
        }
    }
}

/// Assertion primitives used by a method, in source order.
pub fn assertion_kinds(method_source: &str) -> Vec<AssertionKind> {
    let mut out = Vec::new();
    if let Ok(unit) = SourceUnit::parse(method_source) {
        visit_body(unit.suite(), &mut out);
    }
    out
}

/// Sum of primitive weights where the first use of each kind counts in full
/// and repeats count half, capped at `cap`.
pub fn quality_score_with(method_source: &str, table: &QualityTable, cap: f64) -> f64 {
    let kinds = assertion_kinds(method_source);
    let mut seen = std::collections::HashSet::new();
    let total: f64 = kinds
        .into_iter()
        .map(|k| {
            let w = table.weight(k);
            if seen.insert(k) {
                w
            } else {
                w / 2.0
            }
        })
        .sum();
    total.min(cap).max(0.0)
}

pub fn quality_score(method_source: &str) -> f64 {
    quality_score_with(method_source, &QualityTable::default(), 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn method(body: &str) -> String {
        let mut s = String::from("def test_x(self):\n");
        for line in body.lines() {
            s.push_str("        ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }

    #[test]
    fn empty_body() {
        assert_eq!(quality_score(&method("pass")), 0.0);
    }

    #[test]
    fn single_equality() {
        assert_eq!(quality_score(&method("self.assertEqual(f(1), 2)")), 1.0);
    }

    #[test]
    fn repeated_truth_saturates_slowly() {
        let body = "self.assertTrue(f(1))\n".repeat(10);
        assert!((quality_score(&method(&body)) - 2.2).abs() < 1e-12);
    }

    #[test]
    fn diverse_assertions_hit_the_cap() {
        let body = "self.assertEqual(a, 1)\nwith self.assertRaises(ValueError):\n    f(-1)\nself.assertIn(1, x)\nself.assertAlmostEqual(y, 0.1)\nassert z";
        assert_eq!(
            assertion_kinds(&method(body)),
            [
                AssertionKind::StrictEquality,
                AssertionKind::Exception,
                AssertionKind::Membership,
                AssertionKind::Approximate,
                AssertionKind::Truth
            ]
        );
        assert_eq!(quality_score(&method(body)), 3.0);
    }

    #[test]
    fn bare_asserts_by_shape() {
        assert_eq!(assertion_kinds("assert a == b\n"), [AssertionKind::StrictEquality]);
        assert_eq!(assertion_kinds("assert a in b\n"), [AssertionKind::Membership]);
        assert_eq!(assertion_kinds("assert isinstance(a, int)\n"), [AssertionKind::Membership]);
        assert_eq!(assertion_kinds("assert f(a)\n"), [AssertionKind::Truth]);
    }
}
