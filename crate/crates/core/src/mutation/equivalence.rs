use std::str::FromStr;

use rustpython_ast::bigint::BigInt;

use crate::syntax::Shape;

#[derive(Debug, PartialEq)]
enum Literal {
    Int(BigInt),
    Float(f64),
    Str(String),
    Bool(bool),
}

fn literal(shape: &Shape) -> Option<Literal> {
    match shape.kind {
        "Constant" => {
            let label = shape.label.as_str();
            if let Some(v) = label.strip_prefix("int:") {
                BigInt::from_str(v).ok().map(Literal::Int)
            } else if let Some(v) = label.strip_prefix("float:") {
                v.parse().ok().map(Literal::Float)
            } else if label.starts_with("str:") {
                Some(Literal::Str(label.to_string()))
            } else {
                match label {
                    "True" => Some(Literal::Bool(true)),
                    "False" => Some(Literal::Bool(false)),
                    _ => None,
                }
            }
        }
        "UnaryOp" if shape.children.len() == 1 => {
            let inner = literal(&shape.children[0])?;
            match (shape.label.as_str(), inner) {
                ("UAdd", v @ (Literal::Int(_) | Literal::Float(_))) => Some(v),
                ("USub", Literal::Int(i)) => Some(Literal::Int(-i)),
                ("USub", Literal::Float(f)) => Some(Literal::Float(-f)),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Whether a mutation survives the cheap equivalence filter. Returns false
/// only when both positions hold literals of the same type and equal value,
/// which covers a constant replaced by itself, a sign flip on zero, and
/// negating zero. `true` does not prove the mutant is killable.
pub fn passes_equivalence_heuristics(original: &Shape, mutated: &Shape) -> bool {
    if original == mutated {
        return false;
    }
    match (literal(original), literal(mutated)) {
        (Some(a), Some(b)) => a != b,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;

    fn expr_shape(src: &str) -> Shape {
        let unit = parse_source(&format!("x = {src}\n")).unwrap();
        let tree = unit.tree();
        // module -> Assign -> value
        let assign = tree.node(tree.root()).children[0];
        tree.shape(tree.node(assign).children[1])
    }

    #[test]
    fn unchanged_constant_is_rejected() {
        assert!(!passes_equivalence_heuristics(&expr_shape("1"), &expr_shape("1")));
        assert!(!passes_equivalence_heuristics(&expr_shape("0"), &expr_shape("(-0)")));
        assert!(!passes_equivalence_heuristics(&expr_shape("-0"), &expr_shape("+0")));
        assert!(!passes_equivalence_heuristics(&expr_shape("0.0"), &expr_shape("-0.0")));
        assert!(!passes_equivalence_heuristics(&expr_shape("''"), &expr_shape("\"\"")));
    }

    #[test]
    fn real_changes_pass() {
        assert!(passes_equivalence_heuristics(&expr_shape("a < b"), &expr_shape("a <= b")));
        assert!(passes_equivalence_heuristics(&expr_shape("2"), &expr_shape("1")));
        assert!(passes_equivalence_heuristics(&expr_shape("-x"), &expr_shape("+x")));
        assert!(passes_equivalence_heuristics(&expr_shape("True"), &expr_shape("False")));
        assert!(passes_equivalence_heuristics(&expr_shape("1"), &expr_shape("1.0")));
        assert!(passes_equivalence_heuristics(&expr_shape("'a'"), &expr_shape("'MUTATED'")));
    }
}
