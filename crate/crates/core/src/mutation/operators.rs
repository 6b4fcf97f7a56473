//! Operator tables and the mapping between node labels, source tokens and
//! AST enums.

use rustpython_ast as ast;

use super::Category;

pub(crate) const AOR: &[(&str, &[&str])] = &[
    ("Add", &["Sub", "Mult"]),
    ("Sub", &["Add", "Mult"]),
    ("Mult", &["Div", "Add", "Pow"]),
    ("Div", &["Mult", "FloorDiv"]),
    ("Mod", &["Mult", "Add"]),
];

// LtE/GtE mirror the Lt/Gt rows: boundary shift, negation, inequality.
pub(crate) const ROR: &[(&str, &[&str])] = &[
    ("Eq", &["NotEq"]),
    ("Lt", &["LtE", "GtE", "NotEq"]),
    ("Gt", &["GtE", "LtE", "NotEq"]),
    ("LtE", &["Lt", "Gt", "NotEq"]),
    ("GtE", &["Gt", "Lt", "NotEq"]),
    ("Is", &["IsNot"]),
    ("In", &["NotIn"]),
];

pub(crate) const LCR: &[(&str, &[&str])] = &[("And", &["Or"]), ("Or", &["And"])];

pub(crate) const ASR: &[(&str, &[&str])] = &[("Add", &["Sub"]), ("Mult", &["Div"])];

pub(crate) const UOI: &[(&str, &[&str])] = &[("USub", &["UAdd"]), ("UAdd", &["USub"])];

pub(crate) fn table(category: Category) -> &'static [(&'static str, &'static [&'static str])] {
    match category {
        Category::AOR => AOR,
        Category::ROR => ROR,
        Category::LCR => LCR,
        Category::ASR => ASR,
        Category::UOI => UOI,
        Category::CRP => &[],
    }
}

pub(crate) fn replacements(category: Category, label: &str) -> &'static [&'static str] {
    table(category)
        .iter()
        .find(|(from, _)| *from == label)
        .map(|(_, to)| *to)
        .unwrap_or(&[])
}

/// Source spelling of an operator label.
pub(crate) fn token(label: &str) -> &'static str {
    match label {
        "Add" | "UAdd" => "+",
        "Sub" | "USub" => "-",
        "Mult" => "*",
        "MatMult" => "@",
        "Div" => "/",
        "FloorDiv" => "//",
        "Mod" => "%",
        "Pow" => "**",
        "Eq" => "==",
        "NotEq" => "!=",
        "Lt" => "<",
        "LtE" => "<=",
        "Gt" => ">",
        "GtE" => ">=",
        "Is" => "is",
        "IsNot" => "is not",
        "In" => "in",
        "NotIn" => "not in",
        "And" => "and",
        "Or" => "or",
        other => panic!("no token for operator {other}"),
    }
}

pub(crate) fn operator(label: &str) -> ast::Operator {
    use ast::Operator::*;
    match label {
        "Add" => Add,
        "Sub" => Sub,
        "Mult" => Mult,
        "Div" => Div,
        "FloorDiv" => FloorDiv,
        "Mod" => Mod,
        "Pow" => Pow,
        other => panic!("not a binary operator: {other}"),
    }
}

pub(crate) fn cmpop(label: &str) -> ast::CmpOp {
    use ast::CmpOp::*;
    match label {
        "Eq" => Eq,
        "NotEq" => NotEq,
        "Lt" => Lt,
        "LtE" => LtE,
        "Gt" => Gt,
        "GtE" => GtE,
        "Is" => Is,
        "IsNot" => IsNot,
        "In" => In,
        "NotIn" => NotIn,
        other => panic!("not a comparison: {other}"),
    }
}

pub(crate) fn boolop(label: &str) -> ast::BoolOp {
    match label {
        "And" => ast::BoolOp::And,
        "Or" => ast::BoolOp::Or,
        other => panic!("not a boolean operator: {other}"),
    }
}

pub(crate) fn unaryop(label: &str) -> ast::UnaryOp {
    match label {
        "UAdd" => ast::UnaryOp::UAdd,
        "USub" => ast::UnaryOp::USub,
        other => panic!("not a sign operator: {other}"),
    }
}
