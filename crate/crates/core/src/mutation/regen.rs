//! Producing mutated source text for one edit.

use std::convert::Infallible;

use rustpython_ast as ast;
use rustpython_ast::fold::{self, Fold};
use rustpython_ast::text_size::TextRange;
use rustpython_ast::{Expr, Ranged, Stmt};
use rustpython_parser::Mode;

use super::operators;
use crate::syntax::{unparse_suite, NodeId, SourceUnit};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Edit {
    BinOp(&'static str),
    Compare { index: usize, op: &'static str },
    BoolOp(&'static str),
    AugAssign(&'static str),
    Unary(&'static str),
    /// Replacement expression text for a constant.
    Literal(String),
}

pub(crate) fn parse_expr(text: &str) -> Option<Expr> {
    match rustpython_parser::parse(text, Mode::Expression, "<expr>").ok()? {
        ast::Mod::Expression(e) => Some(*e.body),
        _ => None,
    }
}

impl Edit {
    fn apply_expr(&self, expr: Expr) -> Expr {
        match (self, expr) {
            (Edit::BinOp(op), Expr::BinOp(mut b)) => {
                b.op = operators::operator(op);
                Expr::BinOp(b)
            }
            (Edit::Compare { index, op }, Expr::Compare(mut c)) => {
                c.ops[*index] = operators::cmpop(op);
                Expr::Compare(c)
            }
            (Edit::BoolOp(op), Expr::BoolOp(mut b)) => {
                b.op = operators::boolop(op);
                Expr::BoolOp(b)
            }
            (Edit::Unary(op), Expr::UnaryOp(mut u)) => {
                u.op = operators::unaryop(op);
                Expr::UnaryOp(u)
            }
            (Edit::Literal(text), original) => parse_expr(text).unwrap_or(original),
            (_, other) => other,
        }
    }

    fn apply_stmt(&self, stmt: Stmt) -> Stmt {
        match (self, stmt) {
            (Edit::AugAssign(op), Stmt::AugAssign(mut a)) => {
                a.op = operators::operator(op);
                Stmt::AugAssign(a)
            }
            (_, other) => other,
        }
    }

    fn replacement_token(&self) -> String {
        match self {
            Edit::BinOp(op) | Edit::BoolOp(op) | Edit::Unary(op) | Edit::Compare { op, .. } => {
                operators::token(op).to_string()
            }
            Edit::AugAssign(op) => format!("{}=", operators::token(op)),
            Edit::Literal(text) => text.clone(),
        }
    }
}

/// Byte ranges of the source text an edit rewrites: the operator token(s)
/// or the whole constant.
pub(crate) fn focus_ranges(unit: &SourceUnit, site: NodeId, edit: &Edit) -> Vec<(usize, usize)> {
    let tree = unit.tree();
    let node = tree.node(site);
    let gap = |a: NodeId, b: NodeId| -> Option<(usize, usize)> {
        let toks = unit.tokens_within(tree.node(a).end, tree.node(b).start);
        Some((toks.first()?.start, toks.last()?.end))
    };
    match edit {
        Edit::Literal(_) => vec![(node.start, node.end)],
        Edit::Compare { index, .. } => gap(node.children[*index], node.children[index + 1]).into_iter().collect(),
        Edit::BoolOp(_) => node
            .children
            .windows(2)
            .map(|w| gap(w[0], w[1]))
            .collect::<Option<Vec<_>>>()
            .unwrap_or_default(),
        Edit::BinOp(_) | Edit::AugAssign(_) => gap(node.children[0], node.children[1]).into_iter().collect(),
        Edit::Unary(_) => unit
            .tokens_within(node.start, tree.node(node.children[0]).start)
            .first()
            .map(|t| (t.start, t.end))
            .into_iter()
            .collect(),
    }
}

fn splice(text: &str, ranges: &[(usize, usize)], replacement: &str) -> String {
    let mut out = String::with_capacity(text.len() + replacement.len() * ranges.len());
    let mut pos = 0;
    for &(s, e) in ranges {
        out.push_str(&text[pos..s]);
        out.push_str(replacement);
        pos = e;
    }
    out.push_str(&text[pos..]);
    out
}

/// Candidate mutated sources, most faithful first. The first is a token
/// splice that keeps all other text intact; the last re-renders the edited
/// expression in parentheses for cases where the splice changes how the
/// surrounding operators associate.
pub(crate) fn splice_candidates(unit: &SourceUnit, site: NodeId, edit: &Edit) -> Vec<String> {
    let text = unit.text();
    let node = unit.tree().node(site);
    let mut out = Vec::new();
    let ranges = focus_ranges(unit, site, edit);
    if !ranges.is_empty() {
        out.push(splice(text, &ranges, &edit.replacement_token()));
    }
    let rerender = matches!(edit, Edit::BinOp(_) | Edit::BoolOp(_) | Edit::Compare { .. } | Edit::Unary(_));
    if rerender {
        if let Some(expr) = parse_expr(&format!("({})", unit.node_text(site))) {
            let edited = edit.apply_expr(expr);
            let rendered = format!("({edited})");
            out.push(splice(text, &[(node.start, node.end)], &rendered));
        }
    }
    out
}

fn expr_kind(e: &Expr) -> &'static str {
    match e {
        Expr::BinOp(_) => "BinOp",
        Expr::Compare(_) => "Compare",
        Expr::BoolOp(_) => "BoolOp",
        Expr::UnaryOp(_) => "UnaryOp",
        Expr::Constant(_) => "Constant",
        _ => "",
    }
}

struct Replace<'a> {
    start: usize,
    end: usize,
    kind: &'static str,
    edit: &'a Edit,
    done: bool,
}

impl Replace<'_> {
    fn hit(&mut self, range: TextRange, kind: &str) -> bool {
        let hit = !self.done
            && kind == self.kind
            && range.start().to_usize() == self.start
            && range.end().to_usize() == self.end;
        self.done |= hit;
        hit
    }
}

impl Fold<TextRange> for Replace<'_> {
    type TargetU = TextRange;
    type Error = Infallible;
    type UserContext = ();

    fn will_map_user(&mut self, _user: &TextRange) {}

    fn map_user(&mut self, user: TextRange, _context: ()) -> Result<TextRange, Infallible> {
        Ok(user)
    }

    fn fold_expr(&mut self, node: Expr) -> Result<Expr, Infallible> {
        if self.hit(node.range(), expr_kind(&node)) {
            return Ok(self.edit.apply_expr(node));
        }
        fold::fold_expr(self, node)
    }

    fn fold_stmt(&mut self, node: Stmt) -> Result<Stmt, Infallible> {
        let kind = if matches!(node, Stmt::AugAssign(_)) { "AugAssign" } else { "" };
        if self.hit(node.range(), kind) {
            return Ok(self.edit.apply_stmt(node));
        }
        fold::fold_stmt(self, node)
    }
}

/// The whole module regenerated from an edited copy of the AST.
pub(crate) fn unparse_candidate(unit: &SourceUnit, site: NodeId, edit: &Edit) -> Option<String> {
    let node = unit.tree().node(site);
    let mut folder = Replace {
        start: node.start,
        end: node.end,
        kind: node.kind,
        edit,
        done: false,
    };
    let suite: Vec<Stmt> = unit.suite().to_vec();
    let edited = match folder.fold(suite) {
        Ok(s) => s,
        Err(never) => match never {},
    };
    folder.done.then(|| unparse_suite(&edited))
}
