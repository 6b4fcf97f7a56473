//! Parsing Python source into a [`SourceUnit`]: text, AST, a uniform node
//! tree with byte ranges, and the significant token stream.

mod tree;
mod unparse;

use std::fmt;

use rustpython_parser::{ast, lexer, Mode, Tok};
use sha2::{Digest, Sha256};

pub use tree::{Ancestors, Node, NodeId, Shape, SyntaxTree};
pub use unparse::unparse_suite;

/// Position of a parse failure. `line` and `column` are both 1-based, as in
/// Python's own `SyntaxError`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Line/column extent of a node. Lines are 1-based, columns are 0-based
/// byte offsets within the line (the `ast` module's convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Span {
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

#[derive(Debug, Clone)]
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    /// 1-based line and 0-based column of a byte offset.
    pub fn locate(&self, offset: usize) -> (usize, usize) {
        let line = self.starts.partition_point(|&s| s <= offset);
        (line, offset - self.starts[line - 1])
    }

    pub fn line_start(&self, line: usize) -> usize {
        self.starts[line - 1]
    }

    pub fn line_count(&self) -> usize {
        self.starts.len()
    }
}

/// A significant token (brackets, newlines and indentation are dropped).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct SourceUnit {
    text: String,
    suite: ast::Suite,
    tree: SyntaxTree,
    lines: LineIndex,
    tokens: Vec<Token>,
    hash: String,
}

pub fn parse_source(text: &str) -> Result<SourceUnit, SyntaxError> {
    SourceUnit::parse(text)
}

pub fn content_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl SourceUnit {
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let lines = LineIndex::new(text);
        let module = rustpython_parser::parse(text, Mode::Module, "<source>").map_err(|e| {
            let offset = (u32::from(e.offset) as usize).min(text.len());
            let (line, col) = lines.locate(offset);
            SyntaxError {
                line,
                column: col + 1,
                message: e.error.to_string(),
            }
        })?;
        let suite = match module {
            ast::Mod::Module(m) => m.body,
            _ => unreachable!("module mode yields a module"),
        };
        let tree = SyntaxTree::from_suite(&suite, text.len());
        if let Some((offset, message)) = invalid_target(&tree) {
            let (line, col) = lines.locate(offset);
            return Err(SyntaxError {
                line,
                column: col + 1,
                message,
            });
        }
        let tokens = lexer::lex(text, Mode::Module)
            .filter_map(Result::ok)
            .filter(|(tok, _)| {
                !matches!(
                    tok,
                    Tok::Newline | Tok::Indent | Tok::Dedent | Tok::Lpar | Tok::Rpar | Tok::EndOfFile
                )
            })
            .map(|(_, r)| Token {
                start: r.start().to_usize(),
                end: r.end().to_usize(),
            })
            .collect();
        Ok(SourceUnit {
            hash: content_hash(text),
            text: text.to_string(),
            suite,
            tree,
            lines,
            tokens,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn suite(&self) -> &[ast::Stmt] {
        &self.suite
    }

    pub fn tree(&self) -> &SyntaxTree {
        &self.tree
    }

    pub fn lines(&self) -> &LineIndex {
        &self.lines
    }

    /// SHA-256 of the text, lowercase hex.
    pub fn content_hash(&self) -> &str {
        &self.hash
    }

    pub fn span(&self, id: NodeId) -> Span {
        let n = self.tree.node(id);
        let (start_line, start_col) = self.lines.locate(n.start);
        let (end_line, end_col) = self.lines.locate(n.end);
        Span {
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn line_of(&self, offset: usize) -> usize {
        self.lines.locate(offset).0
    }

    pub fn node_text(&self, id: NodeId) -> &str {
        let n = self.tree.node(id);
        &self.text[n.start..n.end]
    }

    /// Significant tokens lying entirely within `[start, end)`.
    pub fn tokens_within(&self, start: usize, end: usize) -> &[Token] {
        let lo = self.tokens.partition_point(|t| t.start < start);
        let hi = self.tokens.partition_point(|t| t.end <= end);
        if lo >= hi {
            &[]
        } else {
            &self.tokens[lo..hi]
        }
    }

    pub fn token_text(&self, tok: Token) -> &str {
        &self.text[tok.start..tok.end]
    }

    /// Normalised source regenerated from the AST.
    pub fn unparse(&self) -> String {
        unparse_suite(&self.suite)
    }
}

impl fmt::Display for SourceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn is_store_target(tree: &SyntaxTree, id: NodeId, allow_star: bool) -> bool {
    let n = tree.node(id);
    match n.kind {
        "Name" | "Attribute" | "Subscript" => true,
        "Starred" if allow_star => is_store_target(tree, n.children[0], false),
        "Tuple" | "List" => n.children.iter().all(|&c| is_store_target(tree, c, true)),
        _ => false,
    }
}

fn is_del_target(tree: &SyntaxTree, id: NodeId) -> bool {
    let n = tree.node(id);
    match n.kind {
        "Name" | "Attribute" | "Subscript" => true,
        "Tuple" | "List" => n.children.iter().all(|&c| is_del_target(tree, c)),
        _ => false,
    }
}

// The parser accepts some targets CPython rejects (e.g. `1 = x`); this pass
// restores the compiler's checks for assignment-like positions.
fn invalid_target(tree: &SyntaxTree) -> Option<(usize, String)> {
    for (_, n) in tree.nodes() {
        let (targets, simple_only): (&[NodeId], bool) = match n.kind {
            "Assign" => (&n.children[..n.children.len() - 1], false),
            "For" | "AsyncFor" | "comprehension" => (&n.children[..1], false),
            "withitem" if n.children.len() == 2 => (&n.children[1..], false),
            "AugAssign" | "AnnAssign" => (&n.children[..1], true),
            "NamedExpr" => {
                let t = n.children[0];
                if tree.node(t).kind != "Name" {
                    return Some((tree.node(t).start, "cannot use assignment expressions with this target".into()));
                }
                continue;
            }
            "Delete" => {
                if let Some(&bad) = n.children.iter().find(|&&c| !is_del_target(tree, c)) {
                    return Some((tree.node(bad).start, "cannot delete expression".into()));
                }
                continue;
            }
            _ => continue,
        };
        for &t in targets {
            let ok = if simple_only {
                matches!(tree.node(t).kind, "Name" | "Attribute" | "Subscript")
            } else {
                is_store_target(tree, t, false)
            };
            if !ok {
                return Some((tree.node(t).start, "cannot assign to expression".into()));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_position_of_error() {
        let err = parse_source("x = 1\ndef f(:\n    pass\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 7);
    }

    #[test]
    fn rejects_literal_assignment_targets() {
        for src in ["1 = x\n", "f() = 2\n", "a + b += 1\n", "for 1 in x: pass\n", "del f()\n", "(a.b := 1)\n"] {
            assert!(parse_source(src).is_err(), "{src:?} should be rejected");
        }
        for src in ["a, *b = x\n", "[a, b.c] = y\n", "x[0] += 1\n", "for a, b in z: pass\n", "with f() as (a, b): pass\n"] {
            assert!(parse_source(src).is_ok(), "{src:?} should be accepted");
        }
    }

    #[test]
    fn spans_are_one_based_lines() {
        let unit = parse_source("a = 1\nb = a + 2\n").unwrap();
        let binop = unit.tree().nodes().find(|(_, n)| n.kind == "BinOp").unwrap().0;
        let span = unit.span(binop);
        assert_eq!((span.start_line, span.start_col, span.end_line, span.end_col), (2, 4, 2, 9));
        assert_eq!(unit.node_text(binop), "a + 2");
    }

    #[test]
    fn docstrings_are_marked() {
        let unit = parse_source("\"\"\"mod\"\"\"\ndef f():\n    \"doc\"\n    return 'x'\n").unwrap();
        let docs: Vec<&str> = unit
            .tree()
            .nodes()
            .filter(|(id, _)| unit.tree().is_docstring(*id))
            .map(|(id, _)| unit.node_text(id))
            .collect();
        assert_eq!(docs, vec!["\"\"\"mod\"\"\"", "\"doc\""]);
    }

    #[test]
    fn operator_tokens_between_children() {
        let unit = parse_source("y = (a) + b\n").unwrap();
        let tree = unit.tree();
        let (_, binop) = tree.nodes().find(|(_, n)| n.kind == "BinOp").unwrap();
        let left = tree.node(binop.children[0]);
        let right = tree.node(binop.children[1]);
        let toks = unit.tokens_within(left.end, right.start);
        assert_eq!(toks.len(), 1);
        assert_eq!(unit.token_text(toks[0]), "+");
    }

    #[test]
    fn unparse_round_trips_structure() {
        let src = "\
import os.path as p
from ..x import (a, b as c)
@dec(1)
class K(Base, metaclass=M):
    '''doc'''
    x: int = 3
    def m(self, a, /, b=2, *args, c, d=4, **kw) -> 'K':
        global g
        if a < b <= c:
            return not a
        elif a:
            pass
        else:
            raise ValueError('bad') from None
        try:
            y = [i ** 2 for i in range(10) if i % 2]
        except (TypeError, KeyError) as e:
            del y
        else:
            y += 1
        finally:
            z = lambda q, *r: q
        with open(f) as fh, g():
            async_ = {k: v for k, v in kw.items()}
        while True:
            break
        for i, j in zip(a, b):
            continue
        else:
            assert a, 'msg'
        return f'{a!r:>{b}}' + b'\\x00'.decode()
match cmd:
    case [1, *rest] if rest:
        pass
    case {'k': v, **others}:
        pass
    case Point(x=0, y=_) | None:
        pass
    case (1 | 2) as n:
        pass
x = a if b else -c
(w) = 1
";
        let unit = parse_source(src).unwrap();
        let regenerated = unit.unparse();
        let again = parse_source(&regenerated).unwrap_or_else(|e| panic!("{e}\n{regenerated}"));
        assert!(unit.tree().structurally_equal(again.tree()), "{regenerated}");
    }
}
