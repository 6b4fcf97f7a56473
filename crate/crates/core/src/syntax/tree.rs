//! A uniform, position-annotated view of a Python syntax tree.
//!
//! Every node carries a kind (the Python `ast` class name), a label holding
//! the node's non-child payload (operator, identifier, literal value,
//! expression context), a byte range into the source, and its children in
//! source order. Two trees are structurally equal when kinds, labels and
//! child lists agree recursively; ranges are ignored.

use std::collections::HashSet;
use std::fmt::Write as _;

use rustpython_ast as ast;
use rustpython_ast::{Constant, Ranged};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: &'static str,
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

/// Arena of nodes in depth-first preorder; node 0 is the module.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    nodes: Vec<Node>,
    docstrings: HashSet<NodeId>,
}

/// An owned, range-free subtree used as the expected replacement when
/// checking a mutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub kind: &'static str,
    pub label: String,
    pub children: Vec<Shape>,
}

impl SyntaxTree {
    pub fn from_suite(suite: &[ast::Stmt], source_len: usize) -> Self {
        let mut b = Builder::default();
        let root = b.open("Module", String::new(), Some((0, source_len)), None);
        b.body(suite, root, true);
        b.close(root);
        SyntaxTree {
            nodes: b.nodes,
            docstrings: b.docstrings,
        }
    }

    /// Wraps a single expression (used for replacement literals).
    pub fn from_expr(expr: &ast::Expr) -> Self {
        let mut b = Builder::default();
        b.expr(expr, None);
        SyntaxTree {
            nodes: b.nodes,
            docstrings: HashSet::new(),
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate()
    }

    pub fn is_docstring(&self, id: NodeId) -> bool {
        self.docstrings.contains(&id)
    }

    pub fn ancestors(&self, id: NodeId) -> Ancestors<'_> {
        Ancestors {
            tree: self,
            next: self.nodes[id].parent,
        }
    }

    /// Child-index path from the root to `id`.
    pub fn path(&self, id: NodeId) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            let idx = self.nodes[parent]
                .children
                .iter()
                .position(|&c| c == cur)
                .expect("child listed in parent");
            path.push(idx);
            cur = parent;
        }
        path.reverse();
        path
    }

    pub fn node_at_path(&self, path: &[usize]) -> Option<NodeId> {
        let mut cur = self.root();
        for &idx in path {
            cur = *self.nodes[cur].children.get(idx)?;
        }
        Some(cur)
    }

    pub fn shape(&self, id: NodeId) -> Shape {
        let node = &self.nodes[id];
        Shape {
            kind: node.kind,
            label: node.label.clone(),
            children: node.children.iter().map(|&c| self.shape(c)).collect(),
        }
    }

    pub fn structurally_equal(&self, other: &SyntaxTree) -> bool {
        !self.is_empty() && !other.is_empty() && subtree_eq(self, 0, other, 0)
    }

    /// Number of maximal positions at which the two trees disagree. A
    /// position disagrees when kind, label or arity differ; its subtree is
    /// then not inspected further.
    pub fn diff_count(&self, other: &SyntaxTree) -> usize {
        diff_at(self, 0, other, 0)
    }

    /// True when `other` equals this tree with the subtree at `at` replaced
    /// by `replacement`.
    pub fn equal_with_replacement(&self, at: NodeId, replacement: &Shape, other: &SyntaxTree) -> bool {
        eq_subst(self, 0, other, 0, at, replacement)
    }
}

pub struct Ancestors<'a> {
    tree: &'a SyntaxTree,
    next: Option<NodeId>,
}

impl Iterator for Ancestors<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let id = self.next?;
        self.next = self.tree.nodes[id].parent;
        Some(id)
    }
}

impl Shape {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn subtree_eq(a: &SyntaxTree, ai: NodeId, b: &SyntaxTree, bi: NodeId) -> bool {
    let (x, y) = (&a.nodes[ai], &b.nodes[bi]);
    x.kind == y.kind
        && x.label == y.label
        && x.children.len() == y.children.len()
        && x
            .children
            .iter()
            .zip(&y.children)
            .all(|(&c, &d)| subtree_eq(a, c, b, d))
}

fn shape_eq(shape: &Shape, t: &SyntaxTree, id: NodeId) -> bool {
    let n = &t.nodes[id];
    shape.kind == n.kind
        && shape.label == n.label
        && shape.children.len() == n.children.len()
        && shape
            .children
            .iter()
            .zip(&n.children)
            .all(|(s, &c)| shape_eq(s, t, c))
}

fn eq_subst(a: &SyntaxTree, ai: NodeId, b: &SyntaxTree, bi: NodeId, at: NodeId, repl: &Shape) -> bool {
    if ai == at {
        return shape_eq(repl, b, bi);
    }
    let (x, y) = (&a.nodes[ai], &b.nodes[bi]);
    x.kind == y.kind
        && x.label == y.label
        && x.children.len() == y.children.len()
        && x
            .children
            .iter()
            .zip(&y.children)
            .all(|(&c, &d)| eq_subst(a, c, b, d, at, repl))
}

fn diff_at(a: &SyntaxTree, ai: NodeId, b: &SyntaxTree, bi: NodeId) -> usize {
    let (x, y) = (&a.nodes[ai], &b.nodes[bi]);
    if x.kind != y.kind || x.label != y.label || x.children.len() != y.children.len() {
        return 1;
    }
    x.children
        .iter()
        .zip(&y.children)
        .map(|(&c, &d)| diff_at(a, c, b, d))
        .sum()
}

pub(crate) fn constant_label(value: &Constant) -> String {
    match value {
        Constant::None => "None".into(),
        Constant::Bool(true) => "True".into(),
        Constant::Bool(false) => "False".into(),
        Constant::Str(s) => format!("str:{s:?}"),
        Constant::Bytes(b) => format!("bytes:{b:?}"),
        Constant::Int(i) => format!("int:{i}"),
        Constant::Float(f) => format!("float:{f:?}"),
        Constant::Complex { real, imag } => format!("complex:{real:?},{imag:?}"),
        Constant::Ellipsis => "Ellipsis".into(),
        Constant::Tuple(items) => {
            let mut s = String::from("tuple:");
            for item in items {
                let _ = write!(s, "{};", constant_label(item));
            }
            s
        }
    }
}

#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    docstrings: HashSet<NodeId>,
    docstring_starts: HashSet<usize>,
    cursor: usize,
}

const UNSET: usize = usize::MAX;

fn span_of<T: Ranged>(node: &T) -> Option<(usize, usize)> {
    let r = node.range();
    Some((r.start().to_usize(), r.end().to_usize()))
}

impl Builder {
    fn open(&mut self, kind: &'static str, label: String, range: Option<(usize, usize)>, parent: Option<NodeId>) -> NodeId {
        let id = self.nodes.len();
        let (start, end) = range.unwrap_or((UNSET, UNSET));
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        if start != UNSET {
            self.cursor = start;
        }
        self.nodes.push(Node {
            kind,
            label,
            start,
            end,
            parent,
            children: Vec::new(),
        });
        id
    }

    fn close(&mut self, id: NodeId) {
        if self.nodes[id].start == UNSET {
            let kids = &self.nodes[id].children;
            let (start, end) = if kids.is_empty() {
                (self.cursor, self.cursor)
            } else {
                let s = kids.iter().map(|&c| self.nodes[c].start).min().unwrap_or(self.cursor);
                let e = kids.iter().map(|&c| self.nodes[c].end).max().unwrap_or(self.cursor);
                (s, e)
            };
            self.nodes[id].start = start;
            self.nodes[id].end = end;
        }
        self.cursor = self.cursor.max(self.nodes[id].end);
    }

    fn leaf(&mut self, kind: &'static str, label: String, range: Option<(usize, usize)>, parent: NodeId) -> NodeId {
        let id = self.open(kind, label, range, Some(parent));
        self.close(id);
        id
    }

    fn body(&mut self, stmts: &[ast::Stmt], parent: NodeId, docstring_allowed: bool) {
        if docstring_allowed {
            if let Some(ast::Stmt::Expr(e)) = stmts.first() {
                if let ast::Expr::Constant(c) = e.value.as_ref() {
                    if matches!(c.value, Constant::Str(_)) {
                        self.docstring_starts.insert(c.range.start().to_usize());
                    }
                }
            }
        }
        for s in stmts {
            self.stmt(s, parent);
        }
    }

    fn exprs(&mut self, exprs: &[ast::Expr], parent: NodeId) {
        for e in exprs {
            self.expr(e, Some(parent));
        }
    }

    fn opt_expr(&mut self, expr: &Option<Box<ast::Expr>>, parent: NodeId) {
        if let Some(e) = expr {
            self.expr(e, Some(parent));
        }
    }

    fn decorators_and_params(&mut self, decorators: &[ast::Expr], params: &[ast::TypeParam], parent: NodeId) {
        self.exprs(decorators, parent);
        for p in params {
            self.type_param(p, parent);
        }
    }

    fn stmt(&mut self, s: &ast::Stmt, parent: NodeId) {
        use ast::Stmt as S;
        let range = span_of(s);
        let p = Some(parent);
        match s {
            S::FunctionDef(f) => {
                let id = self.open("FunctionDef", f.name.to_string(), range, p);
                self.decorators_and_params(&f.decorator_list, &f.type_params, id);
                self.arguments(&f.args, id);
                self.opt_expr(&f.returns, id);
                self.body(&f.body, id, true);
                self.close(id);
            }
            S::AsyncFunctionDef(f) => {
                let id = self.open("AsyncFunctionDef", f.name.to_string(), range, p);
                self.decorators_and_params(&f.decorator_list, &f.type_params, id);
                self.arguments(&f.args, id);
                self.opt_expr(&f.returns, id);
                self.body(&f.body, id, true);
                self.close(id);
            }
            S::ClassDef(c) => {
                let id = self.open("ClassDef", c.name.to_string(), range, p);
                self.decorators_and_params(&c.decorator_list, &c.type_params, id);
                self.exprs(&c.bases, id);
                for k in &c.keywords {
                    self.keyword(k, id);
                }
                self.body(&c.body, id, true);
                self.close(id);
            }
            S::Return(r) => {
                let id = self.open("Return", String::new(), range, p);
                self.opt_expr(&r.value, id);
                self.close(id);
            }
            S::Delete(d) => {
                let id = self.open("Delete", String::new(), range, p);
                self.exprs(&d.targets, id);
                self.close(id);
            }
            S::Assign(a) => {
                let id = self.open("Assign", String::new(), range, p);
                self.exprs(&a.targets, id);
                self.expr(&a.value, Some(id));
                self.close(id);
            }
            S::TypeAlias(t) => {
                let id = self.open("TypeAlias", String::new(), range, p);
                self.expr(&t.name, Some(id));
                for tp in &t.type_params {
                    self.type_param(tp, id);
                }
                self.expr(&t.value, Some(id));
                self.close(id);
            }
            S::AugAssign(a) => {
                let id = self.open("AugAssign", format!("{:?}", a.op), range, p);
                self.expr(&a.target, Some(id));
                self.expr(&a.value, Some(id));
                self.close(id);
            }
            S::AnnAssign(a) => {
                let id = self.open("AnnAssign", format!("simple={}", a.simple), range, p);
                self.expr(&a.target, Some(id));
                self.expr(&a.annotation, Some(id));
                self.opt_expr(&a.value, id);
                self.close(id);
            }
            S::For(f) => {
                let id = self.open("For", String::new(), range, p);
                self.expr(&f.target, Some(id));
                self.expr(&f.iter, Some(id));
                self.body(&f.body, id, false);
                self.orelse(&f.orelse, id);
                self.close(id);
            }
            S::AsyncFor(f) => {
                let id = self.open("AsyncFor", String::new(), range, p);
                self.expr(&f.target, Some(id));
                self.expr(&f.iter, Some(id));
                self.body(&f.body, id, false);
                self.orelse(&f.orelse, id);
                self.close(id);
            }
            S::While(w) => {
                let id = self.open("While", String::new(), range, p);
                self.expr(&w.test, Some(id));
                self.body(&w.body, id, false);
                self.orelse(&w.orelse, id);
                self.close(id);
            }
            S::If(i) => {
                let id = self.open("If", String::new(), range, p);
                self.expr(&i.test, Some(id));
                self.body(&i.body, id, false);
                self.orelse(&i.orelse, id);
                self.close(id);
            }
            S::With(w) => {
                let id = self.open("With", String::new(), range, p);
                for item in &w.items {
                    self.with_item(item, id);
                }
                self.body(&w.body, id, false);
                self.close(id);
            }
            S::AsyncWith(w) => {
                let id = self.open("AsyncWith", String::new(), range, p);
                for item in &w.items {
                    self.with_item(item, id);
                }
                self.body(&w.body, id, false);
                self.close(id);
            }
            S::Match(m) => {
                let id = self.open("Match", String::new(), range, p);
                self.expr(&m.subject, Some(id));
                for case in &m.cases {
                    let cid = self.open("match_case", String::new(), None, Some(id));
                    self.pattern(&case.pattern, cid);
                    self.opt_expr(&case.guard, cid);
                    self.body(&case.body, cid, false);
                    self.close(cid);
                }
                self.close(id);
            }
            S::Raise(r) => {
                let label = format!("exc={},cause={}", r.exc.is_some(), r.cause.is_some());
                let id = self.open("Raise", label, range, p);
                self.opt_expr(&r.exc, id);
                self.opt_expr(&r.cause, id);
                self.close(id);
            }
            S::Try(t) => {
                let id = self.open("Try", String::new(), range, p);
                self.try_parts(&t.body, &t.handlers, &t.orelse, &t.finalbody, id);
                self.close(id);
            }
            S::TryStar(t) => {
                let id = self.open("TryStar", String::new(), range, p);
                self.try_parts(&t.body, &t.handlers, &t.orelse, &t.finalbody, id);
                self.close(id);
            }
            S::Assert(a) => {
                let id = self.open("Assert", String::new(), range, p);
                self.expr(&a.test, Some(id));
                self.opt_expr(&a.msg, id);
                self.close(id);
            }
            S::Import(i) => {
                let id = self.open("Import", String::new(), range, p);
                for a in &i.names {
                    self.alias(a, id);
                }
                self.close(id);
            }
            S::ImportFrom(i) => {
                let module = i.module.as_ref().map(|m| m.to_string()).unwrap_or_default();
                let level = i.level.map(|l| l.to_u32()).unwrap_or(0);
                let id = self.open("ImportFrom", format!("{module}@{level}"), range, p);
                for a in &i.names {
                    self.alias(a, id);
                }
                self.close(id);
            }
            S::Global(g) => {
                let names: Vec<&str> = g.names.iter().map(|n| n.as_str()).collect();
                self.leaf("Global", names.join(","), range, parent);
            }
            S::Nonlocal(g) => {
                let names: Vec<&str> = g.names.iter().map(|n| n.as_str()).collect();
                self.leaf("Nonlocal", names.join(","), range, parent);
            }
            S::Expr(e) => {
                let id = self.open("Expr", String::new(), range, p);
                self.expr(&e.value, Some(id));
                self.close(id);
            }
            S::Pass(_) => {
                self.leaf("Pass", String::new(), range, parent);
            }
            S::Break(_) => {
                self.leaf("Break", String::new(), range, parent);
            }
            S::Continue(_) => {
                self.leaf("Continue", String::new(), range, parent);
            }
        }
    }

    // `else` blocks get their own grouping node so that a statement moving
    // between body and orelse is a structural change.
    fn orelse(&mut self, stmts: &[ast::Stmt], parent: NodeId) {
        if stmts.is_empty() {
            return;
        }
        let id = self.open("orelse", String::new(), None, Some(parent));
        self.body(stmts, id, false);
        self.close(id);
    }

    fn try_parts(
        &mut self,
        body: &[ast::Stmt],
        handlers: &[ast::ExceptHandler],
        orelse: &[ast::Stmt],
        finalbody: &[ast::Stmt],
        parent: NodeId,
    ) {
        self.body(body, parent, false);
        for h in handlers {
            let ast::ExceptHandler::ExceptHandler(h) = h;
            let name = h.name.as_ref().map(|n| n.to_string()).unwrap_or_default();
            let id = self.open("ExceptHandler", name, span_of(h), Some(parent));
            self.opt_expr(&h.type_, id);
            self.body(&h.body, id, false);
            self.close(id);
        }
        self.orelse(orelse, parent);
        if !finalbody.is_empty() {
            let id = self.open("finalbody", String::new(), None, Some(parent));
            self.body(finalbody, id, false);
            self.close(id);
        }
    }

    fn with_item(&mut self, item: &ast::WithItem, parent: NodeId) {
        let id = self.open("withitem", String::new(), None, Some(parent));
        self.expr(&item.context_expr, Some(id));
        self.opt_expr(&item.optional_vars, id);
        self.close(id);
    }

    fn alias(&mut self, a: &ast::Alias, parent: NodeId) {
        let label = match &a.asname {
            Some(asname) => format!("{} as {}", a.name, asname),
            None => a.name.to_string(),
        };
        self.leaf("alias", label, span_of(a), parent);
    }

    fn keyword(&mut self, k: &ast::Keyword, parent: NodeId) {
        let label = k.arg.as_ref().map(|a| a.to_string()).unwrap_or_else(|| "**".into());
        let id = self.open("keyword", label, span_of(k), Some(parent));
        self.expr(&k.value, Some(id));
        self.close(id);
    }

    fn type_param(&mut self, tp: &ast::TypeParam, parent: NodeId) {
        match tp {
            ast::TypeParam::TypeVar(t) => {
                let id = self.open("TypeVar", t.name.to_string(), span_of(t), Some(parent));
                self.opt_expr(&t.bound, id);
                self.close(id);
            }
            ast::TypeParam::ParamSpec(t) => {
                self.leaf("ParamSpec", t.name.to_string(), span_of(t), parent);
            }
            ast::TypeParam::TypeVarTuple(t) => {
                self.leaf("TypeVarTuple", t.name.to_string(), span_of(t), parent);
            }
        }
    }

    fn arguments(&mut self, args: &ast::Arguments, parent: NodeId) {
        let id = self.open("arguments", String::new(), None, Some(parent));
        for a in &args.posonlyargs {
            self.arg_with_default("posonlyarg", a, id);
        }
        for a in &args.args {
            self.arg_with_default("arg", a, id);
        }
        if let Some(v) = &args.vararg {
            self.arg("vararg", v, id);
        }
        for a in &args.kwonlyargs {
            self.arg_with_default("kwonlyarg", a, id);
        }
        if let Some(k) = &args.kwarg {
            self.arg("kwarg", k, id);
        }
        self.close(id);
    }

    fn arg_with_default(&mut self, kind: &'static str, a: &ast::ArgWithDefault, parent: NodeId) {
        let id = self.arg(kind, &a.def, parent);
        if let Some(default) = &a.default {
            let d = self.open("default", String::new(), None, Some(id));
            self.expr(default, Some(d));
            self.close(d);
            self.nodes[id].end = self.nodes[id].end.max(self.nodes[d].end);
        }
    }

    fn arg(&mut self, kind: &'static str, a: &ast::Arg, parent: NodeId) -> NodeId {
        let id = self.open(kind, a.arg.to_string(), span_of(a), Some(parent));
        self.opt_expr(&a.annotation, id);
        self.close(id);
        id
    }

    fn comprehensions(&mut self, generators: &[ast::Comprehension], parent: NodeId) {
        for g in generators {
            let label = if g.is_async { "async" } else { "" };
            let id = self.open("comprehension", label.into(), None, Some(parent));
            self.expr(&g.target, Some(id));
            self.expr(&g.iter, Some(id));
            self.exprs(&g.ifs, id);
            self.close(id);
        }
    }

    fn pattern(&mut self, pat: &ast::Pattern, parent: NodeId) {
        use ast::Pattern as P;
        let range = span_of(pat);
        let p = Some(parent);
        match pat {
            P::MatchValue(v) => {
                let id = self.open("MatchValue", String::new(), range, p);
                self.expr(&v.value, Some(id));
                self.close(id);
            }
            P::MatchSingleton(s) => {
                self.leaf("MatchSingleton", constant_label(&s.value), range, parent);
            }
            P::MatchSequence(s) => {
                let id = self.open("MatchSequence", String::new(), range, p);
                for q in &s.patterns {
                    self.pattern(q, id);
                }
                self.close(id);
            }
            P::MatchMapping(m) => {
                let rest = m.rest.as_ref().map(|r| r.to_string()).unwrap_or_default();
                let id = self.open("MatchMapping", rest, range, p);
                for (k, q) in m.keys.iter().zip(&m.patterns) {
                    self.expr(k, Some(id));
                    self.pattern(q, id);
                }
                self.close(id);
            }
            P::MatchClass(c) => {
                let attrs: Vec<&str> = c.kwd_attrs.iter().map(|a| a.as_str()).collect();
                let id = self.open("MatchClass", attrs.join(","), range, p);
                self.expr(&c.cls, Some(id));
                for q in c.patterns.iter().chain(&c.kwd_patterns) {
                    self.pattern(q, id);
                }
                self.close(id);
            }
            P::MatchStar(s) => {
                let name = s.name.as_ref().map(|n| n.to_string()).unwrap_or_default();
                self.leaf("MatchStar", name, range, parent);
            }
            P::MatchAs(a) => {
                let name = a.name.as_ref().map(|n| n.to_string()).unwrap_or_default();
                let id = self.open("MatchAs", name, range, p);
                if let Some(q) = &a.pattern {
                    self.pattern(q, id);
                }
                self.close(id);
            }
            P::MatchOr(o) => {
                let id = self.open("MatchOr", String::new(), range, p);
                for q in &o.patterns {
                    self.pattern(q, id);
                }
                self.close(id);
            }
        }
    }

    fn expr(&mut self, e: &ast::Expr, parent: Option<NodeId>) -> NodeId {
        use ast::Expr as E;
        let range = span_of(e);
        let id = match e {
            E::BoolOp(b) => {
                let id = self.open("BoolOp", format!("{:?}", b.op), range, parent);
                self.exprs(&b.values, id);
                id
            }
            E::NamedExpr(n) => {
                let id = self.open("NamedExpr", String::new(), range, parent);
                self.expr(&n.target, Some(id));
                self.expr(&n.value, Some(id));
                id
            }
            E::BinOp(b) => {
                let id = self.open("BinOp", format!("{:?}", b.op), range, parent);
                self.expr(&b.left, Some(id));
                self.expr(&b.right, Some(id));
                id
            }
            E::UnaryOp(u) => {
                let id = self.open("UnaryOp", format!("{:?}", u.op), range, parent);
                self.expr(&u.operand, Some(id));
                id
            }
            E::Lambda(l) => {
                let id = self.open("Lambda", String::new(), range, parent);
                self.arguments(&l.args, id);
                self.expr(&l.body, Some(id));
                id
            }
            E::IfExp(i) => {
                let id = self.open("IfExp", String::new(), range, parent);
                self.expr(&i.body, Some(id));
                self.expr(&i.test, Some(id));
                self.expr(&i.orelse, Some(id));
                id
            }
            E::Dict(d) => {
                let layout: String = d.keys.iter().map(|k| if k.is_some() { 'k' } else { 'u' }).collect();
                let id = self.open("Dict", layout, range, parent);
                for (k, v) in d.keys.iter().zip(&d.values) {
                    if let Some(k) = k {
                        self.expr(k, Some(id));
                    }
                    self.expr(v, Some(id));
                }
                id
            }
            E::Set(s) => {
                let id = self.open("Set", String::new(), range, parent);
                self.exprs(&s.elts, id);
                id
            }
            E::ListComp(c) => {
                let id = self.open("ListComp", String::new(), range, parent);
                self.expr(&c.elt, Some(id));
                self.comprehensions(&c.generators, id);
                id
            }
            E::SetComp(c) => {
                let id = self.open("SetComp", String::new(), range, parent);
                self.expr(&c.elt, Some(id));
                self.comprehensions(&c.generators, id);
                id
            }
            E::DictComp(c) => {
                let id = self.open("DictComp", String::new(), range, parent);
                self.expr(&c.key, Some(id));
                self.expr(&c.value, Some(id));
                self.comprehensions(&c.generators, id);
                id
            }
            E::GeneratorExp(c) => {
                let id = self.open("GeneratorExp", String::new(), range, parent);
                self.expr(&c.elt, Some(id));
                self.comprehensions(&c.generators, id);
                id
            }
            E::Await(a) => {
                let id = self.open("Await", String::new(), range, parent);
                self.expr(&a.value, Some(id));
                id
            }
            E::Yield(y) => {
                let id = self.open("Yield", String::new(), range, parent);
                self.opt_expr(&y.value, id);
                id
            }
            E::YieldFrom(y) => {
                let id = self.open("YieldFrom", String::new(), range, parent);
                self.expr(&y.value, Some(id));
                id
            }
            E::Compare(c) => {
                let ops: Vec<String> = c.ops.iter().map(|o| format!("{o:?}")).collect();
                let id = self.open("Compare", ops.join(","), range, parent);
                self.expr(&c.left, Some(id));
                self.exprs(&c.comparators, id);
                id
            }
            E::Call(c) => {
                let id = self.open("Call", String::new(), range, parent);
                self.expr(&c.func, Some(id));
                self.exprs(&c.args, id);
                for k in &c.keywords {
                    self.keyword(k, id);
                }
                id
            }
            E::FormattedValue(f) => {
                let label = format!("{:?}", f.conversion);
                let id = self.open("FormattedValue", label, range, parent);
                self.expr(&f.value, Some(id));
                self.opt_expr(&f.format_spec, id);
                id
            }
            E::JoinedStr(j) => {
                let id = self.open("JoinedStr", String::new(), range, parent);
                self.exprs(&j.values, id);
                id
            }
            E::Constant(c) => {
                let id = self.open("Constant", constant_label(&c.value), range, parent);
                if matches!(c.value, Constant::Str(_))
                    && self.docstring_starts.contains(&c.range.start().to_usize())
                {
                    self.docstrings.insert(id);
                }
                id
            }
            E::Attribute(a) => {
                let id = self.open("Attribute", format!("{}:{:?}", a.attr, a.ctx), range, parent);
                self.expr(&a.value, Some(id));
                id
            }
            E::Subscript(s) => {
                let id = self.open("Subscript", format!("{:?}", s.ctx), range, parent);
                self.expr(&s.value, Some(id));
                self.expr(&s.slice, Some(id));
                id
            }
            E::Starred(s) => {
                let id = self.open("Starred", format!("{:?}", s.ctx), range, parent);
                self.expr(&s.value, Some(id));
                id
            }
            E::Name(n) => self.open("Name", format!("{}:{:?}", n.id, n.ctx), range, parent),
            E::List(l) => {
                let id = self.open("List", format!("{:?}", l.ctx), range, parent);
                self.exprs(&l.elts, id);
                id
            }
            E::Tuple(t) => {
                let id = self.open("Tuple", format!("{:?}", t.ctx), range, parent);
                self.exprs(&t.elts, id);
                id
            }
            E::Slice(s) => {
                let label = format!(
                    "{}{}{}",
                    u8::from(s.lower.is_some()),
                    u8::from(s.upper.is_some()),
                    u8::from(s.step.is_some())
                );
                let id = self.open("Slice", label, range, parent);
                self.opt_expr(&s.lower, id);
                self.opt_expr(&s.upper, id);
                self.opt_expr(&s.step, id);
                id
            }
        };
        self.close(id);
        id
    }
}
