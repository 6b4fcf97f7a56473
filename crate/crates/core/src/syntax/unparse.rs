//! Statement-level printer. Expressions are rendered by the AST crate's
//! `Display` impl; this module adds statements, blocks, argument lists and
//! match patterns. Output is normalised source: comments and original
//! formatting are not preserved.

use std::fmt::Write as _;

use rustpython_ast as ast;
use rustpython_ast::{Expr, Stmt};

pub fn unparse_suite(suite: &[Stmt]) -> String {
    let mut p = Printer::default();
    for s in suite {
        p.stmt(s);
    }
    p.out
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

fn aug_op(op: &ast::Operator) -> &'static str {
    use ast::Operator::*;
    match op {
        Add => "+=",
        Sub => "-=",
        Mult => "*=",
        MatMult => "@=",
        Div => "/=",
        Mod => "%=",
        Pow => "**=",
        LShift => "<<=",
        RShift => ">>=",
        BitOr => "|=",
        BitXor => "^=",
        BitAnd => "&=",
        FloorDiv => "//=",
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn alias(a: &ast::Alias) -> String {
    match &a.asname {
        Some(n) => format!("{} as {}", a.name, n),
        None => a.name.to_string(),
    }
}

fn arg(a: &ast::Arg) -> String {
    match &a.annotation {
        Some(ann) => format!("{}: {}", a.arg, ann),
        None => a.arg.to_string(),
    }
}

fn arg_with_default(a: &ast::ArgWithDefault) -> String {
    let mut s = arg(&a.def);
    if let Some(d) = &a.default {
        if a.def.annotation.is_some() {
            let _ = write!(s, " = {d}");
        } else {
            let _ = write!(s, "={d}");
        }
    }
    s
}

pub(crate) fn arguments(args: &ast::Arguments) -> String {
    let mut parts = Vec::new();
    for a in &args.posonlyargs {
        parts.push(arg_with_default(a));
    }
    if !args.posonlyargs.is_empty() {
        parts.push("/".to_string());
    }
    for a in &args.args {
        parts.push(arg_with_default(a));
    }
    match &args.vararg {
        Some(v) => parts.push(format!("*{}", arg(v))),
        None if !args.kwonlyargs.is_empty() => parts.push("*".to_string()),
        None => {}
    }
    for a in &args.kwonlyargs {
        parts.push(arg_with_default(a));
    }
    if let Some(k) = &args.kwarg {
        parts.push(format!("**{}", arg(k)));
    }
    parts.join(", ")
}

fn type_params(params: &[ast::TypeParam]) -> String {
    if params.is_empty() {
        return String::new();
    }
    let inner = join(params, |p| match p {
        ast::TypeParam::TypeVar(t) => match &t.bound {
            Some(b) => format!("{}: {}", t.name, b),
            None => t.name.to_string(),
        },
        ast::TypeParam::ParamSpec(t) => format!("**{}", t.name),
        ast::TypeParam::TypeVarTuple(t) => format!("*{}", t.name),
    });
    format!("[{inner}]")
}

pub(crate) fn pattern(p: &ast::Pattern) -> String {
    use ast::Pattern as P;
    match p {
        P::MatchValue(v) => v.value.to_string(),
        P::MatchSingleton(s) => s.value.to_string(),
        P::MatchSequence(s) => format!("[{}]", join(&s.patterns, pattern)),
        P::MatchMapping(m) => {
            let mut parts: Vec<String> = m
                .keys
                .iter()
                .zip(&m.patterns)
                .map(|(k, v)| format!("{}: {}", k, pattern(v)))
                .collect();
            if let Some(rest) = &m.rest {
                parts.push(format!("**{rest}"));
            }
            format!("{{{}}}", parts.join(", "))
        }
        P::MatchClass(c) => {
            let mut parts: Vec<String> = c.patterns.iter().map(pattern).collect();
            for (name, v) in c.kwd_attrs.iter().zip(&c.kwd_patterns) {
                parts.push(format!("{}={}", name, pattern(v)));
            }
            format!("{}({})", c.cls, parts.join(", "))
        }
        P::MatchStar(s) => match &s.name {
            Some(n) => format!("*{n}"),
            None => "*_".to_string(),
        },
        P::MatchAs(a) => match (&a.pattern, &a.name) {
            (None, None) => "_".to_string(),
            (None, Some(n)) => n.to_string(),
            (Some(q), Some(n)) => format!("({} as {})", pattern(q), n),
            (Some(q), None) => pattern(q),
        },
        P::MatchOr(o) => {
            let parts: Vec<String> = o.patterns.iter().map(pattern).collect();
            format!("({})", parts.join(" | "))
        }
    }
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn block(&mut self, header: &str, body: &[Stmt]) {
        self.line(header);
        self.indent += 1;
        if body.is_empty() {
            self.line("pass");
        }
        for s in body {
            self.stmt(s);
        }
        self.indent -= 1;
    }

    fn decorators(&mut self, decorators: &[Expr]) {
        for d in decorators {
            self.line(&format!("@{d}"));
        }
    }

    fn orelse(&mut self, orelse: &[Stmt]) {
        if !orelse.is_empty() {
            self.block("else:", orelse);
        }
    }

    fn if_chain(&mut self, keyword: &str, node: &ast::StmtIf) {
        self.block(&format!("{keyword} {}:", node.test), &node.body);
        match node.orelse.as_slice() {
            [Stmt::If(inner)] => self.if_chain("elif", inner),
            rest => self.orelse(rest),
        }
    }

    fn handlers(&mut self, handlers: &[ast::ExceptHandler], star: bool) {
        let kw = if star { "except*" } else { "except" };
        for h in handlers {
            let ast::ExceptHandler::ExceptHandler(h) = h;
            let header = match (&h.type_, &h.name) {
                (Some(t), Some(n)) => format!("{kw} {t} as {n}:"),
                (Some(t), None) => format!("{kw} {t}:"),
                _ => "except:".to_string(),
            };
            self.block(&header, &h.body);
        }
    }

    fn try_stmt(&mut self, body: &[Stmt], handlers: &[ast::ExceptHandler], orelse: &[Stmt], finalbody: &[Stmt], star: bool) {
        self.block("try:", body);
        self.handlers(handlers, star);
        self.orelse(orelse);
        if !finalbody.is_empty() {
            self.block("finally:", finalbody);
        }
    }

    fn with_items(items: &[ast::WithItem]) -> String {
        join(items, |i| match &i.optional_vars {
            Some(v) => format!("{} as {}", i.context_expr, v),
            None => i.context_expr.to_string(),
        })
    }

    fn stmt(&mut self, s: &Stmt) {
        use ast::Stmt as S;
        match s {
            S::FunctionDef(f) => {
                self.decorators(&f.decorator_list);
                let ret = f.returns.as_ref().map(|r| format!(" -> {r}")).unwrap_or_default();
                let header = format!("def {}{}({}){}:", f.name, type_params(&f.type_params), arguments(&f.args), ret);
                self.block(&header, &f.body);
            }
            S::AsyncFunctionDef(f) => {
                self.decorators(&f.decorator_list);
                let ret = f.returns.as_ref().map(|r| format!(" -> {r}")).unwrap_or_default();
                let header = format!(
                    "async def {}{}({}){}:",
                    f.name,
                    type_params(&f.type_params),
                    arguments(&f.args),
                    ret
                );
                self.block(&header, &f.body);
            }
            S::ClassDef(c) => {
                self.decorators(&c.decorator_list);
                let mut parts: Vec<String> = c.bases.iter().map(|b| b.to_string()).collect();
                for k in &c.keywords {
                    parts.push(match &k.arg {
                        Some(a) => format!("{}={}", a, k.value),
                        None => format!("**{}", k.value),
                    });
                }
                let bases = if parts.is_empty() { String::new() } else { format!("({})", parts.join(", ")) };
                self.block(&format!("class {}{}{}:", c.name, type_params(&c.type_params), bases), &c.body);
            }
            S::Return(r) => match &r.value {
                Some(v) => self.line(&format!("return {v}")),
                None => self.line("return"),
            },
            S::Delete(d) => self.line(&format!("del {}", join(&d.targets, |t| t.to_string()))),
            S::Assign(a) => {
                let mut text = String::new();
                for t in &a.targets {
                    let _ = write!(text, "{t} = ");
                }
                let _ = write!(text, "{}", a.value);
                self.line(&text);
            }
            S::TypeAlias(t) => {
                self.line(&format!("type {}{} = {}", t.name, type_params(&t.type_params), t.value));
            }
            S::AugAssign(a) => self.line(&format!("{} {} {}", a.target, aug_op(&a.op), a.value)),
            S::AnnAssign(a) => {
                let target = if a.simple || !matches!(a.target.as_ref(), Expr::Name(_)) {
                    a.target.to_string()
                } else {
                    format!("({})", a.target)
                };
                match &a.value {
                    Some(v) => self.line(&format!("{}: {} = {}", target, a.annotation, v)),
                    None => self.line(&format!("{}: {}", target, a.annotation)),
                }
            }
            S::For(f) => {
                self.block(&format!("for {} in {}:", f.target, f.iter), &f.body);
                self.orelse(&f.orelse);
            }
            S::AsyncFor(f) => {
                self.block(&format!("async for {} in {}:", f.target, f.iter), &f.body);
                self.orelse(&f.orelse);
            }
            S::While(w) => {
                self.block(&format!("while {}:", w.test), &w.body);
                self.orelse(&w.orelse);
            }
            S::If(i) => self.if_chain("if", i),
            S::With(w) => self.block(&format!("with {}:", Self::with_items(&w.items)), &w.body),
            S::AsyncWith(w) => self.block(&format!("async with {}:", Self::with_items(&w.items)), &w.body),
            S::Match(m) => {
                self.line(&format!("match {}:", m.subject));
                self.indent += 1;
                for case in &m.cases {
                    let guard = case.guard.as_ref().map(|g| format!(" if {g}")).unwrap_or_default();
                    self.block(&format!("case {}{}:", pattern(&case.pattern), guard), &case.body);
                }
                self.indent -= 1;
            }
            S::Raise(r) => match (&r.exc, &r.cause) {
                (Some(e), Some(c)) => self.line(&format!("raise {e} from {c}")),
                (Some(e), None) => self.line(&format!("raise {e}")),
                _ => self.line("raise"),
            },
            S::Try(t) => self.try_stmt(&t.body, &t.handlers, &t.orelse, &t.finalbody, false),
            S::TryStar(t) => self.try_stmt(&t.body, &t.handlers, &t.orelse, &t.finalbody, true),
            S::Assert(a) => match &a.msg {
                Some(m) => self.line(&format!("assert {}, {}", a.test, m)),
                None => self.line(&format!("assert {}", a.test)),
            },
            S::Import(i) => self.line(&format!("import {}", join(&i.names, alias))),
            S::ImportFrom(i) => {
                let dots = ".".repeat(i.level.map(|l| l.to_usize()).unwrap_or(0));
                let module = i.module.as_ref().map(|m| m.to_string()).unwrap_or_default();
                self.line(&format!("from {dots}{module} import {}", join(&i.names, alias)));
            }
            S::Global(g) => self.line(&format!("global {}", join(&g.names, |n| n.to_string()))),
            S::Nonlocal(g) => self.line(&format!("nonlocal {}", join(&g.names, |n| n.to_string()))),
            S::Expr(e) => self.line(&e.value.to_string()),
            S::Pass(_) => self.line("pass"),
            S::Break(_) => self.line("break"),
            S::Continue(_) => self.line("continue"),
        }
    }
}
