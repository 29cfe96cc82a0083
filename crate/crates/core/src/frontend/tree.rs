use std::sync::Arc;

use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::text_size::TextRange;
use rustpython_parser::Parse;

use super::{notebook_to_python, LineIndex, ParseError, SourceFile, SourceLocation};

/// Normalized node categories shared by every consumer of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyntaxKind {
    Module,
    Call,
    Attribute,
    Subscript,
    Assign,
    FunctionDef,
    ClassDef,
    Import,
    Return,
    Literal,
    Name,
    Branch,
    Loop,
    Other,
}

#[derive(Debug, Clone)]
pub struct SyntaxNode {
    pub kind: SyntaxKind,
    /// Span covering the node and all of its children.
    pub location: SourceLocation,
    pub children: Vec<usize>,
    pub(crate) range: TextRange,
    hull: TextRange,
}

impl SyntaxNode {
    /// The node's own location, without decorator or child overhang.
    pub fn own_location(&self, tree: &SyntaxTree) -> SourceLocation {
        tree.location(self.range)
    }
}

/// A parsed Python 3 module with located, normalized nodes.
///
/// The raw statement list stays available to the analyses that interpret
/// it; `nodes()` is the kind-tagged view used for counting and traversal.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    file: Arc<str>,
    source: String,
    suite: Vec<ast::Stmt>,
    lines: LineIndex,
    nodes: Vec<SyntaxNode>,
}

pub fn parse_source(file: &SourceFile) -> Result<SyntaxTree, ParseError> {
    let path: Arc<str> = Arc::from(file.path().to_string_lossy().as_ref());
    let text = std::str::from_utf8(file.content()).map_err(|e| ParseError::Encoding {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let source = if file.is_notebook() {
        notebook_to_python(text).map_err(|message| ParseError::Notebook {
            path: path.to_string(),
            message,
        })?
    } else {
        text.to_owned()
    };
    SyntaxTree::parse(path, source)
}

impl SyntaxTree {
    pub fn parse(file: Arc<str>, source: String) -> Result<Self, ParseError> {
        let lines = LineIndex::new(&source);
        let suite = match ast::Suite::parse(&source, &file) {
            Ok(suite) => suite,
            Err(err) => {
                let offset = usize::from(err.offset);
                let (line, col) = lines.position(&source, offset);
                let location = SourceLocation {
                    file: file.clone(),
                    start_line: line,
                    start_col: col,
                    end_line: line,
                    end_col: col,
                };
                if let Some((py2_line, what)) = python2_marker(&source) {
                    return Err(ParseError::Python2 {
                        location: SourceLocation {
                            start_line: py2_line,
                            start_col: 1,
                            end_line: py2_line,
                            end_col: 1,
                            ..location
                        },
                        message: what.to_owned(),
                    });
                }
                return Err(ParseError::Syntax {
                    location,
                    message: err.error.to_string(),
                });
            }
        };
        let mut tree = Self {
            file,
            source,
            suite,
            lines,
            nodes: Vec::new(),
        };
        tree.nodes = NodeBuilder::build(&tree);
        Ok(tree)
    }

    pub fn file(&self) -> &Arc<str> {
        &self.file
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn suite(&self) -> &[ast::Stmt] {
        &self.suite
    }

    pub fn root(&self) -> &SyntaxNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[SyntaxNode] {
        &self.nodes
    }

    pub fn location(&self, range: TextRange) -> SourceLocation {
        let (start_line, start_col) = self.lines.position(&self.source, range.start().into());
        let (end_line, end_col) = self.lines.position(&self.source, range.end().into());
        SourceLocation {
            file: self.file.clone(),
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn text(&self, range: TextRange) -> &str {
        self.source
            .get(usize::from(range.start())..usize::from(range.end()))
            .unwrap_or("")
    }

    /// Pre-order walk from the root; children are visited in source order.
    pub fn preorder(&self) -> impl Iterator<Item = &SyntaxNode> {
        let mut stack = vec![0usize];
        std::iter::from_fn(move || {
            let idx = stack.pop()?;
            let node = &self.nodes[idx];
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    /// Locations of every call expression, in source (pre-)order.
    pub fn call_sites(&self) -> Vec<SourceLocation> {
        self.preorder()
            .filter(|n| n.kind == SyntaxKind::Call)
            .map(|n| self.location(n.range))
            .collect()
    }
}

fn python2_marker(source: &str) -> Option<(u32, &'static str)> {
    for (i, line) in source.lines().enumerate() {
        let t = line.trim_start();
        let what = if let Some(rest) = t.strip_prefix("print") {
            match rest.chars().next() {
                Some(' ') | Some('\t') => {
                    let arg = rest.trim_start();
                    let starts_expr = arg
                        .chars()
                        .next()
                        .is_some_and(|c| c == '"' || c == '\'' || c == '>' || c.is_alphanumeric());
                    let is_py3 = arg.starts_with('(') || arg.starts_with('=') || arg.is_empty();
                    (starts_expr && !is_py3).then_some("print statement")
                }
                _ => None,
            }
        } else if let Some(rest) = t.strip_prefix("exec ") {
            rest.trim_start()
                .starts_with(['"', '\''])
                .then_some("exec statement")
        } else if let Some(rest) = t.strip_prefix("except ") {
            let head = rest.split(':').next().unwrap_or("");
            (head.contains(',') && !head.contains('(')).then_some("old-style except clause")
        } else if let Some(rest) = t.strip_prefix("raise ") {
            let head = rest.split('#').next().unwrap_or("");
            (head.contains(", ") && !head.contains('(')).then_some("old-style raise")
        } else if !t.starts_with('#') && t.contains('`') && !t.contains(['"', '\'']) {
            Some("backtick repr")
        } else {
            None
        };
        if let Some(what) = what {
            return Some((i as u32 + 1, what));
        }
    }
    None
}

enum AstRef<'a> {
    Stmt(&'a ast::Stmt),
    Expr(&'a ast::Expr),
}

impl AstRef<'_> {
    fn range(&self) -> TextRange {
        match self {
            AstRef::Stmt(s) => s.range(),
            AstRef::Expr(e) => e.range(),
        }
    }
}

struct NodeBuilder<'t> {
    tree: &'t SyntaxTree,
    nodes: Vec<SyntaxNode>,
}

impl<'t> NodeBuilder<'t> {
    fn build(tree: &'t SyntaxTree) -> Vec<SyntaxNode> {
        let mut b = NodeBuilder {
            tree,
            nodes: Vec::new(),
        };
        let full = TextRange::new(0.into(), (tree.source.len() as u32).into());
        b.nodes.push(SyntaxNode {
            kind: SyntaxKind::Module,
            location: tree.location(full),
            children: Vec::new(),
            range: full,
            hull: full,
        });
        let children: Vec<usize> = tree.suite.iter().map(|s| b.add(AstRef::Stmt(s))).collect();
        b.nodes[0].children = children;
        b.nodes
    }

    fn add(&mut self, node: AstRef<'t>) -> usize {
        let (kind, mut kids) = match node {
            AstRef::Stmt(s) => (stmt_kind(s), stmt_children(s)),
            AstRef::Expr(e) => (expr_kind(e), expr_children(e)),
        };
        kids.sort_by_key(|k| k.range().start());
        let own = node.range();
        let slot = self.nodes.len();
        self.nodes.push(SyntaxNode {
            kind,
            location: self.tree.location(own),
            children: Vec::new(),
            range: own,
            hull: own,
        });
        let mut start = own.start();
        let mut end = own.end();
        let mut children = Vec::with_capacity(kids.len());
        for kid in kids {
            let idx = self.add(kid);
            let span = self.nodes[idx].hull;
            start = start.min(span.start());
            end = end.max(span.end());
            children.push(idx);
        }
        let hull = TextRange::new(start, end);
        let node = &mut self.nodes[slot];
        node.children = children;
        node.hull = hull;
        if hull != own {
            node.location = self.tree.location(hull);
        }
        slot
    }
}

fn stmt_kind(s: &ast::Stmt) -> SyntaxKind {
    use ast::Stmt::*;
    match s {
        Assign(_) | AugAssign(_) | AnnAssign(_) => SyntaxKind::Assign,
        FunctionDef(_) | AsyncFunctionDef(_) => SyntaxKind::FunctionDef,
        ClassDef(_) => SyntaxKind::ClassDef,
        Import(_) | ImportFrom(_) => SyntaxKind::Import,
        Return(_) => SyntaxKind::Return,
        If(_) | Match(_) | Try(_) | TryStar(_) => SyntaxKind::Branch,
        For(_) | AsyncFor(_) | While(_) => SyntaxKind::Loop,
        _ => SyntaxKind::Other,
    }
}

fn expr_kind(e: &ast::Expr) -> SyntaxKind {
    use ast::Expr::*;
    match e {
        Call(_) => SyntaxKind::Call,
        Attribute(_) => SyntaxKind::Attribute,
        Subscript(_) => SyntaxKind::Subscript,
        Constant(_) | JoinedStr(_) => SyntaxKind::Literal,
        Name(_) => SyntaxKind::Name,
        IfExp(_) => SyntaxKind::Branch,
        _ => SyntaxKind::Other,
    }
}

fn push_args<'a>(out: &mut Vec<AstRef<'a>>, args: &'a ast::Arguments) {
    for a in args
        .posonlyargs
        .iter()
        .chain(&args.args)
        .chain(&args.kwonlyargs)
    {
        if let Some(ann) = &a.def.annotation {
            out.push(AstRef::Expr(ann));
        }
        if let Some(d) = &a.default {
            out.push(AstRef::Expr(d));
        }
    }
    for a in args.vararg.iter().chain(&args.kwarg) {
        if let Some(ann) = &a.annotation {
            out.push(AstRef::Expr(ann));
        }
    }
}

fn push_body<'a>(out: &mut Vec<AstRef<'a>>, body: &'a [ast::Stmt]) {
    out.extend(body.iter().map(AstRef::Stmt));
}

fn stmt_children(s: &ast::Stmt) -> Vec<AstRef<'_>> {
    use ast::Stmt::*;
    let mut out = Vec::new();
    match s {
        FunctionDef(f) => {
            out.extend(f.decorator_list.iter().map(AstRef::Expr));
            push_args(&mut out, &f.args);
            out.extend(f.returns.iter().map(|e| AstRef::Expr(e)));
            push_body(&mut out, &f.body);
        }
        AsyncFunctionDef(f) => {
            out.extend(f.decorator_list.iter().map(AstRef::Expr));
            push_args(&mut out, &f.args);
            out.extend(f.returns.iter().map(|e| AstRef::Expr(e)));
            push_body(&mut out, &f.body);
        }
        ClassDef(c) => {
            out.extend(c.decorator_list.iter().map(AstRef::Expr));
            out.extend(c.bases.iter().map(AstRef::Expr));
            out.extend(c.keywords.iter().map(|k| AstRef::Expr(&k.value)));
            push_body(&mut out, &c.body);
        }
        Return(r) => out.extend(r.value.iter().map(|e| AstRef::Expr(e))),
        Delete(d) => out.extend(d.targets.iter().map(AstRef::Expr)),
        Assign(a) => {
            out.extend(a.targets.iter().map(AstRef::Expr));
            out.push(AstRef::Expr(&a.value));
        }
        TypeAlias(t) => {
            out.push(AstRef::Expr(&t.name));
            out.push(AstRef::Expr(&t.value));
        }
        AugAssign(a) => {
            out.push(AstRef::Expr(&a.target));
            out.push(AstRef::Expr(&a.value));
        }
        AnnAssign(a) => {
            out.push(AstRef::Expr(&a.target));
            out.push(AstRef::Expr(&a.annotation));
            out.extend(a.value.iter().map(|e| AstRef::Expr(e)));
        }
        For(f) => {
            out.push(AstRef::Expr(&f.target));
            out.push(AstRef::Expr(&f.iter));
            push_body(&mut out, &f.body);
            push_body(&mut out, &f.orelse);
        }
        AsyncFor(f) => {
            out.push(AstRef::Expr(&f.target));
            out.push(AstRef::Expr(&f.iter));
            push_body(&mut out, &f.body);
            push_body(&mut out, &f.orelse);
        }
        While(w) => {
            out.push(AstRef::Expr(&w.test));
            push_body(&mut out, &w.body);
            push_body(&mut out, &w.orelse);
        }
        If(i) => {
            out.push(AstRef::Expr(&i.test));
            push_body(&mut out, &i.body);
            push_body(&mut out, &i.orelse);
        }
        With(w) => {
            for item in &w.items {
                out.push(AstRef::Expr(&item.context_expr));
                out.extend(item.optional_vars.iter().map(|e| AstRef::Expr(e)));
            }
            push_body(&mut out, &w.body);
        }
        AsyncWith(w) => {
            for item in &w.items {
                out.push(AstRef::Expr(&item.context_expr));
                out.extend(item.optional_vars.iter().map(|e| AstRef::Expr(e)));
            }
            push_body(&mut out, &w.body);
        }
        Match(m) => {
            out.push(AstRef::Expr(&m.subject));
            for case in &m.cases {
                out.extend(case.guard.iter().map(|e| AstRef::Expr(e)));
                push_body(&mut out, &case.body);
            }
        }
        Raise(r) => {
            out.extend(r.exc.iter().map(|e| AstRef::Expr(e)));
            out.extend(r.cause.iter().map(|e| AstRef::Expr(e)));
        }
        Try(t) => {
            push_body(&mut out, &t.body);
            for ast::ExceptHandler::ExceptHandler(h) in &t.handlers {
                out.extend(h.type_.iter().map(|e| AstRef::Expr(e)));
                push_body(&mut out, &h.body);
            }
            push_body(&mut out, &t.orelse);
            push_body(&mut out, &t.finalbody);
        }
        TryStar(t) => {
            push_body(&mut out, &t.body);
            for ast::ExceptHandler::ExceptHandler(h) in &t.handlers {
                out.extend(h.type_.iter().map(|e| AstRef::Expr(e)));
                push_body(&mut out, &h.body);
            }
            push_body(&mut out, &t.orelse);
            push_body(&mut out, &t.finalbody);
        }
        Assert(a) => {
            out.push(AstRef::Expr(&a.test));
            out.extend(a.msg.iter().map(|e| AstRef::Expr(e)));
        }
        Expr(e) => out.push(AstRef::Expr(&e.value)),
        Import(_) | ImportFrom(_) | Global(_) | Nonlocal(_) | Pass(_) | Break(_)
        | Continue(_) => {}
    }
    out
}

fn push_generators<'a>(out: &mut Vec<AstRef<'a>>, gens: &'a [ast::Comprehension]) {
    for g in gens {
        out.push(AstRef::Expr(&g.target));
        out.push(AstRef::Expr(&g.iter));
        out.extend(g.ifs.iter().map(AstRef::Expr));
    }
}

fn expr_children(e: &ast::Expr) -> Vec<AstRef<'_>> {
    use ast::Expr::*;
    let mut out = Vec::new();
    match e {
        BoolOp(b) => out.extend(b.values.iter().map(AstRef::Expr)),
        NamedExpr(n) => {
            out.push(AstRef::Expr(&n.target));
            out.push(AstRef::Expr(&n.value));
        }
        BinOp(b) => {
            out.push(AstRef::Expr(&b.left));
            out.push(AstRef::Expr(&b.right));
        }
        UnaryOp(u) => out.push(AstRef::Expr(&u.operand)),
        Lambda(l) => {
            push_args(&mut out, &l.args);
            out.push(AstRef::Expr(&l.body));
        }
        IfExp(i) => {
            out.push(AstRef::Expr(&i.body));
            out.push(AstRef::Expr(&i.test));
            out.push(AstRef::Expr(&i.orelse));
        }
        Dict(d) => {
            for (k, v) in d.keys.iter().zip(&d.values) {
                out.extend(k.iter().map(AstRef::Expr));
                out.push(AstRef::Expr(v));
            }
        }
        Set(s) => out.extend(s.elts.iter().map(AstRef::Expr)),
        ListComp(c) => {
            out.push(AstRef::Expr(&c.elt));
            push_generators(&mut out, &c.generators);
        }
        SetComp(c) => {
            out.push(AstRef::Expr(&c.elt));
            push_generators(&mut out, &c.generators);
        }
        DictComp(c) => {
            out.push(AstRef::Expr(&c.key));
            out.push(AstRef::Expr(&c.value));
            push_generators(&mut out, &c.generators);
        }
        GeneratorExp(c) => {
            out.push(AstRef::Expr(&c.elt));
            push_generators(&mut out, &c.generators);
        }
        Await(a) => out.push(AstRef::Expr(&a.value)),
        Yield(y) => out.extend(y.value.iter().map(|e| AstRef::Expr(e))),
        YieldFrom(y) => out.push(AstRef::Expr(&y.value)),
        Compare(c) => {
            out.push(AstRef::Expr(&c.left));
            out.extend(c.comparators.iter().map(AstRef::Expr));
        }
        Call(c) => {
            out.push(AstRef::Expr(&c.func));
            out.extend(c.args.iter().map(AstRef::Expr));
            out.extend(c.keywords.iter().map(|k| AstRef::Expr(&k.value)));
        }
        FormattedValue(f) => {
            out.push(AstRef::Expr(&f.value));
            out.extend(f.format_spec.iter().map(|e| AstRef::Expr(e)));
        }
        JoinedStr(j) => out.extend(j.values.iter().map(AstRef::Expr)),
        Attribute(a) => out.push(AstRef::Expr(&a.value)),
        Subscript(s) => {
            out.push(AstRef::Expr(&s.value));
            out.push(AstRef::Expr(&s.slice));
        }
        Starred(s) => out.push(AstRef::Expr(&s.value)),
        List(l) => out.extend(l.elts.iter().map(AstRef::Expr)),
        Tuple(t) => out.extend(t.elts.iter().map(AstRef::Expr)),
        Slice(s) => {
            out.extend(s.lower.iter().map(|e| AstRef::Expr(e)));
            out.extend(s.upper.iter().map(|e| AstRef::Expr(e)));
            out.extend(s.step.iter().map(|e| AstRef::Expr(e)));
        }
        Constant(_) | Name(_) => {}
    }
    out
}
