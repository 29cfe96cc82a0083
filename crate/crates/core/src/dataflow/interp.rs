//! Statement and expression evaluation under the API abstraction: imported
//! names are turtles, calls on turtles make fresh turtles, field reads on
//! turtles return the same object.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::text_size::{TextRange, TextSize};

use super::order::TraceBuilder;
use super::program::{MethodKind, Program};
use super::value::{AbstractValue, ClassId, Environment, FuncId, TurtleValue};
use crate::frontend::{ImportBinding, SyntaxTree};
use crate::graph::{
    make_node_id, Datatype, EdgeKind, GraphEdge, GraphNode, Literal, NodeId, NodeKind,
    Ordinal, ProgramGraph, TurtlePath,
};

/// Inlining depth for user-defined functions.
pub const INLINE_DEPTH: usize = 1;

/// Names resolved as if imported from the builtins module.
pub(crate) const BUILTINS: &[&str] = &[
    "abs", "all", "any", "ascii", "bin", "bool", "breakpoint", "bytearray", "bytes",
    "callable", "chr", "classmethod", "compile", "complex", "delattr", "dict", "dir",
    "divmod", "enumerate", "eval", "exec", "exit", "filter", "float", "format",
    "frozenset", "getattr", "globals", "hasattr", "hash", "help", "hex", "id", "input",
    "int", "isinstance", "issubclass", "iter", "len", "list", "locals", "map", "max",
    "memoryview", "min", "next", "object", "oct", "open", "ord", "pow", "print",
    "property", "quit", "range", "repr", "reversed", "round", "set", "setattr", "slice",
    "sorted", "staticmethod", "str", "sum", "super", "tuple", "type", "vars", "zip",
    "ArithmeticError", "AssertionError", "AttributeError", "BaseException",
    "DeprecationWarning", "Exception", "FileNotFoundError", "ImportError", "IndexError",
    "IOError", "KeyError", "KeyboardInterrupt", "LookupError", "NameError",
    "NotImplementedError", "OSError", "RuntimeError", "StopIteration", "SystemExit",
    "TypeError", "UserWarning", "ValueError", "Warning", "ZeroDivisionError",
];

fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum InstrKey {
    At(u32, u32, NodeKind),
    Element(u32, u32, u32),
    Builtin(String),
    Param(usize),
}

fn key(range: TextRange, kind: NodeKind) -> InstrKey {
    InstrKey::At(range.start().to_u32(), range.end().to_u32(), kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Usage {
    CallTarget,
    Data,
}

type Args = Vec<(Ordinal, AbstractValue)>;
type Kwargs = Vec<(String, AbstractValue)>;

pub(crate) struct Interp<'p, 'a> {
    tree: &'a SyntaxTree,
    program: &'p Program<'a>,
    bindings: &'p HashMap<u32, &'p ImportBinding>,
    graph: &'p mut ProgramGraph,
    digest: &'p str,
    seed: &'p str,
    instrs: HashMap<InstrKey, u64>,
    env: Environment,
    trace: TraceBuilder,
    active: Vec<FuncId>,
    depth: usize,
    returns: Vec<Vec<AbstractValue>>,
    deadline: Option<Instant>,
    timed_out: bool,
}

pub(crate) struct EntryResult {
    pub trace: super::order::CallTrace,
    pub env: Environment,
    pub timed_out: bool,
}

impl<'p, 'a> Interp<'p, 'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tree: &'a SyntaxTree,
        program: &'p Program<'a>,
        bindings: &'p HashMap<u32, &'p ImportBinding>,
        graph: &'p mut ProgramGraph,
        digest: &'p str,
        seed: &'p str,
        env: Environment,
        deadline: Option<Instant>,
    ) -> Self {
        Self {
            tree,
            program,
            bindings,
            graph,
            digest,
            seed,
            instrs: HashMap::new(),
            env,
            trace: TraceBuilder::new(),
            active: Vec::new(),
            depth: 0,
            returns: Vec::new(),
            deadline,
            timed_out: false,
        }
    }

    pub fn run_main(mut self) -> EntryResult {
        self.exec_block(self.tree.suite());
        self.finish()
    }

    /// Analyzes function `fid` with synthetic parameter values.
    pub fn run_function(mut self, fid: FuncId) -> EntryResult {
        let program = self.program;
        let f = &program.funcs[fid];
        let entry = TurtlePath::from_dotted(&f.qualified);
        self.env.push_frame();
        for (i, p) in f.params().into_iter().enumerate() {
            let label = match &entry {
                Some(e) => e.extended(p.as_str()),
                None => TurtlePath::single(p.as_str()),
            };
            let id = self.intern(InstrKey::Param(i), NodeKind::SyntheticParam);
            self.ensure(id, NodeKind::SyntheticParam, Some(label.clone()), None);
            let mut t = TurtleValue::new(id, label);
            if i == 0 && f.method_kind == MethodKind::Instance {
                t.local_class = f.class;
            }
            self.env.bind(&p, AbstractValue::Turtle(t));
        }
        self.active.push(fid);
        self.exec_block(f.body);
        self.finish()
    }

    fn finish(self) -> EntryResult {
        EntryResult {
            trace: self.trace.finish(),
            env: self.env,
            timed_out: self.timed_out,
        }
    }

    fn out_of_time(&mut self) -> bool {
        if !self.timed_out {
            if let Some(d) = self.deadline {
                self.timed_out = Instant::now() > d;
            }
        }
        self.timed_out
    }

    // ---- graph construction

    fn intern(&mut self, key: InstrKey, kind: NodeKind) -> NodeId {
        let next = self.instrs.len() as u64;
        let index = *self.instrs.entry(key).or_insert(next);
        make_node_id(self.digest, self.seed, index, kind)
    }

    fn ensure(
        &mut self,
        id: NodeId,
        kind: NodeKind,
        label: Option<TurtlePath>,
        range: Option<TextRange>,
    ) {
        if self.graph.node(id).is_none() {
            let mut node = GraphNode::new(id, kind);
            node.label = label;
            node.location = range.map(|r| self.tree.location(r));
            self.graph.add_node(node);
        }
    }

    fn edge(&mut self, src: NodeId, dst: NodeId, kind: EdgeKind, ordinal: Option<Ordinal>) {
        let e = GraphEdge {
            src,
            dst,
            kind,
            ordinal,
        };
        self.graph
            .merge_edge(e)
            .expect("edge endpoints are created before the edge");
    }

    fn kind_of(&self, id: NodeId) -> Option<NodeKind> {
        self.graph.node(id).map(|n| n.kind)
    }

    fn constant_node(&mut self, lit: &Literal, site: (u32, u32)) -> NodeId {
        let range = TextRange::new(TextSize::from(site.0), TextSize::from(site.1));
        let id = self.intern(key(range, NodeKind::Constant), NodeKind::Constant);
        if self.graph.node(id).is_none() {
            let mut node = GraphNode::new(id, NodeKind::Constant);
            node.constant = Some(lit.clone());
            node.location = Some(self.tree.location(range));
            self.graph.add_node(node);
        }
        id
    }

    /// Edges for a value used at slot `ord` of `dst`.
    fn flow_into(&mut self, dst: NodeId, value: &AbstractValue, ord: &Ordinal) {
        for m in value.members() {
            match m {
                AbstractValue::Turtle(t) => {
                    self.edge(t.origin, dst, EdgeKind::FlowsTo, Some(ord.clone()))
                }
                AbstractValue::Constant(lit, site) => {
                    let c = self.constant_node(lit, *site);
                    self.edge(dst, c, EdgeKind::ConstantArg, Some(ord.clone()));
                }
                AbstractValue::Tuple(items) => {
                    for item in items {
                        self.flow_into(dst, item, ord);
                    }
                }
                _ => {}
            }
        }
    }

    fn note_assignment(&mut self, name: &str, value: &AbstractValue) {
        let origins: Vec<NodeId> = value.turtles().map(|t| t.origin).collect();
        for o in origins {
            if let Some(n) = self.graph.node_mut(o) {
                n.value_names.insert(name.to_owned());
            }
        }
    }

    // ---- statements

    fn exec_block(&mut self, body: &[ast::Stmt]) {
        for stmt in body {
            if self.out_of_time() {
                return;
            }
            self.exec_stmt(stmt);
        }
    }

    fn exec_stmt(&mut self, stmt: &ast::Stmt) {
        use ast::Stmt::*;
        match stmt {
            FunctionDef(f) => self.exec_def(stmt, &f.name, &f.args, &f.decorator_list),
            AsyncFunctionDef(f) => self.exec_def(stmt, &f.name, &f.args, &f.decorator_list),
            ClassDef(c) => self.exec_class(stmt, c),
            Return(r) => {
                let v = match &r.value {
                    Some(e) => self.eval_expr(e),
                    None => AbstractValue::Unknown,
                };
                if let Some(rs) = self.returns.last_mut() {
                    rs.push(v);
                }
            }
            Delete(d) => {
                for t in &d.targets {
                    self.eval_target_parts(t);
                }
            }
            Assign(a) => {
                let v = self.eval_expr(&a.value);
                for t in &a.targets {
                    self.assign(t, v.clone());
                }
            }
            AugAssign(a) => {
                match &*a.target {
                    ast::Expr::Name(n) => {
                        self.lookup_name(n.id.as_str(), n.range);
                    }
                    other => {
                        self.eval_expr(other);
                    }
                }
                self.eval_expr(&a.value);
                if let ast::Expr::Attribute(at) = &*a.target {
                    let base = self.eval_expr(&at.value);
                    self.write_attribute(&base, at.attr.as_str(), &AbstractValue::Unknown, at.range);
                }
            }
            AnnAssign(a) => {
                if let Some(v) = &a.value {
                    let v = self.eval_expr(v);
                    self.assign(&a.target, v);
                }
            }
            For(f) => self.exec_for(&f.target, &f.iter, &f.body, &f.orelse),
            AsyncFor(f) => self.exec_for(&f.target, &f.iter, &f.body, &f.orelse),
            While(w) => {
                self.eval_expr(&w.test);
                self.exec_loop(&w.body);
                self.exec_block(&w.orelse);
            }
            If(i) => {
                self.eval_expr(&i.test);
                self.exec_branches(&[&i.body, &i.orelse]);
            }
            With(w) => self.exec_with(&w.items, &w.body),
            AsyncWith(w) => self.exec_with(&w.items, &w.body),
            Match(m) => {
                self.eval_expr(&m.subject);
                let before = self.env.clone();
                let mut envs = Vec::new();
                self.trace.begin_branch();
                for case in &m.cases {
                    self.env = before.clone();
                    self.trace.begin_arm();
                    if let Some(g) = &case.guard {
                        self.eval_expr(g);
                    }
                    self.exec_block(&case.body);
                    self.trace.end_arm();
                    envs.push(std::mem::take(&mut self.env));
                }
                self.trace.begin_arm();
                self.trace.end_arm();
                self.trace.end_branch();
                self.env = envs.iter().fold(before, |acc, e| Environment::join(&acc, e));
            }
            Raise(r) => {
                for e in r.exc.iter().chain(&r.cause) {
                    self.eval_expr(e);
                }
            }
            Try(t) => self.exec_try(&t.body, &t.handlers, &t.orelse, &t.finalbody),
            TryStar(t) => self.exec_try(&t.body, &t.handlers, &t.orelse, &t.finalbody),
            Assert(a) => {
                self.eval_expr(&a.test);
                if let Some(m) = &a.msg {
                    self.eval_expr(m);
                }
            }
            Import(_) | ImportFrom(_) => self.exec_import(stmt),
            Global(g) => {
                for n in &g.names {
                    self.env.declare_global(n.as_str());
                }
            }
            Expr(e) => {
                self.eval_expr(&e.value);
            }
            _ => {}
        }
    }

    fn exec_def(
        &mut self,
        stmt: &ast::Stmt,
        name: &ast::Identifier,
        args: &ast::Arguments,
        decorators: &[ast::Expr],
    ) {
        for d in decorators {
            if !matches!(d, ast::Expr::Name(_)) {
                self.eval_expr(d);
            }
        }
        self.eval_defaults(args);
        let fid = self.program.func_at.get(&stmt.range().start().to_u32()).copied();
        let value = match fid {
            Some(f) if decorators.is_empty() => AbstractValue::Function(f),
            _ => AbstractValue::Unknown,
        };
        self.env.bind(name.as_str(), value);
    }

    fn eval_defaults(&mut self, args: &ast::Arguments) {
        for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
            if let Some(d) = &a.default {
                self.eval_expr(d);
            }
        }
    }

    fn exec_class(&mut self, stmt: &ast::Stmt, c: &ast::StmtClassDef) {
        for d in &c.decorator_list {
            if !matches!(d, ast::Expr::Name(_)) {
                self.eval_expr(d);
            }
        }
        for b in &c.bases {
            self.eval_expr(b);
        }
        for k in &c.keywords {
            self.eval_expr(&k.value);
        }
        self.env.push_frame();
        self.exec_block(&c.body);
        self.env.pop_frame();
        let value = match self.program.class_at.get(&stmt.range().start().to_u32()) {
            Some(&cid) => AbstractValue::Class(cid),
            None => AbstractValue::Unknown,
        };
        self.env.bind(c.name.as_str(), value);
    }

    /// Runs each arm from the same starting state; exactly one runs.
    fn exec_branches(&mut self, arms: &[&[ast::Stmt]]) {
        let before = self.env.clone();
        let mut joined: Option<Environment> = None;
        self.trace.begin_branch();
        for arm in arms {
            self.env = before.clone();
            self.trace.begin_arm();
            self.exec_block(arm);
            self.trace.end_arm();
            joined = Some(match joined {
                None => std::mem::take(&mut self.env),
                Some(j) => Environment::join(&j, &self.env),
            });
        }
        self.trace.end_branch();
        self.env = joined.unwrap_or(before);
    }

    /// Single pass over a loop body; the body may also not run at all.
    fn exec_loop(&mut self, body: &[ast::Stmt]) {
        let before = self.env.clone();
        self.trace.begin_loop();
        self.exec_block(body);
        self.trace.end_loop();
        self.env = Environment::join(&before, &self.env);
    }

    fn exec_for(&mut self, target: &ast::Expr, iter: &ast::Expr, body: &[ast::Stmt], orelse: &[ast::Stmt]) {
        self.eval_expr(iter);
        let before = self.env.clone();
        self.trace.begin_loop();
        self.assign(target, AbstractValue::Unknown);
        self.exec_block(body);
        self.trace.end_loop();
        self.env = Environment::join(&before, &self.env);
        self.exec_block(orelse);
    }

    fn exec_with(&mut self, items: &[ast::WithItem], body: &[ast::Stmt]) {
        for item in items {
            let v = self.eval_expr(&item.context_expr);
            if let Some(t) = &item.optional_vars {
                self.assign(t, v);
            }
        }
        self.exec_block(body);
    }

    fn exec_try(
        &mut self,
        body: &[ast::Stmt],
        handlers: &[ast::ExceptHandler],
        orelse: &[ast::Stmt],
        finalbody: &[ast::Stmt],
    ) {
        let before = self.env.clone();
        self.exec_block(body);
        let after_body = self.env.clone();
        let handler_start = Environment::join(&before, &after_body);
        let mut joined = None::<Environment>;
        self.trace.begin_branch();
        self.trace.begin_arm();
        self.exec_block(orelse);
        self.trace.end_arm();
        joined = Some(match joined {
            None => std::mem::take(&mut self.env),
            Some(j) => Environment::join(&j, &self.env),
        });
        for ast::ExceptHandler::ExceptHandler(h) in handlers {
            self.env = handler_start.clone();
            self.trace.begin_arm();
            if let Some(t) = &h.type_ {
                self.eval_expr(t);
            }
            if let Some(n) = &h.name {
                self.env.bind(n.as_str(), AbstractValue::Unknown);
            }
            self.exec_block(&h.body);
            self.trace.end_arm();
            joined = Some(match joined {
                None => std::mem::take(&mut self.env),
                Some(j) => Environment::join(&j, &self.env),
            });
        }
        self.trace.end_branch();
        self.env = joined.unwrap_or(after_body);
        self.exec_block(finalbody);
    }

    fn exec_import(&mut self, stmt: &ast::Stmt) {
        let aliases = match stmt {
            ast::Stmt::Import(i) => &i.names,
            ast::Stmt::ImportFrom(i) => &i.names,
            _ => return,
        };
        for alias in aliases {
            let Some(b) = self.bindings.get(&alias.range().start().to_u32()).copied() else {
                continue;
            };
            if !b.is_resolvable() {
                continue;
            }
            let id = self.intern(key(b.range, NodeKind::Import), NodeKind::Import);
            self.ensure(id, NodeKind::Import, Some(b.qualified_path.clone()), Some(b.range));
            let v = AbstractValue::Turtle(TurtleValue::new(id, b.qualified_path.clone()));
            self.note_assignment(&b.local_name, &v);
            self.env.bind(&b.local_name, v);
        }
    }

    // ---- assignment

    fn assign(&mut self, target: &ast::Expr, value: AbstractValue) {
        match target {
            ast::Expr::Name(n) => {
                self.note_assignment(n.id.as_str(), &value);
                self.env.bind(n.id.as_str(), value);
            }
            ast::Expr::Tuple(t) => self.unpack(target.range(), &t.elts, value),
            ast::Expr::List(l) => self.unpack(target.range(), &l.elts, value),
            ast::Expr::Attribute(a) => {
                let base = self.eval_expr(&a.value);
                self.write_attribute(&base, a.attr.as_str(), &value, a.range);
            }
            ast::Expr::Subscript(s) => {
                self.eval_expr(&s.value);
                self.eval_expr(&s.slice);
            }
            ast::Expr::Starred(s) => self.assign(&s.value, AbstractValue::Unknown),
            _ => {}
        }
    }

    fn eval_target_parts(&mut self, target: &ast::Expr) {
        match target {
            ast::Expr::Attribute(a) => {
                self.eval_expr(&a.value);
            }
            ast::Expr::Subscript(s) => {
                self.eval_expr(&s.value);
                self.eval_expr(&s.slice);
            }
            ast::Expr::Tuple(t) => t.elts.iter().for_each(|e| self.eval_target_parts(e)),
            ast::Expr::List(l) => l.elts.iter().for_each(|e| self.eval_target_parts(e)),
            _ => {}
        }
    }

    fn unpack(&mut self, range: TextRange, elts: &[ast::Expr], value: AbstractValue) {
        let starred = elts.iter().any(|e| matches!(e, ast::Expr::Starred(_)));
        let values = if starred || elts.len() < 2 {
            vec![AbstractValue::Unknown; elts.len()]
        } else {
            self.tuple_unpack(range, elts, &value)
        };
        for (e, v) in elts.iter().zip(values) {
            self.assign(e, v);
        }
    }

    /// Splits `value` across `elts.len()` targets.
    fn tuple_unpack(&mut self, range: TextRange, elts: &[ast::Expr], value: &AbstractValue) -> Vec<AbstractValue> {
        let n = elts.len();
        if let AbstractValue::Tuple(items) = value {
            if items.len() == n {
                return items.clone();
            }
            return vec![AbstractValue::Unknown; n];
        }
        let turtles: Vec<TurtleValue> = value.turtles().cloned().collect();
        let Some(label) = turtles.iter().map(TurtleValue::effective_label).min() else {
            return vec![AbstractValue::Unknown; n];
        };
        let (start, end) = (range.start().to_u32(), range.end().to_u32());
        elts.iter()
            .enumerate()
            .map(|(i, e)| {
                let id = self.intern(InstrKey::Element(start, end, i as u32), NodeKind::TupleElement);
                if self.graph.node(id).is_none() {
                    let mut node = GraphNode::new(id, NodeKind::TupleElement);
                    node.label = Some(label.clone());
                    node.location = Some(self.tree.location(e.range()));
                    node.element_index = Some(i as u32);
                    self.graph.add_node(node);
                }
                for t in &turtles {
                    self.edge(t.origin, id, EdgeKind::HasElement, None);
                }
                AbstractValue::Turtle(TurtleValue::new(id, label.clone()))
            })
            .collect()
    }

    fn write_attribute(&mut self, base: &AbstractValue, field: &str, value: &AbstractValue, range: TextRange) {
        let turtles: Vec<TurtleValue> = base.turtles().cloned().collect();
        let Some(label) = turtles.iter().map(TurtleValue::effective_label).min() else {
            return;
        };
        let id = self.intern(key(range, NodeKind::Write), NodeKind::Write);
        self.ensure(id, NodeKind::Write, Some(label.extended(field)), Some(range));
        for t in &turtles {
            self.edge(t.origin, id, EdgeKind::Writes, None);
        }
        self.flow_into(id, value, &Ordinal::Position(1));
    }

    // ---- expressions

    fn lookup_name(&mut self, name: &str, range: TextRange) -> AbstractValue {
        if let Some(v) = self.env.lookup(name) {
            return v.clone();
        }
        if is_builtin(name) {
            let id = self.intern(InstrKey::Builtin(name.to_owned()), NodeKind::Import);
            let path = TurtlePath::single(name);
            self.ensure(id, NodeKind::Import, Some(path.clone()), Some(range));
            return AbstractValue::Turtle(TurtleValue::new(id, path));
        }
        AbstractValue::Unknown
    }

    pub(crate) fn eval_expr(&mut self, expr: &ast::Expr) -> AbstractValue {
        use ast::Expr::*;
        match expr {
            Name(n) => self.lookup_name(n.id.as_str(), n.range),
            Attribute(a) => {
                let base = self.eval_expr(&a.value);
                self.eval_attribute(&base, a.attr.as_str(), Usage::Data, a.range)
            }
            Call(c) => self.eval_call_expr(c),
            Subscript(s) => {
                let base = self.eval_expr(&s.value);
                let index = self.eval_expr(&s.slice);
                self.eval_subscript(&base, &index, s.range)
            }
            Constant(c) => match literal(&c.value) {
                Some(lit) => AbstractValue::Constant(lit, (c.range.start().to_u32(), c.range.end().to_u32())),
                None => AbstractValue::Unknown,
            },
            Tuple(t) => {
                let items: Vec<AbstractValue> = t.elts.iter().map(|e| self.eval_expr(e)).collect();
                if items.len() >= 2 {
                    AbstractValue::Tuple(items)
                } else {
                    AbstractValue::Unknown
                }
            }
            List(l) => self.eval_all(&l.elts),
            Set(s) => self.eval_all(&s.elts),
            Dict(d) => {
                for k in d.keys.iter().flatten() {
                    self.eval_expr(k);
                }
                self.eval_all(&d.values)
            }
            BoolOp(b) => self.eval_all(&b.values),
            BinOp(b) => {
                self.eval_expr(&b.left);
                self.eval_expr(&b.right);
                AbstractValue::Unknown
            }
            UnaryOp(u) => {
                self.eval_expr(&u.operand);
                AbstractValue::Unknown
            }
            Compare(c) => {
                self.eval_expr(&c.left);
                self.eval_all(&c.comparators)
            }
            IfExp(i) => {
                self.eval_expr(&i.test);
                let a = self.eval_expr(&i.body);
                let b = self.eval_expr(&i.orelse);
                AbstractValue::join(&a, &b)
            }
            Lambda(l) => {
                self.eval_defaults(&l.args);
                self.env.push_frame();
                for p in l.args.posonlyargs.iter().chain(&l.args.args).chain(&l.args.kwonlyargs) {
                    self.env.bind(p.def.arg.as_str(), AbstractValue::Unknown);
                }
                for p in l.args.vararg.iter().chain(&l.args.kwarg) {
                    self.env.bind(p.arg.as_str(), AbstractValue::Unknown);
                }
                self.trace.begin_branch();
                self.trace.begin_arm();
                self.eval_expr(&l.body);
                self.trace.end_arm();
                self.trace.begin_arm();
                self.trace.end_arm();
                self.trace.end_branch();
                self.env.pop_frame();
                AbstractValue::Unknown
            }
            ListComp(c) => self.eval_comprehension(&c.generators, &[&c.elt]),
            SetComp(c) => self.eval_comprehension(&c.generators, &[&c.elt]),
            GeneratorExp(c) => self.eval_comprehension(&c.generators, &[&c.elt]),
            DictComp(c) => self.eval_comprehension(&c.generators, &[&c.key, &c.value]),
            Await(a) => self.eval_expr(&a.value),
            Yield(y) => {
                if let Some(v) = &y.value {
                    self.eval_expr(v);
                }
                AbstractValue::Unknown
            }
            YieldFrom(y) => {
                self.eval_expr(&y.value);
                AbstractValue::Unknown
            }
            JoinedStr(j) => self.eval_all(&j.values),
            FormattedValue(f) => {
                self.eval_expr(&f.value);
                if let Some(s) = &f.format_spec {
                    self.eval_expr(s);
                }
                AbstractValue::Unknown
            }
            NamedExpr(n) => {
                let v = self.eval_expr(&n.value);
                self.assign(&n.target, v.clone());
                v
            }
            Starred(s) => {
                self.eval_expr(&s.value);
                AbstractValue::Unknown
            }
            Slice(s) => {
                for e in s.lower.iter().chain(&s.upper).chain(&s.step) {
                    self.eval_expr(e);
                }
                AbstractValue::Unknown
            }
        }
    }

    fn eval_all(&mut self, exprs: &[ast::Expr]) -> AbstractValue {
        for e in exprs {
            self.eval_expr(e);
        }
        AbstractValue::Unknown
    }

    fn eval_comprehension(&mut self, generators: &[ast::Comprehension], elts: &[&ast::Expr]) -> AbstractValue {
        self.env.push_frame();
        let mut looped = false;
        for (i, g) in generators.iter().enumerate() {
            self.eval_expr(&g.iter);
            if i == 0 {
                self.trace.begin_loop();
                looped = true;
            }
            self.assign(&g.target, AbstractValue::Unknown);
            for c in &g.ifs {
                self.eval_expr(c);
            }
        }
        for e in elts {
            self.eval_expr(e);
        }
        if looped {
            self.trace.end_loop();
        }
        self.env.pop_frame();
        AbstractValue::Unknown
    }

    /// Evaluates the function position of a call; attribute chains stay
    /// pending until the call happens.
    fn eval_callee(&mut self, expr: &ast::Expr) -> AbstractValue {
        match expr {
            ast::Expr::Attribute(a) => {
                let base = self.eval_callee(&a.value);
                self.eval_attribute(&base, a.attr.as_str(), Usage::CallTarget, a.range)
            }
            other => self.eval_expr(other),
        }
    }

    fn eval_attribute(&mut self, base: &AbstractValue, field: &str, usage: Usage, range: TextRange) -> AbstractValue {
        match usage {
            Usage::CallTarget => {
                let mut out = AbstractValue::Unknown;
                let mut first = true;
                for m in base.members() {
                    let v = match m {
                        AbstractValue::Turtle(t) => {
                            let mut t = t.clone();
                            t.pending_fields.push(field.to_owned());
                            AbstractValue::Turtle(t)
                        }
                        AbstractValue::Class(c) => match self.program.find_method(*c, field) {
                            Some(f) => AbstractValue::Function(f),
                            None => AbstractValue::Unknown,
                        },
                        _ => AbstractValue::Unknown,
                    };
                    out = if first { v } else { AbstractValue::join(&out, &v) };
                    first = false;
                }
                out
            }
            Usage::Data => {
                let turtles: Vec<TurtleValue> = base.turtles().cloned().collect();
                let Some(label) = turtles.iter().map(TurtleValue::effective_label).min() else {
                    return AbstractValue::Unknown;
                };
                let id = self.intern(key(range, NodeKind::Read), NodeKind::Read);
                self.ensure(id, NodeKind::Read, Some(label.extended(field)), Some(range));
                for t in &turtles {
                    self.edge(t.origin, id, EdgeKind::FlowsTo, Some(Ordinal::RECEIVER));
                    self.edge(t.origin, id, EdgeKind::Reads, None);
                }
                AbstractValue::Turtle(TurtleValue::new(id, label))
            }
        }
    }

    fn eval_subscript(&mut self, base: &AbstractValue, index: &AbstractValue, range: TextRange) -> AbstractValue {
        let turtles: Vec<TurtleValue> = base.turtles().cloned().collect();
        let Some(label) = turtles.iter().map(TurtleValue::effective_label).min() else {
            return AbstractValue::Unknown;
        };
        let id = self.intern(key(range, NodeKind::Read), NodeKind::Read);
        self.ensure(id, NodeKind::Read, Some(label.clone()), Some(range));
        for t in &turtles {
            self.edge(t.origin, id, EdgeKind::FlowsTo, Some(Ordinal::RECEIVER));
        }
        let index_origins: Vec<NodeId> = index.turtles().map(|t| t.origin).collect();
        for o in index_origins {
            self.edge(o, id, EdgeKind::FlowsTo, Some(Ordinal::Position(1)));
        }
        AbstractValue::Turtle(TurtleValue::new(id, label))
    }

    fn eval_call_expr(&mut self, call: &ast::ExprCall) -> AbstractValue {
        let callee = self.eval_callee(&call.func);
        let mut args: Args = Vec::with_capacity(call.args.len());
        for (i, a) in call.args.iter().enumerate() {
            let v = match a {
                ast::Expr::Starred(s) => self.eval_expr(&s.value),
                other => self.eval_expr(other),
            };
            args.push((Ordinal::Position(i as u32 + 1), v));
        }
        let mut kwargs: Kwargs = Vec::new();
        for kw in &call.keywords {
            let v = self.eval_expr(&kw.value);
            if let Some(name) = &kw.arg {
                kwargs.push((name.to_string(), v));
            }
        }
        self.eval_call(&callee, &args, &kwargs, call.range)
    }

    fn eval_call(&mut self, callee: &AbstractValue, args: &Args, kwargs: &Kwargs, range: TextRange) -> AbstractValue {
        let mut api = Vec::new();
        let mut user = None;
        let mut class = None;
        for m in callee.members() {
            match m {
                AbstractValue::Turtle(t) => {
                    let method = match (t.local_class, t.pending_fields.as_slice()) {
                        (Some(c), [name]) => self.program.find_method(c, name),
                        _ => None,
                    };
                    match method {
                        Some(f) if user.is_none() => {
                            let mut receiver = t.clone();
                            receiver.pending_fields.clear();
                            user = Some((f, Some(receiver)));
                        }
                        Some(_) => {}
                        None => api.push(t.clone()),
                    }
                }
                AbstractValue::Function(f) if user.is_none() => user = Some((*f, None)),
                AbstractValue::Class(c) if class.is_none() => class = Some(*c),
                _ => {}
            }
        }
        if let Some((f, receiver)) = user {
            return self.call_user(f, receiver, args, kwargs, range);
        }
        if let Some(c) = class {
            return self.construct(c, args, kwargs, range);
        }
        if api.is_empty() {
            return AbstractValue::Unknown;
        }
        let label = api.iter().map(TurtleValue::effective_label).min().unwrap();
        let id = self.call_node(&label, range);
        for t in &api {
            let receiver = !t.pending_fields.is_empty() || self.kind_of(t.origin) != Some(NodeKind::Import);
            if receiver {
                self.edge(t.origin, id, EdgeKind::FlowsTo, Some(Ordinal::RECEIVER));
            }
        }
        self.emit_args(id, args, kwargs);
        AbstractValue::Turtle(TurtleValue::new(id, label))
    }

    fn call_node(&mut self, label: &TurtlePath, range: TextRange) -> NodeId {
        let id = self.intern(key(range, NodeKind::Call), NodeKind::Call);
        self.ensure(id, NodeKind::Call, Some(label.clone()), Some(range));
        self.trace.call(id);
        id
    }

    fn emit_args(&mut self, call: NodeId, args: &Args, kwargs: &Kwargs) {
        for (ord, v) in args {
            self.flow_into(call, v, ord);
        }
        for (name, v) in kwargs {
            self.flow_into(call, v, &Ordinal::Keyword(name.clone()));
        }
    }

    fn qualified_label(qualified: &str) -> TurtlePath {
        TurtlePath::from_dotted(qualified).unwrap_or_else(|| TurtlePath::single(qualified))
    }

    fn call_user(
        &mut self,
        fid: FuncId,
        receiver: Option<TurtleValue>,
        args: &Args,
        kwargs: &Kwargs,
        range: TextRange,
    ) -> AbstractValue {
        let label = Self::qualified_label(&self.program.funcs[fid].qualified);
        let id = self.call_node(&label, range);
        if let Some(r) = &receiver {
            self.edge(r.origin, id, EdgeKind::FlowsTo, Some(Ordinal::RECEIVER));
        }
        self.emit_args(id, args, kwargs);
        self.inline(fid, receiver.map(AbstractValue::Turtle), args, kwargs)
    }

    fn construct(&mut self, cid: ClassId, args: &Args, kwargs: &Kwargs, range: TextRange) -> AbstractValue {
        let label = Self::qualified_label(&self.program.classes[cid].qualified);
        let id = self.call_node(&label, range);
        self.emit_args(id, args, kwargs);
        let mut instance = TurtleValue::new(id, label);
        instance.local_class = Some(cid);
        if let Some(init) = self.program.find_method(cid, "__init__") {
            self.inline(init, Some(AbstractValue::Turtle(instance.clone())), args, kwargs);
        }
        AbstractValue::Turtle(instance)
    }

    /// Context-insensitive inlining of a user function body.
    fn inline(&mut self, fid: FuncId, receiver: Option<AbstractValue>, args: &Args, kwargs: &Kwargs) -> AbstractValue {
        if self.depth >= INLINE_DEPTH || self.active.contains(&fid) || self.timed_out {
            return AbstractValue::Unknown;
        }
        let program = self.program;
        let f = &program.funcs[fid];
        let module = self.env.module_view();
        let saved = std::mem::replace(&mut self.env, module);
        self.env.push_frame();

        let mut positional: Vec<&str> = f.positional().collect();
        let mut values: BTreeMap<String, AbstractValue> = BTreeMap::new();
        let bound_receiver = match f.method_kind {
            MethodKind::Instance => receiver,
            MethodKind::ClassMethod => f.class.map(AbstractValue::Class),
            MethodKind::Plain | MethodKind::Static => None,
        };
        if let Some(r) = bound_receiver {
            if !positional.is_empty() {
                values.insert(positional.remove(0).to_owned(), r);
            }
        }
        for (p, (_, v)) in positional.iter().zip(args) {
            values.insert((*p).to_owned(), v.clone());
        }
        for (name, v) in kwargs {
            if positional.contains(&name.as_str()) || f.keyword_only().any(|k| k == name) {
                values.insert(name.clone(), v.clone());
            }
        }
        for p in f.params() {
            let v = values.remove(&p).unwrap_or(AbstractValue::Unknown);
            self.env.bind(&p, v);
        }

        self.active.push(fid);
        self.depth += 1;
        self.returns.push(Vec::new());
        self.exec_block(f.body);
        let returned = self.returns.pop().unwrap_or_default();
        self.depth -= 1;
        self.active.pop();

        let module = self.env.outermost().clone();
        self.env = saved;
        self.env.replace_outermost(module);

        let mut it = returned.into_iter();
        match it.next() {
            None => AbstractValue::Unknown,
            Some(first) => it.fold(first, |acc, v| AbstractValue::join(&acc, &v)),
        }
    }
}

fn literal(c: &ast::Constant) -> Option<Literal> {
    let (value, datatype) = match c {
        ast::Constant::None => ("None".to_owned(), Datatype::None),
        ast::Constant::Bool(b) => (b.to_string(), Datatype::Boolean),
        ast::Constant::Str(s) => (s.clone(), Datatype::String),
        ast::Constant::Int(i) => (i.to_string(), Datatype::Integer),
        ast::Constant::Float(f) => (format_double(*f), Datatype::Double),
        _ => return None,
    };
    Some(Literal { value, datatype })
}

fn format_double(f: f64) -> String {
    if f.is_nan() {
        "NaN".to_owned()
    } else if f.is_infinite() {
        if f > 0.0 { "INF" } else { "-INF" }.to_owned()
    } else if f == f.trunc() && f.abs() < 1e16 {
        format!("{f:.1}")
    } else {
        format!("{f}")
    }
}
