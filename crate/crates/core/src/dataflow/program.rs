//! Definitions found in a file: functions, classes and the entry points
//! derived from them.

use std::collections::{BTreeMap, HashMap};

use rustpython_parser::ast::{self, Ranged};

use super::value::{ClassId, FuncId};
use crate::frontend::SyntaxTree;

/// A unit of analysis: the module body (`main`) or one defined function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryPoint {
    pub qualified_name: String,
    pub params: Vec<String>,
}

pub const MAIN_ENTRY: &str = "main";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MethodKind {
    Plain,
    Instance,
    Static,
    ClassMethod,
}

pub(crate) struct FuncInfo<'a> {
    pub qualified: String,
    pub args: &'a ast::Arguments,
    pub body: &'a [ast::Stmt],
    pub class: Option<ClassId>,
    pub method_kind: MethodKind,
}

impl FuncInfo<'_> {
    pub fn params(&self) -> Vec<String> {
        let a = self.args;
        let mut out: Vec<String> = a
            .posonlyargs
            .iter()
            .chain(&a.args)
            .map(|p| p.def.arg.to_string())
            .collect();
        out.extend(a.vararg.iter().map(|p| p.arg.to_string()));
        out.extend(a.kwonlyargs.iter().map(|p| p.def.arg.to_string()));
        out.extend(a.kwarg.iter().map(|p| p.arg.to_string()));
        out
    }

    /// Parameters that can be filled positionally.
    pub fn positional(&self) -> impl Iterator<Item = &str> {
        self.args
            .posonlyargs
            .iter()
            .chain(&self.args.args)
            .map(|p| p.def.arg.as_str())
    }

    pub fn keyword_only(&self) -> impl Iterator<Item = &str> {
        self.args.kwonlyargs.iter().map(|p| p.def.arg.as_str())
    }
}

pub(crate) struct ClassInfo {
    pub qualified: String,
    pub methods: BTreeMap<String, FuncId>,
    pub bases: Vec<ClassId>,
}

pub(crate) struct Program<'a> {
    pub funcs: Vec<FuncInfo<'a>>,
    pub classes: Vec<ClassInfo>,
    pub func_at: HashMap<u32, FuncId>,
    pub class_at: HashMap<u32, ClassId>,
}

impl<'a> Program<'a> {
    pub fn collect(tree: &'a SyntaxTree) -> Self {
        let mut p = Program {
            funcs: Vec::new(),
            classes: Vec::new(),
            func_at: HashMap::new(),
            class_at: HashMap::new(),
        };
        p.walk(tree.suite(), "", None);
        p
    }

    fn walk(&mut self, body: &'a [ast::Stmt], prefix: &str, class: Option<ClassId>) {
        use ast::Stmt::*;
        for stmt in body {
            match stmt {
                FunctionDef(f) => {
                    self.def(stmt, f.name.as_str(), &f.args, &f.body, &f.decorator_list, prefix, class)
                }
                AsyncFunctionDef(f) => {
                    self.def(stmt, f.name.as_str(), &f.args, &f.body, &f.decorator_list, prefix, class)
                }
                ClassDef(c) => {
                    let qualified = qualify(prefix, c.name.as_str());
                    let bases = c
                        .bases
                        .iter()
                        .filter_map(|b| match b {
                            ast::Expr::Name(n) => self.class_named(n.id.as_str()),
                            _ => None,
                        })
                        .collect();
                    let id = self.classes.len();
                    self.classes.push(ClassInfo {
                        qualified: qualified.clone(),
                        methods: BTreeMap::new(),
                        bases,
                    });
                    self.class_at.insert(stmt.range().start().to_u32(), id);
                    self.walk(&c.body, &qualified, Some(id));
                }
                For(s) => {
                    self.walk(&s.body, prefix, class);
                    self.walk(&s.orelse, prefix, class);
                }
                AsyncFor(s) => {
                    self.walk(&s.body, prefix, class);
                    self.walk(&s.orelse, prefix, class);
                }
                While(s) => {
                    self.walk(&s.body, prefix, class);
                    self.walk(&s.orelse, prefix, class);
                }
                If(s) => {
                    self.walk(&s.body, prefix, class);
                    self.walk(&s.orelse, prefix, class);
                }
                With(s) => self.walk(&s.body, prefix, class),
                AsyncWith(s) => self.walk(&s.body, prefix, class),
                Match(m) => m.cases.iter().for_each(|c| self.walk(&c.body, prefix, class)),
                Try(t) => self.walk_try(&t.body, &t.handlers, &t.orelse, &t.finalbody, prefix, class),
                TryStar(t) => {
                    self.walk_try(&t.body, &t.handlers, &t.orelse, &t.finalbody, prefix, class)
                }
                _ => {}
            }
        }
    }

    fn walk_try(
        &mut self,
        body: &'a [ast::Stmt],
        handlers: &'a [ast::ExceptHandler],
        orelse: &'a [ast::Stmt],
        finalbody: &'a [ast::Stmt],
        prefix: &str,
        class: Option<ClassId>,
    ) {
        self.walk(body, prefix, class);
        for ast::ExceptHandler::ExceptHandler(h) in handlers {
            self.walk(&h.body, prefix, class);
        }
        self.walk(orelse, prefix, class);
        self.walk(finalbody, prefix, class);
    }

    #[allow(clippy::too_many_arguments)]
    fn def(
        &mut self,
        stmt: &ast::Stmt,
        name: &str,
        args: &'a ast::Arguments,
        body: &'a [ast::Stmt],
        decorators: &[ast::Expr],
        prefix: &str,
        class: Option<ClassId>,
    ) {
        let qualified = qualify(prefix, name);
        let method_kind = match class {
            None => MethodKind::Plain,
            Some(_) => {
                let named = |d: &str| {
                    decorators
                        .iter()
                        .any(|e| matches!(e, ast::Expr::Name(n) if n.id.as_str() == d))
                };
                if named("staticmethod") {
                    MethodKind::Static
                } else if named("classmethod") {
                    MethodKind::ClassMethod
                } else {
                    MethodKind::Instance
                }
            }
        };
        let id = self.funcs.len();
        self.funcs.push(FuncInfo {
            qualified: qualified.clone(),
            args,
            body,
            class,
            method_kind,
        });
        self.func_at.insert(stmt.range().start().to_u32(), id);
        if let Some(c) = class {
            self.classes[c].methods.entry(name.to_owned()).or_insert(id);
        }
        self.walk(body, &qualified, None);
    }

    /// Most recent class with this simple name.
    fn class_named(&self, name: &str) -> Option<ClassId> {
        self.classes
            .iter()
            .rposition(|c| c.qualified.rsplit('.').next() == Some(name))
    }

    /// Method lookup through locally defined base classes.
    pub fn find_method(&self, class: ClassId, name: &str) -> Option<FuncId> {
        let mut stack = vec![class];
        let mut seen = 0;
        while let Some(c) = stack.pop() {
            seen += 1;
            if seen > 32 {
                break;
            }
            let info = &self.classes[c];
            if let Some(&f) = info.methods.get(name) {
                return Some(f);
            }
            stack.extend(info.bases.iter().rev());
        }
        None
    }

    pub fn entrypoints(&self) -> Vec<EntryPoint> {
        let mut out = vec![EntryPoint {
            qualified_name: MAIN_ENTRY.to_owned(),
            params: Vec::new(),
        }];
        out.extend(self.funcs.iter().map(|f| EntryPoint {
            qualified_name: f.qualified.clone(),
            params: f.params(),
        }));
        out
    }
}

fn qualify(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_owned()
    } else {
        format!("{prefix}.{name}")
    }
}

/// Entry points of a file: `main` first, then every function and method in
/// source order.
pub fn enumerate_entrypoints(tree: &SyntaxTree) -> Vec<EntryPoint> {
    Program::collect(tree).entrypoints()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, SourceFile};

    fn names(src: &str) -> Vec<String> {
        let tree = parse_source(&SourceFile::new("t.py", src)).unwrap();
        enumerate_entrypoints(&tree)
            .into_iter()
            .map(|e| e.qualified_name)
            .collect()
    }

    #[test]
    fn functions_and_methods() {
        assert_eq!(
            names("def f(): pass\nclass C:\n    def m(self): pass\n"),
            ["main", "f", "C.m"]
        );
    }

    #[test]
    fn nested_def() {
        assert_eq!(
            names("def f():\n    def g(): pass\n    return g\n"),
            ["main", "f", "f.g"]
        );
    }

    #[test]
    fn empty_file() {
        assert_eq!(names(""), ["main"]);
    }

    #[test]
    fn defs_under_compound_statements() {
        assert_eq!(
            names("if x:\n    def f(): pass\nelse:\n    def f(): pass\ntry:\n    pass\nexcept E:\n    async def h(): pass\n"),
            ["main", "f", "f", "h"]
        );
    }

    #[test]
    fn params_in_declaration_order() {
        let tree = parse_source(&SourceFile::new(
            "t.py",
            "def f(a, /, b, *args, c, **kw): pass\n",
        ))
        .unwrap();
        assert_eq!(enumerate_entrypoints(&tree)[1].params, ["a", "b", "args", "c", "kw"]);
    }

    #[test]
    fn inherited_method_lookup() {
        let tree = parse_source(&SourceFile::new(
            "t.py",
            "class A:\n    def m(self): pass\nclass B(A):\n    pass\n",
        ))
        .unwrap();
        let p = Program::collect(&tree);
        assert_eq!(p.find_method(1, "m"), Some(0));
        assert_eq!(p.find_method(1, "z"), None);
    }
}
