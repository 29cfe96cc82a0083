//! Documentation, signatures and class hierarchies extracted from library
//! sources without importing them.

mod index;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rustpython_parser::ast::{self, Ranged};
use serde::{Deserialize, Serialize};

pub use index::{build_index, DocIndex, DocsError};

use crate::frontend::{collect_imports, SyntaxTree};
use crate::graph::TurtlePath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocKind {
    Class,
    Function,
    Method,
}

impl DocKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocKind::Class => "class",
            DocKind::Function => "function",
            DocKind::Method => "method",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DocParam {
    pub name: String,
    pub has_default: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseRef {
    Resolved(TurtlePath),
    /// Source text of a base expression that could not be resolved.
    Unresolved(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DocEntry {
    pub qualified_name: TurtlePath,
    pub kind: DocKind,
    #[serde(default)]
    pub docstring: String,
    #[serde(default)]
    pub params: Vec<DocParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub returns: Option<String>,
    #[serde(default)]
    pub bases: Vec<BaseRef>,
}

/// Dotted module name of a source file relative to a library root:
/// `sklearn/svm/_base.py` is `sklearn.svm._base`, `sklearn/svm/__init__.py`
/// is `sklearn.svm`.
pub fn module_name(relative: &Path) -> Option<TurtlePath> {
    let mut parts: Vec<String> = relative
        .parent()?
        .components()
        .map(|c| c.as_os_str().to_str().map(str::to_owned))
        .collect::<Option<_>>()?;
    let stem = relative.file_stem()?.to_str()?;
    if stem != "__init__" {
        parts.push(stem.to_owned());
    }
    TurtlePath::new(parts)
}

/// One entry per module-level def and class, and per def or class nested
/// in a class.
pub fn extract_docs(module: &TurtlePath, tree: &SyntaxTree) -> Vec<DocEntry> {
    let is_package = Path::new(tree.file().as_ref())
        .file_name()
        .is_some_and(|n| n == "__init__.py");
    let mut scope = Scope {
        module,
        is_package,
        imports: HashMap::new(),
        local: BTreeSet::new(),
        tree,
    };
    for b in collect_imports(tree) {
        if b.is_resolvable() {
            scope.imports.insert(b.local_name.clone(), (b.level, b.qualified_path));
        }
    }
    collect_local_names(tree.suite(), &mut scope.local);
    let mut out = Vec::new();
    scope.walk(tree.suite(), module, false, &mut out);
    out
}

fn collect_local_names(body: &[ast::Stmt], out: &mut BTreeSet<String>) {
    for stmt in body {
        match stmt {
            ast::Stmt::ClassDef(c) => {
                out.insert(c.name.to_string());
            }
            ast::Stmt::FunctionDef(f) => {
                out.insert(f.name.to_string());
            }
            ast::Stmt::If(i) => {
                collect_local_names(&i.body, out);
                collect_local_names(&i.orelse, out);
            }
            ast::Stmt::Try(t) => {
                collect_local_names(&t.body, out);
                collect_local_names(&t.orelse, out);
            }
            _ => {}
        }
    }
}

struct Scope<'a> {
    module: &'a TurtlePath,
    is_package: bool,
    imports: HashMap<String, (u32, TurtlePath)>,
    local: BTreeSet<String>,
    tree: &'a SyntaxTree,
}

impl Scope<'_> {
    fn walk(&self, body: &[ast::Stmt], prefix: &TurtlePath, in_class: bool, out: &mut Vec<DocEntry>) {
        for stmt in body {
            match stmt {
                ast::Stmt::FunctionDef(f) => {
                    out.push(self.function(prefix, f.name.as_str(), &f.args, f.returns.as_deref(), &f.body, in_class))
                }
                ast::Stmt::AsyncFunctionDef(f) => {
                    out.push(self.function(prefix, f.name.as_str(), &f.args, f.returns.as_deref(), &f.body, in_class))
                }
                ast::Stmt::ClassDef(c) => {
                    let name = prefix.extended(c.name.as_str());
                    let bases = c.bases.iter().filter_map(|b| self.resolve_base(b)).collect();
                    out.push(DocEntry {
                        qualified_name: name.clone(),
                        kind: DocKind::Class,
                        docstring: docstring(&c.body),
                        params: Vec::new(),
                        returns: None,
                        bases,
                    });
                    self.walk(&c.body, &name, true, out);
                }
                ast::Stmt::If(i) => {
                    self.walk(&i.body, prefix, in_class, out);
                    self.walk(&i.orelse, prefix, in_class, out);
                }
                ast::Stmt::Try(t) => {
                    self.walk(&t.body, prefix, in_class, out);
                    self.walk(&t.orelse, prefix, in_class, out);
                }
                _ => {}
            }
        }
    }

    fn function(
        &self,
        prefix: &TurtlePath,
        name: &str,
        args: &ast::Arguments,
        returns: Option<&ast::Expr>,
        body: &[ast::Stmt],
        in_class: bool,
    ) -> DocEntry {
        let text = |e: &ast::Expr| self.tree.text(e.range()).to_owned();
        let mut params = Vec::new();
        for a in args.posonlyargs.iter().chain(&args.args) {
            params.push(DocParam {
                name: a.def.arg.to_string(),
                has_default: a.default.is_some(),
                annotation: a.def.annotation.as_deref().map(text),
            });
        }
        if let Some(v) = &args.vararg {
            params.push(DocParam {
                name: format!("*{}", v.arg),
                has_default: false,
                annotation: v.annotation.as_deref().map(text),
            });
        }
        for a in &args.kwonlyargs {
            params.push(DocParam {
                name: a.def.arg.to_string(),
                has_default: a.default.is_some(),
                annotation: a.def.annotation.as_deref().map(text),
            });
        }
        if let Some(v) = &args.kwarg {
            params.push(DocParam {
                name: format!("**{}", v.arg),
                has_default: false,
                annotation: v.annotation.as_deref().map(text),
            });
        }
        DocEntry {
            qualified_name: prefix.extended(name),
            kind: if in_class { DocKind::Method } else { DocKind::Function },
            docstring: docstring(body),
            params,
            returns: returns.map(text),
            bases: Vec::new(),
        }
    }

    /// `None` for `object`, which every class extends anyway.
    fn resolve_base(&self, base: &ast::Expr) -> Option<BaseRef> {
        let raw = self.tree.text(base.range()).to_owned();
        let Some(parts) = dotted(base) else {
            return Some(BaseRef::Unresolved(raw));
        };
        if parts.len() == 1 && parts[0] == "object" {
            return None;
        }
        if let Some((level, path)) = self.imports.get(&parts[0]) {
            let Some(anchor) = self.anchor(*level) else {
                return Some(BaseRef::Unresolved(raw));
            };
            let full = anchor
                .map_or_else(|| path.clone(), |a| a.concat(path.components()))
                .concat(&parts[1..]);
            return Some(BaseRef::Resolved(full));
        }
        if self.local.contains(&parts[0]) {
            return Some(BaseRef::Resolved(self.module.concat(&parts)));
        }
        Some(BaseRef::Unresolved(raw))
    }

    /// Package a relative import of `level` dots starts from. `Some(None)`
    /// for absolute imports, `None` when the dots climb above the root.
    fn anchor(&self, level: u32) -> Option<Option<TurtlePath>> {
        if level == 0 {
            return Some(None);
        }
        let package_len = if self.is_package {
            self.module.len()
        } else {
            self.module.len().checked_sub(1)?
        };
        let keep = package_len.checked_sub(level as usize - 1)?;
        self.module.prefix(keep).map(Some)
    }
}

fn dotted(e: &ast::Expr) -> Option<Vec<String>> {
    match e {
        ast::Expr::Name(n) => Some(vec![n.id.to_string()]),
        ast::Expr::Attribute(a) => {
            let mut v = dotted(&a.value)?;
            v.push(a.attr.to_string());
            Some(v)
        }
        _ => None,
    }
}

fn docstring(body: &[ast::Stmt]) -> String {
    match body.first() {
        Some(ast::Stmt::Expr(e)) => match &*e.value {
            ast::Expr::Constant(c) => match &c.value {
                ast::Constant::Str(s) => s.clone(),
                _ => String::new(),
            },
            _ => String::new(),
        },
        _ => String::new(),
    }
}

/// Subclass relations whose base resolved to a qualified name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassHierarchy {
    pub pairs: BTreeSet<(TurtlePath, TurtlePath)>,
    pub unresolved: usize,
}

pub fn class_hierarchy<'a>(entries: impl IntoIterator<Item = &'a DocEntry>) -> ClassHierarchy {
    let mut h = ClassHierarchy::default();
    for e in entries {
        for b in &e.bases {
            match b {
                BaseRef::Resolved(p) => {
                    h.pairs.insert((e.qualified_name.clone(), p.clone()));
                }
                BaseRef::Unresolved(_) => h.unresolved += 1,
            }
        }
    }
    h
}
