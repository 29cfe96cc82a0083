use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::text_size::TextRange;
use serde::{Deserialize, Serialize};

use super::{SourceLocation, SyntaxTree};
use crate::graph::TurtlePath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportKind {
    /// `import a.b` / `import a.b as c`
    Module,
    /// `from a import b`
    Member,
    /// `from a import *`; the names it brings in cannot be resolved.
    Wildcard,
}

/// One local name introduced by an import statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportBinding {
    pub local_name: String,
    pub qualified_path: TurtlePath,
    pub kind: ImportKind,
    /// Number of leading dots of a relative import (0 for absolute).
    pub level: u32,
    pub location: SourceLocation,
    pub(crate) range: TextRange,
}

impl ImportBinding {
    pub fn is_resolvable(&self) -> bool {
        self.kind != ImportKind::Wildcard
    }
}

/// Every import binding in the tree, including those nested in functions
/// and classes, in source order.
pub fn collect_imports(tree: &SyntaxTree) -> Vec<ImportBinding> {
    let mut out = Vec::new();
    walk(tree, tree.suite(), &mut out);
    out
}

fn walk(tree: &SyntaxTree, body: &[ast::Stmt], out: &mut Vec<ImportBinding>) {
    use ast::Stmt::*;
    for stmt in body {
        match stmt {
            Import(_) | ImportFrom(_) => out.extend(stmt_bindings(tree, stmt)),
            FunctionDef(f) => walk(tree, &f.body, out),
            AsyncFunctionDef(f) => walk(tree, &f.body, out),
            ClassDef(c) => walk(tree, &c.body, out),
            For(f) => {
                walk(tree, &f.body, out);
                walk(tree, &f.orelse, out);
            }
            AsyncFor(f) => {
                walk(tree, &f.body, out);
                walk(tree, &f.orelse, out);
            }
            While(w) => {
                walk(tree, &w.body, out);
                walk(tree, &w.orelse, out);
            }
            If(i) => {
                walk(tree, &i.body, out);
                walk(tree, &i.orelse, out);
            }
            With(w) => walk(tree, &w.body, out),
            AsyncWith(w) => walk(tree, &w.body, out),
            Match(m) => m.cases.iter().for_each(|c| walk(tree, &c.body, out)),
            Try(t) => {
                walk(tree, &t.body, out);
                for ast::ExceptHandler::ExceptHandler(h) in &t.handlers {
                    walk(tree, &h.body, out);
                }
                walk(tree, &t.orelse, out);
                walk(tree, &t.finalbody, out);
            }
            TryStar(t) => {
                walk(tree, &t.body, out);
                for ast::ExceptHandler::ExceptHandler(h) in &t.handlers {
                    walk(tree, &h.body, out);
                }
                walk(tree, &t.orelse, out);
                walk(tree, &t.finalbody, out);
            }
            _ => {}
        }
    }
}

/// Bindings introduced by a single import statement (empty for any other
/// statement).
pub(crate) fn stmt_bindings(tree: &SyntaxTree, stmt: &ast::Stmt) -> Vec<ImportBinding> {
    let mut out = Vec::new();
    match stmt {
        ast::Stmt::Import(imp) => {
            for alias in &imp.names {
                let dotted = TurtlePath::from_dotted(alias.name.as_str());
                let Some(dotted) = dotted else { continue };
                let (local_name, qualified_path) = match &alias.asname {
                    Some(asname) => (asname.to_string(), dotted),
                    None => {
                        let head = dotted.components()[0].clone();
                        (head.clone(), TurtlePath::single(head))
                    }
                };
                out.push(ImportBinding {
                    local_name,
                    qualified_path,
                    kind: ImportKind::Module,
                    level: 0,
                    location: tree.location(alias.range()),
                    range: alias.range(),
                });
            }
        }
        ast::Stmt::ImportFrom(imp) => {
            let level = imp.level.map(|l| l.to_u32()).unwrap_or(0);
            let module = imp
                .module
                .as_ref()
                .and_then(|m| TurtlePath::from_dotted(m.as_str()));
            for alias in &imp.names {
                let name = alias.name.as_str();
                if name == "*" {
                    if let Some(module) = &module {
                        out.push(ImportBinding {
                            local_name: "*".to_owned(),
                            qualified_path: module.clone(),
                            kind: ImportKind::Wildcard,
                            level,
                            location: tree.location(alias.range()),
                            range: alias.range(),
                        });
                    }
                    continue;
                }
                let qualified_path = match &module {
                    Some(m) => m.extended(name),
                    None => TurtlePath::single(name),
                };
                out.push(ImportBinding {
                    local_name: alias.asname.as_ref().map_or(name, |a| a.as_str()).to_owned(),
                    qualified_path,
                    kind: ImportKind::Member,
                    level,
                    location: tree.location(alias.range()),
                    range: alias.range(),
                });
            }
        }
        _ => {}
    }
    out
}
