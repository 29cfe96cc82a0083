use std::collections::{BTreeSet, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Duration;

use codegraph::dataflow::{analyze_program_with, AnalysisOptions};
use codegraph::frontend::{collect_imports, parse_source, ImportKind, SourceFile, SyntaxTree};
use codegraph::graph::ProgramGraph;
use serde::Serialize;
use walkdir::WalkDir;

use crate::error::CliError;

pub const SOURCE_EXTENSIONS: &[&str] = &["py", "ipynb"];

/// Files under the inputs, in a stable order: directories are walked with
/// entries sorted by name and keep paths relative to the directory; files
/// given directly keep their file name.
pub fn collect_inputs(inputs: &[PathBuf], extensions: &[&str]) -> Result<Vec<(PathBuf, PathBuf)>, CliError> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            for entry in WalkDir::new(input).sort_by_file_name() {
                let entry = entry.map_err(|e| CliError::Io {
                    path: input.clone(),
                    source: e.into(),
                })?;
                let p = entry.path();
                let wanted = p
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| extensions.contains(&e));
                if entry.file_type().is_file() && wanted {
                    let rel = p.strip_prefix(input).unwrap_or(p).to_path_buf();
                    out.push((p.to_path_buf(), rel));
                }
            }
        } else {
            let name = input.file_name().map_or_else(|| input.clone(), PathBuf::from);
            out.push((input.clone(), name));
        }
    }
    Ok(out)
}

fn display(rel: &Path) -> String {
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Failure {
    pub file: String,
    pub code: String,
    pub message: String,
}

/// Unique readable files plus the bookkeeping of the intake step.
pub struct Intake {
    pub files_seen: usize,
    pub duplicates: usize,
    pub unique: Vec<SourceFile>,
    pub unreadable: Vec<Failure>,
}

/// Reads every input and keeps the first file of each content digest.
pub fn intake(inputs: &[PathBuf]) -> Result<Intake, CliError> {
    let paths = collect_inputs(inputs, SOURCE_EXTENSIONS)?;
    let files_seen = paths.len();
    let mut seen = HashSet::new();
    let mut duplicates = 0;
    let mut unique = Vec::new();
    let mut unreadable = Vec::new();
    for (abs, rel) in paths {
        match std::fs::read(&abs) {
            Ok(bytes) => {
                let f = SourceFile::new(display(&rel), bytes);
                if seen.insert(f.digest().to_owned()) {
                    unique.push(f);
                } else {
                    duplicates += 1;
                }
            }
            Err(e) => unreadable.push(Failure {
                file: display(&rel),
                code: "E_IO".into(),
                message: e.to_string(),
            }),
        }
    }
    Ok(Intake {
        files_seen,
        duplicates,
        unique,
        unreadable,
    })
}

pub enum Outcome {
    Analyzed {
        tree: SyntaxTree,
        graph: ProgramGraph,
        /// Top-level packages of absolute imports.
        libraries: BTreeSet<String>,
    },
    ParseFailed(Failure),
    AnalysisFailed(Failure),
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "analysis panicked".into())
}

/// Parse and analyze one file; a panic is reported as an analysis failure.
pub fn process(file: &SourceFile, budget: Duration) -> Outcome {
    let name = file.path().to_string_lossy().into_owned();
    let fail = |code: &str, message: String| Failure {
        file: name.clone(),
        code: code.into(),
        message,
    };
    let tree = match parse_source(file) {
        Ok(t) => t,
        Err(e) => return Outcome::ParseFailed(fail(e.code(), e.to_string())),
    };
    let run = panic::catch_unwind(AssertUnwindSafe(|| {
        let imports = collect_imports(&tree);
        let libraries = imports
            .iter()
            .filter(|b| b.level == 0 && b.kind != ImportKind::Wildcard)
            .map(|b| b.qualified_path.components()[0].clone())
            .collect();
        let options = AnalysisOptions { budget };
        analyze_program_with(&tree, &imports, file.digest(), &options).map(|g| (g, libraries))
    }));
    match run {
        Ok(Ok((graph, libraries))) => Outcome::Analyzed {
            tree,
            graph,
            libraries,
        },
        Ok(Err(e)) => Outcome::AnalysisFailed(fail(e.code(), e.to_string())),
        Err(p) => Outcome::AnalysisFailed(fail("E_PANIC", panic_message(p.as_ref()))),
    }
}
