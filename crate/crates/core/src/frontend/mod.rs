//! Source intake: content digests, deduplication, parsing into a located
//! syntax tree, and import-binding resolution.

mod imports;
mod notebook;
mod tree;

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use md5::{Digest, Md5};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use imports::{collect_imports, ImportBinding, ImportKind};
pub use notebook::notebook_to_python;
pub use tree::{parse_source, SyntaxKind, SyntaxNode, SyntaxTree};

/// A corpus file with its MD5 content digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    path: PathBuf,
    content: Vec<u8>,
    digest: String,
}

impl SourceFile {
    pub fn new(path: impl Into<PathBuf>, content: impl Into<Vec<u8>>) -> Self {
        let content = content.into();
        let digest = content_digest(&content);
        Self {
            path: path.into(),
            content,
            digest,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        Ok(Self::new(path, std::fs::read(path)?))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn content(&self) -> &[u8] {
        &self.content
    }

    /// 32 lowercase hex characters.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn is_notebook(&self) -> bool {
        self.path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("ipynb"))
    }
}

pub fn content_digest(content: &[u8]) -> String {
    hex::encode(Md5::digest(content))
}

/// Keeps the first file for every distinct digest, in input order.
pub fn dedupe(files: Vec<SourceFile>) -> Vec<SourceFile> {
    let mut seen = std::collections::HashSet::new();
    files
        .into_iter()
        .filter(|f| seen.insert(f.digest.clone()))
        .collect()
}

/// A 1-based source span.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceLocation {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceLocation {
    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }

    pub fn contains(&self, other: &SourceLocation) -> bool {
        self.start() <= other.start() && other.end() <= self.end()
    }

    pub fn is_well_formed(&self) -> bool {
        self.start_line >= 1 && self.start_col >= 1 && self.start() <= self.end()
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}-{}:{}",
            self.file, self.start_line, self.start_col, self.end_line, self.end_col
        )
    }
}

/// Why a file could not be turned into a syntax tree.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{location}: syntax error: {message}")]
    Syntax {
        location: SourceLocation,
        message: String,
    },
    /// The file only parses under Python 2 rules (print statements, old
    /// `except E, e` clauses, backticks, ...).
    #[error("{location}: python 2 source is not supported: {message}")]
    Python2 {
        location: SourceLocation,
        message: String,
    },
    #[error("{path}: {message}")]
    Encoding { path: String, message: String },
    #[error("{path}: malformed notebook: {message}")]
    Notebook { path: String, message: String },
}

impl ParseError {
    /// Stable failure code used in run statistics.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "E_SYNTAX",
            ParseError::Python2 { .. } => "E_PY2",
            ParseError::Encoding { .. } => "E_ENCODING",
            ParseError::Notebook { .. } => "E_NOTEBOOK",
        }
    }
}

/// Maps byte offsets to 1-based (line, column) pairs, columns counted in chars.
#[derive(Debug, Clone)]
pub(crate) struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub(crate) fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Self { starts }
    }

    pub(crate) fn position(&self, text: &str, offset: usize) -> (u32, u32) {
        let offset = offset.min(text.len());
        let line = match self.starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.starts[line];
        let mut end = offset;
        while !text.is_char_boundary(end) {
            end -= 1;
        }
        let col = text[start..end].chars().count();
        (line as u32 + 1, col as u32 + 1)
    }
}
