use std::collections::BTreeMap;

use thiserror::Error;

use super::{DocEntry, DocKind};
use crate::graph::TurtlePath;

#[derive(Debug, Error)]
pub enum DocsError {
    #[error("doc index line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct TrieNode {
    children: BTreeMap<String, TrieNode>,
    terminal: bool,
}

impl TrieNode {
    fn insert(&mut self, path: &TurtlePath) {
        let mut node = self;
        for c in path.components() {
            node = node.children.entry(c.clone()).or_default();
        }
        node.terminal = true;
    }

    fn depth(&self) -> usize {
        self.children.values().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }
}

/// Documentation entries keyed by rendered qualified name, with a trie over
/// path components for longest-prefix queries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocIndex {
    entries: BTreeMap<String, DocEntry>,
    trie: TrieNode,
    duplicates: usize,
}

/// Later entries with an already-seen qualified name replace earlier ones.
pub fn build_index(entries: impl IntoIterator<Item = DocEntry>) -> DocIndex {
    let mut index = DocIndex::default();
    for e in entries {
        let key = e.qualified_name.to_string();
        index.trie.insert(&e.qualified_name);
        if index.entries.insert(key.clone(), e).is_some() {
            log::warn!("duplicate documentation entry {key}; keeping the later one");
            index.duplicates += 1;
        }
    }
    index
}

impl DocIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of entries overwritten during the build.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Longest key, in path components.
    pub fn depth(&self) -> usize {
        self.trie.depth()
    }

    pub fn get(&self, path: &TurtlePath) -> Option<&DocEntry> {
        self.entries.get(&path.to_string())
    }

    pub fn kind_of(&self, path: &TurtlePath) -> Option<DocKind> {
        self.get(path).map(|e| e.kind)
    }

    pub fn entries(&self) -> impl Iterator<Item = &DocEntry> {
        self.entries.values()
    }

    /// The longest key that is a prefix of `path` (possibly `path` itself).
    pub fn longest_prefix(&self, path: &TurtlePath) -> Option<TurtlePath> {
        let mut node = &self.trie;
        let mut best = None;
        for (i, c) in path.components().iter().enumerate() {
            match node.children.get(c) {
                Some(next) => {
                    node = next;
                    if node.terminal {
                        best = Some(i + 1);
                    }
                }
                None => break,
            }
        }
        best.and_then(|n| path.prefix(n))
    }

    /// One entry per line, sorted by qualified name.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            out.push_str(&serde_json::to_string(e).expect("doc entries serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<DocIndex, DocsError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: DocEntry = serde_json::from_str(line).map_err(|err| DocsError::Format {
                line: i + 1,
                message: err.to_string(),
            })?;
            entries.push(e);
        }
        Ok(build_index(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str) -> DocEntry {
        DocEntry {
            qualified_name: TurtlePath::from_dotted(name).unwrap(),
            kind: DocKind::Function,
            docstring: String::new(),
            params: Vec::new(),
            returns: None,
            bases: Vec::new(),
        }
    }

    fn p(s: &str) -> TurtlePath {
        TurtlePath::from_dotted(s).unwrap()
    }

    #[test]
    fn depth_of_two_level_index() {
        let idx = build_index([entry("pandas"), entry("pandas.read_csv")]);
        assert_eq!(idx.depth(), 2);
        assert_eq!(idx.len(), 2);
    }

    #[test]
    fn duplicates_overwrite_and_count() {
        let mut second = entry("a.b");
        second.docstring = "new".into();
        let idx = build_index([entry("a.b"), second]);
        assert_eq!(idx.len(), 1);
        assert_eq!(idx.duplicates(), 1);
        assert_eq!(idx.get(&p("a.b")).unwrap().docstring, "new");
    }

    #[test]
    fn longest_prefix_skips_non_terminals() {
        let idx = build_index([entry("a"), entry("a.b.c")]);
        assert_eq!(idx.longest_prefix(&p("a.b.c.d")), Some(p("a.b.c")));
        assert_eq!(idx.longest_prefix(&p("a.b")), Some(p("a")));
        assert_eq!(idx.longest_prefix(&p("z")), None);
    }

    #[test]
    fn jsonl_round_trip() {
        let idx = build_index([entry("b"), entry("a.x")]);
        let text = idx.to_jsonl();
        assert!(text.lines().next().unwrap().contains("\"a\",\"x\""));
        assert_eq!(DocIndex::from_jsonl(&text).unwrap(), idx);
        assert!(DocIndex::from_jsonl("{not json}\n").is_err());
    }
}
