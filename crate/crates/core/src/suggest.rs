//! Corpus-wide database of dataflow label paths and the labels that follow
//! them, queried for next-call suggestions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeKind, NodeId, NodeKind, ProgramGraph};
use crate::par::Execution;

pub const DEFAULT_MAX_LEN: usize = 3;
pub const MAX_PATH_LEN: usize = 5;

/// Rendered call labels along a flowsTo walk.
pub type LabelPath = Vec<String>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathDb {
    entries: BTreeMap<LabelPath, BTreeMap<String, u64>>,
    provenance: BTreeSet<String>,
}

#[derive(Debug, Error)]
pub enum PathDbError {
    #[error("path database line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct Row {
    path: LabelPath,
    successors: BTreeMap<String, u64>,
}

impl PathDb {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, path: &[String]) -> bool {
        self.entries.contains_key(path)
    }

    pub fn successors(&self, path: &[String]) -> Option<&BTreeMap<String, u64>> {
        self.entries.get(path)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&LabelPath, &BTreeMap<String, u64>)> {
        self.entries.iter()
    }

    /// Digests of the programs that contributed walks.
    pub fn provenance(&self) -> &BTreeSet<String> {
        &self.provenance
    }

    /// Sum of all successor counts.
    pub fn total_successors(&self) -> u64 {
        self.entries.values().flat_map(|s| s.values()).sum()
    }

    /// Multiset sum.
    pub fn merge(&mut self, other: PathDb) {
        for (path, succ) in other.entries {
            let slot = self.entries.entry(path).or_default();
            for (label, n) in succ {
                *slot.entry(label).or_insert(0) += n;
            }
        }
        self.provenance.extend(other.provenance);
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (path, successors) in &self.entries {
            let row = Row {
                path: path.clone(),
                successors: successors.clone(),
            };
            out.push_str(&serde_json::to_string(&row).expect("rows serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<PathDb, PathDbError> {
        let mut db = PathDb::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Row = serde_json::from_str(line).map_err(|e| PathDbError::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
            if row.path.is_empty() || row.successors.values().any(|&n| n == 0) {
                return Err(PathDbError::Format {
                    line: i + 1,
                    message: "empty path or zero count".into(),
                });
            }
            db.entries.insert(row.path, row.successors);
        }
        Ok(db)
    }
}

/// flowsTo adjacency among call nodes, ordinals collapsed.
fn call_adjacency(graph: &ProgramGraph) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let is_call = |id: NodeId| graph.node(id).is_some_and(|n| n.kind == NodeKind::Call);
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for n in graph.nodes().filter(|n| n.kind == NodeKind::Call) {
        adj.entry(n.id).or_default();
    }
    for e in graph.edges_of_kind(EdgeKind::FlowsTo) {
        if is_call(e.src) && is_call(e.dst) {
            adj.entry(e.src).or_default().insert(e.dst);
        }
    }
    adj
}

fn label(graph: &ProgramGraph, id: NodeId) -> String {
    graph
        .node(id)
        .and_then(|n| n.label.as_ref())
        .map(|l| l.to_string())
        .unwrap_or_default()
}

/// Walks of one graph: every simple call-node flowsTo walk of 1..=max_len
/// nodes becomes a key; each flowsTo edge from its last node to a call node
/// outside the walk adds one successor occurrence.
pub fn graph_pathdb(graph: &ProgramGraph, max_len: usize) -> PathDb {
    let adj = call_adjacency(graph);
    let mut db = PathDb::default();
    let mut walk = Vec::with_capacity(max_len);
    for &start in adj.keys() {
        walk.push(start);
        extend(graph, &adj, &mut walk, max_len, &mut db);
        walk.pop();
    }
    if !db.is_empty() {
        db.provenance.insert(graph.digest().to_owned());
    }
    db
}

fn extend(
    graph: &ProgramGraph,
    adj: &BTreeMap<NodeId, BTreeSet<NodeId>>,
    walk: &mut Vec<NodeId>,
    max_len: usize,
    db: &mut PathDb,
) {
    let key: LabelPath = walk.iter().map(|&id| label(graph, id)).collect();
    let last = *walk.last().expect("walks are nonempty");
    let next: Vec<NodeId> = adj[&last].iter().copied().filter(|m| !walk.contains(m)).collect();
    let slot = db.entries.entry(key).or_default();
    for &m in &next {
        *slot.entry(label(graph, m)).or_insert(0) += 1;
    }
    if walk.len() < max_len {
        for m in next {
            walk.push(m);
            extend(graph, adj, walk, max_len, db);
            walk.pop();
        }
    }
}

pub fn build_pathdb(graphs: &[ProgramGraph], max_len: usize) -> PathDb {
    build_pathdb_with(graphs, max_len, Execution::default())
}

pub fn build_pathdb_with(graphs: &[ProgramGraph], max_len: usize, exec: Execution) -> PathDb {
    let max_len = max_len.clamp(1, MAX_PATH_LEN);
    let parts = exec.map(graphs, |g| graph_pathdb(g, max_len));
    let mut db = PathDb::default();
    for p in parts {
        db.merge(p);
    }
    db
}

/// Up to `top_n` successors of `prefix`, most frequent first, ties broken
/// by label.
pub fn suggest(db: &PathDb, prefix: &[String], top_n: usize) -> Vec<(String, u64)> {
    let Some(succ) = db.successors(prefix) else {
        return Vec::new();
    };
    let mut ranked: Vec<(String, u64)> = succ.iter().map(|(l, &n)| (l.clone(), n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    ranked
}
