use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{program_iri, GraphEdge, GraphError, GraphNode, ProgramGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonGraphDoc {
    pub program: String,
    pub digest: String,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed graph document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("program IRI {program} does not match digest {digest}")]
    ProgramMismatch { program: String, digest: String },
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(#[from] GraphError),
}

/// Nodes sorted by id, edges by (src, dst, kind, ordinal).
pub fn to_json(graph: &ProgramGraph) -> JsonGraphDoc {
    JsonGraphDoc {
        program: graph.graph_id(),
        digest: graph.digest().to_owned(),
        nodes: graph.nodes().cloned().collect(),
        edges: graph.edges().cloned().collect(),
    }
}

pub fn from_json(doc: JsonGraphDoc) -> Result<ProgramGraph, SchemaError> {
    if doc.program != program_iri(&doc.digest) {
        return Err(SchemaError::ProgramMismatch {
            program: doc.program,
            digest: doc.digest,
        });
    }
    let mut g = ProgramGraph::new(doc.digest);
    for n in doc.nodes {
        if g.node(n.id).is_some() {
            return Err(SchemaError::DuplicateNode(n.id.to_string()));
        }
        g.add_node(n);
    }
    for e in doc.edges {
        g.merge_edge(e)?;
    }
    g.validate()?;
    Ok(g)
}

pub fn to_json_string(graph: &ProgramGraph) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(graph)).expect("graph documents serialize");
    s.push('\n');
    s
}

pub fn from_json_str(text: &str) -> Result<ProgramGraph, SchemaError> {
    from_json(serde_json::from_str(text)?)
}
