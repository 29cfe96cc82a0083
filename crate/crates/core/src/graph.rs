//! The per-program knowledge-graph model: turtle paths, label IRIs, nodes,
//! typed edges and the named graph that owns them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frontend::SourceLocation;

pub const LABEL_NAMESPACE: &str = "http://purl.org/twc/graph4code/python/";
pub const PROGRAM_NAMESPACE: &str = "http://purl.org/twc/graph4code/program/";

/// Dotted access path accumulated on an abstract object, e.g.
/// `pandas.read_csv.merge`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct TurtlePath(Vec<String>);

impl TurtlePath {
    pub const MAX_COMPONENTS: usize = 20;
    /// Stands in for everything past the component cap.
    pub const OVERFLOW: &'static str = "…";

    /// `None` when `components` is empty or contains an empty string.
    pub fn new(components: Vec<String>) -> Option<Self> {
        if components.is_empty() || components.iter().any(String::is_empty) {
            return None;
        }
        let mut path = TurtlePath(Vec::with_capacity(components.len()));
        for c in components {
            path.push(c);
        }
        Some(path)
    }

    pub fn single(component: impl Into<String>) -> Self {
        TurtlePath(vec![component.into()])
    }

    pub fn from_dotted(dotted: &str) -> Option<Self> {
        Self::new(dotted.split('.').map(str::to_owned).collect())
    }

    pub fn components(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_capped(&self) -> bool {
        self.0.len() == Self::MAX_COMPONENTS && self.0.last().is_some_and(|c| c == Self::OVERFLOW)
    }

    fn push(&mut self, component: String) {
        if self.is_capped() {
            return;
        }
        if self.0.len() < Self::MAX_COMPONENTS {
            self.0.push(component);
        } else {
            self.0[Self::MAX_COMPONENTS - 1] = Self::OVERFLOW.to_owned();
        }
    }

    pub fn extended(&self, component: impl Into<String>) -> Self {
        let mut out = self.clone();
        out.push(component.into());
        out
    }

    pub fn concat<'a>(&self, tail: impl IntoIterator<Item = &'a String>) -> Self {
        tail.into_iter().fold(self.clone(), |p, c| p.extended(c.as_str()))
    }

    /// `true` when `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &TurtlePath) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// The first `n` components; `None` for `n == 0` or past the end.
    pub fn prefix(&self, n: usize) -> Option<TurtlePath> {
        (n >= 1 && n <= self.0.len()).then(|| TurtlePath(self.0[..n].to_vec()))
    }

    pub fn last(&self) -> &str {
        self.0.last().map(String::as_str).unwrap_or_default()
    }
}

impl fmt::Display for TurtlePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

impl TryFrom<Vec<String>> for TurtlePath {
    type Error = String;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        if v.len() > Self::MAX_COMPONENTS {
            return Err(format!("turtle path longer than {} components", Self::MAX_COMPONENTS));
        }
        TurtlePath::new(v).ok_or_else(|| "empty turtle path or component".to_owned())
    }
}

impl From<TurtlePath> for Vec<String> {
    fn from(p: TurtlePath) -> Self {
        p.0
    }
}

const IRI_ESCAPE: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

/// The shared label node of a qualified name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelIri(String);

impl LabelIri {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn local_name(&self) -> &str {
        self.0.strip_prefix(LABEL_NAMESPACE).unwrap_or(&self.0)
    }
}

impl fmt::Display for LabelIri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn label_iri(path: &TurtlePath) -> LabelIri {
    let rendered = path.to_string();
    LabelIri(format!(
        "{LABEL_NAMESPACE}{}",
        utf8_percent_encode(&rendered, IRI_ESCAPE)
    ))
}

pub fn program_iri(digest: &str) -> String {
    format!("{PROGRAM_NAMESPACE}{digest}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Call,
    Read,
    Write,
    Import,
    Constant,
    TupleElement,
    SyntheticParam,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Call => "call",
            NodeKind::Read => "read",
            NodeKind::Write => "write",
            NodeKind::Import => "import",
            NodeKind::Constant => "constant",
            NodeKind::TupleElement => "tuple-element",
            NodeKind::SyntheticParam => "synthetic-param",
        }
    }
}

/// 80-bit node identifier, rendered as 20 lowercase hex chars.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId([u8; 10]);

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({self})")
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bytes = [0u8; 10];
        if s.len() != 20 || s.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(format!("node id must be 20 lowercase hex chars, got {s:?}"));
        }
        hex::decode_to_slice(s, &mut bytes).map_err(|e| e.to_string())?;
        Ok(NodeId(bytes))
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Deterministic id of the node produced by instruction `instruction_index`
/// of `entrypoint` in the program with content digest `program_digest`.
pub fn make_node_id(
    program_digest: &str,
    entrypoint: &str,
    instruction_index: u64,
    kind: NodeKind,
) -> NodeId {
    let mut h = Sha256::new();
    for part in [program_digest.as_bytes(), entrypoint.as_bytes()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.update(instruction_index.to_le_bytes());
    h.update(kind.as_str().as_bytes());
    let digest = h.finalize();
    let mut id = [0u8; 10];
    id.copy_from_slice(&digest[..10]);
    NodeId(id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Integer,
    Double,
    Boolean,
    None,
}

/// A literal constant in lexical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub value: String,
    pub datatype: Datatype,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphNode {
    pub id: NodeId,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<TurtlePath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<SourceLocation>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub value_names: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_index: Option<u32>,
}

impl GraphNode {
    pub fn new(id: NodeId, kind: NodeKind) -> Self {
        Self {
            id,
            kind,
            label: None,
            location: None,
            value_names: BTreeSet::new(),
            constant: None,
            element_index: None,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        use NodeKind::*;
        match self.kind {
            Call | Read | Write | Import => {
                if self.label.is_none() || self.location.is_none() {
                    return Err(format!("{} node needs label and location", self.kind.as_str()));
                }
            }
            Constant => {
                if self.constant.is_none() || self.label.is_some() {
                    return Err("constant node needs a value and no label".into());
                }
            }
            TupleElement | SyntheticParam => {
                if self.label.is_none() {
                    return Err(format!("{} node needs a label", self.kind.as_str()));
                }
            }
        }
        if self.kind != Constant && self.constant.is_some() {
            return Err("only constant nodes carry a value".into());
        }
        if (self.kind == TupleElement) != self.element_index.is_some() {
            return Err("elementIndex present iff tuple-element".into());
        }
        if let Some(loc) = &self.location {
            if !loc.is_well_formed() {
                return Err(format!("malformed location {loc}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EdgeKind {
    FlowsTo,
    ImmediatelyPrecedes,
    ConstantArg,
    Reads,
    Writes,
    HasElement,
    SubClassOf,
    About,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::FlowsTo => "flowsTo",
            EdgeKind::ImmediatelyPrecedes => "immediatelyPrecedes",
            EdgeKind::ConstantArg => "constantArg",
            EdgeKind::Reads => "reads",
            EdgeKind::Writes => "writes",
            EdgeKind::HasElement => "hasElement",
            EdgeKind::SubClassOf => "subClassOf",
            EdgeKind::About => "about",
        }
    }
}

/// Argument slot: 0 is the receiver, positional arguments count from 1,
/// keyword arguments carry their name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ordinal {
    Position(u32),
    Keyword(String),
}

impl Ordinal {
    pub const RECEIVER: Ordinal = Ordinal::Position(0);
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordinal::Position(p) => write!(f, "{p}"),
            Ordinal::Keyword(k) => f.write_str(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinal: Option<Ordinal>,
}

impl GraphEdge {
    pub fn new(src: NodeId, dst: NodeId, kind: EdgeKind) -> Self {
        Self {
            src,
            dst,
            kind,
            ordinal: None,
        }
    }

    pub fn with_ordinal(src: NodeId, dst: NodeId, kind: EdgeKind, ordinal: Ordinal) -> Self {
        Self {
            src,
            dst,
            kind,
            ordinal: Some(ordinal),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {kind} {src} -> {dst} references a node not in the graph")]
    UnknownEndpoint {
        src: NodeId,
        dst: NodeId,
        kind: &'static str,
    },
    #[error("node {id}: {reason}")]
    InvalidNode { id: NodeId, reason: String },
    #[error("edge {kind} {src} -> {dst}: {reason}")]
    InvalidEdge {
        src: NodeId,
        dst: NodeId,
        kind: &'static str,
        reason: String,
    },
}

/// One analyzed program: a named graph keyed by the source digest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProgramGraph {
    digest: String,
    nodes: BTreeMap<NodeId, GraphNode>,
    edges: BTreeSet<GraphEdge>,
}

impl ProgramGraph {
    pub fn new(digest: impl Into<String>) -> Self {
        Self {
            digest: digest.into(),
            ..Default::default()
        }
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn graph_id(&self) -> String {
        program_iri(&self.digest)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: NodeId) -> Option<&GraphNode> {
        self.nodes.get(&id)
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> Option<&mut GraphNode> {
        self.nodes.get_mut(&id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Inserts a node; an existing node with the same id is kept.
    pub fn add_node(&mut self, node: GraphNode) -> NodeId {
        let id = node.id;
        self.nodes.entry(id).or_insert(node);
        id
    }

    /// Set-semantics edge insertion.
    pub fn merge_edge(&mut self, edge: GraphEdge) -> Result<(), GraphError> {
        if !self.nodes.contains_key(&edge.src) || !self.nodes.contains_key(&edge.dst) {
            return Err(GraphError::UnknownEndpoint {
                src: edge.src,
                dst: edge.dst,
                kind: edge.kind.as_str(),
            });
        }
        self.edges.insert(edge);
        Ok(())
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn labels(&self) -> BTreeMap<NodeId, LabelIri> {
        self.nodes
            .values()
            .filter_map(|n| n.label.as_ref().map(|l| (n.id, label_iri(l))))
            .collect()
    }

    /// Full structural check of node and edge invariants.
    pub fn validate(&self) -> Result<(), GraphError> {
        for node in self.nodes.values() {
            node.check().map_err(|reason| GraphError::InvalidNode {
                id: node.id,
                reason,
            })?;
            if let Some(label) = &node.label {
                if label.len() > TurtlePath::MAX_COMPONENTS {
                    return Err(GraphError::InvalidNode {
                        id: node.id,
                        reason: "label exceeds the component cap".into(),
                    });
                }
            }
        }
        for edge in &self.edges {
            let (Some(src), Some(dst)) = (self.nodes.get(&edge.src), self.nodes.get(&edge.dst))
            else {
                return Err(GraphError::UnknownEndpoint {
                    src: edge.src,
                    dst: edge.dst,
                    kind: edge.kind.as_str(),
                });
            };
            check_edge(edge, src.kind, dst.kind).map_err(|reason| GraphError::InvalidEdge {
                src: edge.src,
                dst: edge.dst,
                kind: edge.kind.as_str(),
                reason,
            })?;
        }
        Ok(())
    }
}

fn check_edge(edge: &GraphEdge, src: NodeKind, dst: NodeKind) -> Result<(), String> {
    use NodeKind::*;
    let ordinal_allowed = matches!(edge.kind, EdgeKind::FlowsTo | EdgeKind::ConstantArg);
    if edge.ordinal.is_some() && !ordinal_allowed {
        return Err("only flowsTo and constantArg carry ordinals".into());
    }
    match edge.kind {
        EdgeKind::FlowsTo => {
            if edge.ordinal == Some(Ordinal::RECEIVER) && !matches!(dst, Call | Read | Write) {
                return Err("receiver flow must end at a call, read or write".into());
            }
            if dst == Constant {
                return Err("nothing flows into a constant".into());
            }
        }
        EdgeKind::ConstantArg => {
            if !matches!(src, Call | Write) || dst != Constant {
                return Err("constantArg goes from a call or write to a constant".into());
            }
        }
        EdgeKind::ImmediatelyPrecedes => {
            if src != Call || dst != Call {
                return Err("immediatelyPrecedes connects calls only".into());
            }
            if edge.src == edge.dst {
                return Err("immediatelyPrecedes is irreflexive".into());
            }
        }
        EdgeKind::HasElement => {
            if dst != TupleElement {
                return Err("hasElement ends at a tuple element".into());
            }
        }
        EdgeKind::Reads => {
            if dst != Read {
                return Err("reads ends at a read node".into());
            }
        }
        EdgeKind::Writes => {
            if dst != Write {
                return Err("writes ends at a write node".into());
            }
        }
        EdgeKind::SubClassOf | EdgeKind::About => {}
    }
    Ok(())
}
