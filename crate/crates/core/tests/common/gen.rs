//! Random valid graphs for serialization properties.

use std::sync::Arc;

use codegraph::frontend::SourceLocation;
use codegraph::graph::{
    make_node_id, Datatype, EdgeKind, GraphEdge, GraphNode, Literal, NodeKind, Ordinal, ProgramGraph, TurtlePath,
};
use proptest::prelude::*;

pub const KINDS: [NodeKind; 7] = [
    NodeKind::Call,
    NodeKind::Read,
    NodeKind::Write,
    NodeKind::Import,
    NodeKind::Constant,
    NodeKind::TupleElement,
    NodeKind::SyntheticParam,
];

pub const EDGE_KINDS: [EdgeKind; 8] = [
    EdgeKind::FlowsTo,
    EdgeKind::ImmediatelyPrecedes,
    EdgeKind::ConstantArg,
    EdgeKind::Reads,
    EdgeKind::Writes,
    EdgeKind::HasElement,
    EdgeKind::SubClassOf,
    EdgeKind::About,
];

#[derive(Debug, Clone)]
pub struct NodeSpec {
    kind: usize,
    label: Vec<String>,
    line: u32,
    col: u32,
    span: (u32, u32),
    names: Vec<String>,
    value: String,
    datatype: usize,
    index: u32,
}

pub fn node_spec() -> impl Strategy<Value = NodeSpec> {
    (
        0..KINDS.len(),
        prop::collection::vec("[a-z_][a-zA-Z0-9_]{0,5}", 1..4),
        (1u32..200, 1u32..80, 0u32..3, 0u32..40),
        prop::collection::vec("\\PC{0,6}", 0..3),
        ("\\PC{0,10}", 0usize..5, 0u32..4),
    )
        .prop_map(|(kind, label, (line, col, dl, dc), names, (value, datatype, index))| NodeSpec {
            kind,
            label,
            line,
            col,
            span: (dl, dc),
            names,
            value,
            datatype,
            index,
        })
}

pub fn build_node(i: usize, s: &NodeSpec) -> GraphNode {
    let kind = KINDS[s.kind];
    let mut n = GraphNode::new(make_node_id("rand", "main", i as u64, kind), kind);
    if kind != NodeKind::Constant {
        n.label = TurtlePath::new(s.label.clone());
    }
    if matches!(kind, NodeKind::Call | NodeKind::Read | NodeKind::Write | NodeKind::Import | NodeKind::Constant) {
        n.location = Some(SourceLocation {
            file: Arc::from("rand.py"),
            start_line: s.line,
            start_col: s.col,
            end_line: s.line + s.span.0,
            end_col: s.col + s.span.1,
        });
    }
    n.value_names = s.names.iter().cloned().collect();
    if kind == NodeKind::Constant {
        let datatype = [Datatype::String, Datatype::Integer, Datatype::Double, Datatype::Boolean, Datatype::None]
            [s.datatype];
        let value = match datatype {
            Datatype::String => s.value.clone(),
            Datatype::Integer => s.value.len().to_string(),
            Datatype::Double => format!("{}.5", s.value.len()),
            Datatype::Boolean => s.value.len().is_multiple_of(2).to_string(),
            Datatype::None => "None".into(),
        };
        n.constant = Some(Literal { value, datatype });
    }
    if kind == NodeKind::TupleElement {
        n.element_index = Some(s.index);
    }
    n
}

pub fn ordinal(choice: u8) -> Option<Ordinal> {
    match choice {
        0 => None,
        1 => Some(Ordinal::RECEIVER),
        2 | 3 => Some(Ordinal::Position(choice as u32 - 1)),
        _ => Some(Ordinal::Keyword("axis".into())),
    }
}

/// A random graph that passes validation: candidate edges that would break
/// an invariant are skipped.
pub fn random_graph() -> impl Strategy<Value = ProgramGraph> {
    (
        prop::collection::vec(node_spec(), 1..10),
        prop::collection::vec((0usize..10, 0usize..10, 0..EDGE_KINDS.len(), 0u8..5), 0..20),
    )
        .prop_map(|(specs, edges)| {
            let mut g = ProgramGraph::new("0123456789abcdef0123456789abcdef");
            let ids: Vec<_> = specs.iter().enumerate().map(|(i, s)| g.add_node(build_node(i, s))).collect();
            for (a, b, k, o) in edges {
                let (Some(&src), Some(&dst)) = (ids.get(a), ids.get(b)) else { continue };
                let edge = GraphEdge {
                    src,
                    dst,
                    kind: EDGE_KINDS[k],
                    ordinal: ordinal(o),
                };
                let mut trial = g.clone();
                trial.merge_edge(edge).unwrap();
                if trial.validate().is_ok() {
                    g = trial;
                }
            }
            g.validate().unwrap();
            g
        })
}

