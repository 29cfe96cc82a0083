use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};
use thiserror::Error;

use super::vocab::{self, g4c, schema, xsd};
use crate::docs::{BaseRef, DocEntry, DocKind};
use crate::graph::{
    label_iri, Datatype, EdgeKind, GraphError, GraphNode, Literal, NodeId, NodeKind, Ordinal,
    ProgramGraph,
};
use crate::link::{ForumLink, ForumPost};

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("invalid graph: {0}")]
    InvalidGraph(#[from] GraphError),
}

/// Characters that may not appear unescaped inside an IRIREF.
const IRI_FORBIDDEN: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'<')
    .add(b'>')
    .add(b'"')
    .add(b'{')
    .add(b'}')
    .add(b'|')
    .add(b'^')
    .add(b'`')
    .add(b'\\');

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Blank(String),
    /// Lexical form and datatype IRI; `None` is a simple (xsd:string) literal.
    Literal(String, Option<String>),
}

impl Term {
    pub fn iri(s: impl AsRef<str>) -> Term {
        Term::Iri(utf8_percent_encode(s.as_ref(), IRI_FORBIDDEN).to_string())
    }

    pub fn plain(s: impl Into<String>) -> Term {
        Term::Literal(s.into(), None)
    }

    pub fn typed(s: impl Into<String>, datatype: String) -> Term {
        Term::Literal(s.into(), Some(datatype))
    }

    fn integer(n: impl fmt::Display) -> Term {
        Term::typed(n.to_string(), xsd("integer"))
    }
}

fn escape_literal(s: &str, out: &mut String) {
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Blank(b) => write!(f, "_:{b}"),
            Term::Literal(lex, dt) => {
                let mut s = String::with_capacity(lex.len() + 2);
                s.push('"');
                escape_literal(lex, &mut s);
                s.push('"');
                if let Some(dt) = dt {
                    if dt != &xsd("string") {
                        s.push_str("^^<");
                        s.push_str(dt);
                        s.push('>');
                    }
                }
                f.write_str(&s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
    pub graph: String,
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} <{}> {} <{}> .",
            self.subject, self.predicate, self.object, self.graph
        )
    }
}

struct Sink {
    graph: String,
    quads: BTreeSet<Quad>,
}

impl Sink {
    fn new(graph: impl Into<String>) -> Self {
        Self {
            graph: graph.into(),
            quads: BTreeSet::new(),
        }
    }

    fn push(&mut self, subject: &Term, predicate: impl Into<String>, object: Term) {
        self.quads.insert(Quad {
            subject: subject.clone(),
            predicate: predicate.into(),
            object,
            graph: self.graph.clone(),
        });
    }
}

fn render(quads: impl IntoIterator<Item = Quad>) -> String {
    let mut out = String::new();
    for q in quads {
        let _ = writeln!(out, "{q}");
    }
    out
}

fn datatype_iri(d: Datatype) -> String {
    match d {
        Datatype::String => xsd("string"),
        Datatype::Integer => xsd("integer"),
        Datatype::Double => xsd("double"),
        Datatype::Boolean => xsd("boolean"),
        Datatype::None => g4c("NoneValue"),
    }
}

fn literal_term(l: &Literal) -> Term {
    Term::typed(l.value.clone(), datatype_iri(l.datatype))
}

fn ordinal_term(o: &Ordinal) -> Term {
    match o {
        Ordinal::Position(p) => Term::integer(p),
        Ordinal::Keyword(k) => Term::plain(k.clone()),
    }
}

fn kind_class(k: NodeKind) -> &'static str {
    match k {
        NodeKind::Call => "Call",
        NodeKind::Read => "Read",
        NodeKind::Write => "Write",
        NodeKind::Import => "Import",
        NodeKind::Constant => "Constant",
        NodeKind::TupleElement => "TupleElement",
        NodeKind::SyntheticParam => "Parameter",
    }
}

fn node_iri(graph: &str, id: NodeId) -> Term {
    Term::iri(format!("{graph}/{id}"))
}

fn emit_node(sink: &mut Sink, graph: &str, n: &GraphNode) {
    let s = node_iri(graph, n.id);
    sink.push(&s, vocab::RDF_TYPE, Term::iri(g4c(kind_class(n.kind))));
    if let Some(label) = &n.label {
        sink.push(&s, vocab::RDFS_LABEL, Term::plain(label.to_string()));
        sink.push(&s, g4c("label"), Term::iri(label_iri(label).as_str()));
        if n.kind == NodeKind::Call {
            sink.push(&s, schema("about"), Term::plain(label.last()));
        }
    }
    if let Some(loc) = &n.location {
        sink.push(&s, g4c("sourceFile"), Term::plain(loc.file.to_string()));
        sink.push(&s, g4c("firstLine"), Term::integer(loc.start_line));
        sink.push(&s, g4c("firstColumn"), Term::integer(loc.start_col));
        sink.push(&s, g4c("lastLine"), Term::integer(loc.end_line));
        sink.push(&s, g4c("lastColumn"), Term::integer(loc.end_col));
    }
    for v in &n.value_names {
        sink.push(&s, g4c("valueName"), Term::plain(v.clone()));
    }
    if let Some(c) = &n.constant {
        sink.push(&s, g4c("value"), literal_term(c));
    }
    if let Some(i) = n.element_index {
        sink.push(&s, g4c("elementIndex"), Term::integer(i));
    }
}

/// IRI of the node that carries an argument edge's ordinal.
fn reified_iri(graph: &str, src: NodeId, dst: NodeId, tag: &str, o: &Ordinal) -> Term {
    let slot = utf8_percent_encode(&o.to_string(), percent_encoding::NON_ALPHANUMERIC).to_string();
    Term::iri(format!("{graph}/{src}/{tag}/{dst}/{slot}"))
}

/// All quads of a program graph in the program's named graph, sorted.
pub fn graph_quads(graph: &ProgramGraph) -> Result<Vec<Quad>, SerializeError> {
    graph.validate()?;
    let gid = graph.graph_id();
    let mut sink = Sink::new(gid.clone());
    for n in graph.nodes() {
        emit_node(&mut sink, &gid, n);
    }
    for e in graph.edges() {
        let s = node_iri(&gid, e.src);
        let o = node_iri(&gid, e.dst);
        match e.kind {
            EdgeKind::FlowsTo => {
                sink.push(&s, g4c("flowsTo"), o.clone());
                if let Some(ord) = &e.ordinal {
                    let flow = reified_iri(&gid, e.src, e.dst, "flow", ord);
                    sink.push(&flow, vocab::RDF_TYPE, Term::iri(g4c("Flow")));
                    sink.push(&flow, g4c("flowSource"), s);
                    sink.push(&flow, g4c("flowTarget"), o);
                    sink.push(&flow, g4c("hasOrdinalPosition"), ordinal_term(ord));
                }
            }
            EdgeKind::ConstantArg => {
                let value = graph
                    .node(e.dst)
                    .and_then(|n| n.constant.as_ref())
                    .expect("validated constantArg target carries a value");
                sink.push(&s, g4c("constantArg"), literal_term(value));
                if let Some(ord) = &e.ordinal {
                    let arg = reified_iri(&gid, e.src, e.dst, "arg", ord);
                    sink.push(&arg, vocab::RDF_TYPE, Term::iri(g4c("ConstantArgument")));
                    sink.push(&arg, g4c("argumentOf"), s);
                    sink.push(&arg, g4c("argumentValue"), o);
                    sink.push(&arg, g4c("hasOrdinalPosition"), ordinal_term(ord));
                }
            }
            kind => sink.push(&s, g4c(kind.as_str()), o),
        }
    }
    Ok(sink.quads.into_iter().collect())
}

pub fn to_nquads(graph: &ProgramGraph) -> Result<String, SerializeError> {
    Ok(render(graph_quads(graph)?))
}

fn doc_class(k: DocKind) -> &'static str {
    match k {
        DocKind::Class => "Class",
        DocKind::Function => "Function",
        DocKind::Method => "Method",
    }
}

/// Documentation quads in the docstrings graph, subjects being label IRIs.
pub fn docs_to_nquads<'a>(entries: impl IntoIterator<Item = &'a DocEntry>) -> String {
    let mut sink = Sink::new(vocab::DOCSTRINGS_GRAPH);
    for e in entries {
        let iri = label_iri(&e.qualified_name);
        let s = Term::iri(iri.as_str());
        sink.push(&s, vocab::RDF_TYPE, Term::iri(g4c(doc_class(e.kind))));
        sink.push(&s, vocab::RDFS_LABEL, Term::plain(e.qualified_name.to_string()));
        if !e.docstring.trim().is_empty() {
            sink.push(&s, vocab::SKOS_DEFINITION, Term::plain(e.docstring.clone()));
        }
        for (i, p) in e.params.iter().enumerate() {
            let param = Term::iri(format!(
                "{}/param/{}",
                iri.as_str(),
                utf8_percent_encode(&p.name, percent_encoding::NON_ALPHANUMERIC)
            ));
            sink.push(&s, g4c("param"), param.clone());
            sink.push(&param, vocab::RDFS_LABEL, Term::plain(p.name.clone()));
            sink.push(&param, g4c("position"), Term::integer(i));
            sink.push(
                &param,
                g4c("isOptional"),
                Term::typed(p.has_default.to_string(), xsd("boolean")),
            );
            if let Some(a) = &p.annotation {
                sink.push(&param, g4c("annotation"), Term::plain(a.clone()));
            }
        }
        if let Some(r) = &e.returns {
            sink.push(&s, g4c("return"), Term::plain(r.clone()));
        }
        for b in &e.bases {
            match b {
                BaseRef::Resolved(p) => {
                    sink.push(&s, vocab::RDFS_SUBCLASS_OF, Term::iri(label_iri(p).as_str()))
                }
                BaseRef::Unresolved(raw) => {
                    sink.push(&s, g4c("unresolvedBase"), Term::plain(raw.clone()))
                }
            }
        }
    }
    render(sink.quads)
}

/// Forum quads: `schema:about` from each linked post to the label node, and
/// the post's title, question and answers. Links to posts missing from
/// `posts` produce only the about quad.
pub fn forum_links_to_nquads(links: &[ForumLink], posts: &[ForumPost]) -> String {
    let by_id: BTreeMap<u64, &ForumPost> = posts.iter().map(|p| (p.post_id, p)).collect();
    let mut sink = Sink::new(vocab::FORUM_GRAPH);
    let mut linked = BTreeSet::new();
    for l in links {
        let post = Term::iri(format!("{}{}", vocab::POST_NAMESPACE, l.post_id));
        sink.push(&post, schema("about"), Term::iri(label_iri(&l.qualified_name).as_str()));
        linked.insert(l.post_id);
    }
    for id in linked {
        let Some(p) = by_id.get(&id) else { continue };
        let post = Term::iri(format!("{}{}", vocab::POST_NAMESPACE, id));
        sink.push(&post, vocab::RDF_TYPE, Term::iri(schema("Question")));
        sink.push(&post, schema("name"), Term::plain(p.title.clone()));
        sink.push(&post, schema("text"), Term::plain(p.question_body.clone()));
        for a in &p.answers {
            let ans = Term::iri(format!("{}{}", vocab::ANSWER_NAMESPACE, a.answer_id));
            sink.push(&post, schema("suggestedAnswer"), ans.clone());
            sink.push(&ans, vocab::RDF_TYPE, Term::iri(schema("Answer")));
            sink.push(&ans, vocab::SIOC_CONTENT, Term::plain(a.body.clone()));
        }
    }
    render(sink.quads)
}
