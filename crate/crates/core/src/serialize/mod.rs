//! RDF N-Quads and JSON output for program graphs, documentation entries
//! and forum links.

mod json;
mod nquads;

pub use json::{from_json, from_json_str, to_json, to_json_string, JsonGraphDoc, SchemaError};
pub use nquads::{
    docs_to_nquads, forum_links_to_nquads, graph_quads, to_nquads, Quad, SerializeError, Term,
};

pub mod vocab {
    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const SKOS_DEFINITION: &str = "http://www.w3.org/2004/02/skos/core#definition";
    pub const SCHEMA: &str = "http://schema.org/";
    pub const SIOC_CONTENT: &str = "http://rdfs.org/sioc/ns#content";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
    /// Toolkit terms: edge predicates, node classes, location properties.
    pub const ONTOLOGY: &str = "http://purl.org/twc/graph4code/ontology/";
    pub const DOCSTRINGS_GRAPH: &str = "http://purl.org/twc/graph4code/docstrings";
    pub const FORUM_GRAPH: &str = "http://purl.org/twc/graph4code/forum";
    pub const POST_NAMESPACE: &str = "http://purl.org/twc/graph4code/forum/post/";
    pub const ANSWER_NAMESPACE: &str = "http://purl.org/twc/graph4code/forum/answer/";

    pub fn g4c(local: &str) -> String {
        format!("{ONTOLOGY}{local}")
    }

    pub fn schema(local: &str) -> String {
        format!("{SCHEMA}{local}")
    }

    pub fn xsd(local: &str) -> String {
        format!("{XSD}{local}")
    }
}
