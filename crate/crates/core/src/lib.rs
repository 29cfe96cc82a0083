//! Knowledge graphs of Python programs: API-level dataflow and control flow
//! extracted by abstract interpretation, linked to documentation and forum
//! posts, plus next-call suggestion and its evaluation.

pub mod dataflow;
pub mod docs;
pub mod eval;
pub mod frontend;
pub mod graph;
pub mod link;
pub mod par;
pub mod serialize;
pub mod suggest;

pub use par::Execution;
