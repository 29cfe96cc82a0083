//! Linking analysis labels to documentation (longest known prefix) and to
//! forum posts (ranked text search).

mod posts;
mod search;

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use posts::{ingest_posts, Answer, FormatError, ForumPost, Ingested};
pub use search::{
    build_post_index, link_posts, tokenize_code, tokenize_prose, FieldWeights, PostIndex,
    MAX_MATCHES,
};

use crate::docs::{DocIndex, DocKind};
use crate::graph::{NodeKind, ProgramGraph, TurtlePath};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "outcome", content = "matchedPrefix")]
pub enum LinkOutcome {
    Direct,
    Partial(TurtlePath),
    Missed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkResult {
    pub query: TurtlePath,
    #[serde(flatten)]
    pub outcome: LinkOutcome,
}

pub fn link_path(path: &TurtlePath, index: &DocIndex) -> LinkResult {
    let outcome = match index.longest_prefix(path) {
        Some(p) if p == *path => LinkOutcome::Direct,
        Some(p) => LinkOutcome::Partial(p),
        None => LinkOutcome::Missed,
    };
    LinkResult {
        query: path.clone(),
        outcome,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkCounts {
    pub direct: usize,
    pub partial: usize,
    pub missed: usize,
}

impl LinkCounts {
    pub fn total(&self) -> usize {
        self.direct + self.partial + self.missed
    }

    fn add(&mut self, outcome: &LinkOutcome) {
        match outcome {
            LinkOutcome::Direct => self.direct += 1,
            LinkOutcome::Partial(_) => self.partial += 1,
            LinkOutcome::Missed => self.missed += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkStats {
    pub class: LinkCounts,
    pub function: LinkCounts,
    pub method: LinkCounts,
}

impl LinkStats {
    pub fn total(&self) -> LinkCounts {
        LinkCounts {
            direct: self.class.direct + self.function.direct + self.method.direct,
            partial: self.class.partial + self.function.partial + self.method.partial,
            missed: self.class.missed + self.function.missed + self.method.missed,
        }
    }

    fn bucket(&mut self, kind: DocKind) -> &mut LinkCounts {
        match kind {
            DocKind::Class => &mut self.class,
            DocKind::Function => &mut self.function,
            DocKind::Method => &mut self.method,
        }
    }
}

/// Whether a label is counted once per corpus or once per node carrying it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    #[default]
    UniqueLabels,
    Occurrences,
}

fn linkable(kind: NodeKind) -> bool {
    matches!(
        kind,
        NodeKind::Call | NodeKind::Read | NodeKind::Write | NodeKind::Import | NodeKind::TupleElement
    )
}

/// Labels of linkable nodes, in graph order, repeated per node.
pub fn corpus_labels<'a>(graphs: impl IntoIterator<Item = &'a ProgramGraph>) -> Vec<TurtlePath> {
    graphs
        .into_iter()
        .flat_map(|g| g.nodes())
        .filter(|n| linkable(n.kind))
        .filter_map(|n| n.label.clone())
        .collect()
}

pub fn link_stats<'a>(graphs: impl IntoIterator<Item = &'a ProgramGraph>, index: &DocIndex) -> LinkStats {
    link_stats_with(graphs, index, CountMode::UniqueLabels)
}

pub fn link_stats_with<'a>(
    graphs: impl IntoIterator<Item = &'a ProgramGraph>,
    index: &DocIndex,
    mode: CountMode,
) -> LinkStats {
    let labels = corpus_labels(graphs);
    let labels: Vec<TurtlePath> = match mode {
        CountMode::UniqueLabels => labels.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
        CountMode::Occurrences => labels,
    };
    let mut stats = LinkStats::default();
    for l in &labels {
        let r = link_path(l, index);
        let kind = match r.outcome {
            LinkOutcome::Direct => index.kind_of(l).unwrap_or(DocKind::Function),
            _ => DocKind::Function,
        };
        stats.bucket(kind).add(&r.outcome);
    }
    stats
}

/// A label linked to a forum post with the index's relevance score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ForumLink {
    pub qualified_name: TurtlePath,
    pub post_id: u64,
    pub score: f64,
}

pub const ANNOTATION_SAMPLE: usize = 100;

/// `n` links drawn uniformly without replacement, in input order.
pub fn sample_links(links: &[ForumLink], n: usize, seed: u64) -> Vec<ForumLink> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, links.len(), n.min(links.len())).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| links[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docs::{build_index, DocEntry};

    fn p(s: &str) -> TurtlePath {
        TurtlePath::from_dotted(s).unwrap()
    }

    fn entry(name: &str, kind: DocKind) -> DocEntry {
        DocEntry {
            qualified_name: p(name),
            kind,
            docstring: String::new(),
            params: Vec::new(),
            returns: None,
            bases: Vec::new(),
        }
    }

    fn pandas_index() -> DocIndex {
        build_index([entry("pandas", DocKind::Function), entry("pandas.read_csv", DocKind::Function)])
    }

    #[test]
    fn direct_partial_missed() {
        let idx = pandas_index();
        assert_eq!(link_path(&p("pandas.read_csv"), &idx).outcome, LinkOutcome::Direct);
        assert_eq!(
            link_path(&p("pandas.read_csv.merge"), &idx).outcome,
            LinkOutcome::Partial(p("pandas.read_csv"))
        );
        assert_eq!(link_path(&p("numpy.array"), &idx).outcome, LinkOutcome::Missed);
    }

    #[test]
    fn link_result_json_shape() {
        let r = link_path(&p("pandas.read_csv.merge"), &pandas_index());
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"query":["pandas","read_csv","merge"],"outcome":"partial","matchedPrefix":["pandas","read_csv"]}"#
        );
    }

    #[test]
    fn empty_corpus_counts_nothing() {
        let stats = link_stats(std::iter::empty(), &pandas_index());
        assert_eq!(stats, LinkStats::default());
    }

    #[test]
    fn sampler_is_seeded_and_bounded() {
        let links: Vec<ForumLink> = (0..500)
            .map(|i| ForumLink {
                qualified_name: p("a"),
                post_id: i,
                score: 1.0,
            })
            .collect();
        let a = sample_links(&links, ANNOTATION_SAMPLE, 7);
        assert_eq!(a.len(), 100);
        assert_eq!(a, sample_links(&links, ANNOTATION_SAMPLE, 7));
        assert_ne!(a, sample_links(&links, ANNOTATION_SAMPLE, 8));
        assert_eq!(sample_links(&links[..3], 100, 1).len(), 3);
    }
}
