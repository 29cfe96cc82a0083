mod common;

use common::oracles::*;

use codegraph::eval::{fold_assignment, kfold_eval};
use codegraph::graph::ProgramGraph;
use codegraph::suggest::{build_pathdb, build_pathdb_with, graph_pathdb, suggest, PathDb};
use codegraph::Execution;
use proptest::prelude::*;

fn synthetic_strategy() -> impl Strategy<Value = ProgramGraph> {
    (1usize..=15)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0..LABELS.len(), n),
                prop::collection::vec((0..n, 0..n, 0u8..3), 0..2 * n),
            )
        })
        .prop_map(|(labels, edges)| synthetic("p0", &labels, &edges))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pathdb_matches_brute_force(g in synthetic_strategy(), max_len in 1usize..=3) {
        prop_assert_eq!(as_map(&graph_pathdb(&g, max_len)), brute_db(&g, max_len));
    }

    #[test]
    fn pathdb_is_additive(a in synthetic_strategy(), b in synthetic_strategy()) {
        let b = synthetic_relabel(b, "p1");
        let whole = build_pathdb(&[a.clone(), b.clone()], 3);
        let mut parts = graph_pathdb(&a, 3);
        parts.merge(graph_pathdb(&b, 3));
        prop_assert_eq!(as_map(&whole), as_map(&parts));
    }

    #[test]
    fn every_key_prefix_is_a_key(g in synthetic_strategy()) {
        let db = graph_pathdb(&g, 3);
        for (k, _) in db.entries() {
            prop_assert!(k.len() == 1 || db.contains(&k[..k.len() - 1]));
        }
    }
}

fn synthetic_relabel(g: ProgramGraph, digest: &str) -> ProgramGraph {
    let mut out = ProgramGraph::new(digest);
    for n in g.nodes() {
        out.add_node(n.clone());
    }
    for e in g.edges() {
        out.merge_edge(e.clone()).unwrap();
    }
    out
}

#[test]
fn parallel_build_equals_sequential() {
    let graphs = corpus20();
    let seq = build_pathdb_with(&graphs, 3, Execution::Sequential);
    let par = build_pathdb_with(&graphs, 3, Execution::Parallel);
    assert_eq!(as_map(&seq), as_map(&par));
    assert_eq!(seq.provenance(), par.provenance());
    let corpus = common::corpus_graphs();
    assert_eq!(
        kfold_eval(&corpus, 10, 3, 3, Execution::Sequential).unwrap(),
        kfold_eval(&corpus, 10, 3, 3, Execution::Parallel).unwrap()
    );
}

// ---- brute-force k-fold evaluation --------------------------------------

#[test]
fn kfold_matches_brute_force_exactly() {
    let graphs = corpus20();
    assert_eq!(fold_assignment(20, 10, 7), brute_folds(20, 10, 7));
    let reports = kfold_eval(&graphs, 10, 3, 7, Execution::Parallel).unwrap();
    let brute = brute_eval(&graphs, 10, 3, 7);
    assert_eq!(reports.len(), brute.len());
    for (r, (rows, f, w, a)) in reports.iter().zip(&brute) {
        assert_eq!(&r.per_fold, rows, "length {}", r.path_length);
        assert_eq!(r.found_fraction, *f);
        assert_eq!(r.with_successors_fraction, *w);
        assert_eq!(r.avg_successors, *a);
    }
    assert!(reports[0].per_fold.iter().any(|s| s.found > 0));
}

/// Per fold, every found path longer than one has its prefix found too.
fn found_prefix_violations(graphs: &[ProgramGraph], k: usize, seed: u64) -> usize {
    let folds = fold_assignment(graphs.len(), k, seed);
    let dbs: Vec<PathDb> = graphs.iter().map(|g| graph_pathdb(g, 3)).collect();
    let mut bad = 0;
    for f in 0..k {
        let mut train = PathDb::default();
        for (db, _) in dbs.iter().zip(&folds).filter(|(_, &a)| a != f) {
            train.merge(db.clone());
        }
        for (db, _) in dbs.iter().zip(&folds).filter(|(_, &a)| a == f) {
            for (p, _) in db.entries() {
                if p.len() > 1 && train.contains(p) && !train.contains(&p[..p.len() - 1]) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

#[test]
fn found_longer_paths_have_found_prefixes() {
    assert_eq!(found_prefix_violations(&corpus20(), 10, 7), 0);
    assert_eq!(found_prefix_violations(&common::corpus_graphs(), 10, 0), 0);
}

#[test]
fn found_fraction_does_not_grow_with_length_on_fixture_corpus() {
    let corpus = common::corpus_graphs();
    assert_eq!(corpus.len(), 25);
    let reports = kfold_eval(&corpus, 10, 3, 0, Execution::Parallel).unwrap();
    let fractions: Vec<f64> = reports.iter().map(|r| r.found_fraction.unwrap()).collect();
    assert!(fractions.windows(2).all(|w| w[0] >= w[1]), "{fractions:?}");
    assert!(fractions[1] > 0.0, "{fractions:?}");
}

// ---- suggestion ranking --------------------------------------------------

#[test]
fn fit_ranks_before_transform_after_pca() {
    let db = build_pathdb(&pca_corpus(), 3);
    let got = suggest(&db, &["sklearn.decomposition.PCA".to_owned()], 10);
    assert_eq!(
        got,
        vec![
            ("sklearn.decomposition.PCA.fit".to_owned(), 9),
            ("sklearn.decomposition.PCA.transform".to_owned(), 1),
        ]
    );
    assert!(suggest(&db, &["no.such".to_owned()], 10).is_empty());
}

#[test]
fn pathdb_jsonl_round_trips_on_fixture_corpus() {
    let db = build_pathdb(&common::corpus_graphs(), 3);
    let text = db.to_jsonl();
    let back = PathDb::from_jsonl(&text).unwrap();
    assert_eq!(as_map(&back), as_map(&db));
    assert_eq!(back.to_jsonl(), text);
}
