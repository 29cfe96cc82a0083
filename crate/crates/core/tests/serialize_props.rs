mod common;

use common::gen::random_graph;

use codegraph::docs::build_index;
use codegraph::frontend::{parse_source, SourceFile};
use codegraph::link::{build_post_index, ingest_posts, link_posts};
use codegraph::serialize::{docs_to_nquads, forum_links_to_nquads, from_json_str, to_json_string, to_nquads};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn json_round_trip_is_identity(g in random_graph()) {
        let text = to_json_string(&g);
        let back = from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(to_json_string(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_graphs_serialize_to_valid_nquads(g in random_graph()) {
        let nq = to_nquads(&g).unwrap();
        common::check_nquads(&nq).map_err(TestCaseError::fail)?;
        prop_assert_eq!(to_nquads(&g).unwrap(), nq);
    }
}

#[test]
fn fixture_graphs_pass_the_grammar_and_round_trip() {
    let mut files = common::fixture_sources("corpus");
    files.extend(common::fixture_sources("pipeline").into_iter().filter(|f| parse_source(f).is_ok()));
    files.push(SourceFile::new("running_example.py", common::read_fixture("running_example.py")));
    for f in &files {
        let (_, g) = common::analyze_file(f);
        let nq = to_nquads(&g).unwrap();
        let n = common::check_nquads(&nq).unwrap_or_else(|e| panic!("{}: {e}", f.path().display()));
        assert!(n > 0 || g.is_empty());
        assert_eq!(nq, to_nquads(&common::analyze_file(f).1).unwrap());
        assert_eq!(from_json_str(&to_json_string(&g)).unwrap(), g);
    }
}

#[test]
fn docs_and_forum_outputs_pass_the_grammar() {
    let index = build_index(common::library_entries());
    let docs = docs_to_nquads(index.entries());
    assert!(common::check_nquads(&docs).unwrap() > 0);

    let posts = ingest_posts(&common::read_fixture("posts.jsonl")).unwrap().posts;
    let pindex = build_post_index(&posts);
    let links: Vec<_> = index.entries().flat_map(|e| link_posts(&e.qualified_name, &pindex, 10)).collect();
    assert!(!links.is_empty());
    let forum = forum_links_to_nquads(&links, &posts);
    assert!(common::check_nquads(&forum).unwrap() > 0);
}

#[test]
fn checker_rejects_malformed_statements() {
    for bad in [
        "<a:b> <p:q> \"x\" .",
        "<a:b> <p:q> \"x\" <g:h>",
        "<rel> <p:q> \"x\" <g:h> .",
        "<a:b> <p:q> \"x\ny\" <g:h> .",
        "<a b:c> <p:q> <o:o> <g:h> .",
        "<a:b> \"p\" <o:o> <g:h> .",
        "<a:b> <p:q> \"\\q\" <g:h> .",
    ] {
        assert!(common::check_quad_line(bad).is_err(), "{bad}");
    }
    assert!(common::check_quad_line("<a:b> <p:q> \"x\\u00e9\"^^<x:s> <g:h> .").is_ok());
}
