//! Parse/serialize round-trips, neighbor semantics and load monotonicity.

use std::collections::BTreeSet;

use proptest::prelude::*;

use ontokg_core::fixtures;
use ontokg_core::rdf::{
    count_ntriples_statements, parse, serialize, Direction, Format, Graph, GraphRole, Term,
    Triple,
};

#[test]
fn fixture_triple_counts_match_independent_counter() {
    for (text, expected) in [
        (fixtures::BRICK_AHU_ONTOLOGY, 62),
        (fixtures::BRICK_AHU_KG, 29),
        (fixtures::RECORE_ONTOLOGY, 30),
        (fixtures::RECORE_KG, 19),
    ] {
        let g = parse(text, Format::TurtleSubset, GraphRole::Kg).unwrap();
        assert_eq!(g.len(), expected);
        // independent statement counter over the canonical N-Triples form
        assert_eq!(count_ntriples_statements(&serialize(&g)), expected);
    }
}

#[test]
fn fixture_round_trips_are_isomorphic() {
    for text in [
        fixtures::BRICK_AHU_ONTOLOGY,
        fixtures::BRICK_AHU_KG,
        fixtures::RECORE_ONTOLOGY,
        fixtures::RECORE_KG,
        fixtures::FRAG_RECORE_GRAPH,
        fixtures::FRAG_BOT_SAREF_GRAPH,
        fixtures::FRAG_HAYSTACK_GRAPH,
    ] {
        let g = parse(text, Format::TurtleSubset, GraphRole::Kg).unwrap();
        let reparsed = parse(&serialize(&g), Format::NTriples, GraphRole::Kg).unwrap();
        assert!(g.isomorphic(&reparsed));
    }
}

#[test]
fn fixture_neighbors_agree_with_full_scan() {
    let g = fixtures::brick_ahu_kg();
    let node = Term::iri("http://example.org/bldg1#ahu_1").unwrap();
    let got = g.neighbors(&node, Direction::Both);
    // brute-force filter over all triples
    let mut expected = BTreeSet::new();
    for t in g.triples() {
        if t.subject == node {
            expected.insert((t.predicate.clone(), t.object.clone()));
        }
        if t.object == node {
            expected.insert((t.predicate.clone(), t.subject.clone()));
        }
    }
    assert!(!got.is_empty());
    assert_eq!(got, expected);
}

fn arb_iri() -> impl Strategy<Value = Term> {
    "[a-z]{1,6}".prop_map(|s| Term::iri(format!("http://e.org/{s}")).unwrap())
}

fn arb_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => arb_iri(),
        1 => "[a-z0-9]{1,4}".prop_map(Term::blank),
        1 => any::<String>().prop_map(Term::literal),
        1 => "[0-9]{1,3}".prop_map(|s| {
            Term::typed_literal(s, "http://www.w3.org/2001/XMLSchema#integer").unwrap()
        }),
    ]
}

fn arb_triple() -> impl Strategy<Value = Triple> {
    (
        prop_oneof![4 => arb_iri(), 1 => "[a-z0-9]{1,4}".prop_map(Term::blank)],
        arb_iri(),
        arb_term(),
    )
        .prop_map(|(s, p, o)| Triple::new(s, p, o).unwrap())
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    proptest::collection::vec(arb_triple(), 0..25).prop_map(|ts| {
        Graph::from_triples(ts, Default::default(), GraphRole::Kg)
    })
}

proptest! {
    #[test]
    fn round_trip_preserves_triple_sets(g in arb_graph()) {
        let nt = serialize(&g);
        let reparsed = parse(&nt, Format::NTriples, GraphRole::Kg).unwrap();
        prop_assert!(g.isomorphic(&reparsed));
        prop_assert_eq!(g.len(), count_ntriples_statements(&nt));
    }

    #[test]
    fn concatenated_documents_parse_to_the_union(a in arb_graph(), b in arb_graph()) {
        let joined = format!("{}{}", serialize(&a), serialize(&b));
        let parsed = parse(&joined, Format::NTriples, GraphRole::Kg).unwrap();
        prop_assert_eq!(parsed, a.union(&b));
    }

    #[test]
    fn both_neighbors_is_union_of_out_and_in(g in arb_graph(), pick in any::<prop::sample::Index>()) {
        let nodes: Vec<Term> = g.nodes().into_iter().collect();
        if nodes.is_empty() {
            return Ok(());
        }
        let node = &nodes[pick.index(nodes.len())];
        let both = g.neighbors(node, Direction::Both);
        let out = g.neighbors(node, Direction::Out);
        let inc = g.neighbors(node, Direction::In);
        let union: BTreeSet<_> = out.union(&inc).cloned().collect();
        prop_assert_eq!(both, union);
    }
}
