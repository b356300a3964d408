//! Closure and restoration against fixpoint/filter oracles, and the
//! end-to-end within-compliance trends on the seeded mismatch fixture.

use std::collections::{BTreeMap, BTreeSet};

use ontokg_core::fixtures;
use ontokg_core::matching::MatchConfig;
use ontokg_core::rdf::{parse, vocab, Format, Graph, GraphRole, Term, Triple};
use ontokg_core::reshape::mismatch::{generate_mismatch_fixture, MismatchSpec};
use ontokg_core::reshape::{find_super_closure, restore, within_compliance, ClosureKind};

fn brick(n: &str) -> Term {
    Term::iri(format!("https://brickschema.org/schema/Brick#{n}")).unwrap()
}

/// Naive iterate-until-stable closure over subclass triples.
fn fixpoint_closure_oracle(matched: &BTreeSet<Term>, onto: &Graph, predicate: &str) -> BTreeSet<Term> {
    let mut closure = matched.clone();
    loop {
        let mut grew = false;
        for t in onto.triples() {
            if t.predicate.as_iri() == Some(predicate)
                && closure.contains(&t.subject)
                && t.object.is_iri()
                && closure.insert(t.object.clone())
            {
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    closure
}

#[test]
fn leaf_sensor_closure_equals_fixpoint_oracle() {
    let onto = fixtures::brick_ahu_ontology();
    let matched: BTreeSet<Term> = [brick("Supply_Air_Temperature_Sensor")].into_iter().collect();
    let got = find_super_closure(&matched, &onto, ClosureKind::Class);
    let expected = fixpoint_closure_oracle(&matched, &onto, vocab::RDFS_SUBCLASS_OF);
    assert_eq!(got, expected);
    assert_eq!(
        got,
        [
            brick("Supply_Air_Temperature_Sensor"),
            brick("Temperature_Sensor"),
            brick("Sensor"),
            brick("Point"),
        ]
        .into_iter()
        .collect::<BTreeSet<Term>>()
    );
}

/// Independent filter with the same predicate rules: subject kept, IRI
/// objects kept-or-vocabulary, one level of blank chasing all-or-nothing.
fn restore_filter_oracle(
    kept: &BTreeSet<Term>,
    onto: &Graph,
) -> BTreeSet<Triple> {
    let ok = |o: &Term| match o {
        Term::Iri(_) => kept.contains(o) || o.is_vocab(),
        Term::Literal { .. } => true,
        Term::Blank(_) => false,
    };
    let mut out = BTreeSet::new();
    for t in onto.triples() {
        if !kept.contains(&t.subject) {
            continue;
        }
        if let Term::Blank(_) = &t.object {
            let group: Vec<&Triple> = onto.triples().filter(|g| g.subject == t.object).collect();
            if group.iter().all(|g| ok(&g.object)) {
                out.insert(t.clone());
                out.extend(group.into_iter().cloned());
            }
        } else if ok(&t.object) {
            out.insert(t.clone());
        }
    }
    out
}

#[test]
fn restore_equals_brute_force_filter_on_partial_keep() {
    let onto = fixtures::brick_ahu_ontology();
    // 12 of the 27 entities
    let kept_classes: BTreeSet<Term> = [
        "AHU",
        "HVAC_Equipment",
        "Equipment",
        "Temperature_Sensor",
        "Sensor",
        "Point",
        "Supply_Fan",
        "Fan",
        "Room",
        "Location",
    ]
    .into_iter()
    .map(brick)
    .collect();
    let kept_properties: BTreeSet<Term> = ["hasPoint", "hasPart"].into_iter().map(brick).collect();
    let re = restore(&kept_classes, &kept_properties, &onto);
    let kept: BTreeSet<Term> = kept_classes.union(&kept_properties).cloned().collect();
    let expected = restore_filter_oracle(&kept, &onto);
    let got: BTreeSet<Triple> = re.triples().cloned().collect();
    assert_eq!(got, expected);
    // the AHU restriction survives because hasPoint and Temperature_Sensor are kept
    assert!(got.iter().any(|t| t.subject.is_blank()));
}

#[test]
fn reshape_is_sound_and_reaches_every_entity() {
    let onto = fixtures::brick_ahu_ontology();
    let provider = fixtures::synonym_vectors();
    let spec = MismatchSpec {
        n_exact: 4,
        n_typo: 3,
        n_synonym: 3,
        n_structural: 2,
        seed: 7,
    };
    let fx = generate_mismatch_fixture(&onto, &spec).unwrap();
    let out = within_compliance(&fx.kg, &onto, &MatchConfig::default(), Some(&provider)).unwrap();

    // soundness: no invented triples
    for t in out.reshaped.graph.triples() {
        assert!(onto.contains(t), "invented triple {t}");
    }

    // H1 reachability: every kept entity is a match target or an ancestor of
    // one, reachable through subclass/subproperty edges
    let targets: BTreeSet<Term> = out.matches.iter().map(|m| m.target.clone()).collect();
    let ancestors_c = fixpoint_closure_oracle(&targets, &onto, vocab::RDFS_SUBCLASS_OF);
    let ancestors_p = fixpoint_closure_oracle(&targets, &onto, vocab::RDFS_SUBPROPERTY_OF);
    for entity in out.reshaped.kept_entities() {
        assert!(
            ancestors_c.contains(&entity) || ancestors_p.contains(&entity),
            "{entity} is not reachable from any match target"
        );
    }

    // provenance covers every kept entity
    for entity in out.reshaped.kept_entities() {
        assert!(out.reshaped.provenance.contains_key(&entity));
    }
}

#[test]
fn closure_minimality_no_unjustified_entities() {
    let onto = fixtures::brick_ahu_ontology();
    let matched: BTreeSet<Term> = [brick("Supply_Fan")].into_iter().collect();
    let closure = find_super_closure(&matched, &onto, ClosureKind::Class);
    // removing any non-matched member must break some member's ancestor chain,
    // i.e. every member lies on a path from the match to a root
    for candidate in &closure {
        if matched.contains(candidate) {
            continue;
        }
        let without: BTreeSet<Term> = closure.iter().filter(|t| *t != candidate).cloned().collect();
        let re_closed = fixpoint_closure_oracle(&matched, &onto, vocab::RDFS_SUBCLASS_OF);
        assert!(
            re_closed.contains(candidate),
            "{candidate} is in the closure but not derivable"
        );
        assert!(without.len() < re_closed.len());
    }
}

#[test]
fn within_trends_across_levels() {
    let onto = fixtures::brick_ahu_ontology();
    let provider = fixtures::synonym_vectors();
    let spec = MismatchSpec {
        n_exact: 4,
        n_typo: 3,
        n_synonym: 3,
        n_structural: 2,
        seed: 7,
    };
    let fx = generate_mismatch_fixture(&onto, &spec).unwrap();
    let mut last_rate = 0.0f64;
    let mut last_conf = f64::INFINITY;
    let mut last_kept = 0usize;
    for max_level in 1..=4u8 {
        let cfg = MatchConfig {
            max_level,
            ..MatchConfig::default()
        };
        let out = within_compliance(&fx.kg, &onto, &cfg, Some(&provider)).unwrap();
        assert!(out.report.matching_rate >= last_rate, "matching rate dropped");
        assert!(out.report.confidence <= last_conf, "confidence rose");
        assert!(out.report.counts.kept >= last_kept, "kept entities dropped");
        assert!(
            out.report.used_entity_reshaped > out.report.used_entity_original,
            "reshaped rate must beat original at level {max_level}"
        );
        for rate in [
            out.report.matching_rate,
            out.report.confidence,
            out.report.used_entity_original,
            out.report.used_entity_reshaped,
        ] {
            assert!((0.0..=1.0).contains(&rate));
        }
        last_rate = out.report.matching_rate;
        last_conf = out.report.confidence;
        last_kept = out.report.counts.kept;
    }
}

#[test]
fn verbatim_kg_scores_perfectly() {
    let kg_text = r#"
@prefix brick: <https://brickschema.org/schema/Brick#> .
brick:AHU brick:hasPoint brick:Temperature_Sensor .
brick:AHU brick:hasPart brick:Supply_Fan .
brick:AHU brick:feeds brick:HVAC_Zone .
"#;
    let kg = parse(kg_text, Format::TurtleSubset, GraphRole::Kg).unwrap();
    let onto = fixtures::brick_ahu_ontology();
    let out = within_compliance(&kg, &onto, &MatchConfig { max_level: 1, ..MatchConfig::default() }, None).unwrap();
    assert_eq!(out.report.matching_rate, 1.0);
    assert_eq!(out.report.confidence, 1.0);
    assert!(!out.report.vacuous);
    assert!(out.matches.iter().all(|m| m.level == 1));
}

#[test]
fn zero_matches_is_vacuous_not_fatal() {
    let kg = parse(
        "<http://x.org/q1> <http://x.org/zzz> <http://x.org/q2> .",
        Format::NTriples,
        GraphRole::Kg,
    )
    .unwrap();
    let onto = fixtures::brick_ahu_ontology();
    let cfg = MatchConfig {
        max_level: 1,
        ..MatchConfig::default()
    };
    let out = within_compliance(&kg, &onto, &cfg, None).unwrap();
    assert!(out.report.vacuous);
    assert_eq!(out.report.confidence, 1.0);
    assert!(out.reshaped.graph.is_empty());
    assert_eq!(out.unmatched.len(), 3);
}

#[test]
fn identity_reshape_when_everything_matches() {
    let onto = fixtures::brick_ahu_ontology();
    // match every declared entity directly
    let schema = ontokg_core::extract::find_classes_and_properties(&onto);
    let re = restore(&schema.classes, &schema.properties, &onto);
    let expected: BTreeSet<Triple> = onto.triples().cloned().collect();
    let got: BTreeSet<Triple> = re.triples().cloned().collect();
    assert_eq!(got, expected);
}

#[test]
fn mismatch_exact_only_recovers_all_at_level_1() {
    let onto = fixtures::brick_ahu_ontology();
    let spec = MismatchSpec {
        n_exact: 5,
        n_typo: 0,
        n_synonym: 0,
        n_structural: 0,
        seed: 21,
    };
    let fx = generate_mismatch_fixture(&onto, &spec).unwrap();
    assert_eq!(fx.answer_key.len(), 5);
    let cfg = MatchConfig {
        max_level: 1,
        ..MatchConfig::default()
    };
    let out = within_compliance(&fx.kg, &onto, &cfg, None).unwrap();
    assert_eq!(out.report.matching_rate, 1.0);

    let by_source: BTreeMap<&Term, &Term> =
        out.matches.iter().map(|m| (&m.source, &m.target)).collect();
    for entry in &fx.answer_key {
        assert_eq!(by_source[&entry.planted], &entry.origin);
    }
}
