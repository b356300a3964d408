//! Matching levels cross-checked against independent oracles: a textbook DP
//! edit-distance matrix, a standalone cosine over the bundled vector file,
//! brute-force neighborhood enumeration, and the mismatch generator's answer
//! key.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ontokg_core::extract::{find_classes_and_properties, find_concepts_and_relations, tokenize};
use ontokg_core::fixtures;
use ontokg_core::matching::{
    cascade, semantic_match, strsim, topological_match, total_confidence, MatchCandidate,
    MatchConfig,
};
use ontokg_core::rdf::{Direction, Term};
use ontokg_core::reshape::mismatch::{generate_mismatch_fixture, MismatchSpec};

/// Full-matrix textbook dynamic program, kept deliberately different from the
/// two-row implementation in the library.
fn dp_matrix_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        m[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            m[i][j] = (m[i - 1][j] + 1)
                .min(m[i][j - 1] + 1)
                .min(m[i - 1][j - 1] + cost);
        }
    }
    m[a.len()][b.len()]
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| (b'a' + rng.gen_range(0..6)) as char)
        .collect()
}

#[test]
fn levenshtein_agrees_with_dp_matrix_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let a = random_word(&mut rng, 24);
        let b = random_word(&mut rng, 24);
        let expected = dp_matrix_levenshtein(&a, &b);
        assert_eq!(strsim::levenshtein(&a, &b), expected, "{a:?} vs {b:?}");
        let max_len = a.chars().count().max(b.chars().count());
        let expected_sim = if max_len == 0 {
            1.0
        } else {
            1.0 - expected as f64 / max_len as f64
        };
        assert!(
            (strsim::normalized_similarity(&a, &b) - expected_sim).abs() < 1e-12,
            "{a:?} vs {b:?}"
        );
    }
}

#[test]
fn frozen_heuristic_example() {
    // d("supply air temp", "supply air temperature") = 7, max len 22
    let s = strsim::normalized_similarity("supply air temp", "supply air temperature");
    assert!((s - (1.0 - 7.0 / 22.0)).abs() < 1e-12);
}

/// Standalone cosine over the raw fixture file text, bypassing VectorFile.
fn file_cosine_oracle(token_a: &str, token_b: &str) -> f64 {
    let mut rows: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for line in fixtures::SYNONYM_VECTORS.lines().skip(1) {
        let mut fields = line.split_whitespace();
        let tok = fields.next().unwrap();
        rows.insert(tok, fields.map(|f| f.parse().unwrap()).collect());
    }
    let (a, b) = (&rows[token_a], &rows[token_b]);
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn semantic_point_capability_matches_file_oracle() {
    let provider = fixtures::synonym_vectors();
    let point = tokenize(&Term::iri("http://e.org/point").unwrap()).unwrap();
    let capability = tokenize(&Term::iri("http://e.org/capability").unwrap()).unwrap();
    let got = semantic_match(&point, &capability, &provider, 0.0)
        .unwrap()
        .confidence;
    let expected = (file_cosine_oracle("point", "capability") + 1.0) / 2.0;
    assert!((got - expected).abs() < 1e-12);
    // the designed relatedness of the pair
    assert!((got - 0.55).abs() < 1e-3, "got {got}");
}

#[test]
fn semantic_synonym_pairs_sit_in_the_level3_band() {
    let provider = fixtures::synonym_vectors();
    let bag = |name: &str| tokenize(&Term::iri(format!("http://e.org/{name}")).unwrap()).unwrap();
    for (a, b) in [("Supply_Fan", "feed_blower"), ("sensor", "detector")] {
        let got = semantic_match(&bag(a), &bag(b), &provider, 0.0).unwrap().confidence;
        let oracle = {
            // independent mean-vector cosine from raw file rows
            let tokens_a = bag(a).tokens;
            let tokens_b = bag(b).tokens;
            let mut rows: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for line in fixtures::SYNONYM_VECTORS.lines().skip(1) {
                let mut fields = line.split_whitespace();
                let tok = fields.next().unwrap().to_string();
                rows.insert(tok, fields.map(|f| f.parse().unwrap()).collect());
            }
            let mean = |tokens: &[String]| {
                let vs: Vec<&Vec<f64>> = tokens.iter().filter_map(|t| rows.get(t)).collect();
                let dim = vs[0].len();
                let mut m = vec![0.0; dim];
                for v in &vs {
                    for (acc, x) in m.iter_mut().zip(v.iter()) {
                        *acc += x;
                    }
                }
                m.into_iter().map(|x| x / vs.len() as f64).collect::<Vec<f64>>()
            };
            let (ma, mb) = (mean(&tokens_a), (mean(&tokens_b)));
            let dot: f64 = ma.iter().zip(&mb).map(|(x, y)| x * y).sum();
            let na = ma.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = mb.iter().map(|x| x * x).sum::<f64>().sqrt();
            (dot / (na * nb) + 1.0) / 2.0
        };
        assert!((got - oracle).abs() < 1e-12, "{a} vs {b}");
        assert!((got - 0.825).abs() < 1e-3, "{a} vs {b}: {got}");
    }
}

#[test]
fn topological_fixture_pair_equals_brute_force_enumeration() {
    let kg = fixtures::brick_ahu_kg();
    let onto = fixtures::brick_ahu_ontology();
    let a = Term::iri("http://example.org/bldg1#ahu_1").unwrap();
    let b = Term::iri("https://brickschema.org/schema/Brick#AHU").unwrap();
    // confirm matches for the types used by ahu_1's neighbors
    let brick = |n: &str| Term::iri(format!("https://brickschema.org/schema/Brick#{n}")).unwrap();
    let bldg = |n: &str| Term::iri(format!("http://example.org/bldg1#{n}")).unwrap();
    let confirmed: Vec<MatchCandidate> = [
        ("sat_1", "Supply_Air_Temperature_Sensor"),
        ("rat_1", "Return_Air_Temperature_Sensor"),
        ("supply_fan_1", "Supply_Fan"),
        ("room_101", "Room"),
    ]
    .into_iter()
    .map(|(s, t)| MatchCandidate {
        source: bldg(s),
        target: brick(t),
        level: 3,
        confidence: 1.0,
    })
    .collect();

    let got = topological_match(&a, &b, &kg, &onto, &confirmed, 0.0)
        .expect("overlap is defined")
        .confidence;

    // exhaustive neighbor-image enumeration, written from scratch
    let neighborhood = |g: &ontokg_core::rdf::Graph, n: &Term| -> BTreeSet<Term> {
        g.neighbors(n, Direction::Both)
            .into_iter()
            .map(|(_, t)| t)
            .filter(|t| t.is_iri() && !t.is_vocab())
            .collect()
    };
    let map: BTreeMap<Term, Term> = confirmed
        .iter()
        .map(|c| (c.source.clone(), c.target.clone()))
        .collect();
    let image: BTreeSet<Term> = neighborhood(&kg, &a)
        .into_iter()
        .filter_map(|n| map.get(&n).cloned())
        .collect();
    let nb = neighborhood(&onto, &b);
    let shared = image.intersection(&nb).count() as f64;
    let union = image.union(&nb).count() as f64;
    assert!((got - shared / union).abs() < 1e-15);
}

#[test]
fn topological_structural_plant_equals_brute_force_enumeration() {
    let onto = fixtures::brick_ahu_ontology();
    let spec = MismatchSpec {
        n_exact: 2,
        n_typo: 0,
        n_synonym: 0,
        n_structural: 1,
        seed: 7,
    };
    let fx = generate_mismatch_fixture(&onto, &spec).unwrap();
    let plant = fx
        .answer_key
        .iter()
        .find(|e| e.category.expected_level() == 4)
        .expect("one structural plant");

    // confirmed set: every level-1..3 plant maps to its origin
    let confirmed: Vec<MatchCandidate> = fx
        .answer_key
        .iter()
        .filter(|e| e.category.expected_level() < 4)
        .map(|e| MatchCandidate {
            source: e.planted.clone(),
            target: e.origin.clone(),
            level: e.category.expected_level(),
            confidence: 1.0,
        })
        .collect();
    let got = topological_match(&plant.planted, &plant.origin, &fx.kg, &onto, &confirmed, 0.0)
        .expect("defined overlap")
        .confidence;

    let neighborhood = |g: &ontokg_core::rdf::Graph, n: &Term| -> BTreeSet<Term> {
        g.neighbors(n, Direction::Both)
            .into_iter()
            .map(|(_, t)| t)
            .filter(|t| t.is_iri() && !t.is_vocab())
            .collect()
    };
    let map: BTreeMap<Term, Term> = confirmed
        .iter()
        .map(|c| (c.source.clone(), c.target.clone()))
        .collect();
    let image: BTreeSet<Term> = neighborhood(&fx.kg, &plant.planted)
        .into_iter()
        .filter_map(|n| map.get(&n).cloned())
        .collect();
    let nb = neighborhood(&onto, &plant.origin);
    let shared = image.intersection(&nb).count() as f64;
    let union = image.union(&nb).count() as f64;
    assert!((got - shared / union).abs() < 1e-15);
    assert!(got >= 0.5, "structural plants sit in the level-4 band, got {got}");
}

fn run_levels(spec: &MismatchSpec) -> BTreeMap<u8, Vec<MatchCandidate>> {
    let onto = fixtures::brick_ahu_ontology();
    let provider = fixtures::synonym_vectors();
    let fx = generate_mismatch_fixture(&onto, spec).unwrap();
    let inventory = find_concepts_and_relations(&fx.kg);
    let schema = find_classes_and_properties(&onto);
    let mut out = BTreeMap::new();
    for max_level in 1..=4u8 {
        let cfg = MatchConfig {
            max_level,
            ..MatchConfig::default()
        };
        let result = cascade(&inventory, &schema, &fx.kg, &onto, &cfg, Some(&provider));
        out.insert(max_level, result.matches);
    }
    out
}

#[test]
fn cascade_recovers_the_planted_answer_key_per_level() {
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
    let inventory = find_concepts_and_relations(&fx.kg);
    let schema = find_classes_and_properties(&onto);
    let cfg = MatchConfig::default();
    let result = cascade(&inventory, &schema, &fx.kg, &onto, &cfg, Some(&provider));
    let by_source: BTreeMap<&Term, &MatchCandidate> =
        result.matches.iter().map(|m| (&m.source, m)).collect();

    for entry in &fx.answer_key {
        let m = by_source
            .get(&entry.planted)
            .unwrap_or_else(|| panic!("{} was not recovered", entry.planted));
        assert_eq!(m.target, entry.origin, "wrong origin for {}", entry.planted);
        assert_eq!(
            m.level,
            entry.category.expected_level(),
            "wrong level for {}",
            entry.planted
        );
    }
    assert_eq!(result.matches.len(), fx.answer_key.len());
    assert!(result.unmatched.is_empty());
}

#[test]
fn raising_max_level_only_adds_matches() {
    let spec = MismatchSpec {
        n_exact: 3,
        n_typo: 2,
        n_synonym: 2,
        n_structural: 1,
        seed: 99,
    };
    let levels = run_levels(&spec);
    for max_level in 1..4u8 {
        let lower = &levels[&max_level];
        let higher = &levels[&(max_level + 1)];
        assert!(higher.len() >= lower.len(), "matched count must not drop");
        let higher_by_source: BTreeMap<&Term, &MatchCandidate> =
            higher.iter().map(|m| (&m.source, m)).collect();
        for m in lower {
            let h = higher_by_source[&m.source];
            assert_eq!(h.target, m.target, "lower-level match must persist");
            assert_eq!(h.level, m.level);
            assert_eq!(h.confidence, m.confidence, "confidence must not change");
        }
    }
}

#[test]
fn level1_candidates_satisfy_pure_token_equality() {
    let spec = MismatchSpec {
        n_exact: 5,
        n_typo: 0,
        n_synonym: 0,
        n_structural: 0,
        seed: 5,
    };
    let levels = run_levels(&spec);
    for m in &levels[&4] {
        if m.level == 1 {
            let a = tokenize(&m.source).unwrap();
            let b = tokenize(&m.target).unwrap();
            assert_eq!(a.tokens, b.tokens);
            assert_eq!(m.confidence, 1.0);
        }
    }
    assert_eq!(levels[&1].len(), 5, "five exact plants recovered at level 1");
}

#[test]
fn cascade_is_byte_deterministic() {
    let spec = MismatchSpec {
        n_exact: 3,
        n_typo: 2,
        n_synonym: 2,
        n_structural: 1,
        seed: 31,
    };
    let a = run_levels(&spec);
    let b = run_levels(&spec);
    assert_eq!(
        serde_json::to_vec(&a).unwrap(),
        serde_json::to_vec(&b).unwrap()
    );
}

#[test]
fn total_confidence_equals_resummed_report() {
    let spec = MismatchSpec {
        n_exact: 2,
        n_typo: 2,
        n_synonym: 2,
        n_structural: 1,
        seed: 11,
    };
    let levels = run_levels(&spec);
    let matches = &levels[&4];
    let got = total_confidence(matches);
    let resummed: f64 =
        matches.iter().map(|m| m.confidence).sum::<f64>() / matches.len() as f64;
    assert!((got.value - resummed).abs() < 1e-15);
    assert!(!got.vacuous);
}
