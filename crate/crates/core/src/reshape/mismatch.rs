//! Seeded generator of synthetic non-compliant KGs.
//!
//! Given an ontology it plants transformed copies of schema entities into a
//! fresh KG, one transformation category per cascade level: exact copies
//! (level 1), single-character typos (level 2), whole-name synonym
//! substitutions (level 3) and structurally-mirrored terms under gibberish
//! names (level 4). The answer key maps every planted term back to its
//! origin, independently of any matcher.
//!
//! Plants are calibrated against the default `MatchConfig` thresholds and the
//! bundled synonym vector vocabulary.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extract::{find_classes_and_properties, tokenize_name};
use crate::matching::strsim::normalized_similarity;
use crate::rdf::{vocab, Direction, Graph, GraphRole, Term, Triple};

pub const KG_NS: &str = "http://example.org/kg#";

const HEURISTIC_THRESHOLD: f64 = 0.75;
const TOPOLOGICAL_MIN: f64 = 0.5;
const TOPOLOGICAL_MAX: f64 = 0.79;

/// Token-level substitutions used by the synonym category. The partner words
/// carry designed similarity to their originals in the bundled vector file.
pub static SYNONYMS: &[(&str, &str)] = &[
    ("air", "breeze"),
    ("building", "structure"),
    ("damper", "shutter"),
    ("equipment", "device"),
    ("fan", "blower"),
    ("feeds", "serves"),
    ("floor", "storey"),
    ("flow", "stream"),
    ("has", "holds"),
    ("hvac", "climate"),
    ("location", "place"),
    ("part", "piece"),
    ("point", "spot"),
    ("return", "exhaust"),
    ("room", "chamber"),
    ("sensor", "detector"),
    ("setpoint", "goal"),
    ("supply", "feed"),
    ("temperature", "warmth"),
    ("valve", "tap"),
    ("zone", "area"),
];

pub fn synonym_of(token: &str) -> Option<&'static str> {
    SYNONYMS
        .iter()
        .find(|(orig, _)| *orig == token)
        .map(|(_, sub)| *sub)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MismatchSpec {
    pub n_exact: usize,
    pub n_typo: usize,
    pub n_synonym: usize,
    pub n_structural: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MismatchCategory {
    Exact,
    Typo,
    Synonym,
    Structural,
}

impl MismatchCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            MismatchCategory::Exact => "exact",
            MismatchCategory::Typo => "typo",
            MismatchCategory::Synonym => "synonym",
            MismatchCategory::Structural => "structural",
        }
    }

    pub fn parse(s: &str) -> Option<MismatchCategory> {
        match s {
            "exact" => Some(MismatchCategory::Exact),
            "typo" => Some(MismatchCategory::Typo),
            "synonym" => Some(MismatchCategory::Synonym),
            "structural" => Some(MismatchCategory::Structural),
            _ => None,
        }
    }

    /// The cascade level expected to recover this category.
    pub fn expected_level(&self) -> u8 {
        match self {
            MismatchCategory::Exact => 1,
            MismatchCategory::Typo => 2,
            MismatchCategory::Synonym => 3,
            MismatchCategory::Structural => 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlantedTerm {
    pub planted: Term,
    pub origin: Term,
    pub category: MismatchCategory,
}

#[derive(Debug, Clone)]
pub struct MismatchFixture {
    pub kg: Graph,
    pub answer_key: Vec<PlantedTerm>,
}

pub fn answer_key_to_tsv(key: &[PlantedTerm]) -> String {
    let mut out = String::new();
    for entry in key {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            entry.planted.as_iri().unwrap_or_default(),
            entry.origin.as_iri().unwrap_or_default(),
            entry.category.as_str()
        ));
    }
    out
}

pub fn parse_answer_key(text: &str) -> Result<Vec<PlantedTerm>> {
    let mut key = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Mapping {
                line: idx + 1,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let category = MismatchCategory::parse(fields[2]).ok_or(Error::Mapping {
            line: idx + 1,
            message: format!("unknown category '{}'", fields[2]),
        })?;
        key.push(PlantedTerm {
            planted: Term::iri(fields[0]).map_err(|e| Error::Mapping {
                line: idx + 1,
                message: e.to_string(),
            })?,
            origin: Term::iri(fields[1]).map_err(|e| Error::Mapping {
                line: idx + 1,
                message: e.to_string(),
            })?,
            category,
        });
    }
    Ok(key)
}

struct Plan {
    origin: Term,
    planted_local: String,
    category: MismatchCategory,
    is_class: bool,
    /// For structural plants: the origins whose planted images neighbor the
    /// planted term.
    mirrored: Vec<Term>,
}

/// Builds a deterministic synthetic KG plus its answer key.
pub fn generate_mismatch_fixture(onto: &Graph, spec: &MismatchSpec) -> Result<MismatchFixture> {
    let schema = find_classes_and_properties(onto);
    let requested = spec.n_exact + spec.n_typo + spec.n_synonym + spec.n_structural;
    if requested > schema.len() {
        return Err(Error::FixtureSpec(format!(
            "requested {requested} plants but the ontology declares only {} entities",
            schema.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool: Vec<Term> = schema.entities().into_iter().collect();
    pool.shuffle(&mut rng);

    let class_bags = kind_bags(&schema.classes);
    let property_bags = kind_bags(&schema.properties);
    let mut plans: Vec<Plan> = Vec::new();
    let mut used_locals: BTreeSet<String> = BTreeSet::new();

    // Structural plants first: they also consume support entities.
    let mut support_origins: BTreeSet<Term> = BTreeSet::new();
    let mut support_predicate: Option<Term> = None;
    let mut planned_structural = 0;
    if spec.n_structural > 0 {
        let neighborhoods: BTreeMap<Term, BTreeSet<Term>> = schema
            .entities()
            .iter()
            .map(|e| (e.clone(), entity_neighborhood(onto, e)))
            .collect();
        let mut taken: Vec<Term> = Vec::new();
        for t in pool.iter() {
            if planned_structural == spec.n_structural {
                break;
            }
            if !schema.classes.contains(t) {
                continue;
            }
            let Some(mirrored) = pick_structural_mirror(t, &neighborhoods, &schema.classes, &mut rng)
            else {
                continue;
            };
            let local = fresh_gibberish(&mut rng, &mut used_locals, &class_bags);
            support_origins.extend(mirrored.iter().cloned());
            plans.push(Plan {
                origin: t.clone(),
                planted_local: local,
                category: MismatchCategory::Structural,
                is_class: true,
                mirrored,
            });
            taken.push(t.clone());
            planned_structural += 1;
        }
        if planned_structural < spec.n_structural {
            return Err(Error::FixtureSpec(format!(
                "only {planned_structural} of {} structural plants are constructible on this ontology",
                spec.n_structural
            )));
        }
        // the support edges need one matchable predicate
        support_predicate = schema.properties.iter().next().cloned();
        if let Some(p) = &support_predicate {
            support_origins.remove(p); // planted separately below
        }
        pool.retain(|e| !taken.contains(e) && !support_origins.contains(e));
        if let Some(p) = &support_predicate {
            pool.retain(|e| e != p);
        }
    }

    plan_category(
        &mut plans,
        &mut pool,
        spec.n_synonym,
        MismatchCategory::Synonym,
        &schema.classes,
        &class_bags,
        &property_bags,
        &mut used_locals,
        &mut rng,
    )?;
    plan_category(
        &mut plans,
        &mut pool,
        spec.n_typo,
        MismatchCategory::Typo,
        &schema.classes,
        &class_bags,
        &property_bags,
        &mut used_locals,
        &mut rng,
    )?;
    plan_category(
        &mut plans,
        &mut pool,
        spec.n_exact,
        MismatchCategory::Exact,
        &schema.classes,
        &class_bags,
        &property_bags,
        &mut used_locals,
        &mut rng,
    )?;

    // Support plants: exact copies of the mirrored neighbors and the support
    // predicate, unless an equivalent plant already exists.
    let planned_origins: BTreeSet<Term> = plans.iter().map(|p| p.origin.clone()).collect();
    for origin in &support_origins {
        if planned_origins.contains(origin) {
            continue;
        }
        let local = origin.local_name().unwrap_or_default().to_string();
        used_locals.insert(local.clone());
        plans.push(Plan {
            origin: origin.clone(),
            planted_local: local,
            category: MismatchCategory::Exact,
            is_class: schema.classes.contains(origin),
            mirrored: Vec::new(),
        });
    }
    if let Some(p) = &support_predicate {
        if !planned_origins.contains(p) {
            let local = p.local_name().unwrap_or_default().to_string();
            used_locals.insert(local.clone());
            plans.push(Plan {
                origin: p.clone(),
                planted_local: local,
                category: MismatchCategory::Exact,
                is_class: false,
                mirrored: Vec::new(),
            });
        }
    }

    // Materialize the KG.
    let planted_of: BTreeMap<Term, Term> = plans
        .iter()
        .map(|p| (p.origin.clone(), kg_term(&p.planted_local)))
        .collect();
    let rdf_type = Term::iri(vocab::RDF_TYPE).unwrap();
    let mut triples: Vec<Triple> = Vec::new();
    let mut counter = 0usize;
    for plan in &plans {
        let planted = &planted_of[&plan.origin];
        match plan.category {
            MismatchCategory::Structural => {
                let pred = support_predicate
                    .as_ref()
                    .and_then(|p| planted_of.get(p).cloned())
                    .unwrap_or_else(|| kg_term("linked"));
                for neighbor in &plan.mirrored {
                    let image = &planted_of[neighbor];
                    triples.push(Triple::new(planted.clone(), pred.clone(), image.clone())?);
                }
            }
            _ if plan.is_class => {
                // a type assertion makes the planted term a concept without
                // introducing any other KG term
                if plans_needs_type_triple(plan, &plans) {
                    let inst = kg_term(&format!("inst_{counter}"));
                    counter += 1;
                    triples.push(Triple::new(inst, rdf_type.clone(), planted.clone())?);
                }
            }
            _ => {
                let a = Term::blank(format!("p{counter}a"));
                let b = Term::blank(format!("p{counter}b"));
                counter += 1;
                triples.push(Triple::new(a, planted.clone(), b)?);
            }
        }
    }

    let mut prefixes = BTreeMap::new();
    prefixes.insert("kg".to_string(), KG_NS.to_string());
    prefixes.insert("rdf".to_string(), vocab::RDF_NS.to_string());
    let kg = Graph::from_triples(triples, prefixes, GraphRole::Kg);

    let mut answer_key: Vec<PlantedTerm> = plans
        .iter()
        .map(|p| PlantedTerm {
            planted: planted_of[&p.origin].clone(),
            origin: p.origin.clone(),
            category: p.category,
        })
        .collect();
    answer_key.sort_by(|a, b| a.planted.cmp(&b.planted));
    Ok(MismatchFixture { kg, answer_key })
}

/// Class plants mirrored by a structural plant are already concepts through
/// the support edges; everything else needs its own type assertion.
fn plans_needs_type_triple(plan: &Plan, all: &[Plan]) -> bool {
    !all.iter()
        .any(|p| p.category == MismatchCategory::Structural && p.mirrored.contains(&plan.origin))
}

fn kg_term(local: &str) -> Term {
    Term::iri(format!("{KG_NS}{local}")).expect("kg namespace iri")
}

fn kind_bags(terms: &BTreeSet<Term>) -> Vec<(Term, Vec<String>)> {
    terms
        .iter()
        .filter_map(|t| {
            let tokens = tokenize_name(t.local_name()?);
            (!tokens.is_empty()).then(|| (t.clone(), tokens))
        })
        .collect()
}

fn entity_neighborhood(g: &Graph, node: &Term) -> BTreeSet<Term> {
    g.neighbors(node, Direction::Both)
        .into_iter()
        .map(|(_, n)| n)
        .filter(|n| n.is_iri() && !n.is_vocab())
        .collect()
}

/// Chooses the subset of `t`'s class neighbors a structural plant mirrors.
/// The resulting Jaccard score must land in the level-4 band and `t` must be
/// the strict argmax over all classes, otherwise the entity is unusable.
fn pick_structural_mirror(
    t: &Term,
    neighborhoods: &BTreeMap<Term, BTreeSet<Term>>,
    classes: &BTreeSet<Term>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Term>> {
    let nt = neighborhoods.get(t)?;
    if nt.len() < 2 {
        return None;
    }
    let mut class_neighbors: Vec<Term> = nt.iter().filter(|n| classes.contains(n)).cloned().collect();
    if class_neighbors.is_empty() {
        return None;
    }
    class_neighbors.shuffle(rng);

    let max_size = ((nt.len() * 3) / 4).min(class_neighbors.len()).min(nt.len() - 1);
    for size in (1..=max_size).rev() {
        let ratio = size as f64 / nt.len() as f64;
        if !(TOPOLOGICAL_MIN..=TOPOLOGICAL_MAX).contains(&ratio) {
            continue;
        }
        let subset: BTreeSet<Term> = class_neighbors.iter().take(size).cloned().collect();
        let score_of = |entity: &Term| -> f64 {
            let ne = &neighborhoods[entity];
            let shared = subset.intersection(ne).count();
            let union = subset.union(ne).count();
            if union == 0 {
                0.0
            } else {
                shared as f64 / union as f64
            }
        };
        let own = score_of(t);
        let beaten = classes
            .iter()
            .filter(|e| *e != t)
            .all(|e| score_of(e) < own);
        if beaten {
            return Some(subset.into_iter().collect());
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn plan_category(
    plans: &mut Vec<Plan>,
    pool: &mut Vec<Term>,
    wanted: usize,
    category: MismatchCategory,
    classes: &BTreeSet<Term>,
    class_bags: &[(Term, Vec<String>)],
    property_bags: &[(Term, Vec<String>)],
    used_locals: &mut BTreeSet<String>,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut planned = 0;
    let mut taken: Vec<Term> = Vec::new();
    for origin in pool.iter() {
        if planned == wanted {
            break;
        }
        let is_class = classes.contains(origin);
        let peers = if is_class { class_bags } else { property_bags };
        let Some(local) = origin.local_name() else { continue };
        let tokens = tokenize_name(local);
        if tokens.is_empty() {
            continue;
        }
        let planted_local = match category {
            MismatchCategory::Exact => plan_exact(local, &tokens, origin, peers),
            MismatchCategory::Typo => plan_typo(&tokens, origin, peers, rng),
            MismatchCategory::Synonym => plan_synonym(&tokens, peers),
            MismatchCategory::Structural => unreachable!("planned separately"),
        };
        let Some(planted_local) = planted_local else { continue };
        if !used_locals.insert(planted_local.clone()) {
            continue;
        }
        plans.push(Plan {
            origin: origin.clone(),
            planted_local,
            category,
            is_class,
            mirrored: Vec::new(),
        });
        taken.push(origin.clone());
        planned += 1;
    }
    if planned < wanted {
        return Err(Error::FixtureSpec(format!(
            "only {planned} of {wanted} {} plants are constructible on this ontology",
            category.as_str()
        )));
    }
    pool.retain(|e| !taken.contains(e));
    Ok(())
}

/// Exact plants keep the local name; the origin must be the only entity with
/// those tokens so level 1 is unambiguous.
fn plan_exact(
    local: &str,
    tokens: &[String],
    origin: &Term,
    peers: &[(Term, Vec<String>)],
) -> Option<String> {
    let ambiguous = peers
        .iter()
        .any(|(peer, peer_tokens)| peer != origin && peer_tokens == tokens);
    (!ambiguous).then(|| local.to_string())
}

/// Deletes one interior character from the longest token. The result must
/// stay above the heuristic threshold against the origin, below 1.0 against
/// everything, and the origin must be the strict argmax.
fn plan_typo(
    tokens: &[String],
    origin: &Term,
    peers: &[(Term, Vec<String>)],
    rng: &mut ChaCha8Rng,
) -> Option<String> {
    let joined: String = tokens.join(" ");
    if joined.chars().count() < 8 {
        return None;
    }
    let (victim_idx, victim) = tokens
        .iter()
        .enumerate()
        .max_by_key(|(i, t)| (t.chars().count(), usize::MAX - i))?;
    if victim.chars().count() < 4 {
        return None;
    }
    for _ in 0..8 {
        let chars: Vec<char> = victim.chars().collect();
        let cut = rng.gen_range(1..chars.len() - 1);
        let edited: String = chars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != cut)
            .map(|(_, c)| c)
            .collect();
        let mut new_tokens = tokens.to_vec();
        new_tokens[victim_idx] = edited;
        let planted_joined = new_tokens.join(" ");

        let mut best: Option<(f64, &Term)> = None;
        let mut second = 0.0f64;
        let mut pure_collision = false;
        for (peer, peer_tokens) in peers {
            if *peer_tokens == new_tokens {
                pure_collision = true;
                break;
            }
            let s = normalized_similarity(&planted_joined, &peer_tokens.join(" "));
            match &best {
                Some((b, _)) if s <= *b => second = second.max(s),
                _ => {
                    if let Some((b, _)) = &best {
                        second = second.max(*b);
                    }
                    best = Some((s, peer));
                }
            }
        }
        let ok = !pure_collision
            && matches!(&best, Some((s, peer)) if *peer == origin && *s >= HEURISTIC_THRESHOLD && *s > second);
        if ok {
            return Some(new_tokens.join("_"));
        }
    }
    None
}

/// Substitutes every token with its synonym-table partner. Eligible only when
/// the whole name is covered and the result drops below the heuristic
/// threshold against every peer.
fn plan_synonym(tokens: &[String], peers: &[(Term, Vec<String>)]) -> Option<String> {
    let substituted: Option<Vec<String>> = tokens
        .iter()
        .map(|t| synonym_of(t).map(str::to_string))
        .collect();
    let substituted = substituted?;
    let planted_joined = substituted.join(" ");
    for (_, peer_tokens) in peers {
        if *peer_tokens == substituted {
            return None;
        }
        if normalized_similarity(&planted_joined, &peer_tokens.join(" ")) >= HEURISTIC_THRESHOLD {
            return None;
        }
    }
    Some(substituted.join("_"))
}

/// Single-token names from a consonant alphabet; never in the vector
/// vocabulary and lexically far from real schema names.
fn fresh_gibberish(
    rng: &mut ChaCha8Rng,
    used: &mut BTreeSet<String>,
    class_bags: &[(Term, Vec<String>)],
) -> String {
    const ALPHABET: &[u8] = b"bcdfghjklmnpqrstvwxz";
    loop {
        let mut name = String::from("zz");
        for _ in 0..4 {
            name.push(ALPHABET[rng.gen_range(0..ALPHABET.len())] as char);
        }
        let far_from_everything = class_bags
            .iter()
            .all(|(_, tokens)| normalized_similarity(&name, &tokens.join(" ")) < HEURISTIC_THRESHOLD);
        if far_from_everything && used.insert(name.clone()) {
            return name;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse, Format};

    fn fixture_onto() -> Graph {
        parse(
            crate::fixtures::BRICK_AHU_ONTOLOGY,
            Format::TurtleSubset,
            GraphRole::Ontology,
        )
        .unwrap()
    }

    #[test]
    fn all_zero_spec_yields_empty_kg() {
        let onto = fixture_onto();
        let spec = MismatchSpec {
            n_exact: 0,
            n_typo: 0,
            n_synonym: 0,
            n_structural: 0,
            seed: 1,
        };
        let fx = generate_mismatch_fixture(&onto, &spec).unwrap();
        assert!(fx.kg.is_empty());
        assert!(fx.answer_key.is_empty());
    }

    #[test]
    fn oversized_spec_is_rejected() {
        let onto = fixture_onto();
        let spec = MismatchSpec {
            n_exact: 1000,
            n_typo: 0,
            n_synonym: 0,
            n_structural: 0,
            seed: 1,
        };
        assert!(matches!(
            generate_mismatch_fixture(&onto, &spec),
            Err(Error::FixtureSpec(_))
        ));
    }

    #[test]
    fn generation_is_deterministic() {
        let onto = fixture_onto();
        let spec = MismatchSpec {
            n_exact: 3,
            n_typo: 2,
            n_synonym: 2,
            n_structural: 1,
            seed: 42,
        };
        let a = generate_mismatch_fixture(&onto, &spec).unwrap();
        let b = generate_mismatch_fixture(&onto, &spec).unwrap();
        assert_eq!(a.kg.to_ntriples(), b.kg.to_ntriples());
        assert_eq!(answer_key_to_tsv(&a.answer_key), answer_key_to_tsv(&b.answer_key));
    }

    #[test]
    fn answer_key_round_trips_through_tsv() {
        let onto = fixture_onto();
        let spec = MismatchSpec {
            n_exact: 2,
            n_typo: 1,
            n_synonym: 1,
            n_structural: 1,
            seed: 7,
        };
        let fx = generate_mismatch_fixture(&onto, &spec).unwrap();
        let tsv = answer_key_to_tsv(&fx.answer_key);
        let parsed = parse_answer_key(&tsv).unwrap();
        assert_eq!(parsed.len(), fx.answer_key.len());
        for (a, b) in parsed.iter().zip(&fx.answer_key) {
            assert_eq!(a.planted, b.planted);
            assert_eq!(a.origin, b.origin);
            assert_eq!(a.category, b.category);
        }
    }
}
