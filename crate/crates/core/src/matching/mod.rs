//! Four-level term-matching cascade with per-match confidence.
//!
//! Level 1 matches exact keyword sets, level 2 normalized edit distance,
//! level 3 word-vector similarity, level 4 neighborhood overlap seeded by the
//! matches of the first three levels.

pub mod semantic;
pub mod strsim;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{tokenize, KeywordBag, SchemaInventory, TermInventory};
use crate::rdf::{Direction, Graph, Term};
pub use semantic::{SemanticProvider, VectorFile};

/// One proposed source → target correspondence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchCandidate {
    pub source: Term,
    pub target: Term,
    pub level: u8,
    pub confidence: f64,
}

/// Cascade controls. Thresholds are on the shared `[0,1]` confidence scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchConfig {
    pub max_level: u8,
    pub heuristic_threshold: f64,
    pub semantic_threshold: f64,
    pub topological_threshold: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            max_level: 4,
            heuristic_threshold: 0.75,
            semantic_threshold: 0.8,
            topological_threshold: 0.5,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.max_level) {
            return Err(Error::InvalidConfig(format!(
                "max_level must be 1..=4, got {}",
                self.max_level
            )));
        }
        for (name, v) in [
            ("heuristic_threshold", self.heuristic_threshold),
            ("semantic_threshold", self.semantic_threshold),
            ("topological_threshold", self.topological_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0,1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Level 1: exact keyword-set equality, confidence 1.0.
pub fn pure_match(a: &KeywordBag, b: &KeywordBag) -> Option<MatchCandidate> {
    (a.tokens == b.tokens).then(|| MatchCandidate {
        source: a.source.clone(),
        target: b.source.clone(),
        level: 1,
        confidence: 1.0,
    })
}

/// Level 2: normalized Levenshtein similarity of the joined keyword strings.
pub fn heuristic_match(a: &KeywordBag, b: &KeywordBag, threshold: f64) -> Option<MatchCandidate> {
    let s = strsim::normalized_similarity(&a.joined(), &b.joined());
    (s >= threshold).then(|| MatchCandidate {
        source: a.source.clone(),
        target: b.source.clone(),
        level: 2,
        confidence: s,
    })
}

/// Level 3: cosine similarity of mean token vectors, mapped to `[0,1]` via
/// `(cos+1)/2`. Absent (never a fabricated score) when either side is fully
/// out of vocabulary.
pub fn semantic_match(
    a: &KeywordBag,
    b: &KeywordBag,
    provider: &dyn SemanticProvider,
    threshold: f64,
) -> Option<MatchCandidate> {
    let va = semantic::bag_vector(provider, &a.tokens)?;
    let vb = semantic::bag_vector(provider, &b.tokens)?;
    let confidence = (semantic::cosine(&va, &vb) + 1.0) / 2.0;
    (confidence >= threshold).then(|| MatchCandidate {
        source: a.source.clone(),
        target: b.source.clone(),
        level: 3,
        confidence,
    })
}

/// Level 4: Jaccard overlap between the confirmed-match image of `a`'s KG
/// neighborhood and `b`'s ontology neighborhood. Literals, blanks and
/// reserved vocabulary terms are ignored when comparing neighborhoods.
pub fn topological_match(
    a: &Term,
    b: &Term,
    kg: &Graph,
    onto: &Graph,
    confirmed: &[MatchCandidate],
    threshold: f64,
) -> Option<MatchCandidate> {
    let image_of: BTreeMap<&Term, &Term> =
        confirmed.iter().map(|c| (&c.source, &c.target)).collect();

    let n_a = entity_neighborhood(kg, a);
    let n_b = entity_neighborhood(onto, b);
    if n_a.is_empty() && n_b.is_empty() {
        return None;
    }
    let image: BTreeSet<&Term> = n_a.iter().filter_map(|n| image_of.get(n).copied()).collect();
    let n_b_refs: BTreeSet<&Term> = n_b.iter().collect();
    let union = image.union(&n_b_refs).count();
    if union == 0 {
        return None;
    }
    let shared = image.intersection(&n_b_refs).count();
    let confidence = shared as f64 / union as f64;
    (confidence >= threshold).then(|| MatchCandidate {
        source: a.clone(),
        target: b.clone(),
        level: 4,
        confidence,
    })
}

fn entity_neighborhood(g: &Graph, node: &Term) -> BTreeSet<Term> {
    g.neighbors(node, Direction::Both)
        .into_iter()
        .map(|(_, n)| n)
        .filter(|n| n.is_iri() && !n.is_vocab())
        .collect()
}

/// Cascade output: at most one candidate per KG term, plus the terms no
/// level could match.
#[derive(Debug, Clone, Default)]
pub struct CascadeOutcome {
    pub matches: Vec<MatchCandidate>,
    pub unmatched: Vec<Term>,
}

/// Runs the cascade for every KG concept against the ontology classes and
/// every KG relation against the ontology properties.
///
/// For each source term the lowest level (up to `cfg.max_level`) that yields
/// any candidate wins; within the winning level the highest-confidence target
/// is taken, ties broken by lexicographic target IRI. Levels 1-3 complete for
/// all terms before level 4 runs, since level 4 consumes the confirmed
/// matches as its seed.
pub fn cascade(
    kg_terms: &TermInventory,
    schema: &SchemaInventory,
    kg: &Graph,
    onto: &Graph,
    cfg: &MatchConfig,
    provider: Option<&dyn SemanticProvider>,
) -> CascadeOutcome {
    let class_bags = bags_of(&schema.classes);
    let property_bags = bags_of(&schema.properties);

    let mut matches = Vec::new();
    let mut deferred: Vec<(Term, bool)> = Vec::new(); // (term, is_concept)

    for (sources, targets, is_concept) in [
        (&kg_terms.concepts, &class_bags, true),
        (&kg_terms.relations, &property_bags, false),
    ] {
        for source in sources {
            let Ok(bag) = tokenize(source) else {
                deferred.push((source.clone(), is_concept));
                continue;
            };
            match lexical_levels(&bag, targets, cfg, provider) {
                Some(candidate) => matches.push(candidate),
                None => deferred.push((source.clone(), is_concept)),
            }
        }
    }

    let mut unmatched = Vec::new();
    if cfg.max_level >= 4 {
        let confirmed = matches.clone();
        for (source, is_concept) in deferred {
            let targets = if is_concept {
                &schema.classes
            } else {
                &schema.properties
            };
            let best = targets
                .iter()
                .filter_map(|t| {
                    topological_match(&source, t, kg, onto, &confirmed, cfg.topological_threshold)
                })
                .reduce(better_candidate);
            match best {
                Some(candidate) => matches.push(candidate),
                None => unmatched.push(source),
            }
        }
    } else {
        unmatched.extend(deferred.into_iter().map(|(t, _)| t));
    }

    matches.sort_by(|a, b| a.source.cmp(&b.source));
    unmatched.sort();
    CascadeOutcome { matches, unmatched }
}

fn bags_of(terms: &BTreeSet<Term>) -> Vec<KeywordBag> {
    terms.iter().filter_map(|t| tokenize(t).ok()).collect()
}

fn lexical_levels(
    bag: &KeywordBag,
    targets: &[KeywordBag],
    cfg: &MatchConfig,
    provider: Option<&dyn SemanticProvider>,
) -> Option<MatchCandidate> {
    let pick = |cands: Vec<MatchCandidate>| cands.into_iter().reduce(better_candidate);

    let level1 = pick(targets.iter().filter_map(|t| pure_match(bag, t)).collect());
    if level1.is_some() {
        return level1;
    }
    if cfg.max_level >= 2 {
        let level2 = pick(
            targets
                .iter()
                .filter_map(|t| heuristic_match(bag, t, cfg.heuristic_threshold))
                .collect(),
        );
        if level2.is_some() {
            return level2;
        }
    }
    if cfg.max_level >= 3 {
        if let Some(provider) = provider {
            let level3 = pick(
                targets
                    .iter()
                    .filter_map(|t| semantic_match(bag, t, provider, cfg.semantic_threshold))
                    .collect(),
            );
            if level3.is_some() {
                return level3;
            }
        }
    }
    None
}

fn better_candidate(a: MatchCandidate, b: MatchCandidate) -> MatchCandidate {
    if b.confidence > a.confidence
        || (b.confidence == a.confidence && b.target < a.target)
    {
        b
    } else {
        a
    }
}

/// Mean confidence over all candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalConfidence {
    pub value: f64,
    /// True when there were no matches at all, in which case the value is the
    /// vacuous 1.0.
    pub vacuous: bool,
}

pub fn total_confidence(candidates: &[MatchCandidate]) -> TotalConfidence {
    if candidates.is_empty() {
        return TotalConfidence {
            value: 1.0,
            vacuous: true,
        };
    }
    let sum: f64 = candidates.iter().map(|c| c.confidence).sum();
    TotalConfidence {
        value: sum / candidates.len() as f64,
        vacuous: false,
    }
}
