//! Ontology reconstruction: ancestor closures over matched terms, triple
//! restoration, and the compliance metrics of a KG/ontology pair.

pub mod mismatch;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extract::{find_classes_and_properties, find_concepts_and_relations};
use crate::matching::{cascade, total_confidence, MatchCandidate, MatchConfig, SemanticProvider};
use crate::rdf::{vocab, Graph, GraphRole, Term, Triple};

/// The minimal sub-ontology covering the matched terms.
#[derive(Debug, Clone)]
pub struct ReshapedOntology {
    pub graph: Graph,
    pub kept_classes: BTreeSet<Term>,
    pub kept_properties: BTreeSet<Term>,
    /// Which match pulled each kept entity in (ancestors inherit the match of
    /// the descendant that reached them first).
    pub provenance: BTreeMap<Term, MatchCandidate>,
}

impl ReshapedOntology {
    pub fn kept_entities(&self) -> BTreeSet<Term> {
        self.kept_classes
            .union(&self.kept_properties)
            .cloned()
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportCounts {
    pub kg_terms: usize,
    pub onto_entities: usize,
    pub matched: usize,
    pub matched_targets: usize,
    pub kept: usize,
}

/// Compliance metrics of one KG/ontology run.
///
/// `used_entity_*` is the share of distinct matched ontology entities in the
/// entity count of the scored ontology (`original` scores the full input
/// ontology, `reshaped` scores the reconstruction).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplianceReport {
    pub used_entity_original: f64,
    pub used_entity_reshaped: f64,
    pub matching_rate: f64,
    pub confidence: f64,
    pub vacuous: bool,
    pub counts: ReportCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    Class,
    Property,
}

/// The matched terms plus all their transitive ancestors under the subclass
/// (resp. subproperty) predicate. Cycles collapse to their member set.
pub fn find_super_closure(
    matched: &BTreeSet<Term>,
    onto: &Graph,
    kind: ClosureKind,
) -> BTreeSet<Term> {
    let predicate = match kind {
        ClosureKind::Class => vocab::RDFS_SUBCLASS_OF,
        ClosureKind::Property => vocab::RDFS_SUBPROPERTY_OF,
    };
    let mut parents: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for t in onto.triples() {
        if t.predicate.as_iri() == Some(predicate) && t.object.is_iri() {
            parents.entry(&t.subject).or_default().push(&t.object);
        }
    }

    let mut closure: BTreeSet<Term> = matched.clone();
    let mut queue: VecDeque<&Term> = matched.iter().collect();
    while let Some(node) = queue.pop_front() {
        if let Some(ps) = parents.get(node) {
            for p in ps {
                if closure.insert((*p).clone()) {
                    queue.push_back(p);
                }
            }
        }
    }
    closure
}

/// Rebuilds the reshaped ontology from the kept entity sets.
///
/// A triple survives when its subject is a kept entity and every IRI object
/// is kept or reserved vocabulary. Constraint blank nodes hanging off a kept
/// subject are chased one level and retained as a group, provided the whole
/// group satisfies the same object rule.
pub fn restore(
    kept_classes: &BTreeSet<Term>,
    kept_properties: &BTreeSet<Term>,
    onto: &Graph,
) -> Graph {
    let kept: BTreeSet<&Term> = kept_classes.union(kept_properties).collect();
    let object_ok = |o: &Term| match o {
        Term::Iri(_) => kept.contains(o) || o.is_vocab(),
        Term::Literal { .. } => true,
        Term::Blank(_) => false,
    };

    let mut triples: BTreeSet<Triple> = BTreeSet::new();
    for t in onto.triples() {
        if !kept.contains(&t.subject) {
            continue;
        }
        match &t.object {
            Term::Blank(_) => {
                // one level of blank-node chasing, all-or-nothing per group
                let group: Vec<&Triple> =
                    onto.triples().filter(|g| g.subject == t.object).collect();
                if group.iter().all(|g| object_ok(&g.object)) {
                    triples.insert(t.clone());
                    triples.extend(group.into_iter().cloned());
                }
            }
            o if object_ok(o) => {
                triples.insert(t.clone());
            }
            _ => {}
        }
    }
    Graph::from_triples(triples, onto.prefixes().clone(), GraphRole::Ontology)
}

/// Result of a full within-compliance run.
#[derive(Debug, Clone)]
pub struct WithinOutcome {
    pub reshaped: ReshapedOntology,
    pub report: ComplianceReport,
    pub matches: Vec<MatchCandidate>,
    pub unmatched: Vec<Term>,
}

/// Extract, cascade, closure, restore: the whole within-KG pipeline.
pub fn within_compliance(
    kg: &Graph,
    onto: &Graph,
    cfg: &MatchConfig,
    provider: Option<&dyn SemanticProvider>,
) -> Result<WithinOutcome> {
    if kg.role() != GraphRole::Kg {
        return Err(Error::InvalidConfig("first graph must have the kg role".into()));
    }
    if onto.role() != GraphRole::Ontology {
        return Err(Error::InvalidConfig("second graph must have the ontology role".into()));
    }
    cfg.validate()?;

    let inventory = find_concepts_and_relations(kg);
    let schema = find_classes_and_properties(onto);
    let outcome = cascade(&inventory, &schema, kg, onto, cfg, provider);

    let matched_classes: BTreeSet<Term> = outcome
        .matches
        .iter()
        .filter(|m| schema.classes.contains(&m.target))
        .map(|m| m.target.clone())
        .collect();
    let matched_properties: BTreeSet<Term> = outcome
        .matches
        .iter()
        .filter(|m| schema.properties.contains(&m.target))
        .map(|m| m.target.clone())
        .collect();

    let kept_classes = find_super_closure(&matched_classes, onto, ClosureKind::Class);
    let kept_properties = find_super_closure(&matched_properties, onto, ClosureKind::Property);
    let graph = restore(&kept_classes, &kept_properties, onto);

    let provenance = build_provenance(&outcome.matches, onto);
    let reshaped = ReshapedOntology {
        graph,
        kept_classes,
        kept_properties,
        provenance,
    };

    let confidence = total_confidence(&outcome.matches);
    let matched_targets: BTreeSet<&Term> = outcome.matches.iter().map(|m| &m.target).collect();
    let counts = ReportCounts {
        kg_terms: inventory.len(),
        onto_entities: schema.len(),
        matched: outcome.matches.len(),
        matched_targets: matched_targets.len(),
        kept: reshaped.kept_classes.len() + reshaped.kept_properties.len(),
    };
    let rate = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let report = ComplianceReport {
        used_entity_original: rate(counts.matched_targets, counts.onto_entities),
        used_entity_reshaped: rate(counts.matched_targets, counts.kept),
        matching_rate: if counts.kg_terms == 0 {
            1.0
        } else {
            counts.matched as f64 / counts.kg_terms as f64
        },
        confidence: confidence.value,
        vacuous: confidence.vacuous,
        counts,
    };

    Ok(WithinOutcome {
        reshaped,
        report,
        matches: outcome.matches,
        unmatched: outcome.unmatched,
    })
}

/// Walks ancestor edges up from each match target (in sorted order) so every
/// kept entity records the match that reached it first.
fn build_provenance(matches: &[MatchCandidate], onto: &Graph) -> BTreeMap<Term, MatchCandidate> {
    let mut parents: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for t in onto.triples() {
        let p = t.predicate.as_iri().unwrap_or_default();
        if (p == vocab::RDFS_SUBCLASS_OF || p == vocab::RDFS_SUBPROPERTY_OF) && t.object.is_iri() {
            parents.entry(&t.subject).or_default().push(&t.object);
        }
    }
    let mut provenance: BTreeMap<Term, MatchCandidate> = BTreeMap::new();
    for m in matches {
        let mut queue = VecDeque::from([&m.target]);
        while let Some(node) = queue.pop_front() {
            if provenance.contains_key(node) {
                continue;
            }
            provenance.insert(node.clone(), m.clone());
            if let Some(ps) = parents.get(node) {
                queue.extend(ps.iter().copied());
            }
        }
    }
    provenance
}
