//! Cross-ontology alignment: within-compliance on both sides, a direct
//! matching pass across the reshaped ontologies, and a joint embedding space
//! bridged by the confirmed pairs for predicting overlapping terms.

pub mod eval;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::embed::{
    train_skipgram, EmbeddingTable, SkipGramConfig, WalkConfig, WalkKind, WalkSpace,
};
use crate::error::{Error, Result};
use crate::extract::{find_classes_and_properties, TermInventory};
use crate::matching::{cascade, MatchConfig, SemanticProvider};
use crate::rdf::{vocab, Graph, GraphRole, Term, Triple};
use crate::reshape::{within_compliance, WithinOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairOrigin {
    Direct,
    Predicted,
}

impl PairOrigin {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairOrigin::Direct => "direct",
            PairOrigin::Predicted => "predicted",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlignmentPair {
    pub left: Term,
    pub right: Term,
    pub confidence: f64,
    pub origin: PairOrigin,
}

/// Confirmed and predicted term pairs across the two ontologies.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AlignmentSet {
    pub pairs: Vec<AlignmentPair>,
    /// False when no direct pair existed, i.e. the joint space was trained
    /// without bridges.
    pub bridged: bool,
}

impl AlignmentSet {
    pub fn direct(&self) -> impl Iterator<Item = &AlignmentPair> {
        self.pairs.iter().filter(|p| p.origin == PairOrigin::Direct)
    }

    pub fn predicted(&self) -> impl Iterator<Item = &AlignmentPair> {
        self.pairs
            .iter()
            .filter(|p| p.origin == PairOrigin::Predicted)
    }

    /// TSV rendering: left, right, "=", confidence, origin.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&format!(
                "{}\t{}\t=\t{}\t{}\n",
                p.left.as_iri().unwrap_or_default(),
                p.right.as_iri().unwrap_or_default(),
                p.confidence,
                p.origin.as_str()
            ));
        }
        out
    }
}

/// Per-phase confidences: the two within-compliance means, one entry per
/// direct pair and one per predicted pair.
#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceSet {
    pub mu_within: [f64; 2],
    pub mu_cmatch: Vec<f64>,
    pub mu_overlap: Vec<f64>,
}

impl ConfidenceSet {
    /// The pooled over-compliance confidences.
    pub fn mu_over(&self) -> Vec<f64> {
        self.mu_cmatch
            .iter()
            .chain(self.mu_overlap.iter())
            .copied()
            .collect()
    }
}

/// Union of both KGs and both ontology variants plus one bridge edge per
/// direct pair.
#[derive(Debug, Clone)]
pub struct JointGraph {
    pub graph: Graph,
    pub left_terms: BTreeSet<Term>,
    pub right_terms: BTreeSet<Term>,
    pub bridge_count: usize,
}

impl JointGraph {
    /// Which side a term belongs to, if any.
    pub fn side_of(&self, term: &Term) -> Option<PairSide> {
        if self.left_terms.contains(term) {
            Some(PairSide::Left)
        } else if self.right_terms.contains(term) {
            Some(PairSide::Right)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    Left,
    Right,
}

/// Blank labels are scoped per input graph, so a union must rename them
/// apart before merging.
fn relabel_blanks(g: &Graph, prefix: &str) -> Graph {
    let rename = |t: &Term| match t {
        Term::Blank(l) => Term::blank(format!("{prefix}_{l}")),
        other => other.clone(),
    };
    Graph::from_triples(
        g.triples().map(|t| Triple {
            subject: rename(&t.subject),
            predicate: t.predicate.clone(),
            object: rename(&t.object),
        }),
        g.prefixes().clone(),
        g.role(),
    )
}

/// Builds the joint vector-space graph. The ontology side terms (classes and
/// properties of each variant) become the namespaces used for cross-filtered
/// prediction.
pub fn build_joint_space(
    kg1: &Graph,
    onto1: &Graph,
    kg2: &Graph,
    onto2: &Graph,
    direct: &[AlignmentPair],
) -> Result<JointGraph> {
    let left_terms = find_classes_and_properties(onto1).entities();
    let right_terms = find_classes_and_properties(onto2).entities();
    for pair in direct {
        if !left_terms.contains(&pair.left) {
            return Err(Error::DanglingPair(format!(
                "left term {} is not in the first ontology",
                pair.left
            )));
        }
        if !right_terms.contains(&pair.right) {
            return Err(Error::DanglingPair(format!(
                "right term {} is not in the second ontology",
                pair.right
            )));
        }
    }

    let mut graph = relabel_blanks(kg1, "g1k")
        .union(&relabel_blanks(onto1, "g1o"))
        .union(&relabel_blanks(kg2, "g2k"))
        .union(&relabel_blanks(onto2, "g2o"));
    let bridge = Term::iri(vocab::BRIDGE_PREDICATE).unwrap();
    let bridges: Vec<Triple> = direct
        .iter()
        .map(|p| Triple::new(p.left.clone(), bridge.clone(), p.right.clone()))
        .collect::<Result<_>>()?;
    let bridge_count = bridges.len();
    graph = graph.union(&Graph::from_triples(
        bridges,
        BTreeMap::new(),
        GraphRole::Kg,
    ));

    Ok(JointGraph {
        graph,
        left_terms,
        right_terms,
        bridge_count,
    })
}

/// One unmatched term's ranked candidates.
#[derive(Debug, Clone, Serialize)]
pub struct OverlapPrediction {
    pub query: Term,
    pub candidates: Vec<(Term, f64)>,
    pub cross_filtered: Vec<(Term, f64)>,
}

#[derive(Debug, Clone)]
pub struct OverOutcome {
    pub alignment: AlignmentSet,
    pub confidence: ConfidenceSet,
    pub embeddings: EmbeddingTable,
    pub within_left: WithinOutcome,
    pub within_right: WithinOutcome,
    pub predictions: Vec<OverlapPrediction>,
    pub joint: JointGraph,
}

/// How many raw candidates an overlap prediction records.
const PREDICTION_CANDIDATES: usize = 10;

/// The full over-KGs pipeline.
///
/// Phase 1 reuses `within_compliance` on both pairs, phase 2 runs the
/// matching cascade across the two reshaped ontologies, phase 3 embeds the
/// bridged joint graph (predicates reified, so property terms are rankable)
/// and predicts a cross-side partner for every unmatched ontology term.
#[allow(clippy::too_many_arguments)]
pub fn over_compliance(
    kg1: &Graph,
    onto1: &Graph,
    kg2: &Graph,
    onto2: &Graph,
    match_cfg: &MatchConfig,
    walk_cfg: &WalkConfig,
    sg_cfg: &SkipGramConfig,
    kind: WalkKind,
    provider: Option<&dyn SemanticProvider>,
) -> Result<OverOutcome> {
    // Phase 1
    let within_left = within_compliance(kg1, onto1, match_cfg, provider)?;
    let within_right = within_compliance(kg2, onto2, match_cfg, provider)?;
    let mu_within = [within_left.report.confidence, within_right.report.confidence];

    // Phase 2: cascade across the reshaped ontologies
    let re1 = &within_left.reshaped;
    let re2 = &within_right.reshaped;
    let source_inventory = TermInventory {
        concepts: re1.kept_classes.clone(),
        relations: re1.kept_properties.clone(),
    };
    let target_schema = crate::extract::SchemaInventory {
        classes: re2.kept_classes.clone(),
        properties: re2.kept_properties.clone(),
        warnings: Vec::new(),
    };
    let cross = cascade(
        &source_inventory,
        &target_schema,
        &re1.graph,
        &re2.graph,
        match_cfg,
        provider,
    );
    let mut pairs: Vec<AlignmentPair> = cross
        .matches
        .iter()
        .map(|m| AlignmentPair {
            left: m.source.clone(),
            right: m.target.clone(),
            confidence: m.confidence,
            origin: PairOrigin::Direct,
        })
        .collect();
    let mu_cmatch: Vec<f64> = pairs.iter().map(|p| p.confidence).collect();

    // Phase 3: joint space with bridges
    let joint = build_joint_space(kg1, &re1.graph, kg2, &re2.graph, &pairs)?;
    let mut phase3_walk_cfg = walk_cfg.clone();
    phase3_walk_cfg.reify_predicates = true;
    let space = WalkSpace::prepare(&joint.graph, kind, &phase3_walk_cfg)?;
    let walks = space.generate(&phase3_walk_cfg);
    let embeddings = train_skipgram(&walks, sg_cfg)?;

    let matched_left: BTreeSet<&Term> = pairs.iter().map(|p| &p.left).collect();
    let matched_right: BTreeSet<&Term> = pairs.iter().map(|p| &p.right).collect();
    let unmatched: Vec<(Term, PairSide)> = joint
        .left_terms
        .iter()
        .filter(|t| !matched_left.contains(t))
        .map(|t| (t.clone(), PairSide::Left))
        .chain(
            joint
                .right_terms
                .iter()
                .filter(|t| !matched_right.contains(t))
                .map(|t| (t.clone(), PairSide::Right)),
        )
        .collect();

    let mut predictions = Vec::new();
    let mut predicted_pairs = Vec::new();
    for (query, side) in unmatched {
        if !embeddings.contains(&query) {
            continue;
        }
        let ranking = embeddings.most_similar(&query, embeddings.len())?;
        let other_side: &BTreeSet<Term> = match side {
            PairSide::Left => &joint.right_terms,
            PairSide::Right => &joint.left_terms,
        };
        let cross_filtered: Vec<(Term, f64)> = ranking
            .iter()
            .filter(|(t, _)| other_side.contains(t))
            .cloned()
            .collect();
        if let Some((partner, cos)) = cross_filtered.first() {
            let confidence = (cos + 1.0) / 2.0;
            let (left, right) = match side {
                PairSide::Left => (query.clone(), partner.clone()),
                PairSide::Right => (partner.clone(), query.clone()),
            };
            predicted_pairs.push(AlignmentPair {
                left,
                right,
                confidence,
                origin: PairOrigin::Predicted,
            });
        }
        predictions.push(OverlapPrediction {
            query,
            cross_filtered: cross_filtered.into_iter().take(PREDICTION_CANDIDATES).collect(),
            candidates: ranking.into_iter().take(PREDICTION_CANDIDATES).collect(),
        });
    }
    let mu_overlap: Vec<f64> = predicted_pairs.iter().map(|p| p.confidence).collect();

    pairs.sort_by(|a, b| a.left.cmp(&b.left));
    predicted_pairs.sort_by(|a, b| a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right)));
    let bridged = !pairs.is_empty();
    pairs.extend(predicted_pairs);

    Ok(OverOutcome {
        alignment: AlignmentSet { pairs, bridged },
        confidence: ConfidenceSet {
            mu_within,
            mu_cmatch,
            mu_overlap,
        },
        embeddings,
        within_left,
        within_right,
        predictions,
        joint,
    })
}

/// Ground-truth pair file: left IRI, tab, right IRI.
pub fn parse_truth_tsv(text: &str) -> Result<Vec<(Term, Term)>> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Mapping {
                line: idx + 1,
                message: format!("expected 2 tab-separated IRIs, found {} fields", fields.len()),
            });
        }
        let mk = |s: &str| {
            Term::iri(s).map_err(|e| Error::Mapping {
                line: idx + 1,
                message: e.to_string(),
            })
        };
        pairs.push((mk(fields[0])?, mk(fields[1])?));
    }
    Ok(pairs)
}
