//! Ontology fragments: rewriting a KG onto an alternative representation,
//! multi-criteria scoring with max-min (Liebig) selection, and the joint
//! classification harness across abstraction levels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::align::eval::{mean, sample_sd, EvalCell};
use crate::embed::{train_skipgram, SkipGramConfig, WalkConfig, WalkKind, WalkSpace};
use crate::error::{Error, Result};
use crate::extract::find_classes_and_properties;
use crate::matching::semantic::cosine;
use crate::rdf::{vocab, Graph, Term, Triple};

/// An alternative representation of the same KG content: a rewrite table from
/// original schema terms to fragment terms plus the fragment's own ontology.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub name: String,
    pub mapping: BTreeMap<Term, Term>,
    pub graph: Graph,
}

impl Fragment {
    /// Every mapping target must exist in the fragment graph.
    pub fn new(name: impl Into<String>, mapping: BTreeMap<Term, Term>, graph: Graph) -> Result<Fragment> {
        let known: BTreeSet<Term> = graph.nodes();
        for target in mapping.values() {
            if !known.contains(target) {
                return Err(Error::InvalidConfig(format!(
                    "mapping target {target} does not exist in the fragment graph"
                )));
            }
        }
        Ok(Fragment {
            name: name.into(),
            mapping,
            graph,
        })
    }
}

/// TSV rewrite table: original IRI, tab, replacement IRI.
pub fn parse_mapping_tsv(text: &str) -> Result<BTreeMap<Term, Term>> {
    let mut mapping = BTreeMap::new();
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
            Term::iri(s.trim()).map_err(|e| Error::Mapping {
                line: idx + 1,
                message: e.to_string(),
            })
        };
        mapping.insert(mk(fields[0])?, mk(fields[1])?);
    }
    Ok(mapping)
}

/// Replaces every mapped term wherever it occurs; unmapped terms and triple
/// count are preserved.
pub fn rewrite_kg(kg: &Graph, frag: &Fragment) -> Graph {
    let swap = |t: &Term| frag.mapping.get(t).cloned().unwrap_or_else(|| t.clone());
    Graph::from_triples(
        kg.triples().map(|t| Triple {
            subject: swap(&t.subject),
            predicate: swap(&t.predicate),
            object: swap(&t.object),
        }),
        kg.prefixes().clone(),
        kg.role(),
    )
}

/// The KG terms a fragment mapping is expected to cover: objects of type
/// assertions plus the non-declaration predicates.
pub fn kg_schema_terms(kg: &Graph) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for t in kg.triples() {
        let p = t.predicate.as_iri().unwrap_or_default();
        if p == vocab::RDF_TYPE {
            if t.object.is_iri() {
                out.insert(t.object.clone());
            }
        } else if !vocab::is_declaration_predicate(p) {
            out.insert(t.predicate.clone());
        }
    }
    out
}

pub const CRITERIA_NAMES: [&str; 6] = [
    "namespace_count",
    "abstraction_fit",
    "concept_coverage",
    "depth_fit",
    "completeness",
    "expressiveness",
];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriteriaVector {
    pub namespace_count: f64,
    pub abstraction_fit: f64,
    pub concept_coverage: f64,
    pub depth_fit: f64,
    pub completeness: f64,
    pub expressiveness: f64,
}

impl CriteriaVector {
    pub fn scores(&self) -> [f64; 6] {
        [
            self.namespace_count,
            self.abstraction_fit,
            self.concept_coverage,
            self.depth_fit,
            self.completeness,
            self.expressiveness,
        ]
    }
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct CriteriaConfig {
    /// Preferred class-hierarchy depth.
    pub target_depth: usize,
    /// Preferred mean depth of the mapped classes.
    pub target_abstraction: f64,
    /// Multiplicative weights, one per criterion, clamped into [0,1].
    pub weights: [f64; 6],
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        CriteriaConfig {
            target_depth: 3,
            target_abstraction: 2.0,
            weights: [1.0; 6],
        }
    }
}

fn namespace_of(iri: &str) -> &str {
    match iri.rfind(['#', '/']) {
        Some(i) => &iri[..=i],
        None => iri,
    }
}

struct RawScores {
    n_namespaces: usize,
    depth: usize,
    mean_depth: f64,
    coverage: f64,
    completeness: f64,
    expressiveness: usize,
}

/// Scores every fragment on the six criteria. Namespace and expressiveness
/// scores are normalized against the candidate set, so the vectors are only
/// comparable within one call.
pub fn score_criteria(
    fragments: &[Fragment],
    kg: &Graph,
    cfg: &CriteriaConfig,
) -> Vec<CriteriaVector> {
    let schema_terms = kg_schema_terms(kg);
    let raw: Vec<RawScores> = fragments
        .iter()
        .map(|frag| {
            let hierarchy = ClassHierarchy::build(&frag.graph);
            let schema = find_classes_and_properties(&frag.graph);
            let n_namespaces = schema
                .entities()
                .iter()
                .filter_map(|t| t.as_iri().map(namespace_of))
                .map(str::to_string)
                .collect::<BTreeSet<String>>()
                .len();
            let mapped_classes: BTreeSet<&Term> = frag
                .mapping
                .values()
                .filter(|t| schema.classes.contains(t))
                .collect();
            let coverage = if schema.classes.is_empty() {
                0.0
            } else {
                mapped_classes.len() as f64 / schema.classes.len() as f64
            };
            let depths: Vec<f64> = mapped_classes
                .iter()
                .filter_map(|t| hierarchy.depth_of(t))
                .map(|d| d as f64)
                .collect();
            let covered = schema_terms
                .iter()
                .filter(|t| frag.mapping.contains_key(t))
                .count();
            let completeness = if schema_terms.is_empty() {
                1.0
            } else {
                covered as f64 / schema_terms.len() as f64
            };
            let predicates: BTreeSet<&Term> = frag.graph.triples().map(|t| &t.predicate).collect();
            RawScores {
                n_namespaces,
                depth: hierarchy.max_depth(),
                mean_depth: mean(&depths),
                coverage,
                completeness,
                expressiveness: predicates.len(),
            }
        })
        .collect();

    let min_ns = raw.iter().map(|f| f.n_namespaces).min().unwrap_or(1);
    let max_expr = raw.iter().map(|f| f.expressiveness).max().unwrap_or(1).max(1);

    raw.iter()
        .map(|r| {
            let v = CriteriaVector {
                namespace_count: 1.0 / (1.0 + r.n_namespaces.saturating_sub(min_ns) as f64),
                abstraction_fit: 1.0 / (1.0 + (r.mean_depth - cfg.target_abstraction).abs()),
                concept_coverage: r.coverage,
                depth_fit: 1.0 / (1.0 + (r.depth as f64 - cfg.target_depth as f64).abs()),
                completeness: r.completeness,
                expressiveness: r.expressiveness as f64 / max_expr as f64,
            };
            apply_weights(v, &cfg.weights)
        })
        .collect()
}

fn apply_weights(v: CriteriaVector, weights: &[f64; 6]) -> CriteriaVector {
    let s = v.scores();
    let w = |i: usize| (s[i] * weights[i]).clamp(0.0, 1.0);
    CriteriaVector {
        namespace_count: w(0),
        abstraction_fit: w(1),
        concept_coverage: w(2),
        depth_fit: w(3),
        completeness: w(4),
        expressiveness: w(5),
    }
}

/// Max-min selection over named score vectors: highest minimum wins, ties
/// fall back to the higher mean, then to the lexicographically smaller name.
pub fn liebig_select_index(items: &[(String, Vec<f64>)]) -> Option<usize> {
    let key = |scores: &[f64]| {
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        (min, mean(scores))
    };
    items
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            let (min_a, mean_a) = key(&a.1);
            let (min_b, mean_b) = key(&b.1);
            min_a
                .partial_cmp(&min_b)
                .unwrap()
                .then(mean_a.partial_cmp(&mean_b).unwrap())
                .then_with(|| b.0.cmp(&a.0)) // smaller name wins
        })
        .map(|(i, _)| i)
}

/// Max-min selection over scored fragments.
pub fn liebig_select<'a>(scored: &'a [(Fragment, CriteriaVector)]) -> Option<&'a Fragment> {
    let items: Vec<(String, Vec<f64>)> = scored
        .iter()
        .map(|(f, v)| (f.name.clone(), v.scores().to_vec()))
        .collect();
    liebig_select_index(&items).map(|i| &scored[i].0)
}

/// Subclass hierarchy of a fragment graph. Roots sit at depth 1; classes with
/// several parents follow the lexicographically smallest one; subclass cycles
/// unreachable from any root are treated as roots themselves.
#[derive(Debug, Clone)]
pub struct ClassHierarchy {
    depth: BTreeMap<Term, usize>,
    parent: BTreeMap<Term, Term>,
    max_depth: usize,
}

impl ClassHierarchy {
    pub fn build(graph: &Graph) -> ClassHierarchy {
        let classes = find_classes_and_properties(graph).classes;
        let mut parents: BTreeMap<&Term, BTreeSet<&Term>> = BTreeMap::new();
        for t in graph.triples() {
            if t.predicate.as_iri() == Some(vocab::RDFS_SUBCLASS_OF)
                && classes.contains(&t.subject)
                && classes.contains(&t.object)
            {
                parents.entry(&t.subject).or_default().insert(&t.object);
            }
        }
        let chosen_parent: BTreeMap<Term, Term> = parents
            .iter()
            .filter_map(|(c, ps)| ps.iter().next().map(|p| ((*c).clone(), (*p).clone())))
            .collect();

        let mut depth: BTreeMap<Term, usize> = BTreeMap::new();
        let mut queue: VecDeque<Term> = VecDeque::new();
        for c in &classes {
            if !chosen_parent.contains_key(c) {
                depth.insert(c.clone(), 1);
                queue.push_back(c.clone());
            }
        }
        let children: BTreeMap<&Term, Vec<&Term>> = chosen_parent.iter().fold(
            BTreeMap::new(),
            |mut acc, (c, p)| {
                acc.entry(p).or_default().push(c);
                acc
            },
        );
        while let Some(node) = queue.pop_front() {
            let d = depth[&node];
            if let Some(kids) = children.get(&node) {
                for kid in kids {
                    if !depth.contains_key(*kid) {
                        depth.insert((*kid).clone(), d + 1);
                        queue.push_back((*kid).clone());
                    }
                }
            }
        }
        // cycle members never reached a root: treat as roots
        for c in &classes {
            depth.entry(c.clone()).or_insert(1);
        }
        let max_depth = depth.values().copied().max().unwrap_or(0);
        ClassHierarchy {
            depth,
            parent: chosen_parent,
            max_depth,
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = &Term> {
        self.depth.keys()
    }

    pub fn contains(&self, class: &Term) -> bool {
        self.depth.contains_key(class)
    }

    pub fn depth_of(&self, class: &Term) -> Option<usize> {
        self.depth.get(class).copied()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// The ancestor of `class` at exactly `level`, or the class itself when
    /// it already sits at or above that level.
    pub fn ancestor_at_level(&self, class: &Term, level: usize) -> Option<Term> {
        let mut current = class.clone();
        let mut d = self.depth_of(class)?;
        while d > level {
            current = self.parent.get(&current)?.clone();
            d -= 1;
        }
        Some(current)
    }
}

/// Classification accuracy of the rewritten KG's typed instances at each
/// abstraction level, by nearest label-centroid in embedding space, averaged
/// over seeds.
pub fn joint_eval(
    kg: &Graph,
    frag: &Fragment,
    levels: &[usize],
    walk_cfg: &WalkConfig,
    sg_cfg: &SkipGramConfig,
    seeds: &[u64],
) -> Result<BTreeMap<usize, EvalCell>> {
    let rewritten = rewrite_kg(kg, frag);
    let hierarchy = ClassHierarchy::build(&frag.graph);
    for &level in levels {
        if level == 0 || level > hierarchy.max_depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: hierarchy.max_depth(),
            });
        }
    }

    // instance → its (lexicographically smallest) fragment class
    let mut instance_class: BTreeMap<Term, Term> = BTreeMap::new();
    for t in rewritten.triples() {
        if t.predicate.as_iri() == Some(vocab::RDF_TYPE) && hierarchy.contains(&t.object) {
            instance_class
                .entry(t.subject.clone())
                .and_modify(|c| {
                    if t.object < *c {
                        *c = t.object.clone();
                    }
                })
                .or_insert_with(|| t.object.clone());
        }
    }
    if instance_class.is_empty() {
        return Err(Error::NoTypedInstances);
    }

    let space = WalkSpace::prepare(&rewritten, WalkKind::DeepWalk, walk_cfg)?;
    let mut per_level: BTreeMap<usize, Vec<f64>> =
        levels.iter().map(|&l| (l, Vec::new())).collect();
    for &seed in seeds {
        let mut wcfg = walk_cfg.clone();
        wcfg.seed = seed;
        let mut scfg = sg_cfg.clone();
        scfg.seed = seed;
        let walks = space.generate(&wcfg);
        let table = train_skipgram(&walks, &scfg)?;

        for &level in levels {
            let labels: BTreeMap<&Term, Term> = instance_class
                .iter()
                .filter_map(|(inst, cls)| {
                    hierarchy.ancestor_at_level(cls, level).map(|a| (inst, a))
                })
                .collect();
            let mut centroids: BTreeMap<Term, (Vec<f64>, usize)> = BTreeMap::new();
            for (inst, label) in &labels {
                let Some(v) = table.get(inst) else { continue };
                let entry = centroids
                    .entry(label.clone())
                    .or_insert_with(|| (vec![0.0; v.len()], 0));
                for (acc, x) in entry.0.iter_mut().zip(v) {
                    *acc += x;
                }
                entry.1 += 1;
            }
            let centroids: BTreeMap<Term, Vec<f64>> = centroids
                .into_iter()
                .map(|(label, (sum, n))| {
                    (label, sum.into_iter().map(|x| x / n as f64).collect())
                })
                .collect();

            let mut correct = 0usize;
            let mut total = 0usize;
            for (inst, label) in &labels {
                let Some(v) = table.get(inst) else { continue };
                total += 1;
                let best = centroids
                    .iter()
                    .map(|(l, c)| (l, cosine(v, c)))
                    .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| b.0.cmp(a.0)));
                if let Some((predicted, _)) = best {
                    if predicted == label {
                        correct += 1;
                    }
                }
            }
            let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
            per_level.get_mut(&level).unwrap().push(accuracy);
        }
    }
    Ok(per_level
        .into_iter()
        .map(|(level, accs)| (level, EvalCell {
            mean: mean(&accs),
            sd: sample_sd(&accs),
        }))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse, Format, GraphRole};

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://e.org/{s}")).unwrap()
    }

    fn frag_graph() -> Graph {
        parse(
            r#"
@prefix ex: <http://e.org/> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:Root a owl:Class .
ex:Mid a owl:Class .
ex:Mid rdfs:subClassOf ex:Root .
ex:Leaf a owl:Class .
ex:Leaf rdfs:subClassOf ex:Mid .
ex:rel a owl:ObjectProperty .
"#,
            Format::TurtleSubset,
            GraphRole::Ontology,
        )
        .unwrap()
    }

    #[test]
    fn identity_mapping_keeps_kg_unchanged() {
        let kg = parse(
            "<http://e.org/a> <http://e.org/p> <http://e.org/b> .",
            Format::NTriples,
            GraphRole::Kg,
        )
        .unwrap();
        let frag = Fragment::new("id", BTreeMap::new(), frag_graph()).unwrap();
        let out = rewrite_kg(&kg, &frag);
        assert_eq!(out, kg.with_role(GraphRole::Kg));
    }

    #[test]
    fn single_term_mapping_rewrites_every_occurrence() {
        let kg = parse(
            r#"
@prefix ex: <http://e.org/> .
ex:a ex:p ex:b .
ex:b ex:p ex:a .
ex:c ex:p ex:b .
"#,
            Format::TurtleSubset,
            GraphRole::Kg,
        )
        .unwrap();
        let mapping: BTreeMap<Term, Term> = [(iri("b"), iri("Leaf"))].into_iter().collect();
        let frag = Fragment::new("one", mapping, frag_graph()).unwrap();
        let out = rewrite_kg(&kg, &frag);
        assert_eq!(out.len(), kg.len());
        let occurrences = out
            .triples()
            .filter(|t| t.subject == iri("Leaf") || t.object == iri("Leaf"))
            .count();
        assert_eq!(occurrences, 3);
        assert!(out.triples().all(|t| t.subject != iri("b") && t.object != iri("b")));
    }

    #[test]
    fn mapping_targets_must_exist_in_fragment_graph() {
        let mapping: BTreeMap<Term, Term> = [(iri("x"), iri("NotThere"))].into_iter().collect();
        assert!(Fragment::new("bad", mapping, frag_graph()).is_err());
    }

    #[test]
    fn liebig_prefers_highest_minimum() {
        let items = vec![
            ("skewed".to_string(), vec![0.9, 0.1]),
            ("balanced".to_string(), vec![0.5, 0.5]),
        ];
        assert_eq!(liebig_select_index(&items), Some(1));
    }

    #[test]
    fn liebig_tie_breaks_by_mean_then_name() {
        let items = vec![
            ("b".to_string(), vec![0.5, 0.9]),
            ("a".to_string(), vec![0.5, 0.8]),
        ];
        assert_eq!(liebig_select_index(&items), Some(0), "higher mean wins");
        let items = vec![
            ("b".to_string(), vec![0.5, 0.9]),
            ("a".to_string(), vec![0.9, 0.5]),
        ];
        assert_eq!(liebig_select_index(&items), Some(1), "same min+mean: smaller name");
    }

    #[test]
    fn hierarchy_depths_and_ancestors() {
        let h = ClassHierarchy::build(&frag_graph());
        assert_eq!(h.max_depth(), 3);
        assert_eq!(h.depth_of(&iri("Root")), Some(1));
        assert_eq!(h.depth_of(&iri("Leaf")), Some(3));
        assert_eq!(h.ancestor_at_level(&iri("Leaf"), 1), Some(iri("Root")));
        assert_eq!(h.ancestor_at_level(&iri("Leaf"), 2), Some(iri("Mid")));
        assert_eq!(h.ancestor_at_level(&iri("Root"), 2), Some(iri("Root")));
    }
}
