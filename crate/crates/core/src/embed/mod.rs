//! Walk-based node embeddings: DeepWalk, Node2Vec and Struc2Vec walk
//! generation plus skip-gram training and cosine similarity queries.

pub mod skipgram;
mod struc2vec;
mod walks;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::semantic::cosine;
use crate::rdf::{Graph, Term};
pub use skipgram::{
    loss_and_grads, train_skipgram, train_skipgram_with_stats, SkipGramConfig, TrainStats,
};
pub use struc2vec::StrucGraph;
pub use walks::WalkGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    DeepWalk,
    Node2Vec,
    Struc2Vec,
}

impl WalkKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WalkKind::DeepWalk => "deepwalk",
            WalkKind::Node2Vec => "node2vec",
            WalkKind::Struc2Vec => "struc2vec",
        }
    }

    pub fn parse(s: &str) -> Option<WalkKind> {
        match s {
            "deepwalk" => Some(WalkKind::DeepWalk),
            "node2vec" => Some(WalkKind::Node2Vec),
            "struc2vec" => Some(WalkKind::Struc2Vec),
            _ => None,
        }
    }

    fn salt(&self) -> u64 {
        match self {
            WalkKind::DeepWalk => 1,
            WalkKind::Node2Vec => 2,
            WalkKind::Struc2Vec => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Node2Vec return parameter.
    pub p: f64,
    /// Node2Vec in-out parameter.
    pub q: f64,
    /// Struc2Vec layer cap.
    pub layers: usize,
    /// Treat non-vocabulary predicates as walkable nodes.
    pub reify_predicates: bool,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 20,
            p: 1.0,
            q: 1.0,
            layers: 3,
            reify_predicates: false,
            seed: 42,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 || self.walk_length == 0 || self.layers == 0 {
            return Err(Error::InvalidConfig(
                "walks_per_node, walk_length and layers must be positive".into(),
            ));
        }
        if self.p <= 0.0 || self.q <= 0.0 || !self.p.is_finite() || !self.q.is_finite() {
            return Err(Error::InvalidConfig("p and q must be positive reals".into()));
        }
        Ok(())
    }
}

/// A prepared walk substrate. Building it (especially the Struc2Vec layers)
/// dominates the cost of repeated seeded runs, so evaluation loops prepare
/// once and generate per seed.
pub struct WalkSpace {
    graph: WalkGraph,
    kind: WalkKind,
    multilayer: Option<StrucGraph>,
}

impl WalkSpace {
    pub fn prepare(g: &Graph, kind: WalkKind, cfg: &WalkConfig) -> Result<WalkSpace> {
        cfg.validate()?;
        if g.is_empty() {
            return Err(Error::EmptyGraph("cannot walk an empty graph".into()));
        }
        let graph = WalkGraph::build(g, cfg.reify_predicates);
        if graph.node_count() == 0 {
            return Err(Error::EmptyGraph("graph has no walkable nodes".into()));
        }
        let multilayer = match kind {
            WalkKind::Struc2Vec => Some(StrucGraph::build(&graph, cfg.layers)),
            _ => None,
        };
        Ok(WalkSpace {
            graph,
            kind,
            multilayer,
        })
    }

    pub fn walk_graph(&self) -> &WalkGraph {
        &self.graph
    }

    /// `walks_per_node` sequences per node, each `walk_length` nodes long;
    /// isolated nodes yield singleton walks.
    pub fn generate(&self, cfg: &WalkConfig) -> Vec<Vec<Term>> {
        let salt = self.kind.salt();
        let mut out = Vec::with_capacity(self.graph.node_count() * cfg.walks_per_node);
        for node in 0..self.graph.node_count() {
            for walk_idx in 0..cfg.walks_per_node {
                let mut rng = walks::rng_for(cfg.seed, salt, node, walk_idx);
                let path = match (&self.kind, &self.multilayer) {
                    (WalkKind::DeepWalk, _) => {
                        self.graph.deepwalk_from(node, cfg.walk_length, &mut rng)
                    }
                    (WalkKind::Node2Vec, _) => {
                        self.graph
                            .node2vec_from(node, cfg.walk_length, cfg.p, cfg.q, &mut rng)
                    }
                    (WalkKind::Struc2Vec, Some(ml)) => {
                        ml.walk_from(node, cfg.walk_length, &mut rng)
                    }
                    (WalkKind::Struc2Vec, None) => unreachable!("prepared above"),
                };
                out.push(path.into_iter().map(|i| self.graph.term(i).clone()).collect());
            }
        }
        out
    }
}

/// One-shot walk generation.
pub fn generate_walks(g: &Graph, cfg: &WalkConfig, kind: WalkKind) -> Result<Vec<Vec<Term>>> {
    Ok(WalkSpace::prepare(g, kind, cfg)?.generate(cfg))
}

/// Node-to-vector map of one trained space.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: BTreeMap<Term, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(vectors: BTreeMap<Term, Vec<f64>>) -> Result<EmbeddingTable> {
        let mut dimension = 0;
        for (term, v) in &vectors {
            if dimension == 0 {
                dimension = v.len();
            }
            if v.len() != dimension {
                return Err(Error::InvalidConfig(format!(
                    "vector for {term} has dimension {} instead of {dimension}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "vector for {term} has non-finite components"
                )));
            }
        }
        Ok(EmbeddingTable { dimension, vectors })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.vectors.contains_key(term)
    }

    pub fn get(&self, term: &Term) -> Option<&[f64]> {
        self.vectors.get(term).map(Vec::as_slice)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.vectors.keys()
    }

    /// Top-k terms by cosine similarity, the queried node excluded, ties
    /// broken lexicographically.
    pub fn most_similar(&self, node: &Term, k: usize) -> Result<Vec<(Term, f64)>> {
        let anchor = self
            .get(node)
            .ok_or_else(|| Error::UnknownNode(node.to_string()))?;
        let mut scored: Vec<(Term, f64)> = self
            .vectors
            .iter()
            .filter(|(t, _)| *t != node)
            .map(|(t, v)| (t.clone(), cosine(anchor, v)))
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }

    /// Text form: `N D` header, then one line per node with its identifier
    /// and D components.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vectors.len(), self.dimension);
        for (term, v) in &self.vectors {
            let id = match term {
                Term::Iri(iri) => iri.clone(),
                Term::Blank(l) => format!("_:{l}"),
                Term::Literal { lexical, .. } => lexical.clone(),
            };
            out.push_str(&id);
            for x in v {
                out.push(' ');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<EmbeddingTable> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::VectorFile {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut parts = header.split_whitespace();
        let (n, d): (usize, usize) = match (
            parts.next().and_then(|v| v.parse().ok()),
            parts.next().and_then(|v| v.parse().ok()),
        ) {
            (Some(n), Some(d)) => (n, d),
            _ => {
                return Err(Error::VectorFile {
                    line: 1,
                    message: "header must be 'N D'".into(),
                })
            }
        };
        let mut vectors = BTreeMap::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let id = fields.next().unwrap();
            let term = if let Some(label) = id.strip_prefix("_:") {
                Term::blank(label)
            } else {
                Term::iri(id).map_err(|e| Error::VectorFile {
                    line: idx + 1,
                    message: e.to_string(),
                })?
            };
            let v: Vec<f64> = fields
                .map(|f| {
                    f.parse().map_err(|_| Error::VectorFile {
                        line: idx + 1,
                        message: format!("bad number '{f}'"),
                    })
                })
                .collect::<Result<_>>()?;
            if v.len() != d {
                return Err(Error::VectorFile {
                    line: idx + 1,
                    message: format!("expected {d} components, found {}", v.len()),
                });
            }
            vectors.insert(term, v);
        }
        if vectors.len() != n {
            return Err(Error::VectorFile {
                line: 1,
                message: format!("header says {n} entries, file has {}", vectors.len()),
            });
        }
        EmbeddingTable::new(vectors)
    }
}

/// Debug dump: one walk per line, node identifiers space-separated.
pub fn walks_to_text(walks: &[Vec<Term>]) -> String {
    let mut out = String::new();
    for walk in walks {
        let ids: Vec<String> = walk
            .iter()
            .map(|t| match t {
                Term::Iri(iri) => iri.clone(),
                Term::Blank(l) => format!("_:{l}"),
                Term::Literal { lexical, .. } => lexical.clone(),
            })
            .collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{GraphRole, Triple};

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://e.org/{s}")).unwrap()
    }

    fn path_graph(n: usize) -> Graph {
        let triples: Vec<Triple> = (0..n - 1)
            .map(|i| Triple::new(iri(&format!("n{i}")), iri("p"), iri(&format!("n{}", i + 1))).unwrap())
            .collect();
        Graph::from_triples(triples, BTreeMap::new(), GraphRole::Kg)
    }

    #[test]
    fn walk_count_and_length_contract() {
        let g = path_graph(6);
        let cfg = WalkConfig {
            walks_per_node: 4,
            walk_length: 9,
            ..WalkConfig::default()
        };
        for kind in [WalkKind::DeepWalk, WalkKind::Node2Vec, WalkKind::Struc2Vec] {
            let walks = generate_walks(&g, &cfg, kind).unwrap();
            assert_eq!(walks.len(), 6 * 4, "{kind:?}");
            for w in &walks {
                assert_eq!(w.len(), 9, "{kind:?}");
            }
        }
    }

    #[test]
    fn isolated_nodes_yield_singletons() {
        // the only triple has a literal object, so the subject is isolated
        let t = Triple::new(iri("alone"), iri("p"), Term::literal("x")).unwrap();
        let g = Graph::from_triples(vec![t], BTreeMap::new(), GraphRole::Kg);
        let cfg = WalkConfig {
            walks_per_node: 3,
            walk_length: 7,
            ..WalkConfig::default()
        };
        let walks = generate_walks(&g, &cfg, WalkKind::DeepWalk).unwrap();
        assert_eq!(walks.len(), 3);
        assert!(walks.iter().all(|w| w.len() == 1));
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = Graph::new(GraphRole::Kg);
        assert!(generate_walks(&g, &WalkConfig::default(), WalkKind::DeepWalk).is_err());
    }

    #[test]
    fn walks_are_seed_deterministic() {
        let g = path_graph(5);
        let cfg = WalkConfig::default();
        let a = generate_walks(&g, &cfg, WalkKind::Node2Vec).unwrap();
        let b = generate_walks(&g, &cfg, WalkKind::Node2Vec).unwrap();
        assert_eq!(a, b);
        let other = WalkConfig {
            seed: 43,
            ..WalkConfig::default()
        };
        let c = generate_walks(&g, &other, WalkKind::Node2Vec).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn most_similar_basics() {
        let mut vectors = BTreeMap::new();
        vectors.insert(iri("a"), vec![1.0, 0.0]);
        vectors.insert(iri("b"), vec![1.0, 0.0]);
        vectors.insert(iri("c"), vec![0.0, 1.0]);
        let table = EmbeddingTable::new(vectors).unwrap();
        assert!(table.most_similar(&iri("a"), 0).unwrap().is_empty());
        let top = table.most_similar(&iri("a"), 2).unwrap();
        assert_eq!(top[0].0, iri("b"));
        assert!((top[0].1 - 1.0).abs() < 1e-12);
        assert!(table.most_similar(&iri("zzz"), 1).is_err());
    }

    #[test]
    fn table_text_round_trip() {
        let mut vectors = BTreeMap::new();
        vectors.insert(iri("a"), vec![0.25, -1.5]);
        vectors.insert(Term::blank("b0"), vec![1e-9, 3.0]);
        let table = EmbeddingTable::new(vectors).unwrap();
        let text = table.to_text();
        let parsed = EmbeddingTable::parse(&text).unwrap();
        assert_eq!(table, parsed);
    }
}
