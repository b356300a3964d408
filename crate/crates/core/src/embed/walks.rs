//! Walkable view of an RDF graph and the first/second-order random walks.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rdf::{Graph, Term};

/// Undirected adjacency over the graph's walkable nodes.
///
/// Literals and reserved vocabulary IRIs never become nodes; vocabulary
/// predicates (type, subclass, domain, the bridge predicate, ...) contribute
/// plain subject-object edges. With `reify_predicates` a domain predicate
/// becomes a node splicing itself between its subjects and objects, which is
/// what lets property terms participate in similarity queries.
#[derive(Debug, Clone)]
pub struct WalkGraph {
    nodes: Vec<Term>,
    index: BTreeMap<Term, usize>,
    adjacency: Vec<Vec<usize>>,
}

fn walkable(term: &Term) -> bool {
    match term {
        Term::Iri(_) => !term.is_vocab(),
        Term::Blank(_) => true,
        Term::Literal { .. } => false,
    }
}

impl WalkGraph {
    pub fn build(g: &Graph, reify_predicates: bool) -> WalkGraph {
        let mut node_set: BTreeSet<Term> = BTreeSet::new();
        let mut edges: BTreeSet<(Term, Term)> = BTreeSet::new();
        let add_edge = |a: &Term, b: &Term, edges: &mut BTreeSet<(Term, Term)>| {
            if a != b {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                edges.insert((x.clone(), y.clone()));
            }
        };

        for t in g.triples() {
            let s_ok = walkable(&t.subject);
            let o_ok = walkable(&t.object);
            if s_ok {
                node_set.insert(t.subject.clone());
            }
            if o_ok {
                node_set.insert(t.object.clone());
            }
            let reify = reify_predicates && walkable(&t.predicate);
            if reify {
                node_set.insert(t.predicate.clone());
                if s_ok {
                    add_edge(&t.subject, &t.predicate, &mut edges);
                }
                if o_ok {
                    add_edge(&t.predicate, &t.object, &mut edges);
                }
            } else if s_ok && o_ok {
                add_edge(&t.subject, &t.object, &mut edges);
            }
        }

        let nodes: Vec<Term> = node_set.into_iter().collect();
        let index: BTreeMap<Term, usize> =
            nodes.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (a, b) in edges {
            let (ia, ib) = (index[&a], index[&b]);
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
            neighbors.dedup();
        }
        WalkGraph {
            nodes,
            index,
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Term] {
        &self.nodes
    }

    pub fn term(&self, idx: usize) -> &Term {
        &self.nodes[idx]
    }

    pub fn index_of(&self, term: &Term) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Uniform next-hop walk.
    pub fn deepwalk_from(&self, start: usize, length: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        let mut current = start;
        while walk.len() < length {
            let neighbors = self.neighbors(current);
            if neighbors.is_empty() {
                break;
            }
            current = neighbors[rng.gen_range(0..neighbors.len())];
            walk.push(current);
        }
        walk
    }

    /// Second-order walk with unnormalized weights `1/p` for returning to the
    /// previous node, `1` for nodes at distance one from it and `1/q` for
    /// distance two.
    pub fn node2vec_from(
        &self,
        start: usize,
        length: usize,
        p: f64,
        q: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        if length == 1 || self.degree(start) == 0 {
            return walk;
        }
        let first = self.neighbors(start)[rng.gen_range(0..self.degree(start))];
        walk.push(first);
        while walk.len() < length {
            let prev = walk[walk.len() - 2];
            let current = walk[walk.len() - 1];
            let neighbors = self.neighbors(current);
            if neighbors.is_empty() {
                break;
            }
            let weights: Vec<f64> = neighbors
                .iter()
                .map(|&x| {
                    if x == prev {
                        1.0 / p
                    } else if self.has_edge(prev, x) {
                        1.0
                    } else {
                        1.0 / q
                    }
                })
                .collect();
            walk.push(neighbors[weighted_choice(&weights, rng)]);
        }
        walk
    }
}

pub(crate) fn weighted_choice(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        draw -= w;
        if draw < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Stable per-walk seed derived from the run seed, node and walk indices.
pub(crate) fn walk_seed(seed: u64, salt: u64, node: usize, walk: usize) -> u64 {
    let mut z = seed
        .wrapping_add(salt.wrapping_mul(0x9e3779b97f4a7c15))
        .wrapping_add((node as u64).wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add((walk as u64).wrapping_mul(0x94d049bb133111eb));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub(crate) fn rng_for(seed: u64, salt: u64, node: usize, walk: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(walk_seed(seed, salt, node, walk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{GraphRole, Triple};

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://e.org/{s}")).unwrap()
    }

    fn line_graph(names: &[&str]) -> Graph {
        let triples: Vec<Triple> = names
            .windows(2)
            .map(|w| Triple::new(iri(w[0]), iri("edge"), iri(w[1])).unwrap())
            .collect();
        Graph::from_triples(triples, BTreeMap::new(), GraphRole::Kg)
    }

    #[test]
    fn single_edge_deepwalk_alternates() {
        let g = line_graph(&["a", "b"]);
        let wg = WalkGraph::build(&g, false);
        let start = wg.index_of(&iri("a")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let walk = wg.deepwalk_from(start, 10, &mut rng);
        assert_eq!(walk.len(), 10);
        for (i, &n) in walk.iter().enumerate() {
            let expected = if i % 2 == 0 { "a" } else { "b" };
            assert_eq!(wg.term(n), &iri(expected));
        }
    }

    #[test]
    fn reification_splices_predicates() {
        let g = line_graph(&["a", "b"]);
        let plain = WalkGraph::build(&g, false);
        assert_eq!(plain.node_count(), 2);
        let reified = WalkGraph::build(&g, true);
        assert_eq!(reified.node_count(), 3);
        let p = reified.index_of(&iri("edge")).unwrap();
        assert_eq!(reified.degree(p), 2);
        let (a, b) = (
            reified.index_of(&iri("a")).unwrap(),
            reified.index_of(&iri("b")).unwrap(),
        );
        assert!(!reified.has_edge(a, b));
    }

    #[test]
    fn vocabulary_terms_never_become_nodes() {
        let t = Triple::new(
            iri("a"),
            Term::iri(crate::rdf::vocab::RDF_TYPE).unwrap(),
            Term::iri(crate::rdf::vocab::OWL_CLASS).unwrap(),
        )
        .unwrap();
        let g = Graph::from_triples(vec![t], BTreeMap::new(), GraphRole::Kg);
        let wg = WalkGraph::build(&g, true);
        assert_eq!(wg.node_count(), 1);
        assert_eq!(wg.degree(0), 0);
    }
}
