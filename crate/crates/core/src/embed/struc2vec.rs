//! Multilayer structural-similarity graph and its biased walk.
//!
//! Layer `k` connects node pairs by the accumulated cost of aligning their
//! ordered degree sequences at hop distances `0..=k`; sequence alignment uses
//! a dynamic-time-warping cost with `max/min - 1` as the element distance.
//! Walks stay in a layer with fixed probability and otherwise move up with
//! probability proportional to `ln(Γ + e)`, where Γ counts the node's
//! above-average edges in the current layer.



use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::embed::walks::{weighted_choice, WalkGraph};

const STAY_PROBABILITY: f64 = 0.7;

#[derive(Debug, Clone)]
pub struct StrucGraph {
    /// `layers[k][u]` lists `(v, weight)` for every pair whose degree
    /// sequences exist through hop `k`.
    layers: Vec<Vec<Vec<(usize, f64)>>>,
    /// `gamma[k][u]`: number of layer-`k` edges of `u` heavier than the layer
    /// average.
    gamma: Vec<Vec<usize>>,
    node_count: usize,
}

impl StrucGraph {
    pub fn build(graph: &WalkGraph, max_layers: usize) -> StrucGraph {
        let n = graph.node_count();
        let rings = degree_rings(graph, max_layers);
        let layer_count = max_layers.max(1);

        let mut layers: Vec<Vec<Vec<(usize, f64)>>> = Vec::with_capacity(layer_count);
        let mut costs: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
        for k in 0..layer_count {
            let mut layer = vec![Vec::new(); n];
            for u in 0..n {
                for v in (u + 1)..n {
                    let (ru, rv) = (&rings[u], &rings[v]);
                    if k >= ru.len() || k >= rv.len() || ru[k].is_empty() || rv[k].is_empty() {
                        costs[u][v] = f64::INFINITY;
                        continue;
                    }
                    if costs[u][v].is_infinite() {
                        continue;
                    }
                    costs[u][v] += dtw_cost(&ru[k], &rv[k]);
                    let w = (-costs[u][v]).exp();
                    layer[u].push((v, w));
                    layer[v].push((u, w));
                }
            }
            layers.push(layer);
        }

        let mut gamma = Vec::with_capacity(layer_count);
        for layer in &layers {
            let (mut sum, mut count) = (0.0f64, 0usize);
            for edges in layer {
                for (_, w) in edges {
                    sum += w;
                    count += 1;
                }
            }
            let avg = if count == 0 { 0.0 } else { sum / count as f64 };
            gamma.push(
                layer
                    .iter()
                    .map(|edges| edges.iter().filter(|(_, w)| *w > avg).count())
                    .collect(),
            );
        }

        StrucGraph {
            layers,
            gamma,
            node_count: n,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    fn has_layer(&self, k: usize, u: usize) -> bool {
        k < self.layers.len() && !self.layers[k][u].is_empty()
    }

    pub fn walk_from(&self, start: usize, length: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut walk = vec![start];
        if !self.has_layer(0, start) {
            return walk;
        }
        let mut layer = 0usize;
        let mut current = start;
        let mut attempts = 0usize;
        while walk.len() < length && attempts < 20 * length {
            attempts += 1;
            if !self.has_layer(layer, current) {
                if layer == 0 {
                    break;
                }
                layer -= 1;
                continue;
            }
            if rng.gen::<f64>() < STAY_PROBABILITY {
                let edges = &self.layers[layer][current];
                let weights: Vec<f64> = edges.iter().map(|(_, w)| *w).collect();
                current = edges[weighted_choice(&weights, rng)].0;
                walk.push(current);
            } else {
                let up_exists = self.has_layer(layer + 1, current);
                let down_exists = layer > 0;
                match (up_exists, down_exists) {
                    (false, false) => {}
                    (true, false) => layer += 1,
                    (false, true) => layer -= 1,
                    (true, true) => {
                        let w_up = ((self.gamma[layer][current] as f64) + std::f64::consts::E).ln();
                        if rng.gen::<f64>() < w_up / (w_up + 1.0) {
                            layer += 1;
                        } else {
                            layer -= 1;
                        }
                    }
                }
            }
        }
        walk
    }
}

/// Ordered (ascending) degree sequences of the nodes at exactly `k` hops,
/// for `k` up to `max_layers - 1` or until the ring is empty.
fn degree_rings(graph: &WalkGraph, max_layers: usize) -> Vec<Vec<Vec<usize>>> {
    let n = graph.node_count();
    let mut all = Vec::with_capacity(n);
    for start in 0..n {
        let mut rings: Vec<Vec<usize>> = Vec::new();
        let mut distance = vec![usize::MAX; n];
        distance[start] = 0;
        let mut frontier = vec![start];
        let mut depth = 0usize;
        while !frontier.is_empty() && depth < max_layers {
            let mut degrees: Vec<usize> = frontier.iter().map(|&u| graph.degree(u)).collect();
            degrees.sort_unstable();
            rings.push(degrees);
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in graph.neighbors(u) {
                    if distance[v] == usize::MAX {
                        distance[v] = depth + 1;
                        next.push(v);
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
            depth += 1;
        }
        all.push(rings);
    }
    all
}

/// Dynamic-time-warping alignment cost with element distance
/// `max(a,b)/min(a,b) - 1`.
fn dtw_cost(a: &[usize], b: &[usize]) -> f64 {
    let dist = |x: usize, y: usize| {
        let hi = x.max(y) as f64;
        if hi == 0.0 {
            return 0.0;
        }
        hi / (x.min(y).max(1) as f64) - 1.0
    };
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![vec![f64::INFINITY; m + 1]; n + 1];
    dp[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            let best = dp[i - 1][j - 1].min(dp[i - 1][j]).min(dp[i][j - 1]);
            dp[i][j] = best + dist(a[i - 1], b[j - 1]);
        }
    }
    dp[n][m]
}
