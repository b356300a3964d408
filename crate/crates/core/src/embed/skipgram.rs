//! Skip-gram with negative sampling, trained by plain SGD over walk windows.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::rdf::Term;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkipGramConfig {
    pub dimension: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// 1 = deterministic; >1 trains with unsynchronized concurrent updates.
    pub workers: usize,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dimension: 64,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            seed: 42,
            workers: 1,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidConfig("dimension must be >= 2".into()));
        }
        if self.window == 0 || self.negatives == 0 || self.epochs == 0 || self.workers == 0 {
            return Err(Error::InvalidConfig(
                "window, negatives, epochs and workers must be positive".into(),
            ));
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainStats {
    pub probe_loss_first: f64,
    pub probe_loss_final: f64,
}

/// Full training result: the input-side embeddings (the published table),
/// the context-side vectors, and the probe losses.
pub struct TrainOutput {
    pub embeddings: EmbeddingTable,
    pub context: EmbeddingTable,
    pub stats: TrainStats,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Loss and gradients of one negative-sampling example:
/// `-ln σ(c·o) - Σ ln σ(-c·n)`. Returns the gradients with respect to the
/// center vector, the context vector and each negative vector.
#[allow(clippy::type_complexity)]
pub fn loss_and_grads(
    center: &[f64],
    context: &[f64],
    negatives: &[&[f64]],
) -> (f64, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let dim = center.len();

    let pos = sigmoid(dot(center, context));
    let mut loss = -pos.max(f64::MIN_POSITIVE).ln();
    let mut grad_center = vec![0.0; dim];
    for (g, &o) in grad_center.iter_mut().zip(context) {
        *g += (pos - 1.0) * o;
    }
    let grad_context: Vec<f64> = center.iter().map(|&c| (pos - 1.0) * c).collect();

    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let s = sigmoid(dot(center, neg));
        loss -= (1.0 - s).max(f64::MIN_POSITIVE).ln();
        for (g, &n) in grad_center.iter_mut().zip(neg.iter()) {
            *g += s * n;
        }
        grad_negatives.push(center.iter().map(|&c| s * c).collect());
    }
    (loss, grad_center, grad_context, grad_negatives)
}

struct Vocab {
    terms: Vec<Term>,
    index: BTreeMap<Term, usize>,
    /// cumulative noise mass, frequency^0.75
    noise_cdf: Vec<f64>,
}

impl Vocab {
    fn build(walks: &[Vec<Term>]) -> Vocab {
        let mut counts: BTreeMap<Term, u64> = BTreeMap::new();
        for walk in walks {
            for t in walk {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
        }
        let terms: Vec<Term> = counts.keys().cloned().collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let mut noise_cdf = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for t in &terms {
            acc += (counts[t] as f64).powf(0.75);
            noise_cdf.push(acc);
        }
        Vocab {
            terms,
            index,
            noise_cdf,
        }
    }

    fn sample_noise(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.noise_cdf.last().unwrap();
        let draw = rng.gen::<f64>() * total;
        self.noise_cdf.partition_point(|&c| c <= draw).min(self.terms.len() - 1)
    }
}

/// Fixed evaluation batch: the first window pairs of the corpus with
/// negatives drawn once from a dedicated rng.
struct Probe {
    pairs: Vec<(usize, usize, Vec<usize>)>,
}

impl Probe {
    fn build(walks: &[Vec<usize>], window: usize, negatives: usize, vocab: &Vocab, seed: u64) -> Probe {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x70726f6265); // "probe"
        let mut pairs = Vec::new();
        'outer: for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(window);
                let hi = (i + window).min(walk.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let negs = (0..negatives).map(|_| vocab.sample_noise(&mut rng)).collect();
                    pairs.push((center, walk[j], negs));
                    if pairs.len() >= 64 {
                        break 'outer;
                    }
                }
            }
        }
        Probe { pairs }
    }

    fn loss(&self, w: &[f64], c: &[f64], dim: usize) -> f64 {
        fn row(m: &[f64], i: usize, dim: usize) -> &[f64] {
            &m[i * dim..(i + 1) * dim]
        }
        let mut total = 0.0;
        for (center, context, negs) in &self.pairs {
            let neg_rows: Vec<&[f64]> = negs.iter().map(|&n| row(c, n, dim)).collect();
            let (loss, ..) = loss_and_grads(row(w, *center, dim), row(c, *context, dim), &neg_rows);
            total += loss;
        }
        total / self.pairs.len().max(1) as f64
    }
}

pub fn train_skipgram(walks: &[Vec<Term>], cfg: &SkipGramConfig) -> Result<EmbeddingTable> {
    train_skipgram_detailed(walks, cfg).map(|out| out.embeddings)
}

pub fn train_skipgram_with_stats(
    walks: &[Vec<Term>],
    cfg: &SkipGramConfig,
) -> Result<(EmbeddingTable, TrainStats)> {
    train_skipgram_detailed(walks, cfg).map(|out| (out.embeddings, out.stats))
}

pub fn train_skipgram_detailed(walks: &[Vec<Term>], cfg: &SkipGramConfig) -> Result<TrainOutput> {
    cfg.validate()?;
    if walks.is_empty() || walks.iter().all(|w| w.is_empty()) {
        return Err(Error::EmptyGraph("no walks to train on".into()));
    }
    let vocab = Vocab::build(walks);
    let dim = cfg.dimension;
    let indexed: Vec<Vec<usize>> = walks
        .iter()
        .map(|w| w.iter().map(|t| vocab.index[t]).collect())
        .collect();

    // input rows uniform in [-0.5/dim, 0.5/dim), output rows zero
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w: Vec<f64> = (0..vocab.terms.len() * dim)
        .map(|_| (init_rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut c: Vec<f64> = vec![0.0; vocab.terms.len() * dim];

    let probe = Probe::build(&indexed, cfg.window, cfg.negatives, &vocab, cfg.seed);
    let total_centers: usize = indexed.iter().map(Vec::len).sum::<usize>() * cfg.epochs;

    let mut probe_loss_first = f64::NAN;
    if cfg.workers == 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x736770); // "sgp"
        let mut processed = 0usize;
        for epoch in 0..cfg.epochs {
            for walk in &indexed {
                for (i, &center) in walk.iter().enumerate() {
                    let lr = cfg.learning_rate
                        * (1.0 - processed as f64 / total_centers as f64).max(1e-4);
                    processed += 1;
                    train_window(walk, i, center, cfg, &vocab, &mut w, &mut c, dim, lr, &mut rng);
                }
            }
            if epoch == 0 {
                probe_loss_first = probe.loss(&w, &c, dim);
            }
        }
    } else {
        let aw: Vec<AtomicU64> = w.iter().map(|&x| AtomicU64::new(x.to_bits())).collect();
        let ac: Vec<AtomicU64> = c.iter().map(|&x| AtomicU64::new(x.to_bits())).collect();
        let processed = AtomicUsize::new(0);
        for epoch in 0..cfg.epochs {
            std::thread::scope(|scope| {
                for worker in 0..cfg.workers {
                    let (aw, ac, vocab, indexed, processed) = (&aw, &ac, &vocab, &indexed, &processed);
                    scope.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(
                            cfg.seed ^ (worker as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15),
                        );
                        for walk in indexed.iter().skip(worker).step_by(cfg.workers) {
                            for (i, &center) in walk.iter().enumerate() {
                                let done = processed.fetch_add(1, Ordering::Relaxed);
                                let lr = cfg.learning_rate
                                    * (1.0 - done as f64 / total_centers as f64).max(1e-4);
                                train_window_atomic(
                                    walk, i, center, cfg, vocab, aw, ac, dim, lr, &mut rng,
                                );
                            }
                        }
                    });
                }
            });
            if epoch == 0 {
                let ws: Vec<f64> = aw.iter().map(|x| f64::from_bits(x.load(Ordering::Relaxed))).collect();
                let cs: Vec<f64> = ac.iter().map(|x| f64::from_bits(x.load(Ordering::Relaxed))).collect();
                probe_loss_first = probe.loss(&ws, &cs, dim);
            }
        }
        w = aw.into_iter().map(|x| f64::from_bits(x.into_inner())).collect();
        c = ac.into_iter().map(|x| f64::from_bits(x.into_inner())).collect();
    }
    let probe_loss_final = probe.loss(&w, &c, dim);

    let rows = |m: &[f64]| -> BTreeMap<Term, Vec<f64>> {
        vocab
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), m[i * dim..(i + 1) * dim].to_vec()))
            .collect()
    };
    Ok(TrainOutput {
        embeddings: EmbeddingTable::new(rows(&w))?,
        context: EmbeddingTable::new(rows(&c))?,
        stats: TrainStats {
            probe_loss_first,
            probe_loss_final,
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn train_window(
    walk: &[usize],
    i: usize,
    center: usize,
    cfg: &SkipGramConfig,
    vocab: &Vocab,
    w: &mut [f64],
    c: &mut [f64],
    dim: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) {
    let lo = i.saturating_sub(cfg.window);
    let hi = (i + cfg.window).min(walk.len() - 1);
    for j in lo..=hi {
        if j == i {
            continue;
        }
        let context = walk[j];
        let mut center_delta = vec![0.0; dim];
        for round in 0..=cfg.negatives {
            let (target, label) = if round == 0 {
                (context, 1.0)
            } else {
                let mut neg = vocab.sample_noise(rng);
                let mut tries = 0;
                while neg == context && tries < 8 {
                    neg = vocab.sample_noise(rng);
                    tries += 1;
                }
                (neg, 0.0)
            };
            let (wrow, crow) = (&w[center * dim..center * dim + dim], &mut c[target * dim..target * dim + dim]);
            let dot: f64 = wrow.iter().zip(crow.iter()).map(|(x, y)| x * y).sum();
            let g = (label - sigmoid(dot)) * lr;
            for d in 0..dim {
                center_delta[d] += g * crow[d];
                crow[d] += g * wrow[d];
            }
        }
        let wrow = &mut w[center * dim..center * dim + dim];
        for d in 0..dim {
            wrow[d] += center_delta[d];
        }
    }
}

/// Hogwild-style variant over atomic cells; updates are lossy under
/// contention, which is the accepted trade-off of the multi-worker mode.
#[allow(clippy::too_many_arguments)]
fn train_window_atomic(
    walk: &[usize],
    i: usize,
    center: usize,
    cfg: &SkipGramConfig,
    vocab: &Vocab,
    w: &[AtomicU64],
    c: &[AtomicU64],
    dim: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) {
    let load = |m: &[AtomicU64], row: usize| -> Vec<f64> {
        (0..dim)
            .map(|d| f64::from_bits(m[row * dim + d].load(Ordering::Relaxed)))
            .collect()
    };
    let lo = i.saturating_sub(cfg.window);
    let hi = (i + cfg.window).min(walk.len() - 1);
    for j in lo..=hi {
        if j == i {
            continue;
        }
        let context = walk[j];
        let wrow = load(w, center);
        let mut center_delta = vec![0.0; dim];
        for round in 0..=cfg.negatives {
            let (target, label) = if round == 0 {
                (context, 1.0)
            } else {
                let mut neg = vocab.sample_noise(rng);
                let mut tries = 0;
                while neg == context && tries < 8 {
                    neg = vocab.sample_noise(rng);
                    tries += 1;
                }
                (neg, 0.0)
            };
            let crow = load(c, target);
            let dot: f64 = wrow.iter().zip(crow.iter()).map(|(x, y)| x * y).sum();
            let g = (label - sigmoid(dot)) * lr;
            for d in 0..dim {
                center_delta[d] += g * crow[d];
                let cell = &c[target * dim + d];
                let cur = f64::from_bits(cell.load(Ordering::Relaxed));
                cell.store((cur + g * wrow[d]).to_bits(), Ordering::Relaxed);
            }
        }
        for d in 0..dim {
            let cell = &w[center * dim + d];
            let cur = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((cur + center_delta[d]).to_bits(), Ordering::Relaxed);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(s: &str) -> Term {
        Term::iri(format!("http://e.org/{s}")).unwrap()
    }

    #[test]
    fn forced_cooccurrence_drives_pair_score_up() {
        let walk: Vec<Term> = (0..200)
            .map(|i| term(if i % 2 == 0 { "a" } else { "b" }))
            .collect();
        let cfg = SkipGramConfig {
            dimension: 8,
            window: 1,
            negatives: 2,
            epochs: 10,
            learning_rate: 0.05,
            seed: 3,
            workers: 1,
        };
        let out = train_skipgram_detailed(&[walk], &cfg).unwrap();
        let dot: f64 = out
            .embeddings
            .get(&term("a"))
            .unwrap()
            .iter()
            .zip(out.context.get(&term("b")).unwrap())
            .map(|(x, y)| x * y)
            .sum();
        let score = sigmoid(dot);
        assert!(score > 0.9, "sigmoid(u_a . v_b) was {score}");
    }

    #[test]
    fn probe_loss_decreases() {
        let walks: Vec<Vec<Term>> = (0..20)
            .map(|i| {
                (0..20)
                    .map(|j| term(&format!("n{}", (i + j) % 7)))
                    .collect()
            })
            .collect();
        let cfg = SkipGramConfig {
            dimension: 16,
            window: 2,
            negatives: 3,
            epochs: 6,
            learning_rate: 0.05,
            seed: 11,
            workers: 1,
        };
        let (_, stats) = train_skipgram_with_stats(&walks, &cfg).unwrap();
        assert!(
            stats.probe_loss_final < stats.probe_loss_first,
            "final {} vs first {}",
            stats.probe_loss_final,
            stats.probe_loss_first
        );
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let walks: Vec<Vec<Term>> = (0..10)
            .map(|i| (0..15).map(|j| term(&format!("n{}", (i * j) % 5))).collect())
            .collect();
        let cfg = SkipGramConfig {
            dimension: 8,
            epochs: 2,
            seed: 99,
            ..SkipGramConfig::default()
        };
        let a = train_skipgram(&walks, &cfg).unwrap();
        let b = train_skipgram(&walks, &cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn multi_worker_training_stays_finite() {
        let walks: Vec<Vec<Term>> = (0..12)
            .map(|i| (0..15).map(|j| term(&format!("n{}", (i + j) % 6))).collect())
            .collect();
        let cfg = SkipGramConfig {
            dimension: 8,
            epochs: 2,
            workers: 3,
            ..SkipGramConfig::default()
        };
        let (table, stats) = train_skipgram_with_stats(&walks, &cfg).unwrap();
        assert_eq!(table.len(), 6);
        assert!(stats.probe_loss_final.is_finite());
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SkipGramConfig {
            dimension: 1,
            ..SkipGramConfig::default()
        };
        assert!(train_skipgram(&[vec![term("a")]], &cfg).is_err());
        let cfg = SkipGramConfig {
            epochs: 0,
            ..SkipGramConfig::default()
        };
        assert!(train_skipgram(&[vec![term("a")]], &cfg).is_err());
    }
}
