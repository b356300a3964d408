//! Seeded top-k evaluation of joint-space variants against ground-truth
//! pairs, reported as mean ± sample standard deviation per model, variant
//! and k.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::align::JointGraph;
use crate::embed::{train_skipgram, EmbeddingTable, SkipGramConfig, WalkConfig, WalkKind, WalkSpace};
use crate::error::{Error, Result};
use crate::rdf::Term;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalCell {
    pub mean: f64,
    pub sd: f64,
}

/// model → variant → k → cell
pub type EvalTable = BTreeMap<String, BTreeMap<String, BTreeMap<usize, EvalCell>>>;

pub struct SpaceVariant {
    pub name: String,
    pub joint: JointGraph,
}

/// True when `partner` ranks in the top-k of `query`'s similarity list after
/// restricting candidates with `keep`.
pub fn hits_at_k(
    table: &EmbeddingTable,
    query: &Term,
    partner: &Term,
    keep: impl Fn(&Term) -> bool,
    k: usize,
) -> Result<bool> {
    let ranking = table.most_similar(query, table.len())?;
    Ok(ranking
        .iter()
        .filter(|(t, _)| keep(t))
        .take(k)
        .any(|(t, _)| t == partner))
}

/// Runs every (model, variant, seed) combination and scores the ground-truth
/// pairs in the cross-filtered top-k lists.
pub fn topk_eval(
    variants: &[SpaceVariant],
    ground_truth: &[(Term, Term)],
    models: &[WalkKind],
    k_list: &[usize],
    seeds: &[u64],
    walk_cfg: &WalkConfig,
    sg_cfg: &SkipGramConfig,
) -> Result<EvalTable> {
    if ground_truth.is_empty() {
        return Err(Error::MissingGroundTruth("no ground-truth pairs given".into()));
    }
    let mut table: EvalTable = BTreeMap::new();
    for model in models {
        let mut per_variant = BTreeMap::new();
        for variant in variants {
            let space = WalkSpace::prepare(&variant.joint.graph, *model, walk_cfg)?;
            for (left, right) in ground_truth {
                for term in [left, right] {
                    if space.walk_graph().index_of(term).is_none() {
                        return Err(Error::MissingGroundTruth(format!(
                            "{term} is not in the vocabulary of variant '{}'",
                            variant.name
                        )));
                    }
                }
            }

            let mut per_seed_hits: BTreeMap<usize, Vec<f64>> =
                k_list.iter().map(|&k| (k, Vec::new())).collect();
            for &seed in seeds {
                let mut wcfg = walk_cfg.clone();
                wcfg.seed = seed;
                let mut scfg = sg_cfg.clone();
                scfg.seed = seed;
                let walks = space.generate(&wcfg);
                let embeddings = train_skipgram(&walks, &scfg)?;
                for &k in k_list {
                    let mut hits = 0usize;
                    for (left, right) in ground_truth {
                        let hit = hits_at_k(
                            &embeddings,
                            left,
                            right,
                            |t| variant.joint.right_terms.contains(t),
                            k,
                        )?;
                        hits += usize::from(hit);
                    }
                    per_seed_hits
                        .get_mut(&k)
                        .unwrap()
                        .push(hits as f64 / ground_truth.len() as f64);
                }
            }
            let cells: BTreeMap<usize, EvalCell> = per_seed_hits
                .into_iter()
                .map(|(k, rates)| (k, EvalCell {
                    mean: mean(&rates),
                    sd: sample_sd(&rates),
                }))
                .collect();
            per_variant.insert(variant.name.clone(), cells);
        }
        table.insert(model.as_str().to_string(), per_variant);
    }
    Ok(table)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Plain-text table: one row per k, one column per model and variant.
pub fn render_eval_table(table: &EvalTable, k_list: &[usize]) -> String {
    let mut columns: Vec<(String, String)> = Vec::new();
    for (model, variants) in table {
        for variant in variants.keys() {
            columns.push((model.clone(), variant.clone()));
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{:<4}", "@k"));
    for (model, variant) in &columns {
        out.push_str(&format!(" | {:>22}", format!("{model}/{variant}")));
    }
    out.push('\n');
    for &k in k_list {
        out.push_str(&format!("{k:<4}"));
        for (model, variant) in &columns {
            let cell = &table[model][variant][&k];
            out.push_str(&format!(
                " | {:>22}",
                format!("{:.2}±{:.2}%", cell.mean * 100.0, cell.sd * 100.0)
            ));
        }
        out.push('\n');
    }
    out
}
