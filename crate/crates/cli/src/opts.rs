//! Shared option bags and the JSON config overlay.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use ontokg_core::embed::{SkipGramConfig, WalkConfig, WalkKind};
use ontokg_core::matching::MatchConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Deepwalk,
    Node2vec,
    Struc2vec,
}

impl ModelArg {
    pub fn kind(&self) -> WalkKind {
        match self {
            ModelArg::Deepwalk => WalkKind::DeepWalk,
            ModelArg::Node2vec => WalkKind::Node2Vec,
            ModelArg::Struc2vec => WalkKind::Struc2Vec,
        }
    }
}

#[derive(Debug, Args)]
pub struct MatchOpts {
    /// Highest cascade level to run (1=pure, 2=heuristic, 3=semantic, 4=topological)
    #[arg(long, default_value_t = 4)]
    pub max_level: u8,

    #[arg(long, default_value_t = 0.75)]
    pub heuristic_threshold: f64,

    #[arg(long, default_value_t = 0.8)]
    pub semantic_threshold: f64,

    #[arg(long, default_value_t = 0.5)]
    pub topological_threshold: f64,

    /// Word-vector file for semantic matching; the bundled synonym
    /// vocabulary is used when omitted
    #[arg(long)]
    pub vectors: Option<PathBuf>,
}

impl MatchOpts {
    pub fn to_config(&self) -> MatchConfig {
        MatchConfig {
            max_level: self.max_level,
            heuristic_threshold: self.heuristic_threshold,
            semantic_threshold: self.semantic_threshold,
            topological_threshold: self.topological_threshold,
        }
    }
}

#[derive(Debug, Args)]
pub struct EmbedOpts {
    /// Walk model
    #[arg(long, value_enum, default_value_t = ModelArg::Deepwalk)]
    pub model: ModelArg,

    /// Embedding dimension
    #[arg(long, default_value_t = 64)]
    pub dim: usize,

    /// Walks per node
    #[arg(long, default_value_t = 10)]
    pub walks: usize,

    #[arg(long, default_value_t = 20)]
    pub walk_length: usize,

    #[arg(long, default_value_t = 5)]
    pub window: usize,

    #[arg(long, default_value_t = 5)]
    pub negatives: usize,

    #[arg(long, default_value_t = 5)]
    pub epochs: usize,

    #[arg(long, default_value_t = 0.025)]
    pub learning_rate: f64,

    /// Node2Vec return parameter
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,

    /// Node2Vec in-out parameter
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,

    /// Struc2Vec layer cap
    #[arg(long, default_value_t = 3)]
    pub layers: usize,

    /// Training workers; 1 keeps runs deterministic
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl EmbedOpts {
    pub fn walk_config(&self, seed: u64) -> WalkConfig {
        WalkConfig {
            walks_per_node: self.walks,
            walk_length: self.walk_length,
            p: self.p,
            q: self.q,
            layers: self.layers,
            reify_predicates: false,
            seed,
        }
    }

    pub fn skipgram_config(&self, seed: u64) -> SkipGramConfig {
        SkipGramConfig {
            dimension: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            seed,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonOpts {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Stdout rendering
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,

    /// JSON file whose fields override the corresponding flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flag overrides loaded from `--config`. Every field is optional; present
/// fields win over command-line values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverride {
    pub max_level: Option<u8>,
    pub heuristic_threshold: Option<f64>,
    pub semantic_threshold: Option<f64>,
    pub topological_threshold: Option<f64>,
    pub vectors: Option<PathBuf>,
    pub model: Option<String>,
    pub dim: Option<usize>,
    pub walks: Option<usize>,
    pub walk_length: Option<usize>,
    pub window: Option<usize>,
    pub negatives: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub layers: Option<usize>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub target_depth: Option<usize>,
    pub target_abstraction: Option<f64>,
    pub criteria_weights: Option<[f64; 6]>,
}

impl ConfigOverride {
    pub fn apply_match(&self, opts: &mut MatchOpts) {
        if let Some(v) = self.max_level {
            opts.max_level = v;
        }
        if let Some(v) = self.heuristic_threshold {
            opts.heuristic_threshold = v;
        }
        if let Some(v) = self.semantic_threshold {
            opts.semantic_threshold = v;
        }
        if let Some(v) = self.topological_threshold {
            opts.topological_threshold = v;
        }
        if let Some(v) = &self.vectors {
            opts.vectors = Some(v.clone());
        }
    }

    pub fn apply_embed(&self, opts: &mut EmbedOpts) -> Result<(), String> {
        if let Some(m) = &self.model {
            opts.model = match m.as_str() {
                "deepwalk" => ModelArg::Deepwalk,
                "node2vec" => ModelArg::Node2vec,
                "struc2vec" => ModelArg::Struc2vec,
                other => return Err(format!("unknown model '{other}' in config")),
            };
        }
        if let Some(v) = self.dim {
            opts.dim = v;
        }
        if let Some(v) = self.walks {
            opts.walks = v;
        }
        if let Some(v) = self.walk_length {
            opts.walk_length = v;
        }
        if let Some(v) = self.window {
            opts.window = v;
        }
        if let Some(v) = self.negatives {
            opts.negatives = v;
        }
        if let Some(v) = self.epochs {
            opts.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            opts.learning_rate = v;
        }
        if let Some(v) = self.p {
            opts.p = v;
        }
        if let Some(v) = self.q {
            opts.q = v;
        }
        if let Some(v) = self.layers {
            opts.layers = v;
        }
        if let Some(v) = self.workers {
            opts.workers = v;
        }
        Ok(())
    }

    pub fn apply_common(&self, opts: &mut CommonOpts) {
        if let Some(v) = self.seed {
            opts.seed = v;
        }
    }
}
