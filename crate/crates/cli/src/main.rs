//! `ontokg`: compliance checking and repair between knowledge graphs and
//! ontologies.
//!
//! Subcommands: `check` aligns a KG to its ontology and reshapes the ontology
//! to the KG's footprint; `align` matches terms across two KG/ontology pairs
//! and predicts overlapping terms in a bridged embedding space; `fragments`
//! scores alternative ontology representations and runs the joint
//! classification harness; `gen-fixture` synthesizes mismatched KGs with an
//! answer key; `embed` trains node embeddings standalone.

mod commands;
mod opts;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CmdError, FragmentSpecArg};
use opts::{CommonOpts, ConfigOverride, EmbedOpts, MatchOpts};

#[derive(Parser)]
#[command(name = "ontokg", version, about = "Ontology/KG compliance toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one KG against one ontology and emit the reshaped ontology
    Check {
        /// KG file (.nt or Turtle subset)
        kg: PathBuf,
        /// Ontology file
        onto: PathBuf,
        #[command(flatten)]
        match_opts: MatchOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Align two KG/ontology pairs and predict overlapping terms
    Align {
        kg1: PathBuf,
        onto1: PathBuf,
        kg2: PathBuf,
        onto2: PathBuf,
        /// Ground-truth TSV enabling the top-k evaluation table
        #[arg(long)]
        eval: Option<PathBuf>,
        /// Seeded repetitions for the evaluation table
        #[arg(long, default_value_t = 20)]
        eval_seeds: usize,
        #[command(flatten)]
        match_opts: MatchOpts,
        #[command(flatten)]
        embed_opts: EmbedOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Score ontology fragments and run the per-level classification harness
    Fragments {
        kg: PathBuf,
        /// Fragment spec `name=mapping.tsv,graph.ttl`; repeatable
        #[arg(long = "fragment", value_parser = commands::parse_fragment_spec, required = true)]
        fragments: Vec<FragmentSpecArg>,
        /// Abstraction levels, comma-separated
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        eval_seeds: usize,
        /// Preferred class-hierarchy depth for the depth-fit criterion
        #[arg(long, default_value_t = 3)]
        target_depth: usize,
        /// Preferred mean mapped-class depth for the abstraction-fit criterion
        #[arg(long, default_value_t = 2.0)]
        target_abstraction: f64,
        #[command(flatten)]
        embed_opts: EmbedOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Generate a synthetic mismatched KG plus its answer key
    GenFixture {
        onto: PathBuf,
        #[arg(long, default_value_t = 0)]
        n_exact: usize,
        #[arg(long, default_value_t = 0)]
        n_typo: usize,
        #[arg(long, default_value_t = 0)]
        n_synonym: usize,
        #[arg(long, default_value_t = 0)]
        n_structural: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Train node embeddings for one graph
    Embed {
        graph: PathBuf,
        /// Also write the generated walks
        #[arg(long)]
        dump_walks: bool,
        /// Treat predicates as walkable nodes
        #[arg(long)]
        reify: bool,
        #[command(flatten)]
        embed_opts: EmbedOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn load_config_override(common: &CommonOpts) -> Result<ConfigOverride, CmdError> {
    match &common.config {
        None => Ok(ConfigOverride::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CmdError::Validation(format!("cannot read {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CmdError::Validation(format!("{}: {e}", path.display())))
        }
    }
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Check {
            kg,
            onto,
            mut match_opts,
            mut common,
        } => {
            let overrides = load_config_override(&common)?;
            overrides.apply_match(&mut match_opts);
            overrides.apply_common(&mut common);
            commands::cmd_check(&kg, &onto, &match_opts, &common)
        }
        Command::Align {
            kg1,
            onto1,
            kg2,
            onto2,
            eval,
            eval_seeds,
            mut match_opts,
            mut embed_opts,
            mut common,
        } => {
            let overrides = load_config_override(&common)?;
            overrides.apply_match(&mut match_opts);
            overrides
                .apply_embed(&mut embed_opts)
                .map_err(CmdError::Validation)?;
            overrides.apply_common(&mut common);
            commands::cmd_align(
                &kg1, &onto1, &kg2, &onto2, &eval, eval_seeds, &match_opts, &embed_opts, &common,
            )
        }
        Command::Fragments {
            kg,
            fragments,
            levels,
            eval_seeds,
            mut target_depth,
            mut target_abstraction,
            mut embed_opts,
            mut common,
        } => {
            let overrides = load_config_override(&common)?;
            overrides
                .apply_embed(&mut embed_opts)
                .map_err(CmdError::Validation)?;
            overrides.apply_common(&mut common);
            if let Some(v) = overrides.target_depth {
                target_depth = v;
            }
            if let Some(v) = overrides.target_abstraction {
                target_abstraction = v;
            }
            let criteria_weights = overrides.criteria_weights.unwrap_or([1.0; 6]);
            commands::cmd_fragments(
                &kg,
                &fragments,
                &levels,
                eval_seeds,
                target_depth,
                target_abstraction,
                criteria_weights,
                &embed_opts,
                &common,
            )
        }
        Command::GenFixture {
            onto,
            n_exact,
            n_typo,
            n_synonym,
            n_structural,
            mut common,
        } => {
            let overrides = load_config_override(&common)?;
            overrides.apply_common(&mut common);
            commands::cmd_gen_fixture(&onto, n_exact, n_typo, n_synonym, n_structural, &common)
        }
        Command::Embed {
            graph,
            dump_walks,
            reify,
            mut embed_opts,
            mut common,
        } => {
            let overrides = load_config_override(&common)?;
            overrides
                .apply_embed(&mut embed_opts)
                .map_err(CmdError::Validation)?;
            overrides.apply_common(&mut common);
            commands::cmd_embed(&graph, dump_walks, reify, &embed_opts, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Internal(err)) => {
            eprintln!("internal error: {err}");
            ExitCode::from(1)
        }
    }
}
