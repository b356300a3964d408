//! Command implementations. Every command validates and computes first and
//! only then writes its output files, so a failing run leaves nothing behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use ontokg_core::align::eval::{render_eval_table, topk_eval, SpaceVariant};
use ontokg_core::align::{build_joint_space, over_compliance};
use ontokg_core::embed::{train_skipgram, walks_to_text, WalkKind, WalkSpace};
use ontokg_core::fragments::{
    joint_eval, liebig_select_index, parse_mapping_tsv, score_criteria, CriteriaConfig, Fragment,
    CRITERIA_NAMES,
};
use ontokg_core::matching::VectorFile;
use ontokg_core::rdf::{parse, Format, Graph, GraphRole};
use ontokg_core::reshape::mismatch::{answer_key_to_tsv, generate_mismatch_fixture, MismatchSpec};
use ontokg_core::reshape::{within_compliance, ComplianceReport, WithinOutcome};
use ontokg_core::{fixtures, Error as CoreError};

use crate::opts::{CommonOpts, EmbedOpts, MatchOpts, ReportFormat};

pub enum CmdError {
    /// Bad input or configuration: exit code 2.
    Validation(String),
    /// Unexpected failure after validation: exit code 1.
    Internal(anyhow::Error),
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

pub type CmdResult<T> = Result<T, CmdError>;

fn validation(msg: impl Into<String>) -> CmdError {
    CmdError::Validation(msg.into())
}

/// Buffered output files, flushed only after the whole command succeeded.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Outputs {
        Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content));
    }

    pub fn flush(self) -> CmdResult<()> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| CmdError::Internal(anyhow::anyhow!("creating {}: {e}", self.dir.display())))?;
        for (name, content) in self.files {
            let path = self.dir.join(&name);
            std::fs::write(&path, content)
                .map_err(|e| CmdError::Internal(anyhow::anyhow!("writing {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

pub fn load_graph(path: &Path, role: GraphRole) -> CmdResult<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("nt") => Format::NTriples,
        _ => Format::TurtleSubset,
    };
    parse(&text, format, role).map_err(|e| validation(format!("{}: {e}", path.display())))
}

pub fn load_provider(vectors: &Option<PathBuf>) -> CmdResult<VectorFile> {
    match vectors {
        Some(path) => VectorFile::from_path(path)
            .map_err(|e| validation(format!("{}: {e}", path.display()))),
        None => Ok(fixtures::synonym_vectors()),
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn matches_tsv(outcome: &WithinOutcome) -> String {
    let mut out = String::new();
    for m in &outcome.matches {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            m.source.as_iri().unwrap_or_default(),
            m.target.as_iri().unwrap_or_default(),
            m.level,
            m.confidence
        );
    }
    out
}

fn percent(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

fn table1_text(report: &ComplianceReport, max_level: u8) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<42} {:>12} {:>14} {:>11}",
        "Type of Ontology & Matching Level", "Used Entity", "Matching Rate", "Confidence"
    );
    let _ = writeln!(
        out,
        "{:<42} {:>12} {:>14} {:>11}",
        format!("Original Ontology & Matching Lv. {max_level}"),
        percent(report.used_entity_original),
        percent(report.matching_rate),
        percent(report.confidence),
    );
    let _ = writeln!(
        out,
        "{:<42} {:>12} {:>14} {:>11}",
        format!("Reshaped Ontology & Matching Lv. {max_level}"),
        percent(report.used_entity_reshaped),
        percent(report.matching_rate),
        percent(report.confidence),
    );
    out
}

pub fn cmd_check(
    kg_path: &Path,
    onto_path: &Path,
    match_opts: &MatchOpts,
    common: &CommonOpts,
) -> CmdResult<()> {
    let kg = load_graph(kg_path, GraphRole::Kg)?;
    let onto = load_graph(onto_path, GraphRole::Ontology)?;
    let provider = load_provider(&match_opts.vectors)?;
    let cfg = match_opts.to_config();
    cfg.validate()?;

    let outcome = within_compliance(&kg, &onto, &cfg, Some(&provider))?;

    let report_json = json!({
        "config": cfg,
        "report": outcome.report,
        "matches": outcome.matches,
        "unmatched": outcome.unmatched,
    });
    let mut outputs = Outputs::new(&common.out);
    outputs.add("report.json", pretty(&report_json));
    outputs.add("matches.tsv", matches_tsv(&outcome));
    outputs.add(
        "matches.json",
        pretty(&serde_json::to_value(&outcome.matches).expect("serializable")),
    );
    outputs.add("reshaped.nt", outcome.reshaped.graph.to_ntriples());
    outputs.flush()?;

    match common.format {
        ReportFormat::Text => print!("{}", table1_text(&outcome.report, cfg.max_level)),
        ReportFormat::Json => print!("{}", pretty(&report_json)),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_align(
    kg1_path: &Path,
    onto1_path: &Path,
    kg2_path: &Path,
    onto2_path: &Path,
    eval_truth: &Option<PathBuf>,
    eval_seeds: usize,
    match_opts: &MatchOpts,
    embed_opts: &EmbedOpts,
    common: &CommonOpts,
) -> CmdResult<()> {
    let kg1 = load_graph(kg1_path, GraphRole::Kg)?;
    let onto1 = load_graph(onto1_path, GraphRole::Ontology)?;
    let kg2 = load_graph(kg2_path, GraphRole::Kg)?;
    let onto2 = load_graph(onto2_path, GraphRole::Ontology)?;
    let provider = load_provider(&match_opts.vectors)?;
    let match_cfg = match_opts.to_config();
    match_cfg.validate()?;
    let walk_cfg = embed_opts.walk_config(common.seed);
    walk_cfg.validate()?;
    let sg_cfg = embed_opts.skipgram_config(common.seed);
    sg_cfg.validate()?;
    let truth = match eval_truth {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
            Some(ontokg_core::align::parse_truth_tsv(&text)?)
        }
        None => None,
    };

    let out = over_compliance(
        &kg1,
        &onto1,
        &kg2,
        &onto2,
        &match_cfg,
        &walk_cfg,
        &sg_cfg,
        embed_opts.model.kind(),
        Some(&provider),
    )?;

    let mut outputs = Outputs::new(&common.out);
    outputs.add("alignment.tsv", out.alignment.to_tsv());
    let confidence_json = json!({
        "mu_within": out.confidence.mu_within,
        "mu_cmatch": out.confidence.mu_cmatch,
        "mu_overlap": out.confidence.mu_overlap,
        "bridged": out.alignment.bridged,
        "bridge_count": out.joint.bridge_count,
    });
    outputs.add("confidence.json", pretty(&confidence_json));
    outputs.add("embeddings.vec", out.embeddings.to_text());
    outputs.add(
        "report_left.json",
        pretty(&serde_json::to_value(&out.within_left.report).expect("serializable")),
    );
    outputs.add(
        "report_right.json",
        pretty(&serde_json::to_value(&out.within_right.report).expect("serializable")),
    );
    outputs.add(
        "predictions.json",
        pretty(&serde_json::to_value(&out.predictions).expect("serializable")),
    );

    let mut eval_text = None;
    if let Some(truth) = truth {
        let direct: Vec<_> = out.alignment.direct().cloned().collect();
        let bridged = build_joint_space(
            &kg1,
            &out.within_left.reshaped.graph,
            &kg2,
            &out.within_right.reshaped.graph,
            &direct,
        )?;
        let unbridged = build_joint_space(&kg1, &onto1, &kg2, &onto2, &[])?;
        let variants = [
            SpaceVariant {
                name: "exp1_unbridged".to_string(),
                joint: unbridged,
            },
            SpaceVariant {
                name: "exp2_bridged".to_string(),
                joint: bridged,
            },
        ];
        let models = [WalkKind::DeepWalk, WalkKind::Node2Vec, WalkKind::Struc2Vec];
        let k_list = [1usize, 3, 5];
        let seeds: Vec<u64> = (0..eval_seeds as u64).map(|i| common.seed.wrapping_add(i)).collect();
        let mut eval_walk_cfg = walk_cfg.clone();
        eval_walk_cfg.reify_predicates = true;
        let table = topk_eval(&variants, &truth, &models, &k_list, &seeds, &eval_walk_cfg, &sg_cfg)?;
        outputs.add(
            "eval.json",
            pretty(&serde_json::to_value(&table).expect("serializable")),
        );
        let rendered = render_eval_table(&table, &k_list);
        outputs.add("eval.txt", rendered.clone());
        eval_text = Some(rendered);
    }
    outputs.flush()?;

    match common.format {
        ReportFormat::Text => {
            println!(
                "direct pairs: {}, predicted pairs: {}, bridged: {}",
                out.alignment.direct().count(),
                out.alignment.predicted().count(),
                out.alignment.bridged
            );
            if let Some(text) = eval_text {
                print!("{text}");
            }
        }
        ReportFormat::Json => print!("{}", pretty(&confidence_json)),
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FragmentSpecArg {
    pub name: String,
    pub mapping: PathBuf,
    pub graph: PathBuf,
}

/// `name=mapping.tsv,graph.ttl`
pub fn parse_fragment_spec(s: &str) -> Result<FragmentSpecArg, String> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=mapping.tsv,graph.ttl, got '{s}'"))?;
    let (mapping, graph) = rest
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated paths after '=', got '{rest}'"))?;
    if name.is_empty() {
        return Err("fragment name is empty".to_string());
    }
    Ok(FragmentSpecArg {
        name: name.to_string(),
        mapping: PathBuf::from(mapping),
        graph: PathBuf::from(graph),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_fragments(
    kg_path: &Path,
    specs: &[FragmentSpecArg],
    levels: &[usize],
    eval_seeds: usize,
    target_depth: usize,
    target_abstraction: f64,
    criteria_weights: [f64; 6],
    embed_opts: &EmbedOpts,
    common: &CommonOpts,
) -> CmdResult<()> {
    if specs.is_empty() {
        return Err(validation("at least one --fragment is required"));
    }
    let kg = load_graph(kg_path, GraphRole::Kg)?;
    let mut fragments = Vec::new();
    for spec in specs {
        let mapping_text = std::fs::read_to_string(&spec.mapping)
            .map_err(|e| validation(format!("cannot read {}: {e}", spec.mapping.display())))?;
        let mapping = parse_mapping_tsv(&mapping_text)
            .map_err(|e| validation(format!("{}: {e}", spec.mapping.display())))?;
        let graph = load_graph(&spec.graph, GraphRole::Ontology)?;
        fragments.push(Fragment::new(spec.name.clone(), mapping, graph)?);
    }

    let criteria_cfg = CriteriaConfig {
        target_depth,
        target_abstraction,
        weights: criteria_weights,
    };
    let vectors = score_criteria(&fragments, &kg, &criteria_cfg);
    let items: Vec<(String, Vec<f64>)> = fragments
        .iter()
        .zip(&vectors)
        .map(|(f, v)| (f.name.clone(), v.scores().to_vec()))
        .collect();
    let winner_idx = liebig_select_index(&items).expect("non-empty fragment list");
    let winner = &fragments[winner_idx].name;

    let walk_cfg = embed_opts.walk_config(common.seed);
    walk_cfg.validate()?;
    let sg_cfg = embed_opts.skipgram_config(common.seed);
    sg_cfg.validate()?;
    let seeds: Vec<u64> = (0..eval_seeds as u64).map(|i| common.seed.wrapping_add(i)).collect();

    let mut accuracy_rows = String::from("fragment,level,mean,sd\n");
    let mut eval_json = serde_json::Map::new();
    for fragment in &fragments {
        let cells = joint_eval(&kg, fragment, levels, &walk_cfg, &sg_cfg, &seeds)?;
        let mut per_level = serde_json::Map::new();
        for (level, cell) in &cells {
            let _ = writeln!(accuracy_rows, "{},{},{},{}", fragment.name, level, cell.mean, cell.sd);
            per_level.insert(
                level.to_string(),
                json!({"mean": cell.mean, "sd": cell.sd}),
            );
        }
        eval_json.insert(fragment.name.clone(), per_level.into());
    }

    let criteria_json = json!({
        "criteria": CRITERIA_NAMES,
        "config": criteria_cfg,
        "fragments": fragments
            .iter()
            .zip(&vectors)
            .map(|(f, v)| json!({"name": f.name, "scores": v}))
            .collect::<Vec<_>>(),
    });
    let selection_json = json!({
        "winner": winner,
        "rule": "max-min, ties by mean then name",
    });

    let mut outputs = Outputs::new(&common.out);
    outputs.add("criteria.json", pretty(&criteria_json));
    outputs.add("selection.json", pretty(&selection_json));
    outputs.add("accuracy.csv", accuracy_rows);
    outputs.add("eval.json", pretty(&eval_json.into()));
    outputs.flush()?;

    match common.format {
        ReportFormat::Text => println!("selected fragment: {winner}"),
        ReportFormat::Json => print!("{}", pretty(&selection_json)),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_gen_fixture(
    onto_path: &Path,
    n_exact: usize,
    n_typo: usize,
    n_synonym: usize,
    n_structural: usize,
    common: &CommonOpts,
) -> CmdResult<()> {
    let onto = load_graph(onto_path, GraphRole::Ontology)?;
    let spec = MismatchSpec {
        n_exact,
        n_typo,
        n_synonym,
        n_structural,
        seed: common.seed,
    };
    let fixture = generate_mismatch_fixture(&onto, &spec)?;

    let mut outputs = Outputs::new(&common.out);
    outputs.add("kg.nt", fixture.kg.to_ntriples());
    outputs.add("answer_key.tsv", answer_key_to_tsv(&fixture.answer_key));
    outputs.flush()?;

    println!(
        "planted {} terms into a {}-triple KG",
        fixture.answer_key.len(),
        fixture.kg.len()
    );
    Ok(())
}

pub fn cmd_embed(
    graph_path: &Path,
    dump_walks: bool,
    reify: bool,
    embed_opts: &EmbedOpts,
    common: &CommonOpts,
) -> CmdResult<()> {
    let graph = load_graph(graph_path, GraphRole::Kg)?;
    let mut walk_cfg = embed_opts.walk_config(common.seed);
    walk_cfg.reify_predicates = reify;
    walk_cfg.validate()?;
    let sg_cfg = embed_opts.skipgram_config(common.seed);
    sg_cfg.validate()?;

    let kind = embed_opts.model.kind();
    let space = WalkSpace::prepare(&graph, kind, &walk_cfg)?;
    let walks = space.generate(&walk_cfg);
    let table = train_skipgram(&walks, &sg_cfg)?;

    let mut outputs = Outputs::new(&common.out);
    outputs.add("embeddings.vec", table.to_text());
    if dump_walks {
        outputs.add("walks.txt", walks_to_text(&walks));
    }
    outputs.flush()?;

    println!(
        "embedded {} nodes at dimension {}",
        table.len(),
        table.dimension()
    );
    Ok(())
}
