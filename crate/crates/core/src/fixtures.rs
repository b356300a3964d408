//! Bundled desk-scale fixtures: a Brick-style AHU ontology with instance
//! data, a RECore-style counterpart, a synonym word-vector vocabulary and
//! three fragment representations of the same building.

use crate::matching::VectorFile;
use crate::rdf::{parse, Format, Graph, GraphRole};

pub const BRICK_AHU_ONTOLOGY: &str = include_str!("../fixtures/brick_ahu.ttl");
pub const BRICK_AHU_KG: &str = include_str!("../fixtures/brick_ahu_kg.ttl");
pub const RECORE_ONTOLOGY: &str = include_str!("../fixtures/recore.ttl");
pub const RECORE_KG: &str = include_str!("../fixtures/recore_kg.ttl");
pub const SYNONYM_VECTORS: &str = include_str!("../fixtures/synonym_vectors.vec");
pub const BRICK_RECORE_TRUTH: &str = include_str!("../fixtures/brick_recore_truth.tsv");
pub const FRAG_RECORE_GRAPH: &str = include_str!("../fixtures/frag_recore.ttl");
pub const FRAG_RECORE_MAPPING: &str = include_str!("../fixtures/frag_recore.tsv");
pub const FRAG_BOT_SAREF_GRAPH: &str = include_str!("../fixtures/frag_bot_saref.ttl");
pub const FRAG_BOT_SAREF_MAPPING: &str = include_str!("../fixtures/frag_bot_saref.tsv");
pub const FRAG_HAYSTACK_GRAPH: &str = include_str!("../fixtures/frag_haystack.ttl");
pub const FRAG_HAYSTACK_MAPPING: &str = include_str!("../fixtures/frag_haystack.tsv");

pub fn brick_ahu_ontology() -> Graph {
    parse(BRICK_AHU_ONTOLOGY, Format::TurtleSubset, GraphRole::Ontology)
        .expect("bundled brick ontology parses")
}

pub fn brick_ahu_kg() -> Graph {
    parse(BRICK_AHU_KG, Format::TurtleSubset, GraphRole::Kg).expect("bundled brick kg parses")
}

pub fn recore_ontology() -> Graph {
    parse(RECORE_ONTOLOGY, Format::TurtleSubset, GraphRole::Ontology)
        .expect("bundled recore ontology parses")
}

pub fn recore_kg() -> Graph {
    parse(RECORE_KG, Format::TurtleSubset, GraphRole::Kg).expect("bundled recore kg parses")
}

pub fn synonym_vectors() -> VectorFile {
    VectorFile::parse(SYNONYM_VECTORS).expect("bundled vector file parses")
}
