//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown prefix '{prefix}' at line {line}, column {column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },

    #[error("invalid IRI '{iri}': {reason}")]
    InvalidIri { iri: String, reason: String },

    #[error("term has an empty local name: {term}")]
    EmptyLocalName { term: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown node: {0}")]
    UnknownNode(String),

    #[error("empty graph: {0}")]
    EmptyGraph(String),

    #[error("vector file error at line {line}: {message}")]
    VectorFile { line: usize, message: String },

    #[error("mapping error at line {line}: {message}")]
    Mapping { line: usize, message: String },

    #[error("fixture spec exceeds ontology size: {0}")]
    FixtureSpec(String),

    #[error("dangling alignment pair: {0}")]
    DanglingPair(String),

    #[error("ground-truth term missing from vocabulary: {0}")]
    MissingGroundTruth(String),

    #[error("abstraction level {level} exceeds hierarchy depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("no typed instances found in the graph")]
    NoTypedInstances,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
