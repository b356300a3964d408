//! Triple/graph data model and N-Triples / Turtle-subset parsing.

mod graph;
mod parse;
mod term;
pub mod vocab;

pub use graph::{Direction, Graph, GraphRole, Triple};
pub use parse::{count_ntriples_statements, parse, Format};
pub use term::Term;

/// Canonical N-Triples serialization of a graph.
pub fn serialize(g: &Graph) -> String {
    g.to_ntriples()
}
