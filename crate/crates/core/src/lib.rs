//! Compliance between knowledge graphs and their ontologies.
//!
//! The crate checks and repairs the fit between an instance graph (ABox) and
//! one or more ontologies (TBox): it aligns KG terms to ontology classes and
//! properties through a four-level matching cascade, reshapes ontologies down
//! to the KG's footprint, aligns terms across ontologies through a joint
//! embedding space bridged by confirmed matches, and scores alternative
//! ontology fragments by max-min criteria selection plus a joint
//! classification harness.

pub mod align;
pub mod embed;
pub mod error;
pub mod extract;
pub mod fixtures;
pub mod fragments;
pub mod matching;
pub mod rdf;
pub mod reshape;

pub use error::{Error, Result};
