//! Term inventories: concepts/relations from a KG, classes/properties from an
//! ontology, and keyword tokenization of local names.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rdf::{vocab, Graph, Term};

/// Terms found in a KG: concepts (subject/object position) and relations
/// (predicate position).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermInventory {
    pub concepts: BTreeSet<Term>,
    pub relations: BTreeSet<Term>,
}

impl TermInventory {
    pub fn len(&self) -> usize {
        self.concepts.len() + self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.relations.is_empty()
    }
}

/// Declared classes and properties of an ontology.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaInventory {
    pub classes: BTreeSet<Term>,
    pub properties: BTreeSet<Term>,
    pub warnings: Vec<String>,
}

impl SchemaInventory {
    pub fn len(&self) -> usize {
        self.classes.len() + self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.properties.is_empty()
    }

    /// Classes and properties pooled.
    pub fn entities(&self) -> BTreeSet<Term> {
        self.classes.union(&self.properties).cloned().collect()
    }
}

/// Lowercased word tokens of one term's local name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordBag {
    pub source: Term,
    pub tokens: Vec<String>,
}

impl KeywordBag {
    /// Canonical space-joined form used by string-level matching.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Collects every concept and relation used by a KG.
///
/// Relations are all predicate IRIs except the declaration predicates
/// (type / subclass / subproperty). Concepts are the IRI subjects and objects
/// of non-declaration triples plus the objects of type assertions. Literals
/// and blank nodes are never concepts.
pub fn find_concepts_and_relations(kg: &Graph) -> TermInventory {
    let mut inv = TermInventory::default();
    for t in kg.triples() {
        let pred_iri = t.predicate.as_iri().unwrap_or_default();
        if vocab::is_declaration_predicate(pred_iri) {
            if pred_iri == vocab::RDF_TYPE && t.object.is_iri() {
                inv.concepts.insert(t.object.clone());
            }
            continue;
        }
        inv.relations.insert(t.predicate.clone());
        if t.subject.is_iri() {
            inv.concepts.insert(t.subject.clone());
        }
        if t.object.is_iri() {
            inv.concepts.insert(t.object.clone());
        }
    }
    inv
}

/// Collects the declared classes and properties of an ontology.
///
/// A class is an IRI typed `owl:Class` or `rdfs:Class`; a property is an IRI
/// typed as one of the four standard property kinds.
pub fn find_classes_and_properties(onto: &Graph) -> SchemaInventory {
    let mut inv = SchemaInventory::default();
    for t in onto.triples() {
        if t.predicate.as_iri() != Some(vocab::RDF_TYPE) || !t.subject.is_iri() {
            continue;
        }
        let Some(object) = t.object.as_iri() else {
            continue;
        };
        if vocab::is_class_declaration_object(object) {
            inv.classes.insert(t.subject.clone());
        } else if vocab::is_property_declaration_object(object) {
            inv.properties.insert(t.subject.clone());
        }
    }
    if inv.classes.is_empty() {
        inv.warnings
            .push("graph declares zero classes; is this really an ontology?".to_string());
    }
    inv
}

/// Tokenizes an IRI term's local name.
pub fn tokenize(term: &Term) -> Result<KeywordBag> {
    let local = term.local_name().ok_or_else(|| Error::InvalidConfig(format!(
        "only IRI terms can be tokenized: {term}"
    )))?;
    let tokens = tokenize_name(local);
    if tokens.is_empty() {
        return Err(Error::EmptyLocalName {
            term: term.to_string(),
        });
    }
    Ok(KeywordBag {
        source: term.clone(),
        tokens,
    })
}

/// Splits a name on `_`, `-`, camelCase boundaries and letter/digit
/// boundaries, lowercasing every token.
pub fn tokenize_name(name: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in name.split(['_', '-']) {
        split_camel_digit(chunk, &mut tokens);
    }
    tokens
}

fn split_camel_digit(chunk: &str, tokens: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !current.is_empty() {
            let prev = chars[i - 1];
            let upper_after_lower = prev.is_lowercase() && c.is_uppercase();
            let upper_run_end = prev.is_uppercase()
                && c.is_uppercase()
                && chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            let digit_boundary = (prev.is_ascii_digit() != c.is_ascii_digit())
                && (prev.is_alphanumeric() && c.is_alphanumeric());
            if upper_after_lower || upper_run_end || digit_boundary {
                tokens.push(std::mem::take(&mut current));
            }
        }
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
}
