use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rdf::term::Term;

/// Whether a graph plays the instance-data (ABox) or schema (TBox) role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GraphRole {
    Kg,
    Ontology,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Subject must be an IRI or blank node; the predicate must be an IRI.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Triple> {
        if subject.is_literal() {
            return Err(Error::InvalidConfig(format!(
                "triple subject cannot be a literal: {subject}"
            )));
        }
        if !predicate.is_iri() {
            return Err(Error::InvalidConfig(format!(
                "triple predicate must be an IRI: {predicate}"
            )));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// An immutable set of triples with a prefix map.
///
/// Graphs never change after construction; every transformation builds a new
/// graph, so they can be shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, String>,
    role: GraphRole,
}

impl Graph {
    pub fn new(role: GraphRole) -> Graph {
        Graph {
            triples: BTreeSet::new(),
            prefixes: BTreeMap::new(),
            role,
        }
    }

    pub fn from_triples<I>(triples: I, prefixes: BTreeMap<String, String>, role: GraphRole) -> Graph
    where
        I: IntoIterator<Item = Triple>,
    {
        Graph {
            triples: triples.into_iter().collect(),
            prefixes,
            role,
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn role(&self) -> GraphRole {
        self.role
    }

    pub fn with_role(&self, role: GraphRole) -> Graph {
        Graph {
            triples: self.triples.clone(),
            prefixes: self.prefixes.clone(),
            role,
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    /// Union of triple sets; prefixes merged (right side wins on conflict),
    /// role taken from `self`.
    pub fn union(&self, other: &Graph) -> Graph {
        let mut triples = self.triples.clone();
        triples.extend(other.triples.iter().cloned());
        let mut prefixes = self.prefixes.clone();
        prefixes.extend(other.prefixes.clone());
        Graph {
            triples,
            prefixes,
            role: self.role,
        }
    }

    /// New graph keeping only triples that satisfy the predicate.
    pub fn filter(&self, keep: impl Fn(&Triple) -> bool) -> Graph {
        Graph {
            triples: self.triples.iter().filter(|t| keep(t)).cloned().collect(),
            prefixes: self.prefixes.clone(),
            role: self.role,
        }
    }

    /// Expands `prefix:local` against the registered prefixes.
    pub fn expand(&self, name: &str) -> Option<String> {
        let (prefix, local) = name.split_once(':')?;
        let ns = self.prefixes.get(prefix)?;
        Some(format!("{ns}{local}"))
    }

    /// Compresses an IRI to `prefix:local` form using the longest matching
    /// registered namespace.
    pub fn compress(&self, iri: &str) -> Option<String> {
        let mut best: Option<(&str, &str)> = None;
        for (prefix, ns) in &self.prefixes {
            if let Some(local) = iri.strip_prefix(ns.as_str()) {
                match best {
                    Some((_, b)) if b.len() >= ns.len() => {}
                    _ => best = Some((prefix, local)),
                }
            }
        }
        best.map(|(prefix, local)| format!("{prefix}:{local}"))
    }

    /// Edges incident to `node`: `(predicate, other endpoint)` pairs.
    pub fn neighbors(&self, node: &Term, direction: Direction) -> BTreeSet<(Term, Term)> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            if matches!(direction, Direction::Out | Direction::Both) && &t.subject == node {
                out.insert((t.predicate.clone(), t.object.clone()));
            }
            if matches!(direction, Direction::In | Direction::Both) && &t.object == node {
                out.insert((t.predicate.clone(), t.subject.clone()));
            }
        }
        out
    }

    /// All subject and object terms.
    pub fn nodes(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            out.insert(t.subject.clone());
            out.insert(t.object.clone());
        }
        out
    }

    /// N-Triples serialization: one statement per line, canonical `< >` term
    /// form, lines sorted lexicographically.
    pub fn to_ntriples(&self) -> String {
        let mut lines: Vec<String> = self.triples.iter().map(|t| t.to_string()).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    /// Triple-set equality up to a bijective relabeling of blank nodes.
    pub fn isomorphic(&self, other: &Graph) -> bool {
        if self.triples == other.triples {
            return true;
        }
        if self.triples.len() != other.triples.len() {
            return false;
        }
        canonical_blank_form(&self.triples) == canonical_blank_form(&other.triples)
    }
}

/// Relabels blank nodes by order of first appearance in the blank-masked
/// sorted serialization. Not a full isomorphism check, but exact for the
/// blank-node shapes this crate produces (no symmetric blank clusters).
fn canonical_blank_form(triples: &BTreeSet<Triple>) -> BTreeSet<String> {
    let masked_key = |t: &Triple| {
        let mask = |term: &Term| match term {
            Term::Blank(_) => "_:*".to_string(),
            other => other.to_string(),
        };
        format!("{} {} {}", mask(&t.subject), mask(&t.predicate), mask(&t.object))
    };
    let mut ordered: Vec<&Triple> = triples.iter().collect();
    ordered.sort_by_key(|t| masked_key(t));

    let mut renames: BTreeMap<String, String> = BTreeMap::new();
    let rename = |term: &Term, renames: &mut BTreeMap<String, String>| match term {
        Term::Blank(label) => {
            let next = renames.len();
            let canon = renames
                .entry(label.clone())
                .or_insert_with(|| format!("b{next}"));
            format!("_:{canon}")
        }
        other => other.to_string(),
    };

    let mut out = BTreeSet::new();
    for t in ordered {
        let s = rename(&t.subject, &mut renames);
        let p = t.predicate.to_string();
        let o = rename(&t.object, &mut renames);
        out.insert(format!("{s} {p} {o}"));
    }
    out
}
