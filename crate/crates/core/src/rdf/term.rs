use std::fmt;

use crate::error::{Error, Result};
use crate::rdf::vocab;

/// A node of an RDF graph: IRI, literal, or blank node.
///
/// The derived ordering (IRIs before literals before blanks, each ordered by
/// their string content) gives graphs a stable, deterministic iteration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
    },
    Blank(String),
}

impl Term {
    /// Builds an IRI term, validating that the IRI is absolute, non-empty and
    /// free of whitespace.
    pub fn iri(value: impl Into<String>) -> Result<Term> {
        let value = value.into();
        validate_iri(&value)?;
        Ok(Term::Iri(value))
    }

    pub fn literal(lexical: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
        }
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Result<Term> {
        let datatype = datatype.into();
        validate_iri(&datatype)?;
        Ok(Term::Literal {
            lexical: lexical.into(),
            datatype: Some(datatype),
        })
    }

    pub fn blank(label: impl Into<String>) -> Term {
        Term::Blank(label.into())
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(v) => Some(v),
            _ => None,
        }
    }

    /// The fragment of an IRI after the last `#` or `/`.
    pub fn local_name(&self) -> Option<&str> {
        let iri = self.as_iri()?;
        let cut = iri.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
        Some(&iri[cut..])
    }

    /// True for terms in the reserved rdf/rdfs/owl/xsd namespaces and for
    /// artifact-internal IRIs such as the bridge predicate.
    pub fn is_vocab(&self) -> bool {
        match self.as_iri() {
            Some(iri) => vocab::is_vocab_iri(iri),
            None => false,
        }
    }
}

impl serde::Serialize for Term {
    /// Compact string form for reports: bare IRI, `_:label`, or the lexical
    /// form of a literal.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Term::Iri(v) => serializer.serialize_str(v),
            Term::Blank(l) => serializer.serialize_str(&format!("_:{l}")),
            Term::Literal { lexical, .. } => serializer.serialize_str(lexical),
        }
    }
}

impl fmt::Display for Term {
    /// Canonical N-Triples form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(v) => write!(f, "<{v}>"),
            Term::Literal { lexical, datatype } => {
                write!(f, "\"{}\"", escape_literal(lexical))?;
                if let Some(dt) = datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
            Term::Blank(label) => write!(f, "_:{label}"),
        }
    }
}

pub(crate) fn validate_iri(value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(Error::InvalidIri {
            iri: value.to_string(),
            reason: "empty".into(),
        });
    }
    if value.chars().any(char::is_whitespace) {
        return Err(Error::InvalidIri {
            iri: value.to_string(),
            reason: "contains whitespace".into(),
        });
    }
    if !has_scheme(value) {
        return Err(Error::InvalidIri {
            iri: value.to_string(),
            reason: "not absolute (missing scheme)".into(),
        });
    }
    Ok(())
}

fn has_scheme(value: &str) -> bool {
    let mut chars = value.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        if c == ':' {
            return true;
        }
        if !(c.is_ascii_alphanumeric() || c == '+' || c == '-' || c == '.') {
            return false;
        }
    }
    false
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}
