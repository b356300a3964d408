//! Pluggable word-vector provider backing the semantic matching level.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Token-to-vector lookup. Implementations must be deterministic.
pub trait SemanticProvider {
    fn lookup(&self, token: &str) -> Option<&[f64]>;
    fn dimension(&self) -> usize;
}

/// Word vectors loaded from a text file: header `N D`, then one line per
/// token with D space-separated reals.
#[derive(Debug, Clone)]
pub struct VectorFile {
    dimension: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl VectorFile {
    pub fn parse(text: &str) -> Result<VectorFile> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::VectorFile {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or(Error::VectorFile {
                line: 1,
                message: "header must be 'N D'".into(),
            })?;
        let d: usize = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or(Error::VectorFile {
                line: 1,
                message: "header must be 'N D'".into(),
            })?;

        let mut vectors = BTreeMap::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap().to_string();
            let values: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| Error::VectorFile {
                        line: idx + 1,
                        message: format!("bad number '{f}'"),
                    })
                })
                .collect::<Result<_>>()?;
            if values.len() != d {
                return Err(Error::VectorFile {
                    line: idx + 1,
                    message: format!("expected {d} components, found {}", values.len()),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::VectorFile {
                    line: idx + 1,
                    message: "non-finite component".into(),
                });
            }
            vectors.insert(token, values);
        }
        if vectors.len() != n {
            return Err(Error::VectorFile {
                line: 1,
                message: format!("header says {n} entries, file has {}", vectors.len()),
            });
        }
        Ok(VectorFile {
            dimension: d,
            vectors,
        })
    }

    pub fn from_path(path: &Path) -> Result<VectorFile> {
        let text = std::fs::read_to_string(path)?;
        VectorFile::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl SemanticProvider for VectorFile {
    fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Mean vector of the in-vocabulary tokens; `None` when every token is
/// out of vocabulary.
pub fn bag_vector(provider: &dyn SemanticProvider, tokens: &[String]) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; provider.dimension()];
    let mut count = 0usize;
    for token in tokens {
        if let Some(v) = provider.lookup(token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            count += 1;
        }
    }
    if count == 0 {
        return None;
    }
    for s in &mut sum {
        *s /= count as f64;
    }
    Some(sum)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_rows() {
        let vf = VectorFile::parse("2 3\nfoo 1 0 0\nbar 0 1 0\n").unwrap();
        assert_eq!(vf.dimension(), 3);
        assert_eq!(vf.lookup("foo"), Some([1.0, 0.0, 0.0].as_slice()));
        assert_eq!(vf.lookup("baz"), None);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        assert!(VectorFile::parse("1 3\nfoo 1 0\n").is_err());
        assert!(VectorFile::parse("2 2\nfoo 1 0\n").is_err());
    }

    #[test]
    fn bag_vector_skips_oov() {
        let vf = VectorFile::parse("2 2\nfoo 1 0\nbar 0 1\n").unwrap();
        let bag = ["foo".to_string(), "zzz".to_string(), "bar".to_string()];
        assert_eq!(bag_vector(&vf, &bag), Some(vec![0.5, 0.5]));
        let all_oov = ["zzz".to_string()];
        assert_eq!(bag_vector(&vf, &all_oov), None);
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 0.0], &[1.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((cosine(&[1.0, 0.0], &[0.0, 1.0])).abs() < 1e-12);
        assert!((cosine(&[1.0, 0.0], &[-1.0, 0.0]) + 1.0).abs() < 1e-12);
    }
}
