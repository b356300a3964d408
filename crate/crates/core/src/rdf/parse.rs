//! Parser for N-Triples and a Turtle subset.
//!
//! The Turtle subset accepts `@prefix` directives, prefixed names, absolute
//! IRIs in `< >`, the `a` keyword, string literals with an optional
//! `^^datatype`, `.` statement terminators and `#` comments. Collections,
//! blank-node property lists and multiline literals are out of scope.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rdf::graph::{Graph, GraphRole, Triple};
use crate::rdf::term::{validate_iri, Term};
use crate::rdf::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    NTriples,
    TurtleSubset,
}

pub fn parse(text: &str, format: Format, role: GraphRole) -> Result<Graph> {
    Parser::new(text, format).run(role)
}

/// One statement per non-empty line of the canonical N-Triples form. Used as
/// an independent cross-check for parsed triple counts.
pub fn count_ntriples_statements(text: &str) -> usize {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .count()
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    format: Format,
    prefixes: BTreeMap<String, String>,
    text: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    PName(String),
    Blank(String),
    Literal { lexical: String, datatype: Option<Box<Token>> },
    TypeKeyword,
    Dot,
    PrefixDirective,
    Eof,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, format: Format) -> Parser<'a> {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            format,
            prefixes: BTreeMap::new(),
            text,
        }
    }

    fn run(mut self, role: GraphRole) -> Result<Graph> {
        let mut triples = Vec::new();
        loop {
            self.skip_trivia();
            if self.at_end() {
                break;
            }
            let (token, line, column) = self.next_token()?;
            match token {
                Token::PrefixDirective => self.parse_prefix_directive()?,
                Token::Eof => break,
                first => {
                    let triple = self.parse_statement(first, line, column)?;
                    triples.push(triple);
                }
            }
        }
        Ok(Graph::from_triples(triples, self.prefixes, role))
    }

    fn parse_prefix_directive(&mut self) -> Result<()> {
        let (tok, line, column) = self.next_token()?;
        let name = match tok {
            Token::PName(name) => name,
            other => {
                return Err(self.syntax_at(line, column, format!("expected prefix name, got {other:?}")))
            }
        };
        let prefix = match name.strip_suffix(':') {
            Some(p) if !p.contains(':') => p.to_string(),
            _ => return Err(self.syntax_at(line, column, format!("malformed prefix '{name}'"))),
        };
        let (tok, line, column) = self.next_token()?;
        let ns = match tok {
            Token::Iri(iri) => iri,
            other => {
                return Err(self.syntax_at(line, column, format!("expected namespace IRI, got {other:?}")))
            }
        };
        self.expect_dot()?;
        self.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn parse_statement(&mut self, first: Token, line: usize, column: usize) -> Result<Triple> {
        let subject = self.token_to_term(first, line, column)?;
        if subject.is_literal() {
            return Err(self.syntax_at(line, column, "subject cannot be a literal".into()));
        }

        let (tok, line, column) = self.next_token()?;
        let predicate = match tok {
            Token::TypeKeyword => Term::Iri(vocab::RDF_TYPE.to_string()),
            other => self.token_to_term(other, line, column)?,
        };
        if !predicate.is_iri() {
            return Err(self.syntax_at(line, column, "predicate must be an IRI".into()));
        }

        let (tok, line, column) = self.next_token()?;
        let object = self.token_to_term(tok, line, column)?;

        self.expect_dot()?;
        Triple::new(subject, predicate, object)
            .map_err(|e| self.syntax_at(line, column, e.to_string()))
    }

    fn expect_dot(&mut self) -> Result<()> {
        let (tok, line, column) = self.next_token()?;
        match tok {
            Token::Dot => Ok(()),
            other => Err(self.syntax_at(line, column, format!("expected '.', got {other:?}"))),
        }
    }

    fn token_to_term(&self, token: Token, line: usize, column: usize) -> Result<Term> {
        match token {
            Token::Iri(iri) => Term::iri(iri),
            Token::PName(name) => {
                let (prefix, local) = name.split_once(':').ok_or_else(|| {
                    self.syntax_at(line, column, format!("expected ':' in prefixed name '{name}'"))
                })?;
                let ns = self.prefixes.get(prefix).ok_or_else(|| Error::UnknownPrefix {
                    prefix: prefix.to_string(),
                    line,
                    column,
                })?;
                Term::iri(format!("{ns}{local}"))
            }
            Token::Blank(label) => Ok(Term::blank(label)),
            Token::Literal { lexical, datatype } => match datatype {
                None => Ok(Term::literal(lexical)),
                Some(dt) => {
                    let dt_term = self.token_to_term(*dt, line, column)?;
                    let iri = dt_term.as_iri().ok_or_else(|| {
                        self.syntax_at(line, column, "datatype must be an IRI".into())
                    })?;
                    Term::typed_literal(lexical, iri)
                }
            },
            Token::TypeKeyword => Err(self.syntax_at(line, column, "'a' is only valid as a predicate".into())),
            Token::Dot | Token::PrefixDirective | Token::Eof => {
                Err(self.syntax_at(line, column, format!("expected a term, got {token:?}")))
            }
        }
    }

    // --- lexer ---

    fn next_token(&mut self) -> Result<(Token, usize, usize)> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        if self.at_end() {
            return Ok((Token::Eof, line, column));
        }
        let c = self.peek();
        let token = match c {
            '<' => self.lex_iri()?,
            '"' => self.lex_literal()?,
            '_' if self.peek_at(1) == Some(':') => self.lex_blank()?,
            '.' => {
                self.bump();
                Token::Dot
            }
            '@' => {
                let word = self.lex_bare_word();
                if word == "@prefix" {
                    if self.format == Format::NTriples {
                        return Err(self.syntax_at(line, column, "@prefix is not N-Triples".into()));
                    }
                    Token::PrefixDirective
                } else {
                    return Err(self.syntax_at(
                        line,
                        column,
                        format!("unsupported directive or language tag '{word}'"),
                    ));
                }
            }
            _ => {
                let word = self.lex_bare_word();
                if word.is_empty() {
                    return Err(self.syntax_at(line, column, format!("unexpected character '{c}'")));
                }
                if self.format == Format::NTriples {
                    return Err(self.syntax_at(
                        line,
                        column,
                        format!("bare name '{word}' is not N-Triples"),
                    ));
                }
                if word == "a" {
                    Token::TypeKeyword
                } else if word.contains(':') {
                    Token::PName(word)
                } else {
                    return Err(self.syntax_at(line, column, format!("unexpected token '{word}'")));
                }
            }
        };
        Ok((token, line, column))
    }

    fn lex_iri(&mut self) -> Result<Token> {
        let (line, column) = (self.line, self.column);
        self.bump(); // consume '<'
        let mut iri = String::new();
        loop {
            if self.at_end() {
                return Err(self.syntax_at(line, column, "unterminated IRI".into()));
            }
            let c = self.bump();
            if c == '>' {
                break;
            }
            if c == '\n' {
                return Err(self.syntax_at(line, column, "newline inside IRI".into()));
            }
            iri.push(c);
        }
        validate_iri(&iri)?;
        Ok(Token::Iri(iri))
    }

    fn lex_literal(&mut self) -> Result<Token> {
        let (line, column) = (self.line, self.column);
        self.bump(); // consume '"'
        let mut lexical = String::new();
        loop {
            if self.at_end() {
                return Err(self.syntax_at(line, column, "unterminated string literal".into()));
            }
            let c = self.bump();
            match c {
                '"' => break,
                '\n' => {
                    return Err(self.syntax_at(line, column, "multiline literals are not supported".into()))
                }
                '\\' => {
                    let esc = if self.at_end() {
                        return Err(self.syntax_at(line, column, "dangling escape".into()));
                    } else {
                        self.bump()
                    };
                    match esc {
                        '\\' => lexical.push('\\'),
                        '"' => lexical.push('"'),
                        'n' => lexical.push('\n'),
                        'r' => lexical.push('\r'),
                        't' => lexical.push('\t'),
                        'u' => lexical.push(self.lex_unicode_escape(4, line, column)?),
                        'U' => lexical.push(self.lex_unicode_escape(8, line, column)?),
                        other => {
                            return Err(self.syntax_at(line, column, format!("unknown escape '\\{other}'")))
                        }
                    }
                }
                other => lexical.push(other),
            }
        }
        // optional ^^datatype
        let datatype = if self.peek() == '^' && self.peek_at(1) == Some('^') {
            self.bump();
            self.bump();
            let (tok, dline, dcol) = self.next_token()?;
            match tok {
                Token::Iri(_) => Some(Box::new(tok)),
                Token::PName(_) if self.format == Format::TurtleSubset => Some(Box::new(tok)),
                other => {
                    return Err(self.syntax_at(dline, dcol, format!("expected datatype IRI, got {other:?}")))
                }
            }
        } else if self.peek() == '@' {
            return Err(self.syntax_at(line, column, "language tags are not supported".into()));
        } else {
            None
        };
        Ok(Token::Literal { lexical, datatype })
    }

    fn lex_unicode_escape(&mut self, len: usize, line: usize, column: usize) -> Result<char> {
        let mut hex = String::new();
        for _ in 0..len {
            if self.at_end() {
                return Err(self.syntax_at(line, column, "truncated unicode escape".into()));
            }
            hex.push(self.bump());
        }
        let code = u32::from_str_radix(&hex, 16)
            .map_err(|_| self.syntax_at(line, column, format!("bad unicode escape '{hex}'")))?;
        char::from_u32(code)
            .ok_or_else(|| self.syntax_at(line, column, format!("invalid code point U+{hex}")))
    }

    fn lex_blank(&mut self) -> Result<Token> {
        let (line, column) = (self.line, self.column);
        self.bump(); // '_'
        self.bump(); // ':'
        let mut label = String::new();
        while !self.at_end() {
            let c = self.peek();
            if c.is_ascii_alphanumeric() || c == '_' {
                label.push(self.bump());
            } else {
                break;
            }
        }
        if label.is_empty() {
            return Err(self.syntax_at(line, column, "blank node label is empty".into()));
        }
        Ok(Token::Blank(label))
    }

    /// Scans a bare word (pname, keyword or directive). A trailing '.' that
    /// terminates the statement is pushed back.
    fn lex_bare_word(&mut self) -> String {
        let mut word = String::new();
        while !self.at_end() {
            let c = self.peek();
            if c.is_whitespace() || matches!(c, '<' | '"' | '#' | ';' | ',') {
                break;
            }
            word.push(self.bump());
        }
        while word.ends_with('.') {
            word.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        word
    }

    fn skip_trivia(&mut self) {
        while !self.at_end() {
            let c = self.peek();
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while !self.at_end() && self.peek() != '\n' {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> char {
        self.chars[self.pos]
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn syntax_at(&self, line: usize, column: usize, message: String) -> Error {
        let _ = self.text;
        Error::Syntax { line, column, message }
    }
}
