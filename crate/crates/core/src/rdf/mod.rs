//! RDF data model shared by every pipeline stage.
//!
//! A [`Graph`] is a set of [`Triple`]s plus the [`CurieMap`] that was declared
//! for it. Blank nodes are numbered per graph (`b0`, `b1`, ...); merging two
//! graphs renumbers the incoming blank nodes so labels stay unique.

mod canonical;
mod curie;
mod turtle;
pub mod vocab;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use canonical::serialize_turtle;
pub use curie::{is_valid_prefix, CurieMap};
pub use turtle::{parse_turtle, parse_turtle_with_warnings, ParsedTurtle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct {construct} at line {line}, column {column}")]
    UnsupportedConstruct {
        line: usize,
        column: usize,
        construct: &'static str,
    },
    #[error("unknown prefix in {0:?}")]
    UnknownPrefix(String),
    #[error("invalid CURIE {0:?}")]
    InvalidCurie(String),
    #[error("invalid prefix name {0:?}")]
    InvalidPrefix(String),
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid literal: {0}")]
    InvalidLiteral(String),
}

/// An absolute IRI. Compared by exact byte equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct Iri(String);

impl<'de> serde::Deserialize<'de> for Iri {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Iri::new(s).map_err(serde::de::Error::custom)
    }
}

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if is_valid_iri(&value) {
            Ok(Self(value))
        } else {
            Err(RdfError::InvalidIri(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Final path or fragment segment, or the namespace-specific part of a URN.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        if let Some(cut) = s.rfind(['/', '#']) {
            return &s[cut + 1..];
        }
        // urn:nid:nss
        match s.splitn(3, ':').nth(2) {
            Some(nss) => nss,
            None => s,
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn is_valid_iri(s: &str) -> bool {
    if s.is_empty()
        || s.chars().any(|c| {
            c.is_control() || c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        })
    {
        return false;
    }
    if let Some(idx) = s.find("://") {
        let scheme = &s[..idx];
        return scheme.starts_with(|c: char| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    }
    is_valid_urn(s)
}

fn is_valid_urn(s: &str) -> bool {
    let mut parts = s.splitn(3, ':');
    let (Some(urn), Some(nid), Some(nss)) = (parts.next(), parts.next(), parts.next()) else {
        return false;
    };
    urn.eq_ignore_ascii_case("urn")
        && (1..=32).contains(&nid.len())
        && nid.starts_with(|c: char| c.is_ascii_alphanumeric())
        && nid.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
        && !nss.is_empty()
}

/// Graph-scoped blank node label, rendered as `b{n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankId(pub u32);

impl fmt::Display for BlankId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Option<Iri>,
    language: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: Some(datatype),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Result<Self, RdfError> {
        let language = language.into();
        if !is_valid_lang_tag(&language) {
            return Err(RdfError::InvalidLiteral(format!("bad language tag {language:?}")));
        }
        Ok(Self {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

pub(crate) fn is_valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Subject position: an IRI or a blank node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankId),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(i) => Some(i),
            Subject::Blank(_) => None,
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankId),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<BlankId> {
        match self {
            Term::Blank(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => Term::Iri(i),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Self {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }
}

/// A set of triples with the prefix map declared for it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    prefixes: CurieMap,
    next_blank: u32,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefixes(prefixes: CurieMap) -> Self {
        Self {
            prefixes,
            ..Self::default()
        }
    }

    pub fn prefixes(&self) -> &CurieMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut CurieMap {
        &mut self.prefixes
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn insert(&mut self, t: Triple) -> bool {
        if let Subject::Blank(b) = t.subject {
            self.next_blank = self.next_blank.max(b.0 + 1);
        }
        if let Term::Blank(b) = t.object {
            self.next_blank = self.next_blank.max(b.0 + 1);
        }
        self.triples.insert(t)
    }

    /// Allocates a blank node label unused in this graph.
    pub fn fresh_blank(&mut self) -> BlankId {
        let id = BlankId(self.next_blank);
        self.next_blank += 1;
        id
    }

    /// Triples whose subject is `s`, in canonical order.
    pub fn outgoing<'a>(&'a self, s: &'a Subject) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples
            .range(
                Triple {
                    subject: s.clone(),
                    predicate: Iri(String::new()),
                    object: Term::Iri(Iri(String::new())),
                }..,
            )
            .take_while(move |t| &t.subject == s)
    }

    /// Objects of `(s, p, ?)`.
    pub fn objects<'a>(&'a self, s: &'a Subject, p: &'a str) -> impl Iterator<Item = &'a Term> + 'a {
        self.outgoing(s)
            .filter(move |t| t.predicate.as_str() == p)
            .map(|t| &t.object)
    }

    /// Adds every triple of `other`, renumbering its blank nodes so they do
    /// not collide with ours. Prefixes of `other` are added where absent.
    pub fn merge(&mut self, other: &Graph) {
        let mut renamed: HashMap<BlankId, BlankId> = HashMap::new();
        let offset = self.next_blank;
        let mut remap = |b: BlankId| *renamed.entry(b).or_insert(BlankId(offset + b.0));
        for t in &other.triples {
            let subject = match &t.subject {
                Subject::Blank(b) => Subject::Blank(remap(*b)),
                s => s.clone(),
            };
            let object = match &t.object {
                Term::Blank(b) => Term::Blank(remap(*b)),
                o => o.clone(),
            };
            self.insert(Triple {
                subject,
                predicate: t.predicate.clone(),
                object,
            });
        }
        for (prefix, ns) in other.prefixes.iter() {
            if self.prefixes.get(prefix).is_none() {
                // prefix names were validated when `other` was built
                let _ = self.prefixes.insert(prefix, ns.clone());
            }
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<T: IntoIterator<Item = Triple>>(&mut self, iter: T) {
        for t in iter {
            self.insert(t);
        }
    }
}

/// Builds an [`Iri`] from a vocabulary constant known to be valid.
pub(crate) fn iri(s: &str) -> Iri {
    Iri::new(s).expect("vocabulary IRI is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://example.org/A").is_ok());
        assert!(Iri::new("urn:isbn:0451450523").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("example").is_err());
        assert!(Iri::new("urn:isbn").is_err());
        assert!(Iri::new("http://example.org/a b").is_err());
        assert!(Iri::new("mailto:someone@example.org").is_err());
    }

    #[test]
    fn local_names() {
        assert_eq!(iri("http://purl.obolibrary.org/obo/CHEBI_24431").local_name(), "CHEBI_24431");
        assert_eq!(iri("http://example.org/ns#Thing").local_name(), "Thing");
        assert_eq!(iri("urn:example:a:b").local_name(), "a:b");
    }

    #[test]
    fn merge_renumbers_blank_nodes() {
        let p = iri("http://example.org/p");
        let mut a = Graph::new();
        let b0 = a.fresh_blank();
        a.insert(Triple::new(iri("http://example.org/A"), p.clone(), Term::Blank(b0)));
        let mut b = Graph::new();
        let c0 = b.fresh_blank();
        b.insert(Triple::new(iri("http://example.org/B"), p.clone(), Term::Blank(c0)));
        a.merge(&b);
        assert_eq!(a.len(), 2);
        let blanks: BTreeSet<_> = a.iter().filter_map(|t| t.object.as_blank()).collect();
        assert_eq!(blanks.len(), 2);
    }

    #[test]
    fn literal_language_tag_checked() {
        assert!(Literal::lang("x", "en-GB").is_ok());
        assert!(Literal::lang("x", "en--").is_err());
    }
}
