use std::collections::BTreeMap;

use super::{Iri, RdfError};

/// `[A-Za-z][A-Za-z0-9_.-]*`
pub fn is_valid_prefix(prefix: &str) -> bool {
    let mut chars = prefix.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

/// Prefix to namespace map used for CURIE expansion and compression.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CurieMap {
    entries: BTreeMap<String, Iri>,
}

impl CurieMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `prefix` to `namespace`, returning the namespace it replaced.
    pub fn insert(&mut self, prefix: &str, namespace: Iri) -> Result<Option<Iri>, RdfError> {
        if !is_valid_prefix(prefix) {
            return Err(RdfError::InvalidPrefix(prefix.to_string()));
        }
        Ok(self.entries.insert(prefix.to_string(), namespace))
    }

    pub fn get(&self, prefix: &str) -> Option<&Iri> {
        self.entries.get(prefix)
    }

    pub fn remove(&mut self, prefix: &str) -> Option<Iri> {
        self.entries.remove(prefix)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by prefix.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn expand(&self, curie: &str) -> Result<Iri, RdfError> {
        let (prefix, local) = curie
            .split_once(':')
            .ok_or_else(|| RdfError::InvalidCurie(curie.to_string()))?;
        let ns = self
            .entries
            .get(prefix)
            .ok_or_else(|| RdfError::UnknownPrefix(curie.to_string()))?;
        Iri::new(format!("{}{}", ns.as_str(), local))
    }

    /// Longest matching namespace wins; equal namespaces resolve to the
    /// lexicographically smallest prefix.
    pub fn compress(&self, iri: &Iri) -> Option<String> {
        let s = iri.as_str();
        let mut best: Option<(&str, &Iri)> = None;
        for (prefix, ns) in &self.entries {
            if !s.starts_with(ns.as_str()) {
                continue;
            }
            // BTreeMap order gives the smallest prefix first on ties
            if best.is_none_or(|(_, b)| ns.as_str().len() > b.as_str().len()) {
                best = Some((prefix, ns));
            }
        }
        best.map(|(prefix, ns)| format!("{}:{}", prefix, &s[ns.as_str().len()..]))
    }

    /// CURIE when a namespace matches, otherwise the full IRI text.
    pub fn compress_or_iri(&self, iri: &Iri) -> String {
        self.compress(iri).unwrap_or_else(|| iri.as_str().to_string())
    }

    /// Resolves `<iri>`, a CURIE with a known prefix, or a bare absolute IRI.
    pub fn resolve(&self, text: &str) -> Result<Iri, RdfError> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            return Iri::new(inner);
        }
        if let Some((prefix, _)) = text.split_once(':') {
            if self.entries.contains_key(prefix) {
                return self.expand(text);
            }
        }
        match Iri::new(text) {
            Ok(iri) => Ok(iri),
            Err(_) if text.contains(':') => Err(RdfError::UnknownPrefix(text.to_string())),
            Err(_) => Err(RdfError::InvalidCurie(text.to_string())),
        }
    }
}

impl FromIterator<(String, Iri)> for CurieMap {
    fn from_iter<T: IntoIterator<Item = (String, Iri)>>(iter: T) -> Self {
        Self {
            entries: iter.into_iter().filter(|(p, _)| is_valid_prefix(p)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::iri;

    fn ex_map() -> CurieMap {
        let mut m = CurieMap::new();
        m.insert("ex", iri("http://example.org/")).unwrap();
        m
    }

    #[test]
    fn expand_concatenates() {
        assert_eq!(ex_map().expand("ex:A").unwrap(), iri("http://example.org/A"));
    }

    #[test]
    fn expand_unknown_prefix() {
        assert!(matches!(ex_map().expand("zz:A"), Err(RdfError::UnknownPrefix(_))));
    }

    #[test]
    fn compress_round_trip() {
        let m = ex_map();
        let a = iri("http://example.org/A");
        assert_eq!(m.compress(&a).as_deref(), Some("ex:A"));
        assert_eq!(m.expand(&m.compress(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn compress_prefers_longest_then_smallest_prefix() {
        let mut m = ex_map();
        m.insert("exs", iri("http://example.org/sub/")).unwrap();
        m.insert("alias", iri("http://example.org/sub/")).unwrap();
        assert_eq!(
            m.compress(&iri("http://example.org/sub/X")).as_deref(),
            Some("alias:X")
        );
        assert_eq!(m.compress(&iri("http://other.org/X")), None);
    }

    #[test]
    fn prefix_grammar() {
        assert!(is_valid_prefix("obo"));
        assert!(is_valid_prefix("a.b-c_1"));
        assert!(!is_valid_prefix(""));
        assert!(!is_valid_prefix("1ab"));
        assert!(ex_map().insert("_x", iri("http://x.org/")).is_err());
    }

    #[test]
    fn resolve_accepts_three_forms() {
        let m = ex_map();
        assert_eq!(m.resolve("ex:A").unwrap(), iri("http://example.org/A"));
        assert_eq!(m.resolve("<http://example.org/A>").unwrap(), iri("http://example.org/A"));
        assert_eq!(m.resolve("http://example.org/A").unwrap(), iri("http://example.org/A"));
        assert!(matches!(m.resolve("zz:A"), Err(RdfError::UnknownPrefix(_))));
    }
}
