//! SKOS taxonomies with organisation-minted concept IRIs.

mod convert;
mod mint;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::vocab;
use crate::rdf::{iri, serialize_turtle, CurieMap, Graph, Iri, Literal, Subject, Term, Triple};
use crate::sssom::MappingSet;

pub use convert::{convert, Conversion, ConversionReport};
pub use mint::{mint_all, mint_enrichment_iri, mint_iri, MintConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkosError {
    #[error("broader cycle: {}", render_cycle(.cycle))]
    Cycle { cycle: Vec<Iri> },
    #[error("invalid mint configuration: {0}")]
    Config(String),
    #[error("invalid taxonomy: {0}")]
    Invalid(String),
}

fn render_cycle(cycle: &[Iri]) -> String {
    cycle.iter().map(Iri::as_str).collect::<Vec<_>>().join(" → ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptStatus {
    Published,
    Proposed,
    Approved,
}

impl ConceptStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ConceptStatus::Published => "published",
            ConceptStatus::Proposed => "proposed",
            ConceptStatus::Approved => "approved",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "published" => Some(Self::Published),
            "proposed" => Some(Self::Proposed),
            "approved" => Some(Self::Approved),
            _ => None,
        }
    }

    pub fn is_enrichment(self) -> bool {
        !matches!(self, ConceptStatus::Published)
    }
}

impl fmt::Display for ConceptStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptRecord {
    pub pref_label: String,
    pub definition: Option<String>,
    pub alt_labels: Vec<String>,
    pub broader: BTreeSet<Iri>,
    pub status: ConceptStatus,
    /// Public IRIs this concept was converted from; empty for enrichments.
    pub sources: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkosTaxonomy {
    pub concepts: BTreeMap<Iri, ConceptRecord>,
    pub scheme_iri: Iri,
    pub version: String,
    pub prefixes: CurieMap,
}

impl SkosTaxonomy {
    pub fn new(scheme_iri: Iri, version: impl Into<String>, prefixes: CurieMap) -> Self {
        Self {
            concepts: BTreeMap::new(),
            scheme_iri,
            version: version.into(),
            prefixes,
        }
    }

    pub fn get(&self, concept: &Iri) -> Option<&ConceptRecord> {
        self.concepts.get(concept)
    }

    pub fn contains(&self, concept: &Iri) -> bool {
        self.concepts.contains_key(concept)
    }

    /// Concepts whose broader set contains `concept`.
    pub fn children<'a>(&'a self, concept: &'a Iri) -> impl Iterator<Item = &'a Iri> + 'a {
        self.concepts
            .iter()
            .filter(move |(_, c)| c.broader.contains(concept))
            .map(|(i, _)| i)
    }

    /// Narrower index for repeated traversal.
    pub fn narrower_index(&self) -> BTreeMap<&Iri, BTreeSet<&Iri>> {
        let mut index: BTreeMap<&Iri, BTreeSet<&Iri>> = BTreeMap::new();
        for (child, c) in &self.concepts {
            for parent in &c.broader {
                index.entry(parent).or_default().insert(child);
            }
        }
        index
    }

    /// Transitive descendants of `root`, excluding `root` itself.
    pub fn descendants(&self, root: &Iri) -> BTreeSet<Iri> {
        let index = self.narrower_index();
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Iri> = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for child in index.get(n).into_iter().flatten() {
                if seen.insert((*child).clone()) {
                    queue.push_back(child);
                }
            }
        }
        seen.remove(root);
        seen
    }

    /// True when `concept` or one of its ancestors has a source mapping.
    pub fn is_rooted(&self, concept: &Iri) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![concept];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            let Some(c) = self.concepts.get(n) else { continue };
            if !c.sources.is_empty() {
                return true;
            }
            stack.extend(c.broader.iter());
        }
        false
    }

    pub fn enrichments(&self) -> impl Iterator<Item = (&Iri, &ConceptRecord)> {
        self.concepts.iter().filter(|(_, c)| c.status.is_enrichment())
    }

    /// Only the concepts converted from public ontologies.
    pub fn published_part(&self) -> SkosTaxonomy {
        SkosTaxonomy {
            concepts: self
                .concepts
                .iter()
                .filter(|(_, c)| c.status == ConceptStatus::Published)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Checks every taxonomy invariant and returns the first violation.
    pub fn validate(&self) -> Result<(), SkosError> {
        for (i, c) in &self.concepts {
            if c.pref_label.trim().is_empty() {
                return Err(SkosError::Invalid(format!("<{i}> has an empty prefLabel")));
            }
            if c.status.is_enrichment() != c.sources.is_empty() {
                return Err(SkosError::Invalid(format!(
                    "<{i}> has status {} but {} source mappings",
                    c.status,
                    c.sources.len()
                )));
            }
            for b in &c.broader {
                if !self.concepts.contains_key(b) {
                    return Err(SkosError::Invalid(format!("<{i}> has unknown broader <{b}>")));
                }
            }
            if c.status.is_enrichment() && !self.is_rooted(i) {
                return Err(SkosError::Invalid(format!("enrichment <{i}> has no source-mapped ancestor")));
            }
        }
        find_cycle(&self.concepts).map_or(Ok(()), |cycle| Err(SkosError::Cycle { cycle }))
    }

    /// Published concepts as SKOS Turtle triples (the on-disk taxonomy form).
    pub fn published_graph(&self) -> Graph {
        self.render(false)
    }

    /// Every concept, with `adms:status` on enrichments.
    pub fn full_graph(&self) -> Graph {
        self.render(true)
    }

    fn render(&self, with_enrichments: bool) -> Graph {
        let mut prefixes = self.prefixes.clone();
        let _ = prefixes.insert("skos", iri(vocab::SKOS));
        let _ = prefixes.insert("owl", iri(vocab::OWL));
        if with_enrichments {
            let _ = prefixes.insert("adms", iri(vocab::ADMS));
        }
        let mut g = Graph::with_prefixes(prefixes);
        let scheme = Subject::Iri(self.scheme_iri.clone());
        g.insert(Triple::new(scheme.clone(), iri(vocab::RDF_TYPE), iri(vocab::SKOS_CONCEPT_SCHEME)));
        g.insert(Triple::new(
            scheme,
            iri(vocab::OWL_VERSION_INFO),
            Literal::plain(self.version.clone()),
        ));
        for (id, c) in &self.concepts {
            if c.status.is_enrichment() && !with_enrichments {
                continue;
            }
            let s = Subject::Iri(id.clone());
            g.insert(Triple::new(s.clone(), iri(vocab::RDF_TYPE), iri(vocab::SKOS_CONCEPT)));
            g.insert(Triple::new(s.clone(), iri(vocab::SKOS_IN_SCHEME), self.scheme_iri.clone()));
            g.insert(Triple::new(s.clone(), iri(vocab::SKOS_PREF_LABEL), Literal::plain(c.pref_label.clone())));
            if let Some(d) = &c.definition {
                g.insert(Triple::new(s.clone(), iri(vocab::SKOS_DEFINITION), Literal::plain(d.clone())));
            }
            for alt in &c.alt_labels {
                g.insert(Triple::new(s.clone(), iri(vocab::SKOS_ALT_LABEL), Literal::plain(alt.clone())));
            }
            for b in &c.broader {
                g.insert(Triple::new(s.clone(), iri(vocab::SKOS_BROADER), b.clone()));
            }
            if c.status.is_enrichment() {
                g.insert(Triple::new(s, iri(vocab::ADMS_STATUS), Literal::plain(c.status.as_str())));
            }
        }
        g
    }

    pub fn to_turtle(&self) -> String {
        serialize_turtle(&self.published_graph())
    }

    /// Hash of the full taxonomy content, including enrichment statuses.
    pub fn content_hash(&self) -> String {
        crate::digest::content_hash(serialize_turtle(&self.full_graph()).as_bytes())
    }

    /// Rebuilds a taxonomy from its SKOS graph, taking source IRIs from the
    /// `skos:exactMatch` records of `mappings`.
    pub fn from_graph(g: &Graph, mappings: &MappingSet) -> Result<Self, SkosError> {
        let typed = |class: &str| -> Vec<Iri> {
            g.iter()
                .filter(|t| t.predicate.as_str() == vocab::RDF_TYPE && t.object.as_iri().is_some_and(|o| o.as_str() == class))
                .filter_map(|t| t.subject.as_iri().cloned())
                .collect()
        };
        let schemes = typed(vocab::SKOS_CONCEPT_SCHEME);
        let [scheme_iri] = schemes.as_slice() else {
            return Err(SkosError::Invalid(format!("expected one skos:ConceptScheme, found {}", schemes.len())));
        };
        let scheme = Subject::Iri(scheme_iri.clone());
        let version = g
            .objects(&scheme, vocab::OWL_VERSION_INFO)
            .find_map(Term::as_literal)
            .map(|l| l.lexical().to_string())
            .unwrap_or_default();

        let literals = |s: &Subject, p: &str| -> Vec<String> {
            g.objects(s, p).filter_map(Term::as_literal).map(|l| l.lexical().to_string()).collect()
        };
        let mut concepts = BTreeMap::new();
        for id in typed(vocab::SKOS_CONCEPT) {
            let s = Subject::Iri(id.clone());
            let labels = literals(&s, vocab::SKOS_PREF_LABEL);
            let [pref_label] = labels.as_slice() else {
                return Err(SkosError::Invalid(format!("<{id}> must have exactly one prefLabel")));
            };
            let status = match literals(&s, vocab::ADMS_STATUS).first() {
                Some(st) => ConceptStatus::parse(st)
                    .ok_or_else(|| SkosError::Invalid(format!("<{id}> has unknown status {st:?}")))?,
                None => ConceptStatus::Published,
            };
            concepts.insert(
                id.clone(),
                ConceptRecord {
                    pref_label: pref_label.clone(),
                    definition: literals(&s, vocab::SKOS_DEFINITION).into_iter().next(),
                    alt_labels: literals(&s, vocab::SKOS_ALT_LABEL),
                    broader: g.objects(&s, vocab::SKOS_BROADER).filter_map(Term::as_iri).cloned().collect(),
                    status,
                    sources: BTreeSet::new(),
                },
            );
        }
        let exact_match = iri(vocab::SKOS_EXACT_MATCH);
        for r in mappings.records() {
            let resolve = |c: &str| mappings.expand(c).map_err(|e| SkosError::Invalid(e.to_string()));
            if resolve(&r.predicate_id)? != exact_match {
                continue;
            }
            let subject = resolve(&r.subject_id)?;
            let concept = concepts
                .get_mut(&subject)
                .ok_or_else(|| SkosError::Invalid(format!("mapping subject {} is not a concept", r.subject_id)))?;
            concept.sources.insert(resolve(&r.object_id)?);
        }
        let mut prefixes = g.prefixes().clone();
        for p in ["skos", "owl", "adms"] {
            prefixes.remove(p);
        }
        let taxonomy = SkosTaxonomy {
            concepts,
            scheme_iri: scheme_iri.clone(),
            version,
            prefixes,
        };
        taxonomy.validate()?;
        Ok(taxonomy)
    }
}

/// One broader cycle, starting and ending at its smallest member, if any.
pub(crate) fn find_cycle(concepts: &BTreeMap<Iri, ConceptRecord>) -> Option<Vec<Iri>> {
    let edges: BTreeMap<&Iri, Vec<&Iri>> = concepts
        .iter()
        .map(|(i, c)| (i, c.broader.iter().filter(|b| concepts.contains_key(*b)).collect()))
        .collect();
    find_cycle_in(&edges)
}

pub(crate) fn find_cycle_in(edges: &BTreeMap<&Iri, Vec<&Iri>>) -> Option<Vec<Iri>> {
    // Peel nodes without outgoing edges; what is left lies on or leads to a cycle.
    let mut remaining: BTreeSet<&Iri> = edges.keys().copied().collect();
    let mut out_degree: BTreeMap<&Iri, usize> = edges.iter().map(|(k, v)| (*k, v.len())).collect();
    let mut reverse: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for (from, tos) in edges {
        for to in tos {
            reverse.entry(to).or_default().push(from);
        }
    }
    let mut queue: VecDeque<&Iri> = out_degree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    while let Some(n) = queue.pop_front() {
        remaining.remove(n);
        for pred in reverse.get(n).into_iter().flatten() {
            let d = out_degree.get_mut(pred).expect("node present");
            *d -= 1;
            if *d == 0 {
                queue.push_back(pred);
            }
        }
    }
    let start = *remaining.iter().next()?;
    let mut path: Vec<&Iri> = Vec::new();
    let mut current = start;
    loop {
        if let Some(pos) = path.iter().position(|p| *p == current) {
            let mut cycle: Vec<&Iri> = path[pos..].to_vec();
            let min_pos = cycle.iter().enumerate().min_by_key(|(_, i)| **i).map(|(p, _)| p).unwrap_or(0);
            cycle.rotate_left(min_pos);
            let first = cycle[0];
            cycle.push(first);
            return Some(cycle.into_iter().cloned().collect());
        }
        path.push(current);
        current = edges[current]
            .iter()
            .copied()
            .filter(|n| remaining.contains(n))
            .min()
            .expect("remaining nodes keep an outgoing edge");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concept(label: &str, broader: &[&Iri], sources: &[&str]) -> ConceptRecord {
        ConceptRecord {
            pref_label: label.into(),
            definition: None,
            alt_labels: vec![],
            broader: broader.iter().map(|b| (*b).clone()).collect(),
            status: if sources.is_empty() {
                ConceptStatus::Proposed
            } else {
                ConceptStatus::Published
            },
            sources: sources.iter().map(|s| iri(s)).collect(),
        }
    }

    #[test]
    fn cycle_detection_reports_smallest_first() {
        let (a, b, c) = (iri("http://x.org/a"), iri("http://x.org/b"), iri("http://x.org/c"));
        let mut concepts = BTreeMap::new();
        concepts.insert(c.clone(), concept("c", &[&b], &["http://p.org/c"]));
        concepts.insert(b.clone(), concept("b", &[&c], &["http://p.org/b"]));
        concepts.insert(a.clone(), concept("a", &[&b], &["http://p.org/a"]));
        assert_eq!(find_cycle(&concepts), Some(vec![b.clone(), c.clone(), b.clone()]));
        concepts.get_mut(&c).unwrap().broader.clear();
        assert_eq!(find_cycle(&concepts), None);
    }

    #[test]
    fn rooting_and_descendants() {
        let (a, b, e1, e2) = (
            iri("http://x.org/a"),
            iri("http://x.org/b"),
            iri("http://x.org/e1"),
            iri("http://x.org/e2"),
        );
        let mut t = SkosTaxonomy::new(iri("http://x.org/scheme"), "1", CurieMap::new());
        t.concepts.insert(a.clone(), concept("a", &[], &["http://p.org/a"]));
        t.concepts.insert(b.clone(), concept("b", &[&a], &["http://p.org/b"]));
        t.concepts.insert(e1.clone(), concept("e1", &[&b], &[]));
        t.concepts.insert(e2.clone(), concept("e2", &[&e1], &[]));
        assert!(t.is_rooted(&e2));
        assert_eq!(t.descendants(&a).len(), 3);
        assert_eq!(t.children(&b).collect::<Vec<_>>(), vec![&e1]);
        assert!(t.validate().is_ok());
        t.concepts.get_mut(&e1).unwrap().broader.clear();
        assert!(t.validate().is_err());
    }
}
