//! Locality-based module extraction, bridging and application-ontology assembly.

mod appo;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::owl::{Axiom, OntologyModel};
use crate::rdf::{iri, vocab, CurieMap, Graph, Iri, Literal, Subject, Triple};
use crate::skos::SkosTaxonomy;
use crate::sssom::MappingSet;
use crate::Warning;

pub use appo::{build_application_ontology, load_appo_config, AppoConfig, BuildReport, SourceConfig, SourceReport};

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Signature {
        path: std::path::PathBuf,
        line: usize,
        message: String,
    },
    #[error("mapping subject {0} is not a taxonomy concept")]
    UnknownSubject(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Parse { path: std::path::PathBuf, message: String },
}

/// Seed terms for module extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub classes: BTreeSet<Iri>,
    pub properties: BTreeSet<Iri>,
}

impl Signature {
    /// Splits terms into properties (those used as restriction properties in
    /// `m`) and classes (everything else).
    pub fn classify(terms: impl IntoIterator<Item = Iri>, m: &OntologyModel) -> Self {
        let props = m.properties();
        let mut sig = Signature::default();
        for t in terms {
            if props.contains(&t) {
                sig.properties.insert(t);
            } else {
                sig.classes.insert(t);
            }
        }
        sig
    }

    /// Every class and property name of `m`.
    pub fn of_model(m: &OntologyModel) -> Self {
        Signature {
            classes: m.classes.clone(),
            properties: m.properties().into_iter().cloned().collect(),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &Iri> {
        self.classes.iter().chain(&self.properties)
    }

    pub fn len(&self) -> usize {
        self.classes.len() + self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.properties.is_empty()
    }
}

/// Parses a terms file: one CURIE or IRI per line, `#` starts a comment.
/// Errors carry the 1-based line number.
pub fn parse_terms(text: &str, prefixes: &CurieMap) -> Result<Vec<Iri>, (usize, String)> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let term = line.split_once('#').map_or(line, |(t, _)| t).trim();
        if term.is_empty() {
            continue;
        }
        out.push(prefixes.resolve(term).map_err(|e| (n + 1, e.to_string()))?);
    }
    Ok(out)
}

/// Names that make the axiom non-local once any of them is in the signature.
fn triggers(a: &Axiom) -> Vec<&Iri> {
    match a {
        Axiom::SubClassOf { sub, .. } => vec![sub],
        Axiom::SomeValuesFrom(r) => vec![&r.subject],
        Axiom::EquivalentClasses(p) => vec![p.first(), p.second()],
    }
}

fn axiom_signature(a: &Axiom) -> Vec<&Iri> {
    let mut names = a.classes();
    names.extend(a.property());
    names
}

/// True when the axiom is ⊥-local with respect to `sig`.
pub fn is_bot_local(a: &Axiom, sig: &BTreeSet<Iri>) -> bool {
    triggers(a).into_iter().all(|t| !sig.contains(t))
}

/// ⊥-locality module of `m` for `sig`, with annotations of its final
/// signature. Signature terms absent from `m` are reported as warnings.
pub fn extract_bot_module(m: &OntologyModel, sig: &Signature) -> (OntologyModel, Vec<Warning>) {
    let known: BTreeSet<&Iri> = m
        .classes
        .iter()
        .chain(m.properties())
        .chain(m.annotations.keys())
        .collect();
    let warnings: Vec<Warning> = sig
        .names()
        .filter(|n| !known.contains(n))
        .map(|n| Warning::new("unknown-signature-term", format!("<{n}> does not occur in the ontology")))
        .collect();

    let axioms: Vec<Axiom> = m.axioms().collect();
    let mut by_trigger: BTreeMap<&Iri, Vec<usize>> = BTreeMap::new();
    for (i, a) in axioms.iter().enumerate() {
        for t in triggers(a) {
            by_trigger.entry(t).or_default().push(i);
        }
    }

    let mut sigma: BTreeSet<Iri> = sig.names().cloned().collect();
    let mut queue: Vec<Iri> = sigma.iter().cloned().collect();
    let mut included = vec![false; axioms.len()];
    while let Some(name) = queue.pop() {
        for &i in by_trigger.get(&name).into_iter().flatten() {
            if included[i] {
                continue;
            }
            included[i] = true;
            for n in axiom_signature(&axioms[i]) {
                if sigma.insert(n.clone()) {
                    queue.push(n.clone());
                }
            }
        }
    }

    let mut module = OntologyModel {
        prefixes: m.prefixes.clone(),
        ..OntologyModel::default()
    };
    for (i, a) in axioms.into_iter().enumerate() {
        if included[i] {
            module.insert_axiom(a);
        }
    }
    module.classes.extend(m.classes.iter().filter(|c| sigma.contains(*c)).cloned());
    module.annotations = m
        .annotations
        .iter()
        .filter(|(k, _)| sigma.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    module.deprecated = m.deprecated.intersection(&module.classes).cloned().collect();
    (module, warnings)
}

/// Renders a model as OWL triples that `extract_model` reads back.
pub fn render_model(m: &OntologyModel) -> Graph {
    let mut g = Graph::with_prefixes(m.prefixes.clone());
    for (p, ns) in [("owl", vocab::OWL), ("rdfs", vocab::RDFS)] {
        if g.prefixes().get(p).is_none() {
            let _ = g.prefixes_mut().insert(p, iri(ns));
        }
    }
    let rdf_type = iri(vocab::RDF_TYPE);
    let sub_of = iri(vocab::RDFS_SUBCLASS_OF);
    for c in &m.classes {
        g.insert(Triple::new(c.clone(), rdf_type.clone(), iri(vocab::OWL_CLASS)));
    }
    for p in m.properties() {
        g.insert(Triple::new(p.clone(), rdf_type.clone(), iri(vocab::OWL_OBJECT_PROPERTY)));
    }
    for (a, b) in &m.subclass_edges {
        g.insert(Triple::new(a.clone(), sub_of.clone(), b.clone()));
    }
    for r in &m.restrictions {
        let b = g.fresh_blank();
        g.insert(Triple::new(r.subject.clone(), sub_of.clone(), Subject::Blank(b)));
        g.insert(Triple::new(Subject::Blank(b), rdf_type.clone(), iri(vocab::OWL_RESTRICTION)));
        g.insert(Triple::new(Subject::Blank(b), iri(vocab::OWL_ON_PROPERTY), r.property.clone()));
        g.insert(Triple::new(Subject::Blank(b), iri(vocab::OWL_SOME_VALUES_FROM), r.filler.clone()));
    }
    for p in &m.equivalence_pairs {
        g.insert(Triple::new(p.first().clone(), iri(vocab::OWL_EQUIVALENT_CLASS), p.second().clone()));
    }
    for (s, a) in &m.annotations {
        if let Some(l) = &a.label {
            g.insert(Triple::new(s.clone(), iri(vocab::RDFS_LABEL), Literal::plain(l.clone())));
        }
        if let Some(d) = &a.definition {
            g.insert(Triple::new(s.clone(), iri(vocab::IAO_DEFINITION), Literal::plain(d.clone())));
        }
        for syn in &a.synonyms {
            g.insert(Triple::new(s.clone(), iri(vocab::HAS_EXACT_SYNONYM), Literal::plain(syn.clone())));
        }
    }
    for d in &m.deprecated {
        g.insert(Triple::new(
            d.clone(),
            iri(vocab::OWL_DEPRECATED),
            Literal::typed("true", iri(vocab::XSD_BOOLEAN)),
        ));
    }
    g
}

/// One `owl:equivalentClass` triple per `skos:exactMatch` record.
pub fn bridge_equivalences(
    taxonomy: &SkosTaxonomy,
    mappings: &MappingSet,
) -> Result<(Graph, Vec<Warning>), AssembleError> {
    bridge(Some(taxonomy), mappings)
}

pub(crate) fn bridge(
    taxonomy: Option<&SkosTaxonomy>,
    mappings: &MappingSet,
) -> Result<(Graph, Vec<Warning>), AssembleError> {
    let mut g = Graph::new();
    let mut warnings = Vec::new();
    let exact = iri(vocab::SKOS_EXACT_MATCH);
    let equiv = iri(vocab::OWL_EQUIVALENT_CLASS);
    for r in mappings.records() {
        let subject = mappings
            .expand(&r.subject_id)
            .map_err(|_| AssembleError::UnknownSubject(r.subject_id.clone()))?;
        if taxonomy.is_some_and(|t| !t.contains(&subject)) {
            return Err(AssembleError::UnknownSubject(r.subject_id.clone()));
        }
        let predicate = mappings.expand(&r.predicate_id).ok();
        if predicate.as_ref() != Some(&exact) {
            warnings.push(Warning::new(
                "non-exact-mapping-skipped",
                format!("{} {} {} is not skos:exactMatch", r.subject_id, r.predicate_id, r.object_id),
            ));
            continue;
        }
        let Ok(object) = mappings.expand(&r.object_id) else {
            warnings.push(Warning::new("unresolved-object", format!("{} cannot be expanded", r.object_id)));
            continue;
        };
        g.insert(Triple::new(subject, equiv.clone(), object));
    }
    if !g.is_empty() {
        let _ = g.prefixes_mut().insert("owl", iri(vocab::OWL));
    }
    Ok((g, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::owl::extract_model;
    use crate::rdf::parse_turtle;
    use crate::skos::{convert, MintConfig};
    use crate::sssom::MappingRecord;

    const F1: &str = include_str!("../../../../fixtures/toy.ttl");

    fn f1() -> OntologyModel {
        extract_model(&parse_turtle(F1).unwrap()).0
    }

    fn ex(l: &str) -> Iri {
        iri(&format!("http://example.org/{l}"))
    }

    #[test]
    fn f1_module_for_a() {
        let m = f1();
        let sig = Signature::classify([ex("A")], &m);
        let (module, warnings) = extract_bot_module(&m, &sig);
        assert!(warnings.is_empty());
        let axioms: Vec<Axiom> = module.axioms().collect();
        assert_eq!(axioms.len(), 3);
        assert_eq!(module.subclass_edges, m.subclass_edges);
        assert_eq!(module.equivalence_pairs, m.equivalence_pairs);
        assert_eq!(module.label(&ex("A")), Some("alpha"));
    }

    #[test]
    fn f1_module_for_c_is_empty() {
        let m = f1();
        let (module, _) = extract_bot_module(&m, &Signature::classify([ex("C")], &m));
        assert_eq!(module.axiom_count(), 0);
        assert_eq!(module.classes, BTreeSet::from([ex("C")]));
    }

    #[test]
    fn empty_and_full_signatures() {
        let m = f1();
        let (empty, _) = extract_bot_module(&m, &Signature::default());
        assert_eq!(empty.axiom_count(), 0);
        assert!(empty.classes.is_empty());
        let (full, _) = extract_bot_module(&m, &Signature::of_model(&m));
        assert_eq!(full, m);
    }

    #[test]
    fn unknown_terms_warn() {
        let m = f1();
        let (_, w) = extract_bot_module(&m, &Signature::classify([ex("Nope")], &m));
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].code, "unknown-signature-term");
    }

    #[test]
    fn restriction_pulls_property_and_filler() {
        let ttl = "@prefix ex: <http://example.org/> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\nex:A rdfs:subClassOf [ a owl:Restriction ; owl:onProperty ex:p ; owl:someValuesFrom ex:F ] .\nex:F rdfs:subClassOf ex:G .\n";
        let (m, _) = extract_model(&parse_turtle(ttl).unwrap());
        let (module, _) = extract_bot_module(&m, &Signature::classify([ex("A")], &m));
        assert_eq!(module.axiom_count(), 2);
        assert_eq!(extract_model(&render_model(&module)).0, module);
    }

    #[test]
    fn parse_terms_file() {
        let mut p = CurieMap::new();
        p.insert("ex", ex("")).unwrap();
        let terms = parse_terms("# seeds\nex:A\n\n<http://example.org/B> # inline\n", &p).unwrap();
        assert_eq!(terms, vec![ex("A"), ex("B")]);
        assert_eq!(parse_terms("ex:A\nzz:Q\n", &p).unwrap_err().0, 2);
    }

    #[test]
    fn f1_bridges() {
        let cfg = MintConfig::with_default_enrichment(iri("https://nn.example/tax/")).unwrap();
        let c = convert(&f1(), &cfg).unwrap();
        let (g, w) = bridge_equivalences(&c.taxonomy, &c.mappings).unwrap();
        assert!(w.is_empty());
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|t| t.predicate.as_str() == vocab::OWL_EQUIVALENT_CLASS));

        let empty = MappingSet::new(cfg.mapping_set_id.clone(), cfg.license.clone(), CurieMap::new());
        assert!(bridge_equivalences(&c.taxonomy, &empty).unwrap().0.is_empty());

        let mut bad = c.mappings.clone();
        bad.push(MappingRecord {
            subject_id: "tax:Zed".into(),
            subject_label: None,
            predicate_id: "skos:exactMatch".into(),
            object_id: "ex:Zed".into(),
            object_label: None,
            mapping_justification: "semapv:UnspecifiedMatching".into(),
        })
        .unwrap();
        let err = bridge_equivalences(&c.taxonomy, &bad).unwrap_err();
        assert!(err.to_string().contains("tax:Zed"));
    }
}
