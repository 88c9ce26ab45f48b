//! Projection of an RDF graph onto the OWL axioms the pipeline understands:
//! named classes, named subclass edges, existential restrictions, named
//! equivalences, a fixed set of annotations, and deprecation flags.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::rdf::vocab;
use crate::rdf::{BlankId, CurieMap, Graph, Iri, Subject, Term};
use crate::Warning;

/// Unordered pair of distinct classes, stored smallest first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EquivalencePair(Iri, Iri);

impl EquivalencePair {
    /// `None` when both sides are the same class.
    pub fn new(a: Iri, b: Iri) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self(a, b)),
            std::cmp::Ordering::Greater => Some(Self(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &Iri {
        &self.0
    }

    pub fn second(&self) -> &Iri {
        &self.1
    }
}

/// `subject ⊑ ∃property.filler`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Restriction {
    pub subject: Iri,
    pub property: Iri,
    pub filler: Iri,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub label: Option<String>,
    pub definition: Option<String>,
    pub synonyms: Vec<String>,
}

impl AnnotationRecord {
    pub fn is_empty(&self) -> bool {
        self.label.is_none() && self.definition.is_none() && self.synonyms.is_empty()
    }
}

/// The logical axiom forms carried by an [`OntologyModel`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    SubClassOf { sub: Iri, sup: Iri },
    SomeValuesFrom(Restriction),
    EquivalentClasses(EquivalencePair),
}

impl Axiom {
    /// Class names mentioned by the axiom.
    pub fn classes(&self) -> Vec<&Iri> {
        match self {
            Axiom::SubClassOf { sub, sup } => vec![sub, sup],
            Axiom::SomeValuesFrom(r) => vec![&r.subject, &r.filler],
            Axiom::EquivalentClasses(p) => vec![p.first(), p.second()],
        }
    }

    pub fn property(&self) -> Option<&Iri> {
        match self {
            Axiom::SomeValuesFrom(r) => Some(&r.property),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OntologyModel {
    pub classes: BTreeSet<Iri>,
    pub subclass_edges: BTreeSet<(Iri, Iri)>,
    pub equivalence_pairs: BTreeSet<EquivalencePair>,
    pub restrictions: BTreeSet<Restriction>,
    pub annotations: BTreeMap<Iri, AnnotationRecord>,
    pub deprecated: BTreeSet<Iri>,
    /// Prefixes of the source document, kept for rendering and CURIEs.
    pub prefixes: CurieMap,
}

impl OntologyModel {
    pub fn axioms(&self) -> impl Iterator<Item = Axiom> + '_ {
        let subs = self.subclass_edges.iter().map(|(a, b)| Axiom::SubClassOf {
            sub: a.clone(),
            sup: b.clone(),
        });
        let rs = self.restrictions.iter().cloned().map(Axiom::SomeValuesFrom);
        let eqs = self.equivalence_pairs.iter().cloned().map(Axiom::EquivalentClasses);
        subs.chain(rs).chain(eqs)
    }

    pub fn axiom_count(&self) -> usize {
        self.subclass_edges.len() + self.restrictions.len() + self.equivalence_pairs.len()
    }

    /// Adds an axiom and declares the classes it mentions.
    pub fn insert_axiom(&mut self, axiom: Axiom) {
        for c in axiom.classes() {
            self.classes.insert(c.clone());
        }
        match axiom {
            Axiom::SubClassOf { sub, sup } => {
                if sub != sup {
                    self.subclass_edges.insert((sub, sup));
                }
            }
            Axiom::SomeValuesFrom(r) => {
                self.restrictions.insert(r);
            }
            Axiom::EquivalentClasses(p) => {
                self.equivalence_pairs.insert(p);
            }
        }
    }

    /// Properties used in restrictions.
    pub fn properties(&self) -> BTreeSet<&Iri> {
        self.restrictions.iter().map(|r| &r.property).collect()
    }

    pub fn label(&self, class: &Iri) -> Option<&str> {
        self.annotations.get(class).and_then(|a| a.label.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub classes: usize,
    pub subclass: usize,
    pub equiv: usize,
    pub restrictions: usize,
    pub annotated: usize,
    pub deprecated: usize,
}

pub fn model_stats(m: &OntologyModel) -> ModelStats {
    ModelStats {
        classes: m.classes.len(),
        subclass: m.subclass_edges.len(),
        equiv: m.equivalence_pairs.len(),
        restrictions: m.restrictions.len(),
        annotated: m.annotations.len(),
        deprecated: m.deprecated.len(),
    }
}

/// Reads the supported OWL axioms out of `g`. Anything the model cannot
/// represent is reported as a warning rather than an error.
pub fn extract_model(g: &Graph) -> (OntologyModel, Vec<Warning>) {
    let mut m = OntologyModel {
        prefixes: g.prefixes().clone(),
        ..OntologyModel::default()
    };
    let mut warnings = Vec::new();
    let mut declared = BTreeSet::new();
    let mut labels: BTreeMap<Iri, BTreeSet<String>> = BTreeMap::new();
    let mut definitions: BTreeMap<Iri, BTreeSet<String>> = BTreeMap::new();
    let mut synonyms: BTreeMap<Iri, BTreeSet<String>> = BTreeMap::new();
    let mut deprecated = BTreeSet::new();

    for t in g.iter() {
        let p = t.predicate.as_str();
        let subject = t.subject.as_iri();
        match p {
            vocab::RDF_TYPE => {
                if let (Some(s), Some(o)) = (subject, t.object.as_iri()) {
                    if o.as_str() == vocab::OWL_CLASS {
                        declared.insert(s.clone());
                    }
                }
            }
            vocab::RDFS_SUBCLASS_OF => {
                let Some(s) = subject else {
                    warnings.push(Warning::new(
                        "anonymous-subclass-skipped",
                        "subclass axiom with an anonymous subclass skipped",
                    ));
                    continue;
                };
                match &t.object {
                    Term::Iri(o) if o == s => warnings.push(Warning::new(
                        "self-subclass-dropped",
                        format!("<{s}> rdfs:subClassOf itself dropped"),
                    )),
                    Term::Iri(o) => {
                        m.subclass_edges.insert((s.clone(), o.clone()));
                    }
                    Term::Blank(b) => match read_restriction(g, *b) {
                        Ok((property, filler)) => {
                            m.restrictions.insert(Restriction {
                                subject: s.clone(),
                                property,
                                filler,
                            });
                        }
                        Err(reason) => warnings.push(Warning::new(
                            "superclass-expression-skipped",
                            format!("<{s}> rdfs:subClassOf {reason}"),
                        )),
                    },
                    Term::Literal(_) => warnings.push(Warning::new(
                        "literal-superclass-skipped",
                        format!("<{s}> rdfs:subClassOf a literal"),
                    )),
                }
            }
            vocab::OWL_EQUIVALENT_CLASS => match (subject, t.object.as_iri()) {
                (Some(a), Some(b)) => match EquivalencePair::new(a.clone(), b.clone()) {
                    Some(pair) => {
                        m.equivalence_pairs.insert(pair);
                    }
                    None => warnings.push(Warning::new(
                        "self-equivalence-dropped",
                        format!("<{a}> owl:equivalentClass itself dropped"),
                    )),
                },
                _ => warnings.push(Warning::new(
                    "complex-equivalence-skipped",
                    format!(
                        "complex equivalence skipped for {}",
                        subject.map_or_else(|| "an anonymous class".to_string(), |s| format!("<{s}>"))
                    ),
                )),
            },
            vocab::RDFS_LABEL | vocab::IAO_DEFINITION | vocab::HAS_EXACT_SYNONYM => {
                let (Some(s), Some(lit)) = (subject, t.object.as_literal()) else {
                    continue;
                };
                let text = lit.lexical().trim();
                if text.is_empty() {
                    warnings.push(Warning::new("empty-annotation", format!("empty {p} on <{s}> ignored")));
                    continue;
                }
                let target = match p {
                    vocab::RDFS_LABEL => &mut labels,
                    vocab::IAO_DEFINITION => &mut definitions,
                    _ => &mut synonyms,
                };
                target.entry(s.clone()).or_default().insert(text.to_string());
            }
            vocab::OWL_DEPRECATED => {
                if let (Some(s), Some(lit)) = (subject, t.object.as_literal()) {
                    let boolean = lit.datatype().is_none_or(|d| d.as_str() == vocab::XSD_BOOLEAN);
                    if boolean && matches!(lit.lexical(), "true" | "1") {
                        deprecated.insert(s.clone());
                    }
                }
            }
            _ => {}
        }
    }

    m.classes = declared.clone();
    let mentioned: BTreeSet<Iri> = m
        .axioms()
        .flat_map(|a| a.classes().into_iter().cloned().collect::<Vec<_>>())
        .collect();
    for c in mentioned {
        if !declared.contains(&c) {
            warnings.push(Warning::new(
                "implicit-class",
                format!("<{c}> used as a class without owl:Class declaration"),
            ));
            m.classes.insert(c);
        }
    }

    let annotated: BTreeSet<&Iri> = labels.keys().chain(definitions.keys()).chain(synonyms.keys()).collect();
    for s in annotated {
        let record = AnnotationRecord {
            label: labels.get(s).and_then(|l| l.iter().next().cloned()),
            definition: definitions.get(s).and_then(|d| d.iter().next().cloned()),
            synonyms: synonyms.get(s).map(|v| v.iter().cloned().collect()).unwrap_or_default(),
        };
        m.annotations.insert(s.clone(), record);
    }
    m.deprecated = deprecated.intersection(&m.classes).cloned().collect();

    warnings.sort();
    (m, warnings)
}

/// Reads `[ a owl:Restriction ; owl:onProperty p ; owl:someValuesFrom F ]`.
pub(crate) fn read_restriction(g: &Graph, b: BlankId) -> Result<(Iri, Iri), String> {
    let node = Subject::Blank(b);
    let is_restriction = g
        .objects(&node, vocab::RDF_TYPE)
        .any(|o| o.as_iri().is_some_and(|i| i.as_str() == vocab::OWL_RESTRICTION));
    if !is_restriction {
        return Err("a class expression that is not a restriction".into());
    }
    let props: Vec<&Term> = g.objects(&node, vocab::OWL_ON_PROPERTY).collect();
    let fillers: Vec<&Term> = g.objects(&node, vocab::OWL_SOME_VALUES_FROM).collect();
    match (props.as_slice(), fillers.as_slice()) {
        ([Term::Iri(p)], [Term::Iri(f)]) => Ok((p.clone(), f.clone())),
        ([_], []) => Err("a restriction other than someValuesFrom".into()),
        _ => Err("a restriction with anonymous or multiple parts".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{iri, parse_turtle};

    pub(crate) const F1: &str = include_str!("../../../fixtures/toy.ttl");

    fn ex(local: &str) -> Iri {
        iri(&format!("http://example.org/{local}"))
    }

    #[test]
    fn f1_extraction() {
        let (m, warnings) = extract_model(&parse_turtle(F1).unwrap());
        assert!(warnings.is_empty(), "{warnings:?}");
        assert_eq!(m.classes, [ex("A"), ex("B"), ex("C"), ex("A2")].into_iter().collect());
        assert_eq!(
            m.subclass_edges,
            [(ex("A"), ex("B")), (ex("B"), ex("C"))].into_iter().collect()
        );
        assert_eq!(
            m.equivalence_pairs,
            [EquivalencePair::new(ex("A"), ex("A2")).unwrap()].into_iter().collect()
        );
        assert_eq!(m.label(&ex("A")), Some("alpha"));
        let stats = model_stats(&m);
        assert_eq!((stats.classes, stats.subclass, stats.equiv, stats.restrictions), (4, 2, 1, 0));
    }

    #[test]
    fn empty_graph() {
        let (m, warnings) = extract_model(&Graph::new());
        assert_eq!(m, OntologyModel::default());
        assert!(warnings.is_empty());
        let s = model_stats(&m);
        assert_eq!(s.classes + s.subclass + s.equiv + s.restrictions + s.annotated + s.deprecated, 0);
    }

    #[test]
    fn complex_equivalence_warns() {
        let g = parse_turtle(
            "@prefix ex: <http://example.org/> . @prefix owl: <http://www.w3.org/2002/07/owl#> .
             ex:Q a owl:Class ; owl:equivalentClass [ a owl:Restriction ; owl:onProperty ex:p ; owl:someValuesFrom ex:R ] .",
        )
        .unwrap();
        let (m, warnings) = extract_model(&g);
        assert!(m.equivalence_pairs.is_empty());
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, "complex-equivalence-skipped");
        assert!(warnings[0].message.contains("complex equivalence skipped"));
    }

    #[test]
    fn restrictions_self_edges_and_deprecation() {
        let g = parse_turtle(
            r#"@prefix ex: <http://example.org/> .
               @prefix owl: <http://www.w3.org/2002/07/owl#> .
               @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
               @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
               ex:Q a owl:Class ;
                 rdfs:subClassOf ex:Q, [ a owl:Restriction ; owl:onProperty ex:has_role ; owl:someValuesFrom ex:R ],
                   [ a owl:Restriction ; owl:onProperty ex:p ; owl:allValuesFrom ex:S ] .
               ex:Old a owl:Class ; owl:deprecated "true"^^xsd:boolean .
               ex:Prop owl:deprecated true ."#,
        )
        .unwrap();
        let (m, warnings) = extract_model(&g);
        assert!(m.subclass_edges.is_empty());
        assert_eq!(m.restrictions.len(), 1);
        assert!(m.classes.contains(&ex("R")));
        assert_eq!(m.deprecated, [ex("Old")].into_iter().collect());
        let codes: Vec<_> = warnings.iter().map(|w| w.code).collect();
        assert!(codes.contains(&"self-subclass-dropped"));
        assert!(codes.contains(&"superclass-expression-skipped"));
        assert!(codes.contains(&"implicit-class"));
    }

    #[test]
    fn equivalences_collapse_regardless_of_direction() {
        let g = parse_turtle(
            "@prefix ex: <http://example.org/> . @prefix owl: <http://www.w3.org/2002/07/owl#> .
             ex:A owl:equivalentClass ex:B . ex:B owl:equivalentClass ex:A .",
        )
        .unwrap();
        assert_eq!(extract_model(&g).0.equivalence_pairs.len(), 1);
    }
}
