use std::collections::{BTreeMap, BTreeSet};

use obdm_core::rdf::{CurieMap, Iri};
use obdm_core::skos::{ConceptStatus, SkosTaxonomy};
use obdm_core::store::load_store;
use serde::Serialize;

use crate::config::VocabConfig;
use crate::ServiceError;

#[derive(Debug, Serialize)]
struct VocabularySummary<'a> {
    id: &'a str,
    label: &'a str,
    term_count: usize,
}

#[derive(Debug, Serialize)]
struct TermView<'a> {
    iri: &'a Iri,
    curie: Option<String>,
    #[serde(rename = "prefLabel")]
    pref_label: &'a str,
    definition: Option<&'a str>,
}

#[derive(Debug, Serialize)]
struct ConceptView<'a> {
    iri: &'a Iri,
    #[serde(rename = "prefLabel")]
    pref_label: &'a str,
    definition: Option<&'a str>,
    broader: Vec<&'a Iri>,
    narrower: Vec<&'a Iri>,
    exact_matches: Vec<&'a Iri>,
}

/// Outcome of looking up a concept by CURIE.
pub enum ConceptLookup {
    Found(String),
    BadCurie,
    Unknown,
}

/// Immutable view of one loaded store; all bodies are rendered up front.
#[derive(Debug)]
pub struct Snapshot {
    pub version: String,
    pub etag: String,
    pub list_body: String,
    terms: BTreeMap<String, String>,
    taxonomy: SkosTaxonomy,
    curies: CurieMap,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

fn visible(status: ConceptStatus) -> bool {
    status != ConceptStatus::Proposed
}

impl Snapshot {
    pub fn load(cfg: &VocabConfig) -> Result<Self, ServiceError> {
        let store = load_store(&cfg.store)?;
        let taxonomy = store.taxonomy;

        let mut curies = taxonomy.prefixes.clone();
        for (p, ns) in store.mappings.curie_map.iter() {
            if curies.get(p).is_none() {
                let _ = curies.insert(p, ns.clone());
            }
        }
        for (p, ns) in &cfg.curie_map {
            let ns = Iri::new(ns.as_str()).map_err(|e| ServiceError::Config(e.to_string()))?;
            curies.insert(p, ns).map_err(|e| ServiceError::Config(e.to_string()))?;
        }

        let version = taxonomy.content_hash();
        let resolve = |text: &str| -> Result<Iri, ServiceError> {
            let i = curies
                .resolve(text)
                .map_err(|e| ServiceError::Config(format!("selector term {text:?}: {e}")))?;
            if taxonomy.contains(&i) {
                Ok(i)
            } else {
                Err(ServiceError::Config(format!("selector term {text:?} is not a concept")))
            }
        };

        let mut summaries = Vec::new();
        let mut terms = BTreeMap::new();
        let mut defs: Vec<_> = cfg.vocabularies.iter().collect();
        defs.sort_by(|a, b| a.id.cmp(&b.id));
        for v in defs {
            if !valid_id(&v.id) {
                return Err(ServiceError::Config(format!("vocabulary id {:?} must match [a-z0-9-]+", v.id)));
            }
            if terms.contains_key(&v.id) {
                return Err(ServiceError::Config(format!("duplicate vocabulary id {:?}", v.id)));
            }
            let selected: BTreeSet<Iri> = match (&v.selector.descendants_of, &v.selector.terms) {
                (Some(root), None) => {
                    let root = resolve(root)?;
                    let mut set = taxonomy.descendants(&root);
                    if v.selector.include_root {
                        set.insert(root);
                    }
                    set
                }
                (None, Some(list)) => list.iter().map(|t| resolve(t)).collect::<Result<_, _>>()?,
                _ => {
                    return Err(ServiceError::Config(format!(
                        "vocabulary {:?} needs exactly one of descendants_of or terms",
                        v.id
                    )))
                }
            };
            let statuses: BTreeSet<ConceptStatus> = v
                .statuses
                .clone()
                .unwrap_or_else(|| vec![ConceptStatus::Published, ConceptStatus::Approved])
                .into_iter()
                .collect();
            let mut views: Vec<TermView> = selected
                .iter()
                .filter_map(|i| taxonomy.concepts.get_key_value(i))
                .filter(|(_, c)| statuses.contains(&c.status))
                .map(|(i, c)| TermView {
                    iri: i,
                    curie: curies.compress(i),
                    pref_label: &c.pref_label,
                    definition: c.definition.as_deref(),
                })
                .collect();
            views.sort_by(|a, b| {
                a.pref_label
                    .to_lowercase()
                    .cmp(&b.pref_label.to_lowercase())
                    .then_with(|| a.iri.cmp(b.iri))
            });
            summaries.push((v.id.clone(), v.label.clone(), views.len()));
            terms.insert(v.id.clone(), serde_json::to_string(&views).expect("terms serialize"));
        }
        let list: Vec<VocabularySummary> = summaries
            .iter()
            .map(|(id, label, n)| VocabularySummary {
                id,
                label,
                term_count: *n,
            })
            .collect();
        let list_body = serde_json::to_string(&list).expect("list serializes");

        Ok(Snapshot {
            etag: format!("\"{version}\""),
            version,
            list_body,
            terms,
            taxonomy,
            curies,
        })
    }

    pub fn terms_body(&self, id: &str) -> Option<&str> {
        self.terms.get(id).map(String::as_str)
    }

    /// Proposed enrichments are not delivered.
    pub fn concept(&self, curie: &str) -> ConceptLookup {
        let Ok(iri) = self.curies.expand(curie).or_else(|_| match curie.strip_prefix('<') {
            Some(rest) if rest.ends_with('>') => Iri::new(&rest[..rest.len() - 1]),
            _ => Err(obdm_core::rdf::RdfError::InvalidCurie(curie.to_string())),
        }) else {
            return ConceptLookup::BadCurie;
        };
        let Some((iri, c)) = self.taxonomy.concepts.get_key_value(&iri) else {
            return ConceptLookup::Unknown;
        };
        if !visible(c.status) {
            return ConceptLookup::Unknown;
        }
        let view = ConceptView {
            iri,
            pref_label: &c.pref_label,
            definition: c.definition.as_deref(),
            broader: c.broader.iter().collect(),
            narrower: self
                .taxonomy
                .children(iri)
                .filter(|n| visible(self.taxonomy.concepts[*n].status))
                .collect(),
            exact_matches: c.sources.iter().collect(),
        };
        ConceptLookup::Found(serde_json::to_string(&view).expect("concept serializes"))
    }
}
