use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::owl::OntologyModel;
use crate::rdf::{iri, vocab, Iri};
use crate::sssom::{MappingRecord, MappingSet};
use crate::unionfind::UnionFind;

use super::{find_cycle_in, mint_all, ConceptRecord, ConceptStatus, MintConfig, SkosError, SkosTaxonomy};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConversionReport {
    pub classes: usize,
    pub concepts: usize,
    pub broader_edges: usize,
    pub mappings: usize,
    /// Equivalence groups with more than one member, canonical source first.
    pub merged_groups: Vec<Vec<Iri>>,
    pub excluded_deprecated: Vec<Iri>,
    /// Minted concepts whose prefLabel fell back to the source local name.
    pub label_fallbacks: Vec<Iri>,
    /// Subclass edges dropped because an endpoint was deprecated.
    pub dropped_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub taxonomy: SkosTaxonomy,
    pub mappings: MappingSet,
    pub report: ConversionReport,
}

/// Converts classes to concepts and subclass edges to broader edges.
/// Named equivalence groups collapse into one concept mapped to every member.
pub fn convert(m: &OntologyModel, cfg: &MintConfig) -> Result<Conversion, SkosError> {
    let retained: Vec<&Iri> = m.classes.iter().filter(|c| !m.deprecated.contains(*c)).collect();
    let index: BTreeMap<&Iri, usize> = retained.iter().enumerate().map(|(i, c)| (*c, i)).collect();

    let mut uf = UnionFind::new(retained.len());
    for pair in &m.equivalence_pairs {
        if let (Some(&a), Some(&b)) = (index.get(pair.first()), index.get(pair.second())) {
            uf.union(a, b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<&Iri>> = BTreeMap::new();
    for (i, c) in retained.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(c);
    }
    // members are pushed in sorted order, so the first is the canonical source
    let groups: Vec<Vec<&Iri>> = groups.into_values().collect();
    let minted = mint_all(groups.iter().map(|g| g[0]), cfg);
    let mut minted_of: BTreeMap<&Iri, &Iri> = BTreeMap::new();
    for g in &groups {
        let target = &minted[g[0]];
        for member in g {
            minted_of.insert(member, target);
        }
    }

    let mut report = ConversionReport {
        classes: m.classes.len(),
        excluded_deprecated: m.deprecated.iter().filter(|d| m.classes.contains(*d)).cloned().collect(),
        ..ConversionReport::default()
    };

    let mut concepts: BTreeMap<Iri, ConceptRecord> = BTreeMap::new();
    for g in &groups {
        let canonical = g[0];
        let id = minted[canonical].clone();
        let label = m
            .label(canonical)
            .or_else(|| g.iter().find_map(|member| m.label(member)));
        let pref_label = match label {
            Some(l) => l.to_string(),
            None => {
                report.label_fallbacks.push(id.clone());
                canonical.local_name().to_string()
            }
        };
        let definition = std::iter::once(canonical)
            .chain(g.iter().copied())
            .find_map(|member| m.annotations.get(member).and_then(|a| a.definition.clone()));
        let mut alt: BTreeSet<String> = BTreeSet::new();
        for member in g {
            if let Some(a) = m.annotations.get(*member) {
                alt.extend(a.synonyms.iter().cloned());
                alt.extend(a.label.iter().cloned());
            }
        }
        alt.remove(&pref_label);
        if g.len() > 1 {
            report.merged_groups.push(g.iter().map(|i| (*i).clone()).collect());
        }
        concepts.insert(
            id,
            ConceptRecord {
                pref_label,
                definition,
                alt_labels: alt.into_iter().collect(),
                broader: BTreeSet::new(),
                status: ConceptStatus::Published,
                sources: g.iter().map(|i| (*i).clone()).collect(),
            },
        );
    }

    for (sub, sup) in &m.subclass_edges {
        let (Some(a), Some(b)) = (minted_of.get(sub), minted_of.get(sup)) else {
            report.dropped_edges += 1;
            continue;
        };
        if a != b {
            concepts.get_mut(*a).expect("minted concept").broader.insert((*b).clone());
        }
    }

    let edges: BTreeMap<&Iri, Vec<&Iri>> = concepts.iter().map(|(i, c)| (i, c.broader.iter().collect())).collect();
    if let Some(cycle) = find_cycle_in(&edges) {
        let canonical_of: BTreeMap<&Iri, &Iri> = groups.iter().map(|g| (&minted[g[0]], g[0])).collect();
        let mut cycle: Vec<Iri> = cycle.iter().map(|c| canonical_of[c].clone()).collect();
        // restate the cycle from its smallest source IRI
        cycle.pop();
        let min_pos = cycle.iter().enumerate().min_by_key(|(_, i)| *i).map_or(0, |(p, _)| p);
        cycle.rotate_left(min_pos);
        cycle.push(cycle[0].clone());
        return Err(SkosError::Cycle { cycle });
    }

    let mut mappings = build_mappings(m, cfg, &concepts);
    mappings.sort_records();

    report.concepts = concepts.len();
    report.broader_edges = concepts.values().map(|c| c.broader.len()).sum();
    report.mappings = mappings.len();

    let taxonomy = SkosTaxonomy {
        concepts,
        scheme_iri: cfg.scheme_iri.clone(),
        version: cfg.version.clone(),
        prefixes: cfg.prefix_map(),
    };
    Ok(Conversion {
        taxonomy,
        mappings,
        report,
    })
}

fn build_mappings(m: &OntologyModel, cfg: &MintConfig, concepts: &BTreeMap<Iri, ConceptRecord>) -> MappingSet {
    let mut curie_map = m.prefixes.clone();
    // the minted namespace takes precedence over a clashing source prefix
    curie_map.remove(&cfg.prefix);
    curie_map
        .insert(&cfg.prefix, cfg.namespace.clone())
        .expect("validated prefix");
    let _ = curie_map.insert("skos", iri(vocab::SKOS));
    if cfg.mapping_justification.starts_with("semapv:") {
        let _ = curie_map.insert("semapv", iri(vocab::SEMAPV));
    }
    let mut set = MappingSet::new(cfg.mapping_set_id.clone(), cfg.license.clone(), curie_map);
    let exact = iri(vocab::SKOS_EXACT_MATCH);
    let predicate_id = set.curie_for(&exact);
    for (id, c) in concepts {
        let subject_id = set.curie_for(id);
        for source in &c.sources {
            let object_id = set.curie_for(source);
            set.push(MappingRecord {
                subject_id: subject_id.clone(),
                subject_label: Some(c.pref_label.clone()),
                predicate_id: predicate_id.clone(),
                object_id,
                object_label: m.label(source).map(str::to_string),
                mapping_justification: cfg.mapping_justification.clone(),
            })
            .expect("sources are distinct and CURIEs resolve");
        }
    }
    prune_unused_prefixes(&mut set);
    set
}

fn prune_unused_prefixes(set: &mut MappingSet) {
    let used: BTreeSet<String> = set
        .records()
        .iter()
        .flat_map(|r| [&r.subject_id, &r.predicate_id, &r.object_id, &r.mapping_justification])
        .filter_map(|c| c.split_once(':').map(|(p, _)| p.to_string()))
        .collect();
    let unused: Vec<String> = set
        .curie_map
        .iter()
        .map(|(p, _)| p.to_string())
        .filter(|p| !used.contains(p))
        .collect();
    for p in unused {
        set.curie_map.remove(&p);
    }
}
