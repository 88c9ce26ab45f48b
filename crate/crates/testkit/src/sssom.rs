//! Random mapping sets.

use obdm_core::rdf::{CurieMap, Iri};
use obdm_core::sssom::{MappingRecord, MappingSet};
use rand::seq::SliceRandom;
use rand::Rng;

const PREFIXES: &[(&str, &str)] = &[
    ("tax", "https://nn.example/tax/"),
    ("ex", "http://example.org/"),
    ("obo", "http://purl.obolibrary.org/obo/"),
    ("ncit", "http://purl.obolibrary.org/obo/NCIT_"),
    ("chebi", "http://purl.obolibrary.org/obo/CHEBI_"),
];
const PREDICATES: &[&str] = &["skos:exactMatch", "skos:closeMatch", "skos:broadMatch", "owl:equivalentClass"];
const JUSTIFICATIONS: &[&str] = &["semapv:UnspecifiedMatching", "semapv:ManualMappingCuration", "semapv:LexicalMatching"];
const LABELS: &[&str] = &["alpha", "Beta compound", "ω-3 fatty acid", "x # not a comment", "  padded", "a:b"];

pub fn mapping_set(rng: &mut impl Rng, max_records: usize) -> MappingSet {
    let mut curies = CurieMap::new();
    let n_prefixes = rng.gen_range(1..=PREFIXES.len());
    let chosen: Vec<&(&str, &str)> = PREFIXES.choose_multiple(rng, n_prefixes).collect();
    for (p, ns) in &chosen {
        curies.insert(p, Iri::new(*ns).unwrap()).unwrap();
    }
    let mut set = MappingSet::new(
        Iri::new(format!("https://nn.example/sets/{}", rng.gen_range(0..1000))).unwrap(),
        Iri::new("https://creativecommons.org/publicdomain/zero/1.0/").unwrap(),
        curies,
    );
    let id = |rng: &mut dyn rand::RngCore| {
        let (p, _) = chosen.choose(rng).unwrap();
        format!("{p}:{}", rng.gen_range(0..40))
    };
    let label = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.4) {
            None
        } else {
            LABELS.choose(rng).map(|s| s.to_string())
        }
    };
    let target = rng.gen_range(0..=max_records);
    let mut attempts = 0;
    while set.len() < target && attempts < 4 * max_records + 4 {
        attempts += 1;
        let record = MappingRecord {
            subject_id: id(rng),
            subject_label: label(rng),
            predicate_id: PREDICATES.choose(rng).unwrap().to_string(),
            object_id: id(rng),
            object_label: label(rng),
            mapping_justification: JUSTIFICATIONS.choose(rng).unwrap().to_string(),
        };
        // duplicates of an existing (s, p, o) are rejected by push
        let _ = set.push(record);
    }
    set
}

/// Malformed variants of an emitted set, each with a fragment the error
/// message must contain.
pub fn malformed_cases(emitted: &str) -> Vec<(String, &'static str)> {
    let lines: Vec<&str> = emitted.lines().collect();
    let header_at = lines.iter().position(|l| l.starts_with("subject_id")).expect("header row");
    let mut cases = Vec::new();

    let header = lines[header_at].replace("predicate_id", "predicate");
    let mut v = lines.clone();
    v[header_at] = &header;
    cases.push((v.join("\n") + "\n", "missing required column predicate_id"));

    let row = "zz:1\t\tskos:exactMatch\tzz:2\t\tsemapv:UnspecifiedMatching";
    cases.push((format!("{emitted}{row}\n"), "\"zz:1\""));

    cases.push((format!("{emitted}a:1\tb\n"), "row has 2 cells"));

    if let Some(first) = lines.get(header_at + 1) {
        cases.push((format!("{emitted}{first}\n"), "duplicate mapping"));
    }

    let no_id: Vec<&str> = lines.iter().copied().filter(|l| !l.starts_with("# mapping_set_id")).collect();
    cases.push((no_id.join("\n") + "\n", "missing metadata key mapping_set_id"));
    cases
}
