use std::fs;
use std::path::{Path, PathBuf};

use obdm_core::assemble::{build_application_ontology, load_appo_config};
use obdm_core::infer::{materialize, parse_pattern, Rule};
use obdm_core::rdf::{serialize_turtle, Triple};
use obdm_core::store::{load_store, save_store, MAPPINGS_FILE, TAXONOMY_FILE};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn appo_answers_the_experiment_query() {
    let cfg = load_appo_config(&fixtures().join("appo/appo.yaml")).unwrap();
    let (g, report) = build_application_ontology(&cfg).unwrap();
    assert!(report.unanchored_roots.is_empty(), "{:?}", report.warnings);
    assert_eq!(report.anchors.len(), 3);
    assert_eq!(report.bridges, 1);

    let ig = materialize(&g);
    let pattern = fs::read_to_string(fixtures().join("fig1.pattern")).unwrap();
    let p = parse_pattern(&pattern, g.prefixes()).unwrap();
    let rows = ig.match_pattern(&p);
    assert_eq!(rows.len(), 1, "{rows:?}");
    let px = g.prefixes();
    assert_eq!(rows[0]["e"], px.expand("nn:ExperimentX").unwrap());
    assert_eq!(rows[0]["c"], px.expand("nn:CompoundY").unwrap());
    assert_eq!(rows[0]["r"], px.expand("chebi:AntiObesityAgent").unwrap());

    let red = Triple::new(
        px.expand("nn:CompoundY").unwrap(),
        px.expand("ro:has_role").unwrap(),
        px.expand("chebi:AntiObesityAgent").unwrap(),
    );
    assert!(ig.explain(&red).unwrap().rules().contains(&Rule::R5));
}

#[test]
fn module_extraction_trims_unused_classes() {
    let cfg = load_appo_config(&fixtures().join("appo/appo.yaml")).unwrap();
    let (g, _) = build_application_ontology(&cfg).unwrap();
    let text = serialize_turtle(&g);
    assert!(!text.contains("Water"));
    assert!(!text.contains("Assay"));
    assert!(text.contains("CompoundClassQ"));
}

#[test]
fn appo_is_deterministic() {
    let cfg = load_appo_config(&fixtures().join("appo/appo.yaml")).unwrap();
    let a = serialize_turtle(&build_application_ontology(&cfg).unwrap().0);
    let b = serialize_turtle(&build_application_ontology(&cfg).unwrap().0);
    assert_eq!(a, b);
}

#[test]
fn fixture_store_is_canonical() {
    let src = fixtures().join("appo/store");
    let store = load_store(&src).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_store(&store, dir.path()).unwrap();
    for f in [TAXONOMY_FILE, MAPPINGS_FILE] {
        assert_eq!(
            fs::read_to_string(src.join(f)).unwrap(),
            fs::read_to_string(dir.path().join(f)).unwrap(),
            "{f}"
        );
    }
}
