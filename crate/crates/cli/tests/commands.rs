use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use obdm_core::rdf::Iri;
use obdm_core::skos::ConceptStatus;
use obdm_core::store::load_store;
use serde_json::Value;

const NS: &str = "https://nn.example/tax/";

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn obdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obdm"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("OBDM_ADMIN_TOKEN")
        .output()
        .expect("run obdm")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Converts `source` into `dir/store` and returns the store path.
fn convert_store(dir: &Path, source: &Path) -> PathBuf {
    let store = dir.join("store");
    fs::create_dir_all(&store).unwrap();
    let o = obdm(&[
        "convert",
        "--input",
        p(source),
        "--namespace",
        NS,
        "--out-taxonomy",
        p(&store.join("taxonomy.ttl")),
        "--out-sssom",
        p(&store.join("mappings.sssom.tsv")),
        "--report",
        p(&dir.join("convert.json")),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    store
}

fn convert_fresh(dir: &Path, source: &Path, stem: &str) -> (PathBuf, PathBuf) {
    let ttl = dir.join(format!("{stem}.ttl"));
    let tsv = dir.join(format!("{stem}.sssom.tsv"));
    let o = obdm(&[
        "convert",
        "--input",
        p(source),
        "--namespace",
        NS,
        "--out-taxonomy",
        p(&ttl),
        "--out-sssom",
        p(&tsv),
    ]);
    assert_eq!(code(&o), 0);
    (ttl, tsv)
}

fn status(store: &Path, concept: &str) -> Option<ConceptStatus> {
    let s = load_store(store).unwrap();
    s.taxonomy.concepts.get(&Iri::new(concept).unwrap()).map(|c| c.status)
}

fn add(store: &Path, parent: &str, label: &str) -> String {
    let o = obdm(&["enrich", "add", "--store", p(store), "--parent", parent, "--label", label]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    stdout_json(&o)["concept"].as_str().unwrap().to_string()
}

#[test]
fn convert_writes_both_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let store = convert_store(dir.path(), &fixture("toy.ttl"));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("convert.json")).unwrap()).unwrap();
    assert_eq!(report["concepts"], 3);
    assert_eq!(report["broader_edges"], 2);
    assert_eq!(report["mappings"], 4);
    assert!(fs::read_to_string(store.join("taxonomy.ttl")).unwrap().contains("skos:prefLabel \"alpha\""));
    assert_eq!(fs::read_to_string(store.join("mappings.sssom.tsv")).unwrap().lines().filter(|l| l.starts_with("tax:")).count(), 4);
}

#[test]
fn convert_cycle_and_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let cycle = fixture("cycle.ttl");
    let o = obdm(&[
        "convert", "--input", p(&cycle), "--namespace", NS, "--out-taxonomy", &out("t.ttl"), "--out-sssom", &out("m.tsv"),
    ]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("http://example.org/P") && err.contains("http://example.org/Q"), "{err}");
    assert!(!dir.path().join("t.ttl").exists());

    let o = obdm(&[
        "convert", "--input", &out("absent.ttl"), "--namespace", NS, "--out-taxonomy", &out("t.ttl"), "--out-sssom", &out("m.tsv"),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn enrich_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let store = convert_store(dir.path(), &fixture("toy.ttl"));
    let e = add(&store, "tax:B", "beta two");
    assert!(e.starts_with("https://nn.example/tax-enrichment/"));
    let journal = fs::read_to_string(store.join("enrichments.jsonl")).unwrap();
    assert_eq!(journal.lines().count(), 1);
    assert!(journal.contains("\"timestamp\":1700000000"));

    let o = obdm(&["enrich", "approve", "--store", p(&store), "--concept", &format!("<{e}>")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["status"], "approved");
    assert_eq!(status(&store, &e), Some(ConceptStatus::Approved));

    // approving twice fails; rejecting an approved concept fails
    assert_eq!(code(&obdm(&["enrich", "approve", "--store", p(&store), "--concept", &e])), 1);
    assert_eq!(code(&obdm(&["enrich", "reject", "--store", p(&store), "--concept", &e])), 1);

    let f = add(&store, "tax:A", "alpha prime");
    let o = obdm(&["enrich", "reject", "--store", p(&store), "--concept", &f]);
    assert_eq!(code(&o), 0);
    assert_eq!(status(&store, &f), None);
    assert!(!store.join("store.lock").exists());
}

#[test]
fn enrich_respects_lock_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let store = convert_store(dir.path(), &fixture("toy.ttl"));
    fs::write(store.join("store.lock"), "").unwrap();
    assert_eq!(code(&obdm(&["enrich", "add", "--store", p(&store), "--parent", "tax:B", "--label", "x"])), 1);
    fs::remove_file(store.join("store.lock")).unwrap();
    assert_eq!(code(&obdm(&["enrich", "add", "--store", p(&store), "--parent", "tax:Nope", "--label", "x"])), 1);
    assert_eq!(code(&obdm(&["enrich", "add", "--store", p(&store), "--parent", "tax:B", "--label", "  "])), 1);
    assert!(!store.join("enrichments.jsonl").exists() || fs::read_to_string(store.join("enrichments.jsonl")).unwrap().is_empty());
}

#[test]
fn rebase_strict_and_permissive() {
    let dir = tempfile::tempdir().unwrap();
    let store = convert_store(dir.path(), &fixture("toy.ttl"));
    let under_b = add(&store, "tax:B", "beta two");
    let under_a = add(&store, "tax:A", "alpha prime");
    let (ttl, tsv) = convert_fresh(dir.path(), &fixture("toy_v2_no_b.ttl"), "v2");
    let before = fs::read(store.join("taxonomy.ttl")).unwrap();

    let report = dir.path().join("rebase.json");
    let o = obdm(&["rebase", "--store", p(&store), "--fresh", p(&ttl), p(&tsv), "--strict", "--report", p(&report)]);
    assert_eq!(code(&o), 2);
    assert_eq!(fs::read(store.join("taxonomy.ttl")).unwrap(), before);
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["orphaned"], serde_json::json!([[under_b, format!("{NS}B")]]));
    assert_eq!(r["carried"], serde_json::json!([under_a]));

    let o = obdm(&["rebase", "--store", p(&store), "--fresh", p(&ttl), p(&tsv)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["orphaned"].as_array().unwrap().len(), 1);
    assert_eq!(status(&store, &under_a), Some(ConceptStatus::Proposed));
    assert_eq!(status(&store, &under_b), None);
    assert_eq!(status(&store, &format!("{NS}B")), None);
}

#[test]
fn extract_follows_fixpoint() {
    let dir = tempfile::tempdir().unwrap();
    let terms = dir.path().join("sig.terms");
    fs::write(&terms, "# seed\nex:A\n").unwrap();
    let out = dir.path().join("module.ttl");
    let o = obdm(&["extract", "--input", p(&fixture("toy.ttl")), "--terms", p(&terms), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["module_axioms"], 3);
    let module = fs::read_to_string(&out).unwrap();
    assert!(module.contains("rdfs:subClassOf ex:C") && module.contains("owl:equivalentClass"));

    fs::write(&terms, "zz:Q\n").unwrap();
    assert_eq!(code(&obdm(&["extract", "--input", p(&fixture("toy.ttl")), "--terms", p(&terms), "--out", p(&out)])), 1);
}

#[test]
fn build_appo_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let appo = dir.path().join("appo.ttl");
    let report = dir.path().join("report.json");
    let o = obdm(&["build-appo", "--config", p(&fixture("appo/appo.yaml")), "--out", p(&appo), "--report", p(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["unanchored_roots"], serde_json::json!([]));

    let o = obdm(&["query", "--graph", p(&appo), "--pattern", p(&fixture("fig1.pattern")), "--materialize"]);
    assert_eq!(code(&o), 0);
    let rows = stdout_json(&o);
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["c"], "https://nn.example/kg/CompoundY");
}

#[test]
fn query_without_materialization_is_empty() {
    let o = obdm(&["query", "--graph", p(&fixture("fig1.ttl")), "--pattern", p(&fixture("fig1.pattern"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "[]");
}

#[test]
fn materialize_toggles_inferred_triples() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.ttl");
    let full = dir.path().join("full.ttl");
    let o = obdm(&["materialize", "--input", p(&fixture("toy.ttl")), "--out", p(&base)]);
    assert_eq!(code(&o), 0);
    let o = obdm(&["materialize", "--input", p(&fixture("toy.ttl")), "--out", p(&full), "--include-inferred"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert!(r["by_rule"]["R1"].as_u64().unwrap() >= 1);
    let base = fs::read_to_string(base).unwrap();
    let full = fs::read_to_string(full).unwrap();
    assert!(full.len() > base.len());
    assert!(full.contains("rdfs:subClassOf ex:A, ex:A2, ex:B, ex:C"), "{full}");
}

#[test]
fn fetch_checks_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy.ttl");
    let url = format!("file://{}", fixture("toy.ttl").canonicalize().unwrap().display());
    let o = obdm(&["fetch", "--url", &url, "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let digest = stdout_json(&o)["sha256"].as_str().unwrap().to_string();
    assert_eq!(fs::read(&out).unwrap(), fs::read(fixture("toy.ttl")).unwrap());

    fs::remove_file(&out).unwrap();
    assert_eq!(code(&obdm(&["fetch", "--url", &url, "--out", p(&out), "--sha256", &digest.to_uppercase()])), 0);
    fs::remove_file(&out).unwrap();
    assert_eq!(code(&obdm(&["fetch", "--url", &url, "--out", p(&out), "--sha256", &"0".repeat(64)])), 2);
    assert!(!out.exists());
    // nothing listens on port 9 of the loopback interface
    assert_eq!(code(&obdm(&["fetch", "--url", "http://127.0.0.1:9/x.ttl", "--out", p(&out)])), 1);
}

#[test]
fn identical_invocations_identical_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sa = convert_store(a.path(), &fixture("toy.ttl"));
    let sb = convert_store(b.path(), &fixture("toy.ttl"));
    add(&sa, "tax:B", "beta two");
    add(&sb, "tax:B", "beta two");
    for f in ["taxonomy.ttl", "mappings.sssom.tsv", "enrichments.jsonl"] {
        assert_eq!(fs::read(sa.join(f)).unwrap(), fs::read(sb.join(f)).unwrap(), "{f}");
    }
    assert_eq!(
        fs::read(a.path().join("convert.json")).unwrap(),
        fs::read(b.path().join("convert.json")).unwrap()
    );
}
