//! Enrichment lifecycle, rebase onto fresh conversions, and the on-disk store.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{parse_turtle, Iri};
use crate::skos::{mint_enrichment_iri, ConceptRecord, ConceptStatus, MintConfig, SkosError, SkosTaxonomy};
use crate::sssom::{emit_sssom, parse_sssom, MappingSet};

pub const TAXONOMY_FILE: &str = "taxonomy.ttl";
pub const MAPPINGS_FILE: &str = "mappings.sssom.tsv";
pub const EVENTS_FILE: &str = "enrichments.jsonl";
pub const LOCK_FILE: &str = "store.lock";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown parent <{0}>")]
    UnknownParent(Iri),
    #[error("parent <{0}> has no source-mapped ancestor")]
    UnrootedParent(Iri),
    #[error("<{parent}> already has a child labelled {label:?}")]
    DuplicateLabelUnderParent { parent: Iri, label: String },
    #[error("enrichment label is empty")]
    EmptyLabel,
    #[error("unknown concept <{0}>")]
    UnknownConcept(Iri),
    #[error("<{0}> is not a proposed enrichment")]
    NotProposed(Iri),
    #[error("<{0}> has narrower concepts")]
    HasChildren(Iri),
    #[error("corrupt store: {0}")]
    CorruptStore(String),
    #[error("store is locked: {0}")]
    Locked(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Taxonomy(#[from] SkosError),
}

impl StoreError {
    fn io(path: &Path, source: io::Error) -> Self {
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Add,
    Approve,
    Reject,
}

/// One line of the enrichment journal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichmentEvent {
    pub kind: EventKind,
    pub concept: Iri,
    pub parent: Option<Iri>,
    pub label: Option<String>,
    pub definition: Option<String>,
    pub timestamp: u64,
    pub actor: String,
}

/// Outcome of rebasing enrichments onto a fresh conversion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UpdateReport {
    pub carried: BTreeSet<Iri>,
    /// (enrichment, missing parent)
    pub orphaned: BTreeSet<(Iri, Iri)>,
    /// (concept, old label, new label)
    pub relabeled: BTreeSet<(Iri, String, String)>,
}

impl UpdateReport {
    pub fn orphaned_concepts(&self) -> BTreeSet<&Iri> {
        self.orphaned.iter().map(|(c, _)| c).collect()
    }
}

pub fn add_enrichment(
    t: &SkosTaxonomy,
    parent: &Iri,
    label: &str,
    definition: Option<&str>,
    cfg: &MintConfig,
) -> Result<(SkosTaxonomy, Iri), StoreError> {
    let label = label.trim();
    if label.is_empty() {
        return Err(StoreError::EmptyLabel);
    }
    if !t.contains(parent) {
        return Err(StoreError::UnknownParent(parent.clone()));
    }
    if !t.is_rooted(parent) {
        return Err(StoreError::UnrootedParent(parent.clone()));
    }
    if t.children(parent).any(|c| t.concepts[c].pref_label == label) {
        return Err(StoreError::DuplicateLabelUnderParent {
            parent: parent.clone(),
            label: label.to_string(),
        });
    }
    let id = mint_enrichment_iri(label, parent, cfg);
    if t.contains(&id) {
        return Err(StoreError::CorruptStore(format!("minted IRI <{id}> already in use")));
    }
    let mut out = t.clone();
    out.concepts.insert(id.clone(), enrichment_record(label, definition, parent));
    Ok((out, id))
}

fn enrichment_record(label: &str, definition: Option<&str>, parent: &Iri) -> ConceptRecord {
    ConceptRecord {
        pref_label: label.to_string(),
        definition: definition.map(str::to_string).filter(|d| !d.trim().is_empty()),
        alt_labels: Vec::new(),
        broader: BTreeSet::from([parent.clone()]),
        status: ConceptStatus::Proposed,
        sources: BTreeSet::new(),
    }
}

fn require_proposed(t: &SkosTaxonomy, concept: &Iri) -> Result<(), StoreError> {
    match t.get(concept) {
        None => Err(StoreError::UnknownConcept(concept.clone())),
        Some(c) if c.status != ConceptStatus::Proposed => Err(StoreError::NotProposed(concept.clone())),
        Some(_) => Ok(()),
    }
}

pub fn approve_enrichment(t: &SkosTaxonomy, concept: &Iri) -> Result<SkosTaxonomy, StoreError> {
    require_proposed(t, concept)?;
    let mut out = t.clone();
    out.concepts.get_mut(concept).expect("checked").status = ConceptStatus::Approved;
    Ok(out)
}

pub fn reject_enrichment(t: &SkosTaxonomy, concept: &Iri) -> Result<SkosTaxonomy, StoreError> {
    require_proposed(t, concept)?;
    if t.children(concept).next().is_some() {
        return Err(StoreError::HasChildren(concept.clone()));
    }
    let mut out = t.clone();
    out.concepts.remove(concept);
    Ok(out)
}

/// Carries every enrichment of `old` whose parent survives in `fresh`
/// (directly or through other carried enrichments).
pub fn rebase(old: &SkosTaxonomy, fresh: &SkosTaxonomy) -> (SkosTaxonomy, UpdateReport) {
    let mut out = fresh.published_part();
    let mut report = UpdateReport::default();
    for (id, c) in &old.concepts {
        if c.status.is_enrichment() {
            continue;
        }
        if let Some(f) = fresh.get(id) {
            if f.pref_label != c.pref_label {
                report
                    .relabeled
                    .insert((id.clone(), c.pref_label.clone(), f.pref_label.clone()));
            }
        }
    }

    let mut pending: BTreeMap<&Iri, &ConceptRecord> = old.enrichments().collect();
    loop {
        let ready: Vec<&Iri> = pending
            .iter()
            .filter(|(_, c)| c.broader.iter().all(|b| out.contains(b)))
            .map(|(i, _)| *i)
            .collect();
        if ready.is_empty() {
            break;
        }
        for id in ready {
            let c = pending.remove(id).expect("pending");
            out.concepts.insert(id.clone(), c.clone());
            report.carried.insert(id.clone());
        }
    }
    for (id, c) in pending {
        for b in c.broader.iter().filter(|b| !out.contains(b)) {
            report.orphaned.insert((id.clone(), b.clone()));
        }
    }
    (out, report)
}

/// Applies journal events in order over a published taxonomy.
pub fn replay(published: &SkosTaxonomy, events: &[EnrichmentEvent]) -> Result<SkosTaxonomy, StoreError> {
    let mut t = published.clone();
    for (n, e) in events.iter().enumerate() {
        apply_event(&mut t, e).map_err(|msg| StoreError::CorruptStore(format!("event {}: {msg}", n + 1)))?;
    }
    Ok(t)
}

fn apply_event(t: &mut SkosTaxonomy, e: &EnrichmentEvent) -> Result<(), String> {
    match e.kind {
        EventKind::Add => {
            let parent = e.parent.as_ref().ok_or("add without parent")?;
            let label = e.label.as_deref().filter(|l| !l.trim().is_empty()).ok_or("add without label")?;
            if !t.contains(parent) {
                return Err(format!("unknown parent <{parent}>"));
            }
            if t.contains(&e.concept) {
                return Err(format!("<{}> added twice", e.concept));
            }
            t.concepts
                .insert(e.concept.clone(), enrichment_record(label, e.definition.as_deref(), parent));
        }
        EventKind::Approve | EventKind::Reject => {
            let c = t.concepts.get_mut(&e.concept).ok_or_else(|| format!("unknown concept <{}>", e.concept))?;
            if c.status != ConceptStatus::Proposed {
                return Err(format!("<{}> is not proposed", e.concept));
            }
            if e.kind == EventKind::Approve {
                c.status = ConceptStatus::Approved;
            } else {
                t.concepts.remove(&e.concept);
            }
        }
    }
    Ok(())
}

/// Published taxonomy, its mappings, and the enrichment journal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Store {
    pub taxonomy: SkosTaxonomy,
    pub mappings: MappingSet,
    pub events: Vec<EnrichmentEvent>,
}

impl Store {
    pub fn new(taxonomy: SkosTaxonomy, mappings: MappingSet) -> Self {
        Self {
            taxonomy,
            mappings,
            events: Vec::new(),
        }
    }

    /// Enrichment namespace defaults to `<scheme>-enrichment/`.
    pub fn mint_config(&self, enrichment_namespace: Option<Iri>) -> Result<MintConfig, StoreError> {
        let scheme = self.taxonomy.scheme_iri.as_str();
        let namespace = self
            .taxonomy
            .prefixes
            .iter()
            .map(|(_, ns)| ns)
            .find(|ns| ns.as_str().len() == scheme.len() + 1 && ns.as_str().starts_with(scheme))
            .cloned()
            .map_or_else(|| Iri::new(format!("{scheme}/")), Ok)
            .map_err(|e| StoreError::CorruptStore(e.to_string()))?;
        let cfg = match enrichment_namespace {
            Some(e) => MintConfig::new(namespace, e)?,
            None => MintConfig::with_default_enrichment(namespace)?,
        };
        Ok(cfg)
    }

    pub fn add(
        &mut self,
        parent: &Iri,
        label: &str,
        definition: Option<&str>,
        cfg: &MintConfig,
        actor: &str,
        timestamp: u64,
    ) -> Result<Iri, StoreError> {
        let (t, id) = add_enrichment(&self.taxonomy, parent, label, definition, cfg)?;
        self.taxonomy = t;
        let record = &self.taxonomy.concepts[&id];
        self.events.push(EnrichmentEvent {
            kind: EventKind::Add,
            concept: id.clone(),
            parent: Some(parent.clone()),
            label: Some(record.pref_label.clone()),
            definition: record.definition.clone(),
            timestamp,
            actor: actor.to_string(),
        });
        Ok(id)
    }

    pub fn approve(&mut self, concept: &Iri, actor: &str, timestamp: u64) -> Result<(), StoreError> {
        self.taxonomy = approve_enrichment(&self.taxonomy, concept)?;
        self.push_review(EventKind::Approve, concept, actor, timestamp);
        Ok(())
    }

    pub fn reject(&mut self, concept: &Iri, actor: &str, timestamp: u64) -> Result<(), StoreError> {
        self.taxonomy = reject_enrichment(&self.taxonomy, concept)?;
        self.push_review(EventKind::Reject, concept, actor, timestamp);
        Ok(())
    }

    fn push_review(&mut self, kind: EventKind, concept: &Iri, actor: &str, timestamp: u64) {
        self.events.push(EnrichmentEvent {
            kind,
            concept: concept.clone(),
            parent: None,
            label: None,
            definition: None,
            timestamp,
            actor: actor.to_string(),
        });
    }

    /// Rebases onto a fresh conversion. The journal keeps exactly the events
    /// that still replay, so orphaned enrichments drop out of it.
    pub fn rebase(&self, fresh: &SkosTaxonomy, fresh_mappings: MappingSet) -> (Store, UpdateReport) {
        let (taxonomy, report) = rebase(&self.taxonomy, fresh);
        let mut sim = fresh.published_part();
        let mut events = Vec::new();
        for e in &self.events {
            let mut next = sim.clone();
            if apply_event(&mut next, e).is_ok() {
                sim = next;
                events.push(e.clone());
            }
        }
        debug_assert_eq!(sim, taxonomy);
        (
            Store {
                taxonomy,
                mappings: fresh_mappings,
                events,
            },
            report,
        )
    }
}

/// Advisory single-writer lock; removed on drop.
#[derive(Debug)]
pub struct StoreLock {
    dir: PathBuf,
    path: PathBuf,
}

impl StoreLock {
    pub fn acquire(dir: &Path) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self {
                    dir: dir.to_path_buf(),
                    path,
                })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(StoreError::Locked(path)),
            Err(e) => Err(StoreError::io(&path, e)),
        }
    }

    pub fn save(&self, store: &Store) -> Result<(), StoreError> {
        write_atomic(&self.dir.join(TAXONOMY_FILE), &store.taxonomy.to_turtle())?;
        write_atomic(&self.dir.join(MAPPINGS_FILE), &emit_sssom(&store.mappings))?;
        write_atomic(&self.dir.join(EVENTS_FILE), &events_to_jsonl(&store.events))?;
        Ok(())
    }
}

impl Drop for StoreLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).map_err(|e| StoreError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))
}

pub fn events_to_jsonl(events: &[EnrichmentEvent]) -> String {
    events
        .iter()
        .map(|e| serde_json::to_string(e).expect("events serialize") + "\n")
        .collect()
}

pub fn events_from_jsonl(text: &str) -> Result<Vec<EnrichmentEvent>, StoreError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| StoreError::CorruptStore(format!("{EVENTS_FILE} line {}: {e}", n + 1)))
        })
        .collect()
}

/// Writes the store under the directory's lock.
pub fn save_store(store: &Store, dir: &Path) -> Result<(), StoreError> {
    StoreLock::acquire(dir)?.save(store)
}

pub fn load_store(dir: &Path) -> Result<Store, StoreError> {
    let read = |name: &str| -> Result<String, StoreError> {
        let p = dir.join(name);
        fs::read_to_string(&p).map_err(|e| StoreError::io(&p, e))
    };
    let ttl = read(TAXONOMY_FILE)?;
    let tsv = read(MAPPINGS_FILE)?;
    let events_path = dir.join(EVENTS_FILE);
    let jsonl = match fs::read_to_string(&events_path) {
        Ok(s) => s,
        Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(StoreError::io(&events_path, e)),
    };
    let graph = parse_turtle(&ttl).map_err(|e| StoreError::CorruptStore(format!("{TAXONOMY_FILE}: {e}")))?;
    let (mappings, _) = parse_sssom(&tsv).map_err(|e| StoreError::CorruptStore(format!("{MAPPINGS_FILE}: {e}")))?;
    let published = SkosTaxonomy::from_graph(&graph, &mappings)
        .map_err(|e| StoreError::CorruptStore(format!("{TAXONOMY_FILE}: {e}")))?;
    let events = events_from_jsonl(&jsonl)?;
    let taxonomy = replay(&published, &events)?;
    Ok(Store {
        taxonomy,
        mappings,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::owl::extract_model;
    use crate::rdf::iri;
    use crate::skos::convert;

    const F1: &str = include_str!("../../../fixtures/toy.ttl");

    fn cfg() -> MintConfig {
        MintConfig::with_default_enrichment(iri("https://nn.example/tax/")).unwrap()
    }

    fn f1_store() -> Store {
        let (m, _) = extract_model(&parse_turtle(F1).unwrap());
        let c = convert(&m, &cfg()).unwrap();
        Store::new(c.taxonomy, c.mappings)
    }

    fn tax(l: &str) -> Iri {
        iri(&format!("https://nn.example/tax/{l}"))
    }

    #[test]
    fn add_under_b() {
        let s = f1_store();
        let (t, id) = add_enrichment(&s.taxonomy, &tax("B"), "alpha-variant", None, &cfg()).unwrap();
        let c = &t.concepts[&id];
        assert_eq!(c.status, ConceptStatus::Proposed);
        assert_eq!(c.broader, BTreeSet::from([tax("B")]));
        assert!(id.as_str().starts_with("https://nn.example/tax-enrichment/alpha-variant-"));
        assert!(!s.taxonomy.contains(&id));
        t.validate().unwrap();
    }

    #[test]
    fn add_errors() {
        let s = f1_store();
        assert!(matches!(
            add_enrichment(&s.taxonomy, &tax("Z"), "x", None, &cfg()),
            Err(StoreError::UnknownParent(_))
        ));
        assert!(matches!(
            add_enrichment(&s.taxonomy, &tax("B"), "  ", None, &cfg()),
            Err(StoreError::EmptyLabel)
        ));
        let (t, _) = add_enrichment(&s.taxonomy, &tax("B"), "v", None, &cfg()).unwrap();
        assert!(matches!(
            add_enrichment(&t, &tax("B"), "v", None, &cfg()),
            Err(StoreError::DuplicateLabelUnderParent { .. })
        ));
        // a published child label also counts
        assert!(matches!(
            add_enrichment(&t, &tax("B"), "alpha", None, &cfg()),
            Err(StoreError::DuplicateLabelUnderParent { .. })
        ));
    }

    #[test]
    fn unrooted_parent() {
        let mut t = f1_store().taxonomy;
        let orphan = iri("https://nn.example/tax-enrichment/x");
        t.concepts.insert(orphan.clone(), enrichment_record("x", None, &tax("C")));
        t.concepts.get_mut(&orphan).unwrap().broader.clear();
        assert!(matches!(
            add_enrichment(&t, &orphan, "y", None, &cfg()),
            Err(StoreError::UnrootedParent(_))
        ));
    }

    #[test]
    fn review_lifecycle() {
        let s = f1_store();
        let (t, id) = add_enrichment(&s.taxonomy, &tax("B"), "v", None, &cfg()).unwrap();
        let approved = approve_enrichment(&t, &id).unwrap();
        assert_eq!(approved.concepts[&id].status, ConceptStatus::Approved);
        assert!(matches!(approve_enrichment(&approved, &id), Err(StoreError::NotProposed(_))));
        assert!(matches!(approve_enrichment(&t, &tax("A")), Err(StoreError::NotProposed(_))));

        let (t2, child) = add_enrichment(&t, &id, "w", None, &cfg()).unwrap();
        assert!(matches!(reject_enrichment(&t2, &id), Err(StoreError::HasChildren(_))));
        let t3 = reject_enrichment(&t2, &child).unwrap();
        assert_eq!(t3, t);
    }

    #[test]
    fn identity_rebase_carries_everything() {
        let mut s = f1_store();
        let e = s.add(&tax("B"), "v", None, &cfg(), "me", 1).unwrap();
        let fresh = s.taxonomy.published_part();
        let (next, report) = s.rebase(&fresh, s.mappings.clone());
        assert_eq!(report.carried, BTreeSet::from([e]));
        assert!(report.orphaned.is_empty() && report.relabeled.is_empty());
        assert_eq!(next.taxonomy, s.taxonomy);
        assert_eq!(next.events, s.events);
    }

    #[test]
    fn rebase_orphans_and_relabels() {
        let mut s = f1_store();
        let e = s.add(&tax("B"), "v", None, &cfg(), "me", 1).unwrap();
        let e2 = s.add(&e, "w", None, &cfg(), "me", 2).unwrap();
        let keep = s.add(&tax("C"), "u", None, &cfg(), "me", 3).unwrap();
        s.approve(&keep, "me", 4).unwrap();

        let mut fresh = s.taxonomy.published_part();
        fresh.concepts.remove(&tax("B"));
        fresh.concepts.get_mut(&tax("A")).unwrap().broader = BTreeSet::from([tax("C")]);
        fresh.concepts.get_mut(&tax("A")).unwrap().pref_label = "alfa".into();

        let (next, report) = s.rebase(&fresh, s.mappings.clone());
        assert_eq!(report.carried, BTreeSet::from([keep.clone()]));
        assert_eq!(report.orphaned, BTreeSet::from([(e.clone(), tax("B")), (e2, e)]));
        assert_eq!(
            report.relabeled,
            BTreeSet::from([(tax("A"), "alpha".to_string(), "alfa".to_string())])
        );
        assert_eq!(next.taxonomy.concepts[&keep].status, ConceptStatus::Approved);
        assert_eq!(next.events.len(), 2);
        assert_eq!(replay(&fresh, &next.events).unwrap(), next.taxonomy);
    }

    #[test]
    fn jsonl_field_names_and_nulls() {
        let e = EnrichmentEvent {
            kind: EventKind::Approve,
            concept: tax("X"),
            parent: None,
            label: None,
            definition: None,
            timestamp: 7,
            actor: "a".into(),
        };
        let line = events_to_jsonl(std::slice::from_ref(&e));
        assert_eq!(
            line,
            "{\"kind\":\"approve\",\"concept\":\"https://nn.example/tax/X\",\"parent\":null,\"label\":null,\"definition\":null,\"timestamp\":7,\"actor\":\"a\"}\n"
        );
        assert_eq!(events_from_jsonl(&line).unwrap(), vec![e]);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = f1_store();
        let e = s.add(&tax("B"), "v", Some("a variant"), &cfg(), "me", 1).unwrap();
        s.add(&tax("C"), "gone", None, &cfg(), "me", 2).unwrap();
        s.approve(&e, "rev", 3).unwrap();
        let gone = s.taxonomy.children(&tax("C")).find(|c| s.taxonomy.concepts[*c].pref_label == "gone").cloned().unwrap();
        s.reject(&gone, "rev", 4).unwrap();
        save_store(&s, dir.path()).unwrap();
        assert!(!dir.path().join(LOCK_FILE).exists());
        let loaded = load_store(dir.path()).unwrap();
        assert_eq!(loaded, s);
        let first = fs::read(dir.path().join(TAXONOMY_FILE)).unwrap();
        save_store(&loaded, dir.path()).unwrap();
        assert_eq!(fs::read(dir.path().join(TAXONOMY_FILE)).unwrap(), first);
    }

    #[test]
    fn load_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_store(dir.path()), Err(StoreError::Io { .. })));

        let mut s = f1_store();
        s.events.push(EnrichmentEvent {
            kind: EventKind::Add,
            concept: iri("https://nn.example/tax-enrichment/q"),
            parent: Some(tax("Missing")),
            label: Some("q".into()),
            definition: None,
            timestamp: 0,
            actor: "x".into(),
        });
        let lock = StoreLock::acquire(dir.path()).unwrap();
        lock.save(&s).unwrap();
        assert!(matches!(StoreLock::acquire(dir.path()), Err(StoreError::Locked(_))));
        drop(lock);
        assert!(matches!(load_store(dir.path()), Err(StoreError::CorruptStore(_))));
    }

    #[test]
    fn mint_config_from_store() {
        let s = f1_store();
        assert_eq!(s.mint_config(None).unwrap(), cfg());
    }
}
