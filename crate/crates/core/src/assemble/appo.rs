use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::owl::{extract_model, OntologyModel};
use crate::rdf::{iri, parse_turtle, vocab, CurieMap, Graph, Iri, Literal, Triple};
use crate::skos::{ConceptStatus, SkosTaxonomy};
use crate::sssom::parse_sssom;
use crate::store::load_store;
use crate::Warning;

use super::{bridge, extract_bot_module, parse_terms, render_model, AssembleError, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub label: String,
    pub ontology: PathBuf,
    pub signature: PathBuf,
}

/// Application-ontology recipe. Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppoConfig {
    #[serde(default)]
    pub sources: Vec<SourceConfig>,
    pub upper: PathBuf,
    /// Module root (CURIE or IRI) to upper class (CURIE or IRI).
    #[serde(default)]
    pub anchor_map: BTreeMap<String, String>,
    #[serde(default)]
    pub mappings: Vec<PathBuf>,
    #[serde(default)]
    pub internal_taxonomy: Option<PathBuf>,
}

impl AppoConfig {
    pub fn from_yaml(text: &str, base: &Path) -> Result<Self, AssembleError> {
        let mut cfg: AppoConfig = serde_yaml::from_str(text).map_err(|e| AssembleError::Config(e.to_string()))?;
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut cfg.upper);
        for s in &mut cfg.sources {
            rebase(&mut s.ontology);
            rebase(&mut s.signature);
        }
        cfg.mappings.iter_mut().for_each(rebase);
        if let Some(t) = &mut cfg.internal_taxonomy {
            rebase(t);
        }
        let mut labels = BTreeSet::new();
        for s in &cfg.sources {
            if !labels.insert(&s.label) {
                return Err(AssembleError::Config(format!("duplicate source label {:?}", s.label)));
            }
        }
        Ok(cfg)
    }
}

pub fn load_appo_config(path: &Path) -> Result<AppoConfig, AssembleError> {
    let text = read(path)?;
    AppoConfig::from_yaml(&text, path.parent().unwrap_or(Path::new(".")))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SourceReport {
    pub label: String,
    pub signature_terms: usize,
    pub module_classes: usize,
    pub module_axioms: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub sources: Vec<SourceReport>,
    pub upper_triples: usize,
    /// (module root, upper class)
    pub anchors: Vec<(Iri, Iri)>,
    pub unanchored_roots: Vec<Iri>,
    pub bridges: usize,
    pub internal_concepts: usize,
    pub internal_edges: usize,
    pub triples: usize,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String, AssembleError> {
    fs::read_to_string(path).map_err(|source| AssembleError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_graph(path: &Path) -> Result<Graph, AssembleError> {
    parse_turtle(&read(path)?).map_err(|e| AssembleError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

struct Module {
    label: String,
    model: OntologyModel,
    report: SourceReport,
    warnings: Vec<Warning>,
}

fn extract_source(src: &SourceConfig) -> Result<Module, AssembleError> {
    let g = read_graph(&src.ontology)?;
    let (m, mut warnings) = extract_model(&g);
    let terms = parse_terms(&read(&src.signature)?, g.prefixes()).map_err(|(line, message)| {
        AssembleError::Signature {
            path: src.signature.clone(),
            line,
            message,
        }
    })?;
    let sig = Signature::classify(terms, &m);
    let (model, w) = extract_bot_module(&m, &sig);
    warnings.extend(w);
    Ok(Module {
        report: SourceReport {
            label: src.label.clone(),
            signature_terms: sig.len(),
            module_classes: model.classes.len(),
            module_axioms: model.axiom_count(),
        },
        label: src.label.clone(),
        model,
        warnings,
    })
}

/// Assembles source modules, the upper layer, anchors, bridges and the
/// internal taxonomy into one graph.
pub fn build_application_ontology(cfg: &AppoConfig) -> Result<(Graph, BuildReport), AssembleError> {
    let mut report = BuildReport::default();
    let upper = read_graph(&cfg.upper)?;
    let (upper_model, _) = extract_model(&upper);
    report.upper_triples = upper.len();

    let modules: Vec<Module> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .sources
            .iter()
            .map(|src| scope.spawn(move || extract_source(src)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("extraction thread panicked"))
            .collect::<Result<_, _>>()
    })?;

    let mut out = upper.clone();
    let mut lookup = upper.prefixes().clone();
    for m in &modules {
        for (p, ns) in m.model.prefixes.iter() {
            if lookup.get(p).is_none() {
                let _ = lookup.insert(p, ns.clone());
            }
        }
        out.merge(&render_model(&m.model));
        report.sources.push(m.report.clone());
        report
            .warnings
            .extend(m.warnings.iter().map(|w| format!("{}: {w}", m.label)));
    }

    let mut internal = Graph::new();
    match &cfg.internal_taxonomy {
        Some(path) => {
            let store = load_store(path).map_err(|e| AssembleError::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?;
            let taxonomy = reviewed_part(&store.taxonomy);
            for (p, ns) in taxonomy.prefixes.iter() {
                if internal.prefixes().get(p).is_none() {
                    let _ = internal.prefixes_mut().insert(p, ns.clone());
                }
            }
            add_bridges(&mut internal, &mut report, Some(&taxonomy), &store.mappings)?;
            for path in &cfg.mappings {
                let set = read_mappings(path)?;
                add_bridges(&mut internal, &mut report, Some(&taxonomy), &set)?;
            }
            render_internal(&mut internal, &mut report, &taxonomy);
        }
        None => {
            for path in &cfg.mappings {
                let set = read_mappings(path)?;
                add_bridges(&mut internal, &mut report, None, &set)?;
            }
        }
    }
    out.merge(&internal);

    let anchors = anchor_triples(cfg, &lookup, &upper_model, &modules, &out, &mut report)?;
    out.extend(anchors);
    report.triples = out.len();
    Ok((out, report))
}

fn read_mappings(path: &Path) -> Result<crate::sssom::MappingSet, AssembleError> {
    parse_sssom(&read(path)?)
        .map(|(s, _)| s)
        .map_err(|e| AssembleError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Published and approved concepts; proposals are not yet curated.
fn reviewed_part(t: &SkosTaxonomy) -> SkosTaxonomy {
    SkosTaxonomy {
        concepts: t
            .concepts
            .iter()
            .filter(|(_, c)| c.status != ConceptStatus::Proposed)
            .map(|(i, c)| (i.clone(), c.clone()))
            .collect(),
        ..t.clone()
    }
}

fn add_bridges(
    g: &mut Graph,
    report: &mut BuildReport,
    taxonomy: Option<&SkosTaxonomy>,
    set: &crate::sssom::MappingSet,
) -> Result<(), AssembleError> {
    let (bridges, warnings) = bridge(taxonomy, set)?;
    report.warnings.extend(warnings.iter().map(ToString::to_string));
    let before = g.len();
    g.merge(&bridges);
    report.bridges += g.len() - before;
    Ok(())
}

fn render_internal(g: &mut Graph, report: &mut BuildReport, t: &SkosTaxonomy) {
    let _ = g.prefixes_mut().insert("owl", iri(vocab::OWL));
    let _ = g.prefixes_mut().insert("rdfs", iri(vocab::RDFS));
    for (id, c) in &t.concepts {
        g.insert(Triple::new(id.clone(), iri(vocab::RDF_TYPE), iri(vocab::OWL_CLASS)));
        g.insert(Triple::new(id.clone(), iri(vocab::RDFS_LABEL), Literal::plain(c.pref_label.clone())));
        report.internal_concepts += 1;
        for b in c.broader.iter().filter(|b| t.contains(b)) {
            g.insert(Triple::new(id.clone(), iri(vocab::RDFS_SUBCLASS_OF), b.clone()));
            report.internal_edges += 1;
        }
    }
}

/// Named subclass and equivalence edges of the assembled graph.
fn hierarchy(g: &Graph) -> BTreeMap<&Iri, Vec<&Iri>> {
    let mut up: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for t in g.iter() {
        let (Some(s), Some(o)) = (t.subject.as_iri(), t.object.as_iri()) else {
            continue;
        };
        match t.predicate.as_str() {
            vocab::RDFS_SUBCLASS_OF => up.entry(s).or_default().push(o),
            vocab::OWL_EQUIVALENT_CLASS => {
                up.entry(s).or_default().push(o);
                up.entry(o).or_default().push(s);
            }
            _ => {}
        }
    }
    up
}

fn reaches(up: &BTreeMap<&Iri, Vec<&Iri>>, from: &Iri, targets: &BTreeSet<Iri>) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(n) = queue.pop_front() {
        if targets.contains(n) {
            return true;
        }
        for next in up.get(n).into_iter().flatten() {
            if seen.insert(*next) {
                queue.push_back(next);
            }
        }
    }
    false
}

fn anchor_triples(
    cfg: &AppoConfig,
    lookup: &CurieMap,
    upper: &OntologyModel,
    modules: &[Module],
    assembled: &Graph,
    report: &mut BuildReport,
) -> Result<Vec<Triple>, AssembleError> {
    let resolve = |text: &str| {
        lookup
            .resolve(text)
            .map_err(|e| AssembleError::Config(format!("anchor_map entry {text:?}: {e}")))
    };
    let mut anchor_map = BTreeMap::new();
    for (root, target) in &cfg.anchor_map {
        let target_iri = resolve(target)?;
        if !upper.classes.contains(&target_iri) {
            return Err(AssembleError::Config(format!("anchor target {target} is not an upper class")));
        }
        anchor_map.insert(resolve(root)?, target_iri);
    }

    let mut up = hierarchy(assembled);
    let mut roots = BTreeSet::new();
    for m in modules {
        let has_parent: BTreeSet<&Iri> = m.model.subclass_edges.iter().map(|(s, _)| s).collect();
        roots.extend(
            m.model
                .classes
                .iter()
                .filter(|c| !has_parent.contains(c) && !upper.classes.contains(*c)),
        );
    }
    let detached: Vec<&Iri> = roots.into_iter().filter(|r| !reaches(&up, r, &upper.classes)).collect();
    let mut triples = Vec::new();
    let mut unanchored = Vec::new();
    for root in detached {
        match anchor_map.get(root) {
            Some(target) => {
                triples.push(Triple::new(root.clone(), iri(vocab::RDFS_SUBCLASS_OF), target.clone()));
                report.anchors.push((root.clone(), target.clone()));
                up.entry(root).or_default().push(target);
            }
            None => unanchored.push(root),
        }
    }
    // anchors may connect roots that reached the upper layer only through other roots
    for root in unanchored {
        if !reaches(&up, root, &upper.classes) {
            report.unanchored_roots.push(root.clone());
            report
                .warnings
                .push(Warning::new("unanchored-root", format!("<{root}> has no path to the upper layer")).to_string());
        }
    }
    Ok(triples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sources_yield_upper_only() {
        let dir = tempfile::tempdir().unwrap();
        let upper = "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n<http://x.org/P> a owl:Class .\n";
        fs::write(dir.path().join("upper.ttl"), upper).unwrap();
        let cfg = AppoConfig::from_yaml("upper: upper.ttl\nsources: []\n", dir.path()).unwrap();
        let (g, report) = build_application_ontology(&cfg).unwrap();
        assert_eq!(g.triples(), parse_turtle(upper).unwrap().triples());
        assert_eq!(report.triples, 1);
    }

    #[test]
    fn unreadable_signature_names_path() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("upper.ttl"), "").unwrap();
        fs::write(dir.path().join("o.ttl"), "").unwrap();
        let yaml = "upper: upper.ttl\nsources:\n  - {label: o, ontology: o.ttl, signature: missing.terms}\n";
        let cfg = AppoConfig::from_yaml(yaml, dir.path()).unwrap();
        let err = build_application_ontology(&cfg).unwrap_err();
        assert!(matches!(err, AssembleError::Io { .. }));
        assert!(err.to_string().contains("missing.terms"));
    }

    #[test]
    fn bad_signature_line() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("upper.ttl"), "").unwrap();
        fs::write(dir.path().join("o.ttl"), "").unwrap();
        fs::write(dir.path().join("s.terms"), "# c\nnope:X\n").unwrap();
        let yaml = "upper: upper.ttl\nsources:\n  - {label: o, ontology: o.ttl, signature: s.terms}\n";
        let cfg = AppoConfig::from_yaml(yaml, dir.path()).unwrap();
        let err = build_application_ontology(&cfg).unwrap_err();
        assert!(matches!(err, AssembleError::Signature { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_labels_rejected() {
        let yaml = "upper: u.ttl\nsources:\n  - {label: o, ontology: a, signature: b}\n  - {label: o, ontology: c, signature: d}\n";
        assert!(AppoConfig::from_yaml(yaml, Path::new(".")).is_err());
    }
}
