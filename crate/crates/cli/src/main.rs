//! `obdm`: ontology conversion, enrichment, assembly and query pipeline.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use obdm_core::assemble::{
    build_application_ontology, extract_bot_module, load_appo_config, parse_terms, render_model, Signature,
};
use obdm_core::infer::{bindings_to_json, materialize, parse_pattern, without_inference};
use obdm_core::owl::{extract_model, model_stats};
use obdm_core::rdf::{parse_turtle, serialize_turtle, CurieMap, Graph, Iri};
use obdm_core::sha256_hex;
use obdm_core::skos::{convert, MintConfig, SkosError, SkosTaxonomy};
use obdm_core::sssom::{emit_sssom, parse_sssom};
use obdm_core::store::{load_store, Store, StoreLock};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "obdm", version, about = "Ontology-based metadata pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert OWL classes into a SKOS taxonomy plus SSSOM mappings.
    Convert(ConvertArgs),
    /// Propose, approve or reject enrichment concepts in a store.
    Enrich {
        #[command(subcommand)]
        action: EnrichAction,
    },
    /// Move a store's enrichments onto a fresh conversion.
    Rebase(RebaseArgs),
    /// Extract a locality module for a set of seed terms.
    Extract(ExtractArgs),
    /// Assemble the application ontology from a YAML recipe.
    BuildAppo(BuildAppoArgs),
    /// Compute rule-based entailments.
    Materialize(MaterializeArgs),
    /// Match a pattern against a graph and print JSON bindings.
    Query(QueryArgs),
    /// Serve controlled vocabularies over HTTP.
    Serve(ServeArgs),
    /// Download an ontology document, optionally checking its SHA-256.
    Fetch(FetchArgs),
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    namespace: String,
    #[arg(long)]
    enrichment_namespace: Option<String>,
    #[arg(long)]
    out_taxonomy: PathBuf,
    #[arg(long)]
    out_sssom: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum EnrichAction {
    Add {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        parent: String,
        #[arg(long)]
        label: String,
        #[arg(long)]
        definition: Option<String>,
        #[arg(long, default_value = "cli")]
        actor: String,
        #[arg(long)]
        enrichment_namespace: Option<String>,
    },
    Approve(ReviewArgs),
    Reject(ReviewArgs),
}

#[derive(Debug, Args)]
struct ReviewArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    concept: String,
    #[arg(long, default_value = "cli")]
    actor: String,
}

#[derive(Debug, Args)]
struct RebaseArgs {
    #[arg(long)]
    store: PathBuf,
    /// Fresh taxonomy Turtle followed by its SSSOM file.
    #[arg(long, num_args = 2, value_names = ["TTL", "TSV"])]
    fresh: Vec<PathBuf>,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    terms: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildAppoArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MaterializeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    include_inferred: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    materialize: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
}

#[derive(Debug, Args)]
struct FetchArgs {
    #[arg(long)]
    url: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    sha256: Option<String>,
}

/// Exit 1 for runtime errors, 2 for validation failures.
#[derive(Debug)]
enum Failure {
    Runtime(String),
    Validation(String),
}

type Outcome = Result<(), Failure>;

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write(path: &Path, content: &[u8]) -> Outcome {
    fs::write(path, content).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    parse_turtle(&read(path)?).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn iri(text: &str) -> Result<Iri, Failure> {
    Iri::new(text).map_err(runtime)
}

/// Writes the report to `path`, or to stdout without one.
fn emit_report(report: &impl Serialize, path: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(report).map_err(runtime)? + "\n";
    match path {
        Some(p) => write(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
fn now() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

#[derive(Serialize)]
struct ConvertReport {
    #[serde(flatten)]
    conversion: obdm_core::skos::ConversionReport,
    warnings: Vec<String>,
}

fn cmd_convert(a: ConvertArgs) -> Outcome {
    let mut graph = Graph::new();
    for p in &a.input {
        graph.merge(&read_graph(p)?);
    }
    let (model, warnings) = extract_model(&graph);
    let namespace = iri(&a.namespace)?;
    let cfg = match &a.enrichment_namespace {
        Some(e) => MintConfig::new(namespace, iri(e)?),
        None => MintConfig::with_default_enrichment(namespace),
    }
    .map_err(runtime)?;
    let out = match convert(&model, &cfg) {
        Ok(out) => out,
        Err(e @ SkosError::Cycle { .. }) => return Err(Failure::Validation(e.to_string())),
        Err(e) => return Err(runtime(e)),
    };
    write(&a.out_taxonomy, out.taxonomy.to_turtle().as_bytes())?;
    write(&a.out_sssom, emit_sssom(&out.mappings).as_bytes())?;
    let report = ConvertReport {
        conversion: out.report,
        warnings: warnings.iter().map(ToString::to_string).collect(),
    };
    emit_report(&report, a.report.as_deref())
}

fn store_curies(store: &Store) -> CurieMap {
    let mut m = store.taxonomy.prefixes.clone();
    for (p, ns) in store.mappings.curie_map.iter() {
        if m.get(p).is_none() {
            let _ = m.insert(p, ns.clone());
        }
    }
    m
}

#[derive(Serialize)]
struct EnrichReport {
    concept: Iri,
    status: Option<&'static str>,
}

fn cmd_enrich(action: EnrichAction) -> Outcome {
    let ts = now();
    let (dir, concept_text) = match &action {
        EnrichAction::Add { store, parent, .. } => (store.clone(), parent.clone()),
        EnrichAction::Approve(r) | EnrichAction::Reject(r) => (r.store.clone(), r.concept.clone()),
    };
    let lock = StoreLock::acquire(&dir).map_err(runtime)?;
    let mut store = load_store(&dir).map_err(runtime)?;
    let target = store_curies(&store).resolve(&concept_text).map_err(runtime)?;
    let report = match action {
        EnrichAction::Add {
            label,
            definition,
            actor,
            enrichment_namespace,
            ..
        } => {
            let ens = enrichment_namespace.as_deref().map(iri).transpose()?;
            let cfg = store.mint_config(ens).map_err(runtime)?;
            let id = store
                .add(&target, &label, definition.as_deref(), &cfg, &actor, ts)
                .map_err(runtime)?;
            EnrichReport {
                concept: id,
                status: Some("proposed"),
            }
        }
        EnrichAction::Approve(r) => {
            store.approve(&target, &r.actor, ts).map_err(runtime)?;
            EnrichReport {
                concept: target,
                status: Some("approved"),
            }
        }
        EnrichAction::Reject(r) => {
            store.reject(&target, &r.actor, ts).map_err(runtime)?;
            EnrichReport {
                concept: target,
                status: None,
            }
        }
    };
    lock.save(&store).map_err(runtime)?;
    emit_report(&report, None)
}

fn load_fresh(ttl: &Path, tsv: &Path) -> Result<(SkosTaxonomy, obdm_core::sssom::MappingSet), Failure> {
    let graph = read_graph(ttl)?;
    let (mappings, _) = parse_sssom(&read(tsv)?).map_err(|e| Failure::Runtime(format!("{}: {e}", tsv.display())))?;
    let taxonomy = SkosTaxonomy::from_graph(&graph, &mappings).map_err(|e| match e {
        SkosError::Cycle { .. } => Failure::Validation(e.to_string()),
        e => Failure::Runtime(format!("{}: {e}", ttl.display())),
    })?;
    if taxonomy.enrichments().next().is_some() {
        return Err(Failure::Runtime("fresh taxonomy must not contain enrichments".into()));
    }
    Ok((taxonomy, mappings))
}

fn cmd_rebase(a: RebaseArgs) -> Outcome {
    let lock = StoreLock::acquire(&a.store).map_err(runtime)?;
    let store = load_store(&a.store).map_err(runtime)?;
    let (fresh, mappings) = load_fresh(&a.fresh[0], &a.fresh[1])?;
    let (next, report) = store.rebase(&fresh, mappings);
    emit_report(&report, a.report.as_deref())?;
    if a.strict && !report.orphaned.is_empty() {
        return Err(Failure::Validation(format!(
            "{} orphaned enrichment(s); store left unchanged",
            report.orphaned_concepts().len()
        )));
    }
    lock.save(&next).map_err(runtime)
}

#[derive(Serialize)]
struct ExtractReport {
    signature_terms: usize,
    module: obdm_core::owl::ModelStats,
    module_axioms: usize,
    warnings: Vec<String>,
}

fn cmd_extract(a: ExtractArgs) -> Outcome {
    let graph = read_graph(&a.input)?;
    let (model, mut warnings) = extract_model(&graph);
    let terms = parse_terms(&read(&a.terms)?, graph.prefixes())
        .map_err(|(line, msg)| Failure::Runtime(format!("{}:{line}: {msg}", a.terms.display())))?;
    let sig = Signature::classify(terms, &model);
    let (module, w) = extract_bot_module(&model, &sig);
    warnings.extend(w);
    write(&a.out, serialize_turtle(&render_model(&module)).as_bytes())?;
    let report = ExtractReport {
        signature_terms: sig.len(),
        module: model_stats(&module),
        module_axioms: module.axiom_count(),
        warnings: warnings.iter().map(ToString::to_string).collect(),
    };
    emit_report(&report, a.report.as_deref())
}

fn cmd_build_appo(a: BuildAppoArgs) -> Outcome {
    let cfg = load_appo_config(&a.config).map_err(runtime)?;
    let (graph, report) = build_application_ontology(&cfg).map_err(runtime)?;
    write(&a.out, serialize_turtle(&graph).as_bytes())?;
    emit_report(&report, a.report.as_deref())
}

#[derive(Serialize)]
struct MaterializeReport {
    base_triples: usize,
    derived_triples: usize,
    by_rule: BTreeMap<String, usize>,
}

fn cmd_materialize(a: MaterializeArgs) -> Outcome {
    let graph = read_graph(&a.input)?;
    let ig = materialize(&graph);
    write(&a.out, serialize_turtle(&ig.to_graph(a.include_inferred)).as_bytes())?;
    let derived = ig.derived();
    let mut by_rule = BTreeMap::new();
    for rule in derived.values() {
        *by_rule.entry(rule.to_string()).or_insert(0) += 1;
    }
    let report = MaterializeReport {
        base_triples: graph.len(),
        derived_triples: derived.len(),
        by_rule,
    };
    emit_report(&report, a.report.as_deref())
}

fn cmd_query(a: QueryArgs) -> Outcome {
    let graph = read_graph(&a.graph)?;
    let pattern = parse_pattern(&read(&a.pattern)?, graph.prefixes()).map_err(runtime)?;
    let ig = if a.materialize {
        materialize(&graph)
    } else {
        without_inference(&graph)
    };
    println!("{}", bindings_to_json(&ig.match_pattern(&pattern)));
    Ok(())
}

fn cmd_serve(a: ServeArgs) -> Outcome {
    let token = std::env::var(obdm_service::ADMIN_TOKEN_ENV).ok();
    if token.is_none() {
        log::warn!("{} is not set; reload is disabled", obdm_service::ADMIN_TOKEN_ENV);
    }
    let state = Arc::new(obdm_service::AppState::new(a.config, token));
    let rt = tokio::runtime::Runtime::new().map_err(runtime)?;
    rt.block_on(obdm_service::serve(state, SocketAddr::new(a.host, a.port)))
        .map_err(runtime)
}

#[derive(Serialize)]
struct FetchReport {
    url: String,
    bytes: usize,
    sha256: String,
}

fn download(url: &str) -> Result<Vec<u8>, Failure> {
    if let Some(path) = url.strip_prefix("file://") {
        return fs::read(path).map_err(|e| Failure::Runtime(format!("{url}: {e}")));
    }
    if !(url.starts_with("http://") || url.starts_with("https://")) {
        return Err(Failure::Runtime(format!("unsupported URL scheme: {url}")));
    }
    let resp = ureq::get(url).call().map_err(|e| Failure::Runtime(format!("{url}: {e}")))?;
    let mut bytes = Vec::new();
    resp.into_body()
        .into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| Failure::Runtime(format!("{url}: {e}")))?;
    Ok(bytes)
}

fn cmd_fetch(a: FetchArgs) -> Outcome {
    let bytes = download(&a.url)?;
    let digest = sha256_hex(&bytes);
    if let Some(expected) = &a.sha256 {
        if !expected.trim().eq_ignore_ascii_case(&digest) {
            return Err(Failure::Validation(format!(
                "checksum mismatch for {}: expected {expected}, got {digest}",
                a.url
            )));
        }
    }
    write(&a.out, &bytes)?;
    emit_report(
        &FetchReport {
            url: a.url,
            bytes: bytes.len(),
            sha256: digest,
        },
        None,
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Convert(a) => cmd_convert(a),
        Command::Enrich { action } => cmd_enrich(action),
        Command::Rebase(a) => cmd_rebase(a),
        Command::Extract(a) => cmd_extract(a),
        Command::BuildAppo(a) => cmd_build_appo(a),
        Command::Materialize(a) => cmd_materialize(a),
        Command::Query(a) => cmd_query(a),
        Command::Serve(a) => cmd_serve(a),
        Command::Fetch(a) => cmd_fetch(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(2)
        }
    }
}
