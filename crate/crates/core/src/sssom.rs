//! SSSOM mapping sets in the TSV-with-metadata-header layout.
//!
//! ```text
//! # curie_map:
//! #   ex: "http://example.org/"
//! # mapping_set_id: https://example.org/mappings.sssom.tsv
//! # license: https://creativecommons.org/publicdomain/zero/1.0/
//! subject_id	subject_label	predicate_id	object_id	object_label	mapping_justification
//! ```
//!
//! Only the six core columns are written. Extra columns and metadata keys are
//! tolerated on input and reported as warnings.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::rdf::vocab::SSSOM_BUILTIN_PREFIXES;
use crate::rdf::{is_valid_prefix, CurieMap, Iri};
use crate::Warning;

pub const COLUMNS: [&str; 6] = [
    "subject_id",
    "subject_label",
    "predicate_id",
    "object_id",
    "object_label",
    "mapping_justification",
];

const REQUIRED_COLUMNS: [&str; 4] = ["subject_id", "predicate_id", "object_id", "mapping_justification"];

pub const DEFAULT_LICENSE: &str = "https://creativecommons.org/publicdomain/zero/1.0/";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SssomError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: unresolvable CURIE {curie:?}")]
    Curie { line: usize, curie: String },
    #[error("duplicate mapping ({subject_id}, {predicate_id}, {object_id})")]
    DuplicateRecord {
        subject_id: String,
        predicate_id: String,
        object_id: String,
    },
    #[error("unresolvable CURIE {0:?}")]
    UnresolvedCurie(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MappingRecord {
    pub subject_id: String,
    pub subject_label: Option<String>,
    pub predicate_id: String,
    pub object_id: String,
    pub object_label: Option<String>,
    pub mapping_justification: String,
}

impl MappingRecord {
    fn key(&self) -> (&str, &str, &str) {
        (&self.subject_id, &self.predicate_id, &self.object_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSet {
    pub mapping_set_id: Iri,
    pub license: Iri,
    pub curie_map: CurieMap,
    records: Vec<MappingRecord>,
}

impl MappingSet {
    pub fn new(mapping_set_id: Iri, license: Iri, curie_map: CurieMap) -> Self {
        Self {
            mapping_set_id,
            license,
            curie_map,
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[MappingRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a record after checking its CURIEs and (s, p, o) uniqueness.
    pub fn push(&mut self, record: MappingRecord) -> Result<(), SssomError> {
        for curie in [
            &record.subject_id,
            &record.predicate_id,
            &record.object_id,
            &record.mapping_justification,
        ] {
            self.expand(curie)?;
        }
        if self.records.iter().any(|r| r.key() == record.key()) {
            return Err(SssomError::DuplicateRecord {
                subject_id: record.subject_id,
                predicate_id: record.predicate_id,
                object_id: record.object_id,
            });
        }
        self.records.push(record);
        Ok(())
    }

    /// Removes every record matching `keep == false`.
    pub fn retain(&mut self, keep: impl FnMut(&MappingRecord) -> bool) {
        self.records.retain(keep);
    }

    /// Sorts rows into emission order: (subject_id, object_id, predicate_id).
    pub fn sort_records(&mut self) {
        self.records.sort_by(|a, b| {
            (&a.subject_id, &a.object_id, &a.predicate_id).cmp(&(&b.subject_id, &b.object_id, &b.predicate_id))
        });
    }

    /// Expands a CURIE through the set's map, falling back to the SSSOM
    /// built-in prefixes.
    pub fn expand(&self, curie: &str) -> Result<Iri, SssomError> {
        let unresolved = || SssomError::UnresolvedCurie(curie.to_string());
        let (prefix, local) = curie.split_once(':').ok_or_else(unresolved)?;
        if !is_valid_prefix(prefix) || local.chars().any(char::is_whitespace) {
            return Err(unresolved());
        }
        let ns = match self.curie_map.get(prefix) {
            Some(ns) => ns.as_str(),
            None => SSSOM_BUILTIN_PREFIXES
                .iter()
                .find(|(p, _)| *p == prefix)
                .map(|(_, ns)| *ns)
                .ok_or_else(unresolved)?,
        };
        Iri::new(format!("{ns}{local}")).map_err(|_| unresolved())
    }

    /// CURIE for `iri`, registering a generated prefix (`ns1`, `ns2`, ...) for
    /// its namespace when no existing prefix matches.
    pub fn curie_for(&mut self, iri: &Iri) -> String {
        if let Some(c) = self.curie_map.compress(iri) {
            return c;
        }
        if let Some((p, ns)) = SSSOM_BUILTIN_PREFIXES.iter().find(|(_, ns)| iri.as_str().starts_with(ns)) {
            return format!("{p}:{}", &iri.as_str()[ns.len()..]);
        }
        let s = iri.as_str();
        let cut = s.rfind(['/', '#']).or_else(|| s.rfind(':')).map_or(s.len(), |i| i + 1);
        let ns = Iri::new(&s[..cut]).unwrap_or_else(|_| iri.clone());
        let mut n = 1;
        let prefix = loop {
            let candidate = format!("ns{n}");
            if self.curie_map.get(&candidate).is_none() {
                break candidate;
            }
            n += 1;
        };
        self.curie_map.insert(&prefix, ns).expect("generated prefix is valid");
        self.curie_map.compress(iri).unwrap_or_else(|| iri.to_string())
    }
}

pub fn emit_sssom(s: &MappingSet) -> String {
    let mut out = String::new();
    if s.curie_map.is_empty() {
        out.push_str("# curie_map: {}\n");
    } else {
        out.push_str("# curie_map:\n");
        for (prefix, ns) in s.curie_map.iter() {
            let _ = writeln!(out, "#   {prefix}: \"{ns}\"");
        }
    }
    let _ = writeln!(out, "# mapping_set_id: {}", s.mapping_set_id);
    let _ = writeln!(out, "# license: {}", s.license);
    out.push_str(&COLUMNS.join("\t"));
    out.push('\n');
    let mut rows: Vec<&MappingRecord> = s.records.iter().collect();
    rows.sort_by(|a, b| (&a.subject_id, &a.object_id, &a.predicate_id).cmp(&(&b.subject_id, &b.object_id, &b.predicate_id)));
    for r in rows {
        let cells = [
            r.subject_id.as_str(),
            r.subject_label.as_deref().unwrap_or(""),
            r.predicate_id.as_str(),
            r.object_id.as_str(),
            r.object_label.as_deref().unwrap_or(""),
            r.mapping_justification.as_str(),
        ];
        let cells: Vec<String> = cells.iter().map(|c| clean_cell(c)).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

fn clean_cell(c: &str) -> String {
    c.replace(['\t', '\n', '\r'], " ")
}

fn unquote(v: &str) -> &str {
    let v = v.trim();
    for q in ['"', '\''] {
        if v.len() >= 2 && v.starts_with(q) && v.ends_with(q) {
            return &v[1..v.len() - 1];
        }
    }
    v
}

pub fn parse_sssom(text: &str) -> Result<(MappingSet, Vec<Warning>), SssomError> {
    let mut warnings = Vec::new();
    let mut curie_entries: Vec<(usize, String, String)> = Vec::new();
    let mut meta: HashMap<&'static str, (usize, String)> = HashMap::new();
    let mut current_key: Option<String> = None;
    let mut header: Option<(usize, Vec<String>)> = None;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if header.is_none() {
            if let Some(body) = line.strip_prefix('#') {
                let body = body.strip_prefix(' ').unwrap_or(body);
                if body.trim().is_empty() {
                    continue;
                }
                let nested = body.starts_with(char::is_whitespace);
                let Some((key, value)) = body.trim().split_once(':') else {
                    return Err(SssomError::Format {
                        line: line_no,
                        message: "metadata line is not key: value".into(),
                    });
                };
                let (key, value) = (key.trim(), value.trim());
                if nested {
                    if let Some("curie_map") = current_key.as_deref() { curie_entries.push((line_no, key.to_string(), unquote(value).to_string())) }
                    continue;
                }
                current_key = Some(key.to_string());
                match key {
                    "curie_map" => {
                        if !(value.is_empty() || value == "{}") {
                            return Err(SssomError::Format {
                                line: line_no,
                                message: "curie_map must be a nested block".into(),
                            });
                        }
                    }
                    "mapping_set_id" => {
                        meta.insert("mapping_set_id", (line_no, unquote(value).to_string()));
                    }
                    "license" => {
                        meta.insert("license", (line_no, unquote(value).to_string()));
                    }
                    other => warnings.push(Warning::new(
                        "unknown-metadata-key",
                        format!("line {line_no}: metadata key {other:?} ignored"),
                    )),
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            header = Some((line_no, line.split('\t').map(str::to_string).collect()));
            continue;
        }
        if line.is_empty() {
            continue;
        }
        rows.push((line_no, line.split('\t').map(str::to_string).collect()));
    }

    let mut curie_map = CurieMap::new();
    for (line, prefix, ns) in curie_entries {
        let ns = Iri::new(ns.as_str()).map_err(|_| SssomError::Format {
            line,
            message: format!("namespace {ns:?} for prefix {prefix:?} is not an IRI"),
        })?;
        curie_map.insert(&prefix, ns).map_err(|_| SssomError::Format {
            line,
            message: format!("invalid prefix name {prefix:?}"),
        })?;
    }
    let meta_iri = |key: &'static str| -> Result<Iri, SssomError> {
        match meta.get(key) {
            Some((line, v)) => Iri::new(v.as_str()).map_err(|_| SssomError::Format {
                line: *line,
                message: format!("{key} {v:?} is not an IRI"),
            }),
            None => Err(SssomError::Format {
                line: 1,
                message: format!("missing metadata key {key}"),
            }),
        }
    };
    let mut set = MappingSet::new(meta_iri("mapping_set_id")?, meta_iri("license")?, curie_map);

    let Some((header_line, columns)) = header else {
        return Err(SssomError::Format {
            line: text.lines().count().max(1),
            message: "missing header row".into(),
        });
    };
    let index: HashMap<&str, usize> = columns.iter().enumerate().map(|(i, c)| (c.trim(), i)).collect();
    for required in REQUIRED_COLUMNS {
        if !index.contains_key(required) {
            return Err(SssomError::Format {
                line: header_line,
                message: format!("missing required column {required}"),
            });
        }
    }
    let mut seen_columns = HashSet::new();
    for c in &columns {
        if !seen_columns.insert(c.trim()) {
            return Err(SssomError::Format {
                line: header_line,
                message: format!("duplicate column {c}"),
            });
        }
        if !COLUMNS.contains(&c.trim()) {
            warnings.push(Warning::new(
                "unknown-column",
                format!("column {c:?} is not part of the core profile and is ignored"),
            ));
        }
    }

    let mut keys = HashSet::new();
    for (line, cells) in rows {
        if cells.len() != columns.len() {
            return Err(SssomError::Format {
                line,
                message: format!("row has {} cells, header has {}", cells.len(), columns.len()),
            });
        }
        let cell = |name: &str| index.get(name).map(|&i| cells[i].as_str());
        let optional = |name: &str| cell(name).filter(|v| !v.is_empty()).map(str::to_string);
        let record = MappingRecord {
            subject_id: cell("subject_id").unwrap_or_default().to_string(),
            subject_label: optional("subject_label"),
            predicate_id: cell("predicate_id").unwrap_or_default().to_string(),
            object_id: cell("object_id").unwrap_or_default().to_string(),
            object_label: optional("object_label"),
            mapping_justification: cell("mapping_justification").unwrap_or_default().to_string(),
        };
        for curie in [
            &record.subject_id,
            &record.predicate_id,
            &record.object_id,
            &record.mapping_justification,
        ] {
            if set.expand(curie).is_err() {
                return Err(SssomError::Curie {
                    line,
                    curie: curie.clone(),
                });
            }
        }
        let key = (record.subject_id.clone(), record.predicate_id.clone(), record.object_id.clone());
        if !keys.insert(key) {
            return Err(SssomError::Format {
                line,
                message: format!(
                    "duplicate mapping ({}, {}, {})",
                    record.subject_id, record.predicate_id, record.object_id
                ),
            });
        }
        set.records.push(record);
    }
    Ok((set, warnings))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Zero-based index into [`MappingSet::records`].
    pub row: usize,
    pub subject_id: String,
    pub predicate_id: String,
    pub object_id: String,
}

/// Records whose predicate is not in `allowed`. Predicates are compared by
/// expanded IRI when both sides resolve, otherwise by CURIE text.
pub fn validate_predicates(s: &MappingSet, allowed: &BTreeSet<String>) -> Vec<Violation> {
    let allowed_iris: HashSet<Iri> = allowed.iter().filter_map(|c| s.expand(c).ok()).collect();
    s.records
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            let ok = allowed.contains(&r.predicate_id)
                || s.expand(&r.predicate_id).is_ok_and(|iri| allowed_iris.contains(&iri));
            !ok
        })
        .map(|(row, r)| Violation {
            row,
            subject_id: r.subject_id.clone(),
            predicate_id: r.predicate_id.clone(),
            object_id: r.object_id.clone(),
        })
        .collect()
}
