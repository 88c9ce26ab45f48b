use std::collections::{BTreeMap, BTreeSet};

use crate::digest::short_hash;
use crate::rdf::{is_valid_prefix, CurieMap, Iri};
use crate::sssom::DEFAULT_LICENSE;

use super::SkosError;

/// Where and how new concept IRIs are minted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintConfig {
    pub namespace: Iri,
    pub enrichment_namespace: Iri,
    /// CURIE prefix for `namespace`.
    pub prefix: String,
    /// CURIE prefix for `enrichment_namespace`.
    pub enrichment_prefix: String,
    pub scheme_iri: Iri,
    pub version: String,
    pub mapping_justification: String,
    pub mapping_set_id: Iri,
    pub license: Iri,
}

impl MintConfig {
    pub fn new(namespace: Iri, enrichment_namespace: Iri) -> Result<Self, SkosError> {
        for ns in [&namespace, &enrichment_namespace] {
            if !ns.as_str().ends_with(['/', '#']) {
                return Err(SkosError::Config(format!("namespace <{ns}> must end with '/' or '#'")));
            }
        }
        if namespace.as_str().starts_with(enrichment_namespace.as_str())
            || enrichment_namespace.as_str().starts_with(namespace.as_str())
        {
            return Err(SkosError::Config(format!(
                "namespaces <{namespace}> and <{enrichment_namespace}> overlap"
            )));
        }
        let base = namespace.as_str().trim_end_matches(['/', '#']);
        let scheme_iri = Iri::new(base).map_err(|e| SkosError::Config(e.to_string()))?;
        let mapping_set_id =
            Iri::new(format!("{base}.sssom.tsv")).map_err(|e| SkosError::Config(e.to_string()))?;
        Ok(Self {
            namespace,
            enrichment_namespace,
            prefix: "tax".into(),
            enrichment_prefix: "taxe".into(),
            scheme_iri,
            version: "1".into(),
            mapping_justification: crate::rdf::vocab::SEMAPV_UNSPECIFIED_MATCHING.into(),
            mapping_set_id,
            license: Iri::new(DEFAULT_LICENSE).expect("valid"),
        })
    }

    /// Uses `<namespace minus trailing separator>-enrichment/` for enrichments.
    pub fn with_default_enrichment(namespace: Iri) -> Result<Self, SkosError> {
        let base = namespace.as_str().trim_end_matches(['/', '#']);
        let enrichment = Iri::new(format!("{base}-enrichment/")).map_err(|e| SkosError::Config(e.to_string()))?;
        Self::new(namespace, enrichment)
    }

    pub fn with_prefixes(mut self, prefix: &str, enrichment_prefix: &str) -> Result<Self, SkosError> {
        for p in [prefix, enrichment_prefix] {
            if !is_valid_prefix(p) {
                return Err(SkosError::Config(format!("invalid prefix {p:?}")));
            }
        }
        if prefix == enrichment_prefix {
            return Err(SkosError::Config("prefixes must differ".into()));
        }
        self.prefix = prefix.into();
        self.enrichment_prefix = enrichment_prefix.into();
        Ok(self)
    }

    pub fn prefix_map(&self) -> CurieMap {
        let mut m = CurieMap::new();
        m.insert(&self.prefix, self.namespace.clone()).expect("validated prefix");
        m.insert(&self.enrichment_prefix, self.enrichment_namespace.clone())
            .expect("validated prefix");
        m
    }
}

fn mint_local(source: &Iri) -> String {
    let local = source.local_name().replace(':', "_");
    if local.is_empty() {
        short_hash(source.as_str().as_bytes())
    } else {
        local
    }
}

fn join(ns: &Iri, local: &str) -> Iri {
    Iri::new(format!("{}{}", ns.as_str(), local)).expect("namespace plus IRI-safe local name")
}

/// Namespace plus the source's final segment, `:` replaced by `_`.
pub fn mint_iri(source: &Iri, cfg: &MintConfig) -> Iri {
    join(&cfg.namespace, &mint_local(source))
}

/// Mints IRIs for a set of sources. Sources sharing a local name all get a
/// `-xxxxxxxx` suffix from the hash of their full IRI.
pub fn mint_all<'a>(sources: impl IntoIterator<Item = &'a Iri>, cfg: &MintConfig) -> BTreeMap<Iri, Iri> {
    let mut by_local: BTreeMap<String, BTreeSet<&Iri>> = BTreeMap::new();
    for s in sources {
        by_local.entry(mint_local(s)).or_default().insert(s);
    }
    let mut out = BTreeMap::new();
    for (local, group) in by_local {
        let collide = group.len() > 1;
        for s in group {
            let minted = if collide {
                join(&cfg.namespace, &format!("{local}-{}", short_hash(s.as_str().as_bytes())))
            } else {
                join(&cfg.namespace, &local)
            };
            out.insert(s.clone(), minted);
        }
    }
    out
}

fn slugify(label: &str) -> String {
    let mut slug = String::new();
    for c in label.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('-') {
            slug.push('-');
        }
    }
    let slug = slug.trim_matches('-');
    if slug.is_empty() {
        "concept".to_string()
    } else {
        slug.to_string()
    }
}

/// `enrichment_namespace + slug(label) + "-" + hash(label|parent)`
pub fn mint_enrichment_iri(label: &str, parent: &Iri, cfg: &MintConfig) -> Iri {
    let hash = short_hash(format!("{label}|{}", parent.as_str()).as_bytes());
    join(&cfg.enrichment_namespace, &format!("{}-{hash}", slugify(label)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::iri;

    fn cfg() -> MintConfig {
        MintConfig::with_default_enrichment(iri("https://nn.example/tax/")).unwrap()
    }

    #[test]
    fn obo_iri_minted_by_local_name() {
        assert_eq!(
            mint_iri(&iri("http://purl.obolibrary.org/obo/CHEBI_24431"), &cfg()),
            iri("https://nn.example/tax/CHEBI_24431")
        );
        assert_eq!(
            mint_iri(&iri("urn:ex:CHEBI:1"), &cfg()),
            iri("https://nn.example/tax/CHEBI_1")
        );
    }

    #[test]
    fn collisions_get_distinct_hash_suffixes() {
        let a = iri("http://one.org/Thing");
        let b = iri("http://two.org/Thing");
        let c = iri("http://two.org/Other");
        let minted = mint_all([&a, &b, &c], &cfg());
        assert_ne!(minted[&a], minted[&b]);
        let suffix = |i: &Iri| i.as_str().rsplit_once('-').unwrap().1.to_string();
        assert_eq!(suffix(&minted[&a]).len(), 8);
        assert!(minted[&a].as_str().starts_with("https://nn.example/tax/Thing-"));
        assert_eq!(minted[&c], iri("https://nn.example/tax/Other"));
        // stable across runs and input order
        assert_eq!(minted, mint_all([&c, &b, &a], &cfg()));
    }

    #[test]
    fn config_validation() {
        assert!(MintConfig::new(iri("https://x.org/a"), iri("https://x.org/b/")).is_err());
        assert!(MintConfig::new(iri("https://x.org/a/"), iri("https://x.org/a/e/")).is_err());
        let c = cfg();
        assert_eq!(c.enrichment_namespace, iri("https://nn.example/tax-enrichment/"));
        assert_eq!(c.scheme_iri, iri("https://nn.example/tax"));
        assert!(c.clone().with_prefixes("nn", "nn").is_err());
    }

    #[test]
    fn enrichment_iris() {
        let parent = iri("https://nn.example/tax/B");
        let e = mint_enrichment_iri("Alpha Variant!", &parent, &cfg());
        assert!(e.as_str().starts_with("https://nn.example/tax-enrichment/alpha-variant-"));
        assert_ne!(e, mint_enrichment_iri("Alpha Variant!", &iri("https://nn.example/tax/C"), &cfg()));
        assert_eq!(slugify("  ***  "), "concept");
    }
}
