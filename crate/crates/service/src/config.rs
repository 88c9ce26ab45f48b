use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use obdm_core::skos::ConceptStatus;
use serde::Deserialize;

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorConfig {
    #[serde(default)]
    pub descendants_of: Option<String>,
    #[serde(default)]
    pub terms: Option<Vec<String>>,
    #[serde(default)]
    pub include_root: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabularyConfig {
    pub id: String,
    pub label: String,
    pub selector: SelectorConfig,
    #[serde(default)]
    pub statuses: Option<Vec<ConceptStatus>>,
}

/// Contents of `vocab.yaml`. `store` resolves against the file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabConfig {
    pub store: PathBuf,
    #[serde(default)]
    pub curie_map: BTreeMap<String, String>,
    #[serde(default)]
    pub vocabularies: Vec<VocabularyConfig>,
}

impl VocabConfig {
    pub fn from_yaml(text: &str, base: &Path) -> Result<Self, ServiceError> {
        let mut cfg: VocabConfig = serde_yaml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))?;
        if cfg.store.is_relative() {
            cfg.store = base.join(&cfg.store);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = fs::read_to_string(path).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        Self::from_yaml(&text, path.parent().unwrap_or(Path::new(".")))
    }
}
