//! Declarative run configuration. Every value can also be given as a CLI
//! flag; flags win over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use care_core::aggregate::{DEFAULT_MIN_POST_CHARS, DEFAULT_THRESHOLD};
use care_core::expand::{DEFAULT_F_LEXICON, DEFAULT_F_PATTERN};
use care_core::{CareError, Result};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub paths: PathsConfig,
    #[serde(default)]
    pub aggregation: AggregationSection,
    #[serde(default)]
    pub expansion: ExpansionSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub patterns: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub exaggerators: Option<PathBuf>,
    pub negations: Option<PathBuf>,
    pub contrast: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub posts: Option<PathBuf>,
    pub comments: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub external_labels: Option<PathBuf>,
    pub class_mapping: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AggregationSection {
    pub default_threshold: u32,
    pub min_post_chars: usize,
    /// Per-class threshold overrides, keyed by class name.
    pub per_class: BTreeMap<String, u32>,
}

impl Default for AggregationSection {
    fn default() -> Self {
        Self {
            default_threshold: DEFAULT_THRESHOLD,
            min_post_chars: DEFAULT_MIN_POST_CHARS,
            per_class: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpansionSection {
    pub f_lexicon: u64,
    pub f_pattern: u64,
    pub count_distinct_comments: bool,
}

impl Default for ExpansionSection {
    fn default() -> Self {
        Self {
            f_lexicon: DEFAULT_F_LEXICON,
            f_pattern: DEFAULT_F_PATTERN,
            count_distinct_comments: false,
        }
    }
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
    /// Seed for sampling utilities.
    pub seed: Option<u64>,
}

pub fn load_config(path: &Path) -> Result<FileConfig> {
    let source = std::fs::read_to_string(path).map_err(|e| CareError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    toml::from_str(&source)
        .map_err(|e| CareError::Validation(format!("config {}: {e}", path.display())))
}
