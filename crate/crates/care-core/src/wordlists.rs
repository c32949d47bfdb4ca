//! Word lists used by preprocessing and matching: exaggerators, negations,
//! contrast markers, and stop words (the latter only for candidate
//! filtering during expansion).

use std::collections::HashSet;
use std::path::Path;

use crate::error::{CareError, Result};
use crate::io_util::read_to_string;

#[derive(Debug, Clone)]
pub struct WordLists {
    exaggerators: HashSet<String>,
    negations: HashSet<String>,
    contrast_markers: HashSet<String>,
    stopwords: HashSet<String>,
}

impl WordLists {
    pub fn new(
        exaggerators: HashSet<String>,
        negations: HashSet<String>,
        contrast_markers: HashSet<String>,
        stopwords: HashSet<String>,
    ) -> Result<Self> {
        for (name, set) in [
            ("exaggerators", &exaggerators),
            ("negations", &negations),
            ("contrast markers", &contrast_markers),
        ] {
            if set.is_empty() {
                return Err(CareError::Validation(format!("{name} list is empty")));
            }
        }
        Ok(Self {
            exaggerators,
            negations,
            contrast_markers,
            stopwords,
        })
    }

    pub fn is_exaggerator(&self, token: &str) -> bool {
        self.exaggerators.contains(token)
    }

    pub fn is_negation(&self, token: &str) -> bool {
        self.negations.contains(token)
    }

    pub fn is_contrast_marker(&self, token: &str) -> bool {
        self.contrast_markers.contains(token)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn exaggerator_count(&self) -> usize {
        self.exaggerators.len()
    }

    /// Loads the four lists from one-token-per-line files. `stopwords` may
    /// be absent (`None`), leaving candidate filtering disabled.
    pub fn load(
        exaggerators: impl AsRef<Path>,
        negations: impl AsRef<Path>,
        contrast: impl AsRef<Path>,
        stopwords: Option<&Path>,
    ) -> Result<Self> {
        let stop = match stopwords {
            Some(p) => load_token_file(p)?,
            None => HashSet::new(),
        };
        Self::new(
            load_token_file(exaggerators.as_ref())?,
            load_token_file(negations.as_ref())?,
            load_token_file(contrast.as_ref())?,
            stop,
        )
    }

    /// Loads lists with per-list fallback to the seed data for any path
    /// that is `None`.
    pub fn load_with_fallback(
        exaggerators: Option<&Path>,
        negations: Option<&Path>,
        contrast: Option<&Path>,
        stopwords: Option<&Path>,
    ) -> Result<Self> {
        let pick = |path: Option<&Path>, seed: &str| -> Result<HashSet<String>> {
            match path {
                Some(p) => load_token_file(p),
                None => Ok(parse_token_list(seed)),
            }
        };
        Self::new(
            pick(exaggerators, include_str!("../data/seed/exaggerators.txt"))?,
            pick(negations, include_str!("../data/seed/negations.txt"))?,
            pick(contrast, include_str!("../data/seed/contrast.txt"))?,
            pick(stopwords, include_str!("../data/seed/stopwords.txt"))?,
        )
    }

    /// The lists shipped with the crate.
    pub fn seed() -> Self {
        Self::new(
            parse_token_list(include_str!("../data/seed/exaggerators.txt")),
            parse_token_list(include_str!("../data/seed/negations.txt")),
            parse_token_list(include_str!("../data/seed/contrast.txt")),
            parse_token_list(include_str!("../data/seed/stopwords.txt")),
        )
        .expect("seed word lists are non-empty")
    }
}

fn parse_token_list(source: &str) -> HashSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn load_token_file(path: &Path) -> Result<HashSet<String>> {
    Ok(parse_token_list(&read_to_string(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists_cover_the_usual_suspects() {
        let lists = WordLists::seed();
        for word in ["so", "very", "really"] {
            assert!(lists.is_exaggerator(word), "{word}");
        }
        for word in ["never", "not", "cannot"] {
            assert!(lists.is_negation(word), "{word}");
        }
        for word in ["but", "however"] {
            assert!(lists.is_contrast_marker(word), "{word}");
        }
        assert!(lists.is_stopword("the"));
        assert!(!lists.is_stopword("adorable"));
    }

    #[test]
    fn empty_required_list_is_rejected() {
        let err = WordLists::new(
            HashSet::new(),
            parse_token_list("not"),
            parse_token_list("but"),
            HashSet::new(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("exaggerators"));
    }
}
