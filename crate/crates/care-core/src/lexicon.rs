//! The keyword-affect lexicon: indicators of one to three tokens mapped to
//! one or more affect classes.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CareError, Result};
use crate::io_util::{read_to_string, write_atomic};
use crate::taxonomy::{AffectClass, ClassSet};

/// Where a lexicon entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Seed,
    Expansion,
    Manual,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Seed => "seed",
            Provenance::Expansion => "expansion",
            Provenance::Manual => "manual",
        }
    }
}

impl FromStr for Provenance {
    type Err = CareError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "seed" => Ok(Provenance::Seed),
            "expansion" => Ok(Provenance::Expansion),
            "manual" => Ok(Provenance::Manual),
            other => Err(CareError::Validation(format!(
                "unknown provenance `{other}` (expected seed|expansion|manual)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconEntry {
    pub classes: ClassSet,
    pub provenance: Provenance,
}

/// Indicator lookup table. Keys are lowercased, space-joined token
/// sequences of length 1..=3; lookups are longest-match.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
    max_tokens: usize,
}

/// Hard cap on indicator length, in tokens.
pub const MAX_INDICATOR_TOKENS: usize = 3;

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an indicator. Duplicate indicators merge by class-set union and
    /// keep the first provenance seen.
    pub fn insert(
        &mut self,
        indicator: &str,
        classes: ClassSet,
        provenance: Provenance,
    ) -> Result<()> {
        let key = normalize_indicator(indicator)?;
        if classes.is_empty() {
            return Err(CareError::Validation(format!(
                "indicator `{key}` has an empty class set"
            )));
        }
        let tokens = key.split(' ').count();
        self.max_tokens = self.max_tokens.max(tokens);
        self.entries
            .entry(key)
            .and_modify(|e| e.classes = e.classes.union(classes))
            .or_insert(LexiconEntry {
                classes,
                provenance,
            });
        Ok(())
    }

    /// Exact lookup of a joined indicator string.
    pub fn lookup(&self, joined: &str) -> Option<ClassSet> {
        self.entries.get(joined).map(|e| e.classes)
    }

    pub fn get(&self, joined: &str) -> Option<&LexiconEntry> {
        self.entries.get(joined)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest indicator length present, in tokens.
    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    /// Entries sorted by indicator, for deterministic output.
    pub fn iter_sorted(&self) -> Vec<(&str, &LexiconEntry)> {
        let mut items: Vec<_> = self.entries.iter().map(|(k, v)| (k.as_str(), v)).collect();
        items.sort_by_key(|(k, _)| *k);
        items
    }

    /// Maps a token window to its classes using the longest entry that
    /// matches the front of the window: three tokens, then two, then one.
    pub fn map_indicator<S: AsRef<str>>(&self, tokens: &[S]) -> Option<ClassSet> {
        let mut scratch = String::new();
        self.match_at(tokens, &mut scratch)
            .map(|(_, classes)| classes)
    }

    /// Longest-match lookup at the start of `tokens`, returning the number
    /// of tokens consumed and the classes. `scratch` is reused by hot
    /// callers to avoid per-lookup allocation.
    pub fn match_at<S: AsRef<str>>(
        &self,
        tokens: &[S],
        scratch: &mut String,
    ) -> Option<(usize, ClassSet)> {
        let max = self.max_tokens.min(tokens.len()).min(MAX_INDICATOR_TOKENS);
        if max == 0 {
            return None;
        }
        scratch.clear();
        let mut ends = [0usize; MAX_INDICATOR_TOKENS];
        for (i, tok) in tokens[..max].iter().enumerate() {
            if i > 0 {
                scratch.push(' ');
            }
            scratch.push_str(tok.as_ref());
            ends[i] = scratch.len();
        }
        for n in (1..=max).rev() {
            scratch.truncate(ends[n - 1]);
            if let Some(entry) = self.entries.get(scratch.as_str()) {
                return Some((n, entry.classes));
            }
        }
        None
    }

    /// Parses TSV rows `indicator<TAB>class[,class...][<TAB>provenance]`.
    /// Rows without a provenance column default to `manual`.
    pub fn parse(source: &str, file: &str) -> Result<Self> {
        let mut lex = Self::new();
        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let (indicator, class_field, provenance) = match fields.as_slice() {
                [ind, cls] => (*ind, *cls, Provenance::Manual),
                [ind, cls, prov] => (
                    *ind,
                    *cls,
                    prov.parse()
                        .map_err(|e: CareError| CareError::parse(file, line_no, e.to_string()))?,
                ),
                _ => {
                    return Err(CareError::parse(
                        file,
                        line_no,
                        "expected `indicator<TAB>classes[<TAB>provenance]`",
                    ))
                }
            };
            let mut classes = ClassSet::empty();
            for name in class_field.split(',') {
                let class: AffectClass = name
                    .parse()
                    .map_err(|e: CareError| CareError::parse(file, line_no, e.to_string()))?;
                classes.insert(class);
            }
            lex.insert(indicator, classes, provenance)
                .map_err(|e| CareError::parse(file, line_no, e.to_string()))?;
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = read_to_string(path)?;
        Self::parse(&source, &path.display().to_string())
    }

    /// Serializes as `indicator<TAB>classes<TAB>provenance`, sorted by
    /// indicator.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (indicator, entry) in self.iter_sorted() {
            out.push_str(indicator);
            out.push('\t');
            out.push_str(&entry.classes.names().join(","));
            out.push('\t');
            out.push_str(entry.provenance.name());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_tsv().as_bytes())
    }

    /// The seed lexicon shipped with the crate (Seed provenance).
    pub fn seed() -> Self {
        Self::parse(
            include_str!("../data/seed/lexicon.tsv"),
            "<seed lexicon.tsv>",
        )
        .expect("seed lexicon parses")
    }
}

fn normalize_indicator(indicator: &str) -> Result<String> {
    let tokens: Vec<String> = indicator
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .collect();
    if tokens.is_empty() {
        return Err(CareError::Validation("empty indicator".into()));
    }
    if tokens.len() > MAX_INDICATOR_TOKENS {
        return Err(CareError::Validation(format!(
            "indicator `{indicator}` has {} tokens (maximum {MAX_INDICATOR_TOKENS})",
            tokens.len()
        )));
    }
    Ok(tokens.join(" "))
}
