//! The bootstrap expansion loop: mine n-grams from the comments of labeled
//! posts that matched no pattern, propose lexicon candidates (n-grams
//! frequent in exactly one class) and pattern candidates (n-grams frequent
//! across classes), and apply human-reviewed candidates.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregate::PostAnnotation;
use crate::corpus::Comment;
use crate::error::{CareError, Result};
use crate::io_util::read_to_string;
use crate::lexicon::{Lexicon, Provenance, MAX_INDICATOR_TOKENS};
use crate::matcher::Matcher;
use crate::pattern::{parse_patterns_named, CarePattern};
use crate::preprocess::preprocess_comment;
use crate::taxonomy::{AffectClass, ClassSet};
use crate::wordlists::WordLists;

pub const DEFAULT_F_LEXICON: u64 = 1000;
pub const DEFAULT_F_PATTERN: u64 = 100;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Minimum class-exclusive frequency for a lexicon candidate.
    pub f_lexicon: u64,
    /// Minimum cross-class total frequency for a pattern candidate.
    pub f_pattern: u64,
    /// Count each n-gram once per comment instead of per occurrence.
    #[serde(default)]
    pub count_distinct_comments: bool,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            f_lexicon: DEFAULT_F_LEXICON,
            f_pattern: DEFAULT_F_PATTERN,
            count_distinct_comments: false,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_lexicon > self.f_pattern && self.f_pattern > 0) {
            return Err(CareError::Validation(format!(
                "expansion thresholds must satisfy f_lexicon > f_pattern > 0 (got {} and {})",
                self.f_lexicon, self.f_pattern
            )));
        }
        Ok(())
    }
}

/// Per-class n-gram frequencies over `comm(a)`: the comments of posts
/// labeled `a` that matched no pattern.
#[derive(Debug, Clone, Default)]
pub struct NgramStats {
    per_class: [HashMap<String, u64>; 7],
}

impl NgramStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, class: AffectClass, ngram: String, n: u64) {
        *self.per_class[class.index()].entry(ngram).or_insert(0) += n;
    }

    pub fn count(&self, class: AffectClass, ngram: &str) -> u64 {
        self.per_class[class.index()]
            .get(ngram)
            .copied()
            .unwrap_or(0)
    }

    pub fn class_counts(&self, class: AffectClass) -> &HashMap<String, u64> {
        &self.per_class[class.index()]
    }

    pub fn total(&self, ngram: &str) -> u64 {
        AffectClass::ALL.iter().map(|&c| self.count(c, ngram)).sum()
    }

    pub fn classes_present(&self, ngram: &str) -> ClassSet {
        AffectClass::ALL
            .into_iter()
            .filter(|&c| self.count(c, ngram) > 0)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.per_class.iter().all(HashMap::is_empty)
    }

    /// Every distinct n-gram, sorted, for deterministic scans.
    pub fn all_ngrams(&self) -> Vec<&str> {
        let mut set: Vec<&str> = self
            .per_class
            .iter()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }
}

/// Word n-grams of orders 1..=3 within one token sequence.
fn sentence_ngrams(tokens: &[String], out: &mut Vec<String>) {
    for n in 1..=MAX_INDICATOR_TOKENS {
        if tokens.len() < n {
            break;
        }
        for window in tokens.windows(n) {
            out.push(window.join(" "));
        }
    }
}

/// Counts n-grams per class over the mining pool. A comment enters the
/// pool of class `a` when its post is labeled `a` and the comment produced
/// no match record at all; a multi-label post feeds every one of its
/// classes. N-grams never cross sentence boundaries and are taken from
/// preprocessed tokens.
pub fn collect_ngrams(
    labeled_posts: &[PostAnnotation],
    comments: &[Comment],
    matcher: &Matcher<'_>,
    cfg: &ExpansionConfig,
) -> NgramStats {
    let mut grouped: HashMap<&str, Vec<&Comment>> = HashMap::new();
    for comment in comments {
        grouped
            .entry(comment.post_id.as_str())
            .or_default()
            .push(comment);
    }

    let mut stats = NgramStats::new();
    let mut ngrams = Vec::new();
    for ann in labeled_posts {
        if ann.labels.is_empty() {
            continue;
        }
        let Some(group) = grouped.get(ann.post_id.as_str()) else {
            continue;
        };
        for comment in group {
            let label = matcher.label_comment(&comment.comment_id, &comment.text);
            if !label.records.is_empty() {
                continue;
            }
            ngrams.clear();
            for sentence in preprocess_comment(&comment.text, matcher.word_lists()) {
                sentence_ngrams(&sentence.tokens, &mut ngrams);
            }
            if cfg.count_distinct_comments {
                ngrams.sort_unstable();
                ngrams.dedup();
            }
            for ngram in &ngrams {
                for &class in &ann.labels {
                    stats.add(class, ngram.clone(), 1);
                }
            }
        }
    }
    stats
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconCandidate {
    pub ngram: String,
    pub class: AffectClass,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternCandidate {
    pub ngram: String,
    pub total_frequency: u64,
    pub classes: ClassSet,
}

/// An n-gram is a lexicon candidate for class `a` when its frequency in
/// `a` reaches `f_lexicon` while staying below `f_lexicon` in every other
/// class. N-grams made only of stop words are filtered out. Sorted by
/// frequency descending.
pub fn propose_lexicon_candidates(
    stats: &NgramStats,
    cfg: &ExpansionConfig,
    lists: &WordLists,
) -> Vec<LexiconCandidate> {
    let mut out = Vec::new();
    for class in AffectClass::ALL {
        for (ngram, &freq) in stats.class_counts(class) {
            if freq < cfg.f_lexicon {
                continue;
            }
            let exclusive = AffectClass::ALL
                .into_iter()
                .filter(|&b| b != class)
                .all(|b| stats.count(b, ngram) < cfg.f_lexicon);
            if !exclusive {
                continue;
            }
            if ngram.split(' ').all(|t| lists.is_stopword(t)) {
                continue;
            }
            out.push(LexiconCandidate {
                ngram: ngram.clone(),
                class,
                frequency: freq,
            });
        }
    }
    out.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.ngram.cmp(&b.ngram))
            .then_with(|| a.class.cmp(&b.class))
    });
    out
}

/// An n-gram is a pattern candidate when it occurs in at least two classes
/// and its total frequency reaches `f_pattern`. Candidates contained in a
/// longer candidate are dropped: they describe the same phrase, and the
/// longer form is the one worth turning into a pattern. Stop-word-only
/// n-grams are retained; pattern scaffolding is made of function words.
/// Sorted by total frequency descending.
pub fn propose_pattern_candidates(
    stats: &NgramStats,
    cfg: &ExpansionConfig,
) -> Vec<PatternCandidate> {
    let mut qualifying: Vec<PatternCandidate> = stats
        .all_ngrams()
        .into_iter()
        .filter_map(|ngram| {
            let classes = stats.classes_present(ngram);
            let total = stats.total(ngram);
            (classes.len() >= 2 && total >= cfg.f_pattern).then(|| PatternCandidate {
                ngram: ngram.to_string(),
                total_frequency: total,
                classes,
            })
        })
        .collect();

    let token_lists: Vec<Vec<&str>> = qualifying
        .iter()
        .map(|c| c.ngram.split(' ').collect())
        .collect();
    let keep: Vec<bool> = token_lists
        .iter()
        .map(|tokens| {
            !token_lists
                .iter()
                .any(|other| other.len() > tokens.len() && contains_contiguous(other, tokens))
        })
        .collect();
    let mut i = 0;
    qualifying.retain(|_| {
        let k = keep[i];
        i += 1;
        k
    });

    qualifying.sort_by(|a, b| {
        b.total_frequency
            .cmp(&a.total_frequency)
            .then_with(|| a.ngram.cmp(&b.ngram))
    });
    qualifying
}

fn contains_contiguous(haystack: &[&str], needle: &[&str]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// `ngram<TAB>class<TAB>frequency`
pub fn lexicon_candidates_tsv(candidates: &[LexiconCandidate]) -> String {
    let mut out = String::new();
    for c in candidates {
        out.push_str(&format!("{}\t{}\t{}\n", c.ngram, c.class, c.frequency));
    }
    out
}

/// `ngram<TAB>total_frequency<TAB>classes`
pub fn pattern_candidates_tsv(candidates: &[PatternCandidate]) -> String {
    let mut out = String::new();
    for c in candidates {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            c.ngram,
            c.total_frequency,
            c.classes.names().join(",")
        ));
    }
    out
}

/// Outcome of a human review pass over the candidate files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReviewOutcome {
    /// Accepted lexicon candidates as (ngram, class).
    pub lexicon: Vec<(String, AffectClass)>,
    /// Accepted pattern candidates, already rewritten in the DSL.
    pub patterns: Vec<CarePattern>,
}

/// Parses a review file. Lines:
///
/// ```text
/// accept-lex <ngram tokens...> <class>
/// accept-pat <pattern dsl line>
/// reject ...            # ignored
/// ```
pub fn parse_review(source: &str, file: &str) -> Result<ReviewOutcome> {
    let mut outcome = ReviewOutcome::default();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("reject") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("accept-lex ") {
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.len() < 2 {
                return Err(CareError::parse(
                    file,
                    line_no,
                    "accept-lex needs an ngram and a class",
                ));
            }
            let class: AffectClass = words[words.len() - 1]
                .parse()
                .map_err(|e: CareError| CareError::parse(file, line_no, e.to_string()))?;
            let ngram = words[..words.len() - 1].join(" ").to_lowercase();
            outcome.lexicon.push((ngram, class));
        } else if let Some(rest) = line.strip_prefix("accept-pat ") {
            let parsed = parse_patterns_named(rest.trim(), file).map_err(|e| match e {
                CareError::Parse { file, msg, .. } => CareError::Parse {
                    file,
                    line: line_no,
                    msg,
                },
                other => other,
            })?;
            outcome.patterns.extend(parsed);
        } else {
            return Err(CareError::parse(
                file,
                line_no,
                format!("unknown review directive `{line}` (expected accept-lex, accept-pat, or reject)"),
            ));
        }
    }
    Ok(outcome)
}

pub fn load_review(path: impl AsRef<Path>) -> Result<ReviewOutcome> {
    let path = path.as_ref();
    let source = read_to_string(path)?;
    parse_review(&source, &path.display().to_string())
}

/// Produces an expanded lexicon and pattern list from reviewed candidates.
/// Inputs are untouched; accepted lexicon entries carry `expansion`
/// provenance.
pub fn apply_reviewed_candidates(
    lexicon: &Lexicon,
    patterns: &[CarePattern],
    review: &ReviewOutcome,
) -> Result<(Lexicon, Vec<CarePattern>)> {
    let mut new_lexicon = lexicon.clone();
    for (ngram, class) in &review.lexicon {
        new_lexicon.insert(ngram, ClassSet::of(&[*class]), Provenance::Expansion)?;
    }

    let mut new_patterns = patterns.to_vec();
    let mut names: HashSet<&str> = patterns.iter().map(|p| p.name.as_str()).collect();
    for pattern in &review.patterns {
        if !names.insert(pattern.name.as_str()) {
            return Err(CareError::Validation(format!(
                "accepted pattern `{}` clashes with an existing pattern name",
                pattern.name
            )));
        }
        new_patterns.push(pattern.clone());
    }
    Ok((new_lexicon, new_patterns))
}
