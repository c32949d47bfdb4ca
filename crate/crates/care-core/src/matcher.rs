//! Sentence matching: applies compiled patterns to preprocessed sentences
//! and extracts (pattern, exaggerators, indicator, classes) records.

use std::collections::HashSet;

use crate::lexicon::Lexicon;
use crate::pattern::{CarePattern, Slot};
use crate::preprocess::{preprocess_comment, PreprocessedSentence};
use crate::taxonomy::ClassSet;
use crate::wordlists::WordLists;

/// Maximum number of filler tokens tolerated between two slots once a
/// match is anchored.
pub const DEFAULT_GAP_LIMIT: usize = 2;

/// One comment-level extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub comment_id: String,
    pub pattern_name: String,
    pub exaggerators: Vec<String>,
    pub indicator: Vec<String>,
    pub classes: ClassSet,
    pub sentence_index: usize,
}

impl MatchRecord {
    /// The indicator as the space-joined form used by exclusion lists.
    pub fn indicator_key(&self) -> String {
        self.indicator.join(" ")
    }
}

/// A raw match within a single sentence, in token indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceMatch {
    pub pattern_index: usize,
    /// Matched token range `[start, end)`; `end` is just past the indicator.
    pub span: (usize, usize),
    pub exaggerators: Vec<usize>,
    /// Indicator window as `(start, len)`.
    pub indicator: (usize, usize),
    pub classes: ClassSet,
}

/// All labels extracted from one comment.
#[derive(Debug, Clone, Default)]
pub struct CommentLabel {
    pub classes: ClassSet,
    pub records: Vec<MatchRecord>,
}

/// Cheap per-pattern test for whether a match could anchor at a token.
enum Anchor {
    /// First consumed token must be one of these literals.
    Tokens(HashSet<String>),
    /// One of the literals, or any exaggerator.
    TokensOrExaggerator(HashSet<String>),
    /// No useful pre-filter.
    Any,
}

impl Anchor {
    fn of(pattern: &CarePattern) -> Anchor {
        let mut tokens: HashSet<String> = HashSet::new();
        for slot in &pattern.slots {
            match slot {
                Slot::Literal {
                    alternatives,
                    optional,
                } => {
                    for alt in alternatives {
                        tokens.insert(alt[0].clone());
                    }
                    if !optional {
                        return Anchor::Tokens(tokens);
                    }
                }
                Slot::Exaggerators { required } => {
                    if *required {
                        return Anchor::TokensOrExaggerator(tokens);
                    }
                    // An empty E* cannot anchor by itself; keep scanning.
                    return Anchor::Any;
                }
                Slot::Indicator => return Anchor::Any,
            }
        }
        Anchor::Any
    }

    fn admits(&self, token: &str, lists: &WordLists) -> bool {
        match self {
            Anchor::Tokens(set) => set.contains(token),
            Anchor::TokensOrExaggerator(set) => set.contains(token) || lists.is_exaggerator(token),
            Anchor::Any => true,
        }
    }
}

/// Read-only matching context over compiled patterns, the lexicon, and the
/// word lists. Safe to share across threads.
pub struct Matcher<'a> {
    patterns: &'a [CarePattern],
    lexicon: &'a Lexicon,
    lists: &'a WordLists,
    anchors: Vec<Anchor>,
    gap_limit: usize,
}

impl<'a> Matcher<'a> {
    pub fn new(patterns: &'a [CarePattern], lexicon: &'a Lexicon, lists: &'a WordLists) -> Self {
        let anchors = patterns.iter().map(Anchor::of).collect();
        Self {
            patterns,
            lexicon,
            lists,
            anchors,
            gap_limit: DEFAULT_GAP_LIMIT,
        }
    }

    pub fn with_gap_limit(mut self, gap_limit: usize) -> Self {
        self.gap_limit = gap_limit;
        self
    }

    /// Disables the per-pattern anchor pre-filter, scanning every offset
    /// exhaustively. Only useful for checking the pre-filter itself.
    #[doc(hidden)]
    pub fn with_exhaustive_scan(mut self) -> Self {
        self.anchors = self.patterns.iter().map(|_| Anchor::Any).collect();
        self
    }

    pub fn patterns(&self) -> &[CarePattern] {
        self.patterns
    }

    pub fn lexicon(&self) -> &Lexicon {
        self.lexicon
    }

    pub fn word_lists(&self) -> &WordLists {
        self.lists
    }

    /// Matches every pattern against the sentence.
    ///
    /// A sentence containing any negation token yields no matches at all.
    /// Of overlapping matches that resolve the same indicator occurrence,
    /// only the widest survives, and each (pattern, indicator) pair is
    /// reported at most once.
    pub fn match_sentence(&self, sentence: &PreprocessedSentence) -> Vec<SentenceMatch> {
        let tokens = &sentence.tokens;
        if tokens.is_empty() || tokens.iter().any(|t| self.lists.is_negation(t)) {
            return Vec::new();
        }

        let mut raw: Vec<SentenceMatch> = Vec::new();
        let mut scratch = String::new();
        for (pi, pattern) in self.patterns.iter().enumerate() {
            for start in 0..tokens.len() {
                if !self.anchors[pi].admits(&tokens[start], self.lists) {
                    continue;
                }
                let mut exaggerators = Vec::new();
                if let Some(tail) = self.match_slots(
                    &pattern.slots,
                    tokens,
                    start,
                    false,
                    &mut exaggerators,
                    &mut scratch,
                ) {
                    raw.push(SentenceMatch {
                        pattern_index: pi,
                        span: (start, tail.end),
                        exaggerators,
                        indicator: tail.indicator,
                        classes: tail.classes,
                    });
                }
            }
        }

        // Matches that share an indicator occurrence all end at the same
        // token, so the widest one is the one starting earliest. Narrower
        // ones are sub-matches of it and add no information.
        let mut kept: Vec<SentenceMatch> = Vec::with_capacity(raw.len());
        for m in &raw {
            let widest = raw
                .iter()
                .filter(|o| o.indicator.0 == m.indicator.0)
                .map(|o| o.span.0)
                .min()
                .expect("group is non-empty");
            if m.span.0 == widest {
                kept.push(m.clone());
            }
        }

        let mut seen: HashSet<(usize, String)> = HashSet::new();
        kept.retain(|m| {
            let key = (
                m.pattern_index,
                tokens[m.indicator.0..m.indicator.0 + m.indicator.1].join(" "),
            );
            seen.insert(key)
        });
        kept
    }

    /// Preprocesses a comment and collects match records from every
    /// sentence; `classes` is their union.
    pub fn label_comment(&self, comment_id: &str, text: &str) -> CommentLabel {
        let mut label = CommentLabel::default();
        for (sentence_index, sentence) in preprocess_comment(text, self.lists).iter().enumerate() {
            for m in self.match_sentence(sentence) {
                label.classes = label.classes.union(m.classes);
                label
                    .records
                    .push(self.to_record(comment_id, sentence, sentence_index, &m));
            }
        }
        label
    }

    /// Converts an index-based sentence match into an owned record.
    pub fn to_record(
        &self,
        comment_id: &str,
        sentence: &PreprocessedSentence,
        sentence_index: usize,
        m: &SentenceMatch,
    ) -> MatchRecord {
        MatchRecord {
            comment_id: comment_id.to_string(),
            pattern_name: self.patterns[m.pattern_index].name.clone(),
            exaggerators: m
                .exaggerators
                .iter()
                .map(|&i| sentence.tokens[i].clone())
                .collect(),
            indicator: sentence.tokens[m.indicator.0..m.indicator.0 + m.indicator.1].to_vec(),
            classes: m.classes,
            sentence_index,
        }
    }

    fn match_slots(
        &self,
        slots: &[Slot],
        tokens: &[String],
        pos: usize,
        consumed: bool,
        exaggerators: &mut Vec<usize>,
        scratch: &mut String,
    ) -> Option<MatchTail> {
        let (slot, rest) = slots.split_first()?;
        let gap_max = if consumed { self.gap_limit } else { 0 };
        for gap in 0..=gap_max {
            let p = pos + gap;
            if p >= tokens.len() {
                break;
            }
            if gap > 0 {
                // Only untracked filler words may be skipped; an
                // exaggerator belongs to the E slot and a negation blocks
                // matching outright.
                let skipped = &tokens[p - 1];
                if self.lists.is_exaggerator(skipped) || self.lists.is_negation(skipped) {
                    break;
                }
            }
            match slot {
                Slot::Literal {
                    alternatives,
                    optional,
                } => {
                    if let Some(len) = match_literal(alternatives, tokens, p) {
                        if let Some(tail) =
                            self.match_slots(rest, tokens, p + len, true, exaggerators, scratch)
                        {
                            return Some(tail);
                        }
                    }
                    if *optional && gap == 0 {
                        if let Some(tail) =
                            self.match_slots(rest, tokens, pos, consumed, exaggerators, scratch)
                        {
                            return Some(tail);
                        }
                    }
                }
                Slot::Exaggerators { required } => {
                    let mut run = 0;
                    while p + run < tokens.len() && self.lists.is_exaggerator(&tokens[p + run]) {
                        run += 1;
                    }
                    let min = usize::from(*required);
                    // Greedy run first, backing off if the rest cannot match.
                    for take in (min..=run).rev() {
                        if take == 0 && gap > 0 {
                            // An empty run must not extend the gap budget.
                            continue;
                        }
                        exaggerators.extend(p..p + take);
                        if let Some(tail) = self.match_slots(
                            rest,
                            tokens,
                            p + take,
                            consumed || take > 0,
                            exaggerators,
                            scratch,
                        ) {
                            return Some(tail);
                        }
                        exaggerators.truncate(exaggerators.len() - take);
                    }
                }
                Slot::Indicator => {
                    if let Some((len, classes)) = self.lexicon.match_at(&tokens[p..], scratch) {
                        return Some(MatchTail {
                            end: p + len,
                            indicator: (p, len),
                            classes,
                        });
                    }
                }
            }
        }
        None
    }
}

struct MatchTail {
    end: usize,
    indicator: (usize, usize),
    classes: ClassSet,
}

fn match_literal(alternatives: &[Vec<String>], tokens: &[String], pos: usize) -> Option<usize> {
    alternatives.iter().find_map(|alt| {
        let end = pos + alt.len();
        (end <= tokens.len() && tokens[pos..end].iter().zip(alt).all(|(t, a)| t == a))
            .then_some(alt.len())
    })
}

/// Closed-form size of the pattern space: `expressions` is the number of
/// distinct (pattern, indicator) pairs and `instantiations` additionally
/// varies the exaggerator.
pub fn count_instantiations(n_patterns: u64, n_indicators: u64, n_exaggerators: u64) -> (u64, u64) {
    let expressions = n_patterns * n_indicators;
    (expressions, expressions * n_exaggerators)
}
