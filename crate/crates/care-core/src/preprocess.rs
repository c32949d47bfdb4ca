//! Comment preprocessing: sentence splitting, lowercasing tokenization with
//! elongation normalization, and contrast-clause truncation.
//!
//! Stop words are deliberately retained; the pattern slots depend on them.

use crate::wordlists::WordLists;

/// One preprocessed sentence of a comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessedSentence {
    pub tokens: Vec<String>,
    /// True when a contrast marker caused the front of the sentence to be
    /// dropped.
    pub truncated: bool,
}

/// Splits raw text into sentence chunks on terminal punctuation and
/// newlines. Chunks may be empty or whitespace-only; callers tokenize and
/// discard empties.
pub fn split_sentences(text: &str) -> impl Iterator<Item = &str> {
    text.split(['.', '!', '?', '\n'])
}

/// Lowercases and tokenizes one sentence. Tokens are runs of alphanumeric
/// characters; an apostrophe between two alphanumerics stays inside its
/// token ("i'm", "don't"). Runs of three or more identical characters
/// collapse to one ("soooo" becomes "so") while pairs survive ("really").
pub fn tokenize(sentence: &str) -> Vec<String> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut tokens = Vec::new();
    let mut current = TokenBuilder::default();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            for lc in c.to_lowercase() {
                current.push(lc);
            }
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push('\'');
        } else {
            current.flush_into(&mut tokens);
        }
    }
    current.flush_into(&mut tokens);
    tokens
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

#[derive(Default)]
struct TokenBuilder {
    buf: String,
    run_char: Option<char>,
    run_len: usize,
}

impl TokenBuilder {
    fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    fn push(&mut self, c: char) {
        if self.run_char == Some(c) {
            self.run_len += 1;
        } else {
            self.run_char = Some(c);
            self.run_len = 1;
        }
        match self.run_len {
            1 | 2 => self.buf.push(c),
            // Third occurrence: shrink the stored pair down to one; longer
            // runs change nothing further.
            3 => {
                self.buf.pop();
            }
            _ => {}
        }
    }

    fn flush_into(&mut self, tokens: &mut Vec<String>) {
        if !self.buf.is_empty() {
            tokens.push(std::mem::take(&mut self.buf));
        }
        self.run_char = None;
        self.run_len = 0;
    }
}

/// Drops everything up to and including the last contrast marker. Returns
/// whether truncation happened.
fn truncate_contrast(tokens: &mut Vec<String>, lists: &WordLists) -> bool {
    let last_marker = tokens.iter().rposition(|t| lists.is_contrast_marker(t));
    match last_marker {
        Some(idx) => {
            tokens.drain(..=idx);
            true
        }
        None => false,
    }
}

/// Full preprocessing of one comment. Sentences that end up with no tokens
/// (empty chunks, or fully truncated) are dropped.
pub fn preprocess_comment(text: &str, lists: &WordLists) -> Vec<PreprocessedSentence> {
    let mut out = Vec::new();
    for chunk in split_sentences(text) {
        let mut tokens = tokenize(chunk);
        if tokens.is_empty() {
            continue;
        }
        let truncated = truncate_contrast(&mut tokens, lists);
        if tokens.is_empty() {
            continue;
        }
        out.push(PreprocessedSentence { tokens, truncated });
    }
    out
}

/// Renders preprocessed tokens back to text. Preprocessing a rendered
/// sentence is a fixed point, which the tests rely on.
pub fn render_tokens(tokens: &[String]) -> String {
    tokens.join(" ")
}
